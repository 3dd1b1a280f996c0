#include "favtgan/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "favtgan/errors.hpp"
#include "favtgan/image.hpp"
#include "favtgan/metrics.hpp"
#include "favtgan/trainer.hpp"

namespace favtgan {

SsimChannelPolicy parse_ssim_channel_policy(const std::string& text) {
    if (text == "channel_mean") return SsimChannelPolicy::channel_mean;
    if (text == "luminance") return SsimChannelPolicy::luminance;
    throw ValidationError("unknown ssim channel policy '" + text +
                          "' (expected channel_mean|luminance)");
}

EvalLabelPolicy parse_eval_label_policy(const std::string& text) {
    if (text == "true_label") return EvalLabelPolicy::true_label;
    if (text == "sampled") return EvalLabelPolicy::sampled;
    throw ValidationError("unknown label policy '" + text + "' (expected true_label|sampled)");
}

namespace {

// Rec.601 luminance, single channel.
MetricImage to_luminance(const MetricImage& m) {
    MetricImage out;
    out.h = m.h;
    out.w = m.w;
    out.c = 1;
    out.v.resize(static_cast<std::size_t>(m.h) * m.w);
    for (int y = 0; y < m.h; ++y)
        for (int x = 0; x < m.w; ++x)
            out.at(0, y, x) = 0.299 * m.at(0, y, x) + 0.587 * m.at(1, y, x) + 0.114 * m.at(2, y, x);
    return out;
}

}  // namespace

EvalReport evaluate_pairs(const std::vector<ImagePair>& pairs, const std::string& dataset_name,
                          const std::string& run_id, const GenerateFn& generate,
                          SsimChannelPolicy ssim_policy) {
    if (pairs.empty()) throw ValidationError("evaluate: no pairs to evaluate");
    EvalReport report;
    report.run_id = run_id;
    report.dataset_name = dataset_name;
    report.n_images = static_cast<int>(pairs.size());

    double ssim_acc = 0.0, psnr_acc = 0.0;
    int psnr_count = 0;
    for (const ImagePair& pair : pairs) {
        const Tensor generated = generate(pair);
        const MetricImage real = to_metric_image(tensor_to_image(pair.thermal));
        const MetricImage fake = to_metric_image(tensor_to_image(generated));
        ssim_acc += ssim_policy == SsimChannelPolicy::luminance
                        ? ssim(to_luminance(real), to_luminance(fake))
                        : ssim(real, fake);
        const double p = psnr(real, fake);
        if (std::isinf(p)) {
            std::cerr << "warning: pair '" << pair.pair_id
                      << "' has infinite PSNR (identical images); excluded from the mean\n";
        } else {
            psnr_acc += p;
            ++psnr_count;
        }
    }
    report.mean_ssim = ssim_acc / static_cast<double>(pairs.size());
    report.mean_psnr = psnr_count > 0 ? psnr_acc / static_cast<double>(psnr_count)
                                      : std::numeric_limits<double>::infinity();
    return report;
}

std::vector<EvalReport> evaluate_checkpoint(const Checkpoint& ckpt,
                                            const std::vector<DatasetManifest>& manifests,
                                            const std::string& run_id,
                                            const EvalOptions& options) {
    if (manifests.empty()) throw ValidationError("evaluate: no manifests given");
    const ExperimentConfig& cfg = ckpt.config;
    const int n_labels = static_cast<int>(ckpt.registry.size());
    std::unique_ptr<UNetGenerator> g = generator_from_checkpoint(ckpt);

    std::vector<EvalReport> reports;
    for (std::size_t mi = 0; mi < manifests.size(); ++mi) {
        const DatasetManifest& manifest = manifests[mi];
        const int label = registry_label_for(ckpt.registry, manifest.dataset_name);
        std::vector<ImagePair> pairs = load_dataset(manifest, Split::test, cfg.image_size);
        for (ImagePair& p : pairs) p.label = label;
        Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(mi)));
        auto generate = [&](const ImagePair& pair) {
            const int cond_label = options.label_policy == EvalLabelPolicy::sampled
                                       ? rng.uniform_int(n_labels)
                                       : pair.label;
            const Tensor cond =
                inference_condition<float>(cond_label, n_labels, cfg.mode, cfg.image_size, rng);
            return g->forward(concat_channels(pair.visible, cond));
        };
        reports.push_back(
            evaluate_pairs(pairs, manifest.dataset_name, run_id, generate, options.ssim_policy));
    }
    return reports;
}

EvalReport relative_change(EvalReport current, const EvalReport& baseline) {
    if (current.dataset_name != baseline.dataset_name)
        throw ValidationError("relative_change: dataset mismatch ('" + current.dataset_name +
                              "' vs '" + baseline.dataset_name + "')");
    current.baseline_run_id = baseline.run_id;
    current.ssim_pct = (current.mean_ssim - baseline.mean_ssim) / baseline.mean_ssim * 100.0;
    current.psnr_pct = (current.mean_psnr - baseline.mean_psnr) / baseline.mean_psnr * 100.0;
    return current;
}

ReportFormat parse_report_format(const std::string& text) {
    if (text == "text_table") return ReportFormat::text_table;
    if (text == "csv") return ReportFormat::csv;
    throw ValidationError("unknown report format '" + text + "' (expected text_table|csv)");
}

namespace {

std::string fmt3(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt_pct(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%%", *v);
    return buf;
}

constexpr const char* kPctFootnote =
    "Percent columns are computed from unrounded metric values; recomputing them from the "
    "rounded values printed above may differ in the last digit.";

// Rows regrouped by dataset (first-appearance order), original order within
// each group.
std::vector<const EvalReport*> grouped(const std::vector<EvalReport>& reports) {
    std::vector<std::string> dataset_order;
    for (const EvalReport& r : reports)
        if (std::find(dataset_order.begin(), dataset_order.end(), r.dataset_name) ==
            dataset_order.end())
            dataset_order.push_back(r.dataset_name);
    std::vector<const EvalReport*> rows;
    for (const std::string& ds : dataset_order)
        for (const EvalReport& r : reports)
            if (r.dataset_name == ds) rows.push_back(&r);
    return rows;
}

}  // namespace

std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format) {
    if (reports.empty()) throw ValidationError("render_report: no reports");
    const std::vector<const EvalReport*> rows = grouped(reports);
    const bool any_pct = std::any_of(rows.begin(), rows.end(),
                                     [](const EvalReport* r) { return r->ssim_pct.has_value(); });
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << "dataset,experiment,ssim,psnr,ssim_pct,psnr_pct\n";
        for (const EvalReport* r : rows)
            out << r->dataset_name << "," << r->run_id << "," << fmt3(r->mean_ssim) << ","
                << fmt3(r->mean_psnr) << "," << fmt_pct(r->ssim_pct) << ","
                << fmt_pct(r->psnr_pct) << "\n";
        if (any_pct) out << "# " << kPctFootnote << "\n";
        return out.str();
    }

    const std::vector<std::string> header = {"Dataset", "Experiment", "SSIM",
                                             "PSNR",    "SSIM %",     "PSNR %"};
    std::vector<std::vector<std::string>> cells;
    for (const EvalReport* r : rows)
        cells.push_back({r->dataset_name, r->run_id, fmt3(r->mean_ssim), fmt3(r->mean_psnr),
                         fmt_pct(r->ssim_pct), fmt_pct(r->psnr_pct)});
    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        widths[c] = header[c].size();
        for (const auto& row : cells) widths[c] = std::max(widths[c], row[c].size());
    }
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size()) out << std::string(widths[c] - row[c].size() + 2, ' ');
        }
        out << "\n";
    };
    emit_row(header);
    for (const auto& row : cells) emit_row(row);
    if (any_pct) out << "# " << kPctFootnote << "\n";
    return out.str();
}

namespace {

nlohmann::ordered_json report_to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["dataset_name"] = r.dataset_name;
    if (std::isfinite(r.mean_ssim))
        j["mean_ssim"] = r.mean_ssim;
    else
        j["mean_ssim"] = nullptr;
    if (std::isfinite(r.mean_psnr))
        j["mean_psnr"] = r.mean_psnr;
    else
        j["mean_psnr"] = nullptr;
    j["n_images"] = r.n_images;
    if (r.baseline_run_id) j["baseline_run_id"] = *r.baseline_run_id;
    if (r.ssim_pct) j["ssim_pct"] = *r.ssim_pct;
    if (r.psnr_pct) j["psnr_pct"] = *r.psnr_pct;
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.run_id = j.at("run_id").get<std::string>();
    r.dataset_name = j.at("dataset_name").get<std::string>();
    r.mean_ssim = j.at("mean_ssim").is_null() ? std::numeric_limits<double>::infinity()
                                              : j.at("mean_ssim").get<double>();
    r.mean_psnr = j.at("mean_psnr").is_null() ? std::numeric_limits<double>::infinity()
                                              : j.at("mean_psnr").get<double>();
    r.n_images = j.at("n_images").get<int>();
    if (j.contains("baseline_run_id")) r.baseline_run_id = j.at("baseline_run_id").get<std::string>();
    if (j.contains("ssim_pct")) r.ssim_pct = j.at("ssim_pct").get<double>();
    if (j.contains("psnr_pct")) r.psnr_pct = j.at("psnr_pct").get<double>();
    return r;
}

}  // namespace

void write_eval_reports_json(const std::vector<EvalReport>& reports,
                             const std::filesystem::path& path) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const EvalReport& r : reports) j.push_back(report_to_json(r));
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write report file: " + path.string());
    out << j.dump(2) << "\n";
}

std::vector<EvalReport> read_eval_reports_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open report file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed report file " + path.string() + ": " + e.what());
    }
    std::vector<EvalReport> reports;
    try {
        if (!j.is_array()) throw ValidationError("report file must hold a JSON array");
        for (const auto& item : j) reports.push_back(report_from_json(item));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("report file " + path.string() + ": " + e.what());
    }
    return reports;
}

}  // namespace favtgan
