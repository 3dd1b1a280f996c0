#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "favtgan/checkpoint.hpp"
#include "favtgan/dataset.hpp"

namespace favtgan {

// Per-dataset mean SSIM/PSNR, with optional relative-change columns against
// a named baseline run.
struct EvalReport {
    std::string run_id;
    std::string dataset_name;
    double mean_ssim = 0.0;
    double mean_psnr = 0.0;
    int n_images = 0;
    std::optional<std::string> baseline_run_id;
    std::optional<double> ssim_pct;
    std::optional<double> psnr_pct;

    bool operator==(const EvalReport&) const = default;
};

// Generation hook: maps a test pair to the generated thermal tensor
// [1,3,S,S]. Lets tests substitute oracle generators (e.g. identity on the
// real thermal image).
using GenerateFn = std::function<Tensor(const ImagePair&)>;

// SSIM over the 3 channels averaged (default), or on a single Rec.601
// luminance conversion (sensitivity-check alternative).
enum class SsimChannelPolicy { channel_mean, luminance };
SsimChannelPolicy parse_ssim_channel_policy(const std::string& text);

// Mean per-image SSIM/PSNR over `pairs`, comparing generated thermal images
// against the real ones in the 8-bit [0,255] domain. Infinite PSNR values
// (identical images) are excluded from the mean with a warning on stderr.
EvalReport evaluate_pairs(const std::vector<ImagePair>& pairs, const std::string& dataset_name,
                          const std::string& run_id, const GenerateFn& generate,
                          SsimChannelPolicy ssim_policy = SsimChannelPolicy::channel_mean);

// Label used to condition the generator at test time: the image's true
// sensor label (default, deployment-faithful) or a uniformly sampled one
// (ablation).
enum class EvalLabelPolicy { true_label, sampled };
EvalLabelPolicy parse_eval_label_policy(const std::string& text);

struct EvalOptions {
    SsimChannelPolicy ssim_policy = SsimChannelPolicy::channel_mean;
    EvalLabelPolicy label_policy = EvalLabelPolicy::true_label;
    std::uint64_t seed = 0;  // drives noise channels and sampled labels
};

// Evaluates a trained run on the test split of each manifest. Every
// manifest's dataset must be present in the run's label registry.
std::vector<EvalReport> evaluate_checkpoint(const Checkpoint& ckpt,
                                            const std::vector<DatasetManifest>& manifests,
                                            const std::string& run_id,
                                            const EvalOptions& options = {});

// Fills the pct columns: (current - baseline) / baseline * 100.
EvalReport relative_change(EvalReport current, const EvalReport& baseline);

enum class ReportFormat { text_table, csv };

ReportFormat parse_report_format(const std::string& text);

// Deterministic rendering: SSIM/PSNR with 3 decimals, percents with 2; rows
// grouped by dataset (first-appearance order), input order kept within a
// group.
std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format);

void write_eval_reports_json(const std::vector<EvalReport>& reports,
                             const std::filesystem::path& path);
std::vector<EvalReport> read_eval_reports_json(const std::filesystem::path& path);

}  // namespace favtgan
