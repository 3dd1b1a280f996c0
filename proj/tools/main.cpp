// favtgan command-line tool: experiment lifecycle (synthetic data, training,
// evaluation, reporting, config inspection) behind one binary.
//
// Exit codes: 0 success, 1 validation/user error, 2 runtime failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "favtgan/config.hpp"
#include "favtgan/errors.hpp"
#include "favtgan/evaluate.hpp"
#include "favtgan/synth.hpp"
#include "favtgan/trainer.hpp"

namespace {

struct SynthArgs {
    int n = 16;
    std::string rule = "channel_inversion";
    std::uint64_t seed = 0;
    std::string out;
    int image_size = 64;
    std::string name = "synthetic";
};

struct TrainArgs {
    std::string config;
    std::string resume;
    std::int64_t max_steps = -1;
    bool progress = false;
};

struct EvaluateArgs {
    std::string ckpt;
    std::vector<std::string> manifests;
    std::string baseline_report;
    std::string out;
    std::string run_id;
    std::uint64_t seed = 0;
    std::string ssim_channel_policy = "channel_mean";
    std::string label_policy = "true_label";
};

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string format = "text_table";
    std::string out;
};

struct InspectArgs {
    std::string config;
};

int run_synth(const SynthArgs& args) {
    const auto out_dir = favtgan::resolve_output_path(args.out);
    favtgan::synthesize_dataset(args.n, args.image_size, args.seed,
                                favtgan::parse_synth_rule(args.rule), out_dir, args.name);
    std::cout << "wrote " << args.n << " pairs to " << out_dir.string() << "\n";
    return 0;
}

int run_train(const TrainArgs& args) {
    const favtgan::ExperimentConfig config = favtgan::load_config(args.config);
    favtgan::TrainOptions options;
    options.resume = args.resume;
    options.max_steps = args.max_steps;
    options.progress = args.progress;
    favtgan::train(config, options);
    std::cout << "run directory: " << favtgan::resolve_output_path(config.output_dir).string()
              << "\n";
    return 0;
}

int run_evaluate(const EvaluateArgs& args) {
    const favtgan::Checkpoint ckpt = favtgan::read_checkpoint(args.ckpt);
    std::vector<favtgan::DatasetManifest> manifests;
    for (const std::string& m : args.manifests) manifests.push_back(favtgan::load_manifest(m));
    const std::string run_id =
        args.run_id.empty() ? ckpt.config_hash.substr(0, 12) : args.run_id;
    favtgan::EvalOptions options;
    options.ssim_policy = favtgan::parse_ssim_channel_policy(args.ssim_channel_policy);
    options.label_policy = favtgan::parse_eval_label_policy(args.label_policy);
    options.seed = args.seed;
    std::vector<favtgan::EvalReport> reports =
        favtgan::evaluate_checkpoint(ckpt, manifests, run_id, options);

    if (!args.baseline_report.empty()) {
        const std::vector<favtgan::EvalReport> baselines =
            favtgan::read_eval_reports_json(args.baseline_report);
        for (favtgan::EvalReport& r : reports)
            for (const favtgan::EvalReport& b : baselines)
                if (b.dataset_name == r.dataset_name) {
                    r = favtgan::relative_change(r, b);
                    break;
                }
    }
    if (!args.out.empty()) favtgan::write_eval_reports_json(reports, args.out);
    std::cout << favtgan::render_report(reports, favtgan::ReportFormat::text_table);
    return 0;
}

int run_report(const ReportArgs& args) {
    std::vector<favtgan::EvalReport> reports;
    for (const std::string& input : args.inputs)
        for (favtgan::EvalReport& r : favtgan::read_eval_reports_json(input))
            reports.push_back(std::move(r));
    const std::string rendered =
        favtgan::render_report(reports, favtgan::parse_report_format(args.format));
    if (args.out.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(args.out);
        if (!out) throw favtgan::RuntimeFailure("cannot write report: " + args.out);
        out << rendered;
    }
    return 0;
}

int run_inspect(const InspectArgs& args) {
    const favtgan::ExperimentConfig config = favtgan::load_config(args.config);
    std::cout << "valid config (hash " << favtgan::config_hash(config) << ")\n";
    std::cout << favtgan::canonical_config_json(config) << "\n";
    std::cout << "label registry:\n";
    for (std::size_t i = 0; i < config.datasets.size(); ++i) {
        std::cout << "  id " << i << ": " << config.datasets[i];
        try {
            const favtgan::DatasetManifest m = favtgan::load_manifest(config.datasets[i]);
            std::cout << " -> dataset '" << m.dataset_name << "', family "
                      << favtgan::to_string(m.sensor_family) << ", " << m.pairs.size()
                      << " pairs";
        } catch (const std::exception&) {
            std::cout << " (manifest not readable; registry id assigned by position)";
        }
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"favtgan: visible-to-thermal face translation experiments"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth-data", "Generate a synthetic paired dataset");
    synth->add_option("--n", synth_args.n, "Number of pairs")->required();
    synth->add_option("--rule", synth_args.rule,
                      "Thermal derivation rule: channel_inversion|blur_plus_bias|intensity_remap")
        ->required();
    synth->add_option("--seed", synth_args.seed, "RNG seed")->required();
    synth->add_option("--out", synth_args.out, "Output directory")->required();
    synth->add_option("--image-size", synth_args.image_size, "Square image size (default 64)");
    synth->add_option("--name", synth_args.name, "Dataset name (default 'synthetic')");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train one experiment from a config file");
    train->add_option("--config", train_args.config, "Experiment config path")->required();
    train->add_option("--resume", train_args.resume, "Checkpoint to resume from");
    train->add_option("--max-steps", train_args.max_steps,
                      "Stop after this many global steps (debugging)");
    train->add_flag("--progress", train_args.progress, "Per-epoch progress on stderr");

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on test splits");
    evaluate->add_option("--ckpt", eval_args.ckpt, "Checkpoint path")->required();
    evaluate->add_option("--manifest", eval_args.manifests, "Dataset manifest(s) to evaluate")
        ->required();
    evaluate->add_option("--baseline-report", eval_args.baseline_report,
                         "Baseline report JSON for relative-change columns");
    evaluate->add_option("--out", eval_args.out, "Write the EvalReport JSON here");
    evaluate->add_option("--run-id", eval_args.run_id, "Run identifier (default: config hash)");
    evaluate->add_option("--seed", eval_args.seed, "Evaluation RNG seed (gaussian_noise mode)");
    evaluate->add_option("--ssim-channel-policy", eval_args.ssim_channel_policy,
                         "channel_mean|luminance (default channel_mean)");
    evaluate->add_option("--label-policy", eval_args.label_policy,
                         "Generator conditioning at test time: true_label|sampled");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Render EvalReport JSON files as a table");
    report->add_option("--inputs", report_args.inputs, "EvalReport JSON files")->required();
    report->add_option("--format", report_args.format, "text_table|csv");
    report->add_option("--out", report_args.out, "Output file (default: stdout)");

    InspectArgs inspect_args;
    CLI::App* inspect = app.add_subcommand("inspect-config", "Validate and print a config");
    inspect->add_option("--config", inspect_args.config, "Experiment config path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (train->parsed()) return run_train(train_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (report->parsed()) return run_report(report_args);
        if (inspect->parsed()) return run_inspect(inspect_args);
    } catch (const favtgan::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
