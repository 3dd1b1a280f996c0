#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "favtgan/conditioning.hpp"

namespace favtgan {

// Full declarative description of one experiment. One file determines one
// run; defaults reproduce the full-scale training setup.
struct ExperimentConfig {
    int schema_version = 1;
    std::vector<std::string> datasets;  // manifest paths, order assigns label ids
    ConditioningMode mode = ConditioningMode::baseline;
    int epochs = 2000;
    int batch_size = 12;
    double learning_rate = 0.00002;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;
    int decay_epoch = 100;
    double lambda_l1 = 100.0;
    int channels = 3;
    int image_size = 256;
    std::int64_t seed = 0;
    double smoothed_real_target = 0.9;
    std::string output_dir;

    // Architecture and run-control knobs. Reduced-depth nets for desk-scale
    // smoke runs are expressed through these.
    int g_depth = 8;
    int d_depth = 4;
    int g_base_width = 64;
    int d_base_width = 64;
    int width_cap = 512;
    int sample_interval = 50;      // epochs between sample grids
    int checkpoint_interval = 50;  // epochs between checkpoints
    std::string update_order = "d_first";  // "d_first" | "g_first"

    bool operator==(const ExperimentConfig&) const = default;
};

// Throws ValidationError naming the violated invariant.
void validate_config(const ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

// Canonical serialization (fixed key order); basis of the config hash.
std::string canonical_config_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

// Resolves a possibly relative run/output path against FAVTGAN_OUTPUT_ROOT
// when that environment variable is set, else returns it unchanged.
std::filesystem::path resolve_output_path(const std::string& path);

}  // namespace favtgan
