#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "favtgan/config.hpp"
#include "favtgan/sensor_label.hpp"

namespace favtgan {

struct NamedTensor {
    std::string name;
    std::vector<float> data;
};

struct OptimizerSnapshot {
    std::int64_t t = 0;
    std::vector<std::vector<float>> m, v;  // aligned with the parameter list
};

// Versioned training snapshot: parameters, optimizer moments, RNG state and
// the producing config (plus its hash, which resume verifies).
struct Checkpoint {
    std::uint32_t version = 1;
    std::string config_hash;
    ExperimentConfig config;
    std::vector<SensorLabel> registry;
    std::int64_t epoch = 0;
    std::int64_t global_step = 0;
    std::array<std::uint64_t, 4> rng_state{};
    std::vector<NamedTensor> g_params, d_params;
    OptimizerSnapshot g_opt, d_opt;
};

// Atomic: writes a temp file in the target directory, then renames.
void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Verifies magic, version, CRC and structure; throws RuntimeFailure on
// corrupt or truncated files.
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

}  // namespace favtgan
