#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "favtgan/image.hpp"
#include "favtgan/manifest.hpp"

namespace favtgan {

// Rules mapping a synthetic visible image to its paired thermal image, all
// deterministic so a trained generator can be checked against memorization.
enum class SynthRule { channel_inversion, blur_plus_bias, intensity_remap };

std::string to_string(SynthRule rule);
SynthRule parse_synth_rule(const std::string& text);

// Emits paired PNGs under out_dir (visible/, thermal/) plus manifest.json.
// Reproducible: same (n_pairs, image_size, seed, rule) => byte-identical
// trees. Split assignment is 75/25 train/test by pair index (at least one
// train pair).
DatasetManifest synthesize_dataset(int n_pairs, int image_size, std::uint64_t seed, SynthRule rule,
                                   const std::filesystem::path& out_dir,
                                   const std::string& dataset_name = "synthetic");

// The thermal-from-visible rule on a single 8-bit image, exposed so tests can
// check emitted pairs pixelwise.
ImageU8 apply_synth_rule(const ImageU8& visible, SynthRule rule);

}  // namespace favtgan
