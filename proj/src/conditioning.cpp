#include "favtgan/conditioning.hpp"

namespace favtgan {

std::string to_string(ConditioningMode mode) {
    switch (mode) {
        case ConditioningMode::baseline: return "baseline";
        case ConditioningMode::no_noise: return "no_noise";
        case ConditioningMode::noisy_labels: return "noisy_labels";
        case ConditioningMode::gaussian_noise: return "gaussian_noise";
        case ConditioningMode::plain_pix2pix: return "plain_pix2pix";
    }
    return "unknown";
}

ConditioningMode parse_mode(const std::string& text) {
    if (text == "baseline") return ConditioningMode::baseline;
    if (text == "no_noise") return ConditioningMode::no_noise;
    if (text == "noisy_labels") return ConditioningMode::noisy_labels;
    if (text == "gaussian_noise") return ConditioningMode::gaussian_noise;
    if (text == "plain_pix2pix") return ConditioningMode::plain_pix2pix;
    throw ValidationError("unknown conditioning mode '" + text +
                          "' (expected baseline|no_noise|noisy_labels|gaussian_noise|plain_pix2pix)");
}

}  // namespace favtgan
