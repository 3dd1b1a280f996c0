#pragma once

// Label/noise conditioning. One-hot sensor labels are tiled to the full
// spatial resolution and concatenated to the network input as extra
// channels; the gaussian_noise variant appends one i.i.d. standard-normal
// channel to the generator input.

#include <string>

#include "favtgan/errors.hpp"
#include "favtgan/rng.hpp"
#include "favtgan/tensor.hpp"

namespace favtgan {

enum class ConditioningMode { baseline, no_noise, noisy_labels, gaussian_noise, plain_pix2pix };
enum class CondRole { generator, discriminator };

std::string to_string(ConditioningMode mode);
ConditioningMode parse_mode(const std::string& text);

inline bool mode_uses_labels(ConditioningMode mode) {
    return mode != ConditioningMode::plain_pix2pix;
}

// True when the generator is conditioned on a freshly sampled label instead
// of the pair's real one.
inline bool generator_label_is_sampled(ConditioningMode mode) {
    return mode == ConditioningMode::baseline || mode == ConditioningMode::noisy_labels;
}

inline int condition_channels(ConditioningMode mode, CondRole role, int n_labels) {
    if (!mode_uses_labels(mode)) return 0;
    if (role == CondRole::generator && mode == ConditioningMode::gaussian_noise)
        return n_labels + 1;
    return n_labels;
}

template <typename T>
struct ConditionTensorT {
    TensorT<T> channels;  // [1, k, size, size]; k may be 0
    int label_used = -1;  // label encoded in the one-hot block (aux target for fakes)
};

template <typename T>
ConditionTensorT<T> make_condition(int label, int n_labels, ConditioningMode mode, CondRole role,
                                   int size, Rng& rng) {
    if (mode_uses_labels(mode) && (label < 0 || label >= n_labels))
        throw ValidationError("make_condition: label " + std::to_string(label) +
                              " out of range [0, " + std::to_string(n_labels) + ")");
    ConditionTensorT<T> cond;
    if (!mode_uses_labels(mode)) {
        cond.channels = TensorT<T>(1, 0, size, size);
        cond.label_used = label;
        return cond;
    }
    int used = label;
    if (role == CondRole::generator && generator_label_is_sampled(mode))
        used = rng.uniform_int(n_labels);
    const bool noise_channel = role == CondRole::generator && mode == ConditioningMode::gaussian_noise;
    cond.channels = TensorT<T>(1, n_labels + (noise_channel ? 1 : 0), size, size);
    cond.label_used = used;
    const std::int64_t plane = static_cast<std::int64_t>(size) * size;
    T* one_hot = cond.channels.data.data() + used * plane;
    for (std::int64_t p = 0; p < plane; ++p) one_hot[p] = T(1);
    if (noise_channel) {
        T* z = cond.channels.data.data() + static_cast<std::int64_t>(n_labels) * plane;
        for (std::int64_t p = 0; p < plane; ++p) z[p] = static_cast<T>(rng.normal());
    }
    return cond;
}

using ConditionTensor = ConditionTensorT<float>;

// Generator condition used outside training (sample grids, evaluation): the
// TRUE sensor label's one-hot block, plus a noise channel in gaussian_noise
// mode. Never samples a fake label.
template <typename T>
TensorT<T> inference_condition(int label, int n_labels, ConditioningMode mode, int size,
                               Rng& rng) {
    const int k = condition_channels(mode, CondRole::generator, n_labels);
    TensorT<T> cond(1, k, size, size);
    if (k == 0) return cond;
    if (label < 0 || label >= n_labels)
        throw ValidationError("inference_condition: label out of range");
    const std::int64_t plane = static_cast<std::int64_t>(size) * size;
    T* one_hot = cond.data.data() + label * plane;
    for (std::int64_t p = 0; p < plane; ++p) one_hot[p] = T(1);
    if (mode == ConditioningMode::gaussian_noise) {
        T* z = cond.data.data() + static_cast<std::int64_t>(n_labels) * plane;
        for (std::int64_t p = 0; p < plane; ++p) z[p] = static_cast<T>(rng.normal());
    }
    return cond;
}

}  // namespace favtgan
