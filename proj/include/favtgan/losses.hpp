#pragma once

// Loss stack. All terms are pure functions of their inputs; expectations are
// batch means (patch losses average over every patch cell, then the batch).
// Adversarial terms are least-squares against a smoothed real target; the
// auxiliary term is softmax cross-entropy on the sensor label, minimized by
// both players. Gradient helpers take a `scale` factor so callers can fold
// in composition weights (e.g. the 1/2 of the total discriminator loss).

#include <cmath>
#include <utility>
#include <vector>

#include "favtgan/conditioning.hpp"
#include "favtgan/errors.hpp"
#include "favtgan/tensor.hpp"

namespace favtgan {

struct GeneratorLossBreakdown {
    double adv = 0.0;
    double aux = 0.0;
    double l1 = 0.0;
    double total = 0.0;
};

struct DiscriminatorLossBreakdown {
    double adv_real = 0.0;
    double adv_fake = 0.0;
    double aux_real = 0.0;
    double aux_fake = 0.0;
    double total = 0.0;
};

namespace detail {
template <typename T>
void require_finite(const TensorT<T>& x, const char* what) {
    if (!x.all_finite()) throw RuntimeFailure(std::string(what) + ": non-finite values");
}
}  // namespace detail

// 1/2 * mean((patch - target)^2)
template <typename T>
double lsgan_loss(const TensorT<T>& patch, double target) {
    detail::require_finite(patch, "lsgan_loss");
    double acc = 0.0;
    for (const T& v : patch.data) {
        const double d = static_cast<double>(v) - target;
        acc += d * d;
    }
    return 0.5 * acc / static_cast<double>(patch.size());
}

template <typename T>
TensorT<T> lsgan_loss_grad(const TensorT<T>& patch, double target, double scale) {
    TensorT<T> g = TensorT<T>::zeros_like(patch);
    const double inv = scale / static_cast<double>(patch.size());
    for (std::size_t i = 0; i < patch.data.size(); ++i)
        g.data[i] = static_cast<T>((static_cast<double>(patch.data[i]) - target) * inv);
    return g;
}

// Generator adversarial loss: fake patches scored against the smoothed real target.
template <typename T>
double adv_loss_g(const TensorT<T>& patch_fake, double smoothed_target) {
    if (smoothed_target <= 0.0 || smoothed_target > 1.0)
        throw ValidationError("adv_loss_g: smoothed target must lie in (0, 1]");
    return lsgan_loss(patch_fake, smoothed_target);
}

// Discriminator adversarial losses: (real vs smoothed target, fake vs 0).
template <typename T>
std::pair<double, double> adv_loss_d(const TensorT<T>& patch_real, const TensorT<T>& patch_fake,
                                     double smoothed_target) {
    return {lsgan_loss(patch_real, smoothed_target), lsgan_loss(patch_fake, 0.0)};
}

template <typename T>
std::vector<double> softmax(const TensorT<T>& logits, int row) {
    const T* l = logits.sample(row);
    double mx = static_cast<double>(l[0]);
    for (int c = 1; c < logits.c; ++c) mx = std::max(mx, static_cast<double>(l[c]));
    std::vector<double> p(logits.c);
    double z = 0.0;
    for (int c = 0; c < logits.c; ++c) {
        p[c] = std::exp(static_cast<double>(l[c]) - mx);
        z += p[c];
    }
    for (double& v : p) v /= z;
    return p;
}

// Mean negative log-probability of the target labels under softmax(logits).
template <typename T>
double aux_loss(const TensorT<T>& logits, const std::vector<int>& targets) {
    detail::require_finite(logits, "aux_loss");
    if (static_cast<int>(targets.size()) != logits.n)
        throw ValidationError("aux_loss: one target per batch row required");
    double acc = 0.0;
    for (int i = 0; i < logits.n; ++i) {
        if (targets[i] < 0 || targets[i] >= logits.c)
            throw ValidationError("aux_loss: target label " + std::to_string(targets[i]) +
                                  " out of range [0, " + std::to_string(logits.c) + ")");
        const T* l = logits.sample(i);
        double mx = static_cast<double>(l[0]);
        for (int c = 1; c < logits.c; ++c) mx = std::max(mx, static_cast<double>(l[c]));
        double z = 0.0;
        for (int c = 0; c < logits.c; ++c) z += std::exp(static_cast<double>(l[c]) - mx);
        acc += mx + std::log(z) - static_cast<double>(l[targets[i]]);
    }
    return acc / static_cast<double>(logits.n);
}

template <typename T>
TensorT<T> aux_loss_grad(const TensorT<T>& logits, const std::vector<int>& targets, double scale) {
    TensorT<T> g = TensorT<T>::zeros_like(logits);
    const double inv = scale / static_cast<double>(logits.n);
    for (int i = 0; i < logits.n; ++i) {
        const std::vector<double> p = softmax(logits, i);
        T* gr = g.sample(i);
        for (int c = 0; c < logits.c; ++c)
            gr[c] = static_cast<T>((p[c] - (c == targets[i] ? 1.0 : 0.0)) * inv);
    }
    return g;
}

// Mean absolute difference over all elements.
template <typename T>
double l1_loss(const TensorT<T>& b, const TensorT<T>& b_hat) {
    if (!b.same_shape(b_hat)) throw ValidationError("l1_loss: shape mismatch");
    detail::require_finite(b_hat, "l1_loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < b.data.size(); ++i)
        acc += std::abs(static_cast<double>(b.data[i]) - static_cast<double>(b_hat.data[i]));
    return acc / static_cast<double>(b.size());
}

template <typename T>
TensorT<T> l1_loss_grad_wrt_bhat(const TensorT<T>& b, const TensorT<T>& b_hat, double scale) {
    TensorT<T> g = TensorT<T>::zeros_like(b_hat);
    const double inv = scale / static_cast<double>(b.size());
    for (std::size_t i = 0; i < b.data.size(); ++i) {
        const double d = static_cast<double>(b_hat.data[i]) - static_cast<double>(b.data[i]);
        g.data[i] = static_cast<T>(d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0));
    }
    return g;
}

// total = adv + aux + lambda * l1; the auxiliary term is identically zero in
// plain pix2pix mode.
inline GeneratorLossBreakdown total_g(double adv, double aux, double l1, double lambda,
                                      ConditioningMode mode) {
    GeneratorLossBreakdown out;
    out.adv = adv;
    out.aux = mode == ConditioningMode::plain_pix2pix ? 0.0 : aux;
    out.l1 = l1;
    out.total = out.adv + out.aux + lambda * out.l1;
    if (!std::isfinite(out.total)) throw RuntimeFailure("total_g: non-finite loss");
    return out;
}

// total = 1/2 * [(adv_real + aux_real) + (adv_fake + aux_fake)]
inline DiscriminatorLossBreakdown total_d(double adv_real, double adv_fake, double aux_real,
                                          double aux_fake, ConditioningMode mode) {
    DiscriminatorLossBreakdown out;
    out.adv_real = adv_real;
    out.adv_fake = adv_fake;
    out.aux_real = mode == ConditioningMode::plain_pix2pix ? 0.0 : aux_real;
    out.aux_fake = mode == ConditioningMode::plain_pix2pix ? 0.0 : aux_fake;
    out.total = 0.5 * ((out.adv_real + out.aux_real) + (out.adv_fake + out.aux_fake));
    if (!std::isfinite(out.total)) throw RuntimeFailure("total_d: non-finite loss");
    return out;
}

}  // namespace favtgan
