#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "favtgan/errors.hpp"
#include "favtgan/layers.hpp"

namespace favtgan {

template <typename T>
void zero_grads(std::vector<ParamRef<T>>& params) {
    for (auto& p : params) std::fill(p.grad->begin(), p.grad->end(), T(0));
}

// Adam with bias correction. Moment buffers are addressed by parameter index,
// so the parameter list must be stable across steps (construction order is).
template <typename T>
class AdamT {
public:
    AdamT() = default;
    AdamT(double beta1, double beta2, double eps = 1e-8)
        : beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(std::vector<ParamRef<T>>& params, double lr) {
        if (m_.empty()) {
            m_.resize(params.size());
            v_.resize(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                m_[i].assign(params[i].value->size(), T(0));
                v_[i].assign(params[i].value->size(), T(0));
            }
        }
        if (m_.size() != params.size()) throw RuntimeFailure("adam: parameter list changed size");
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            std::vector<T>& w = *params[i].value;
            const std::vector<T>& g = *params[i].grad;
            std::vector<T>& m = m_[i];
            std::vector<T>& v = v_[i];
            for (std::size_t j = 0; j < w.size(); ++j) {
                m[j] = static_cast<T>(beta1_ * m[j] + (1.0 - beta1_) * g[j]);
                v[j] = static_cast<T>(beta2_ * v[j] + (1.0 - beta2_) * static_cast<double>(g[j]) * g[j]);
                const double mhat = m[j] / bc1;
                const double vhat = v[j] / bc2;
                w[j] -= static_cast<T>(lr * mhat / (std::sqrt(vhat) + eps_));
            }
        }
    }

    std::int64_t t() const { return t_; }
    void set_t(std::int64_t t) { t_ = t; }
    std::vector<std::vector<T>>& m() { return m_; }
    std::vector<std::vector<T>>& v() { return v_; }
    const std::vector<std::vector<T>>& m() const { return m_; }
    const std::vector<std::vector<T>>& v() const { return v_; }
    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double eps() const { return eps_; }

private:
    double beta1_ = 0.5, beta2_ = 0.999, eps_ = 1e-8;
    std::int64_t t_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

using Adam = AdamT<float>;

}  // namespace favtgan
