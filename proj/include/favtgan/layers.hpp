#pragma once

// Trainable layers used by the generator and discriminator. Convolutions are
// im2col + GEMM (Eigen); every layer caches what its backward pass needs and
// backward() accumulates parameter gradients and returns the input gradient.
//
// Determinism contract: given identical inputs, parameters and thread count,
// forward and backward are bitwise reproducible. Batch-level OpenMP writes to
// disjoint per-sample buffers and weight-gradient contributions are reduced
// in fixed sample order.

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "favtgan/errors.hpp"
#include "favtgan/rng.hpp"
#include "favtgan/tensor.hpp"

namespace favtgan {

template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* value = nullptr;
    std::vector<T>* grad = nullptr;
};

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatRM<T>>;

// col layout: rows = c*kh*kw (kernel-position-major within channel),
// cols = oh*ow (output positions). Out-of-image taps read as zero.
template <typename T>
void im2col(const T* x, int ch, int h, int w, int kh, int kw, int stride, int pad_top,
            int pad_left, int oh, int ow, T* col) {
    for (int c = 0; c < ch; ++c) {
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                T* dst = col + (static_cast<std::size_t>(c * kh + ki) * kw + kj) *
                                   (static_cast<std::size_t>(oh) * ow);
                for (int oi = 0; oi < oh; ++oi) {
                    const int ii = oi * stride + ki - pad_top;
                    if (ii < 0 || ii >= h) {
                        for (int oj = 0; oj < ow; ++oj) *dst++ = T(0);
                        continue;
                    }
                    const T* src = x + (static_cast<std::size_t>(c) * h + ii) * w;
                    for (int oj = 0; oj < ow; ++oj) {
                        const int jj = oj * stride + kj - pad_left;
                        *dst++ = (jj >= 0 && jj < w) ? src[jj] : T(0);
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-adds col entries back into the image (which must
// be zero-initialized by the caller).
template <typename T>
void col2im(const T* col, int ch, int h, int w, int kh, int kw, int stride, int pad_top,
            int pad_left, int oh, int ow, T* x) {
    for (int c = 0; c < ch; ++c) {
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                const T* src = col + (static_cast<std::size_t>(c * kh + ki) * kw + kj) *
                                         (static_cast<std::size_t>(oh) * ow);
                for (int oi = 0; oi < oh; ++oi) {
                    const int ii = oi * stride + ki - pad_top;
                    if (ii < 0 || ii >= h) {
                        src += ow;
                        continue;
                    }
                    T* dst = x + (static_cast<std::size_t>(c) * h + ii) * w;
                    for (int oj = 0; oj < ow; ++oj) {
                        const int jj = oj * stride + kj - pad_left;
                        if (jj >= 0 && jj < w) dst[jj] += *src;
                        ++src;
                    }
                }
            }
        }
    }
}

template <typename T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad,
           bool bias = true)
        : Conv2d(std::move(name), in_ch, out_ch, kernel, stride, pad, pad, pad, pad, bias) {}

    // Asymmetric padding: (top, bottom, left, right).
    Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad_top,
           int pad_bottom, int pad_left, int pad_right, bool bias = true)
        : name_(std::move(name)),
          in_ch_(in_ch),
          out_ch_(out_ch),
          k_(kernel),
          stride_(stride),
          pt_(pad_top),
          pb_(pad_bottom),
          pl_(pad_left),
          pr_(pad_right),
          has_bias_(bias),
          w_(static_cast<std::size_t>(out_ch) * in_ch * kernel * kernel),
          b_(bias ? out_ch : 0) {}

    void init(Rng& rng, double stddev = 0.02) {
        for (T& v : w_) v = static_cast<T>(rng.normal() * stddev);
        for (T& v : b_) v = T(0);
    }

    int out_h(int h) const { return (h + pt_ + pb_ - k_) / stride_ + 1; }
    int out_w(int w) const { return (w + pl_ + pr_ - k_) / stride_ + 1; }
    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }

    std::int64_t param_count() const {
        return static_cast<std::int64_t>(w_.size()) + static_cast<std::int64_t>(b_.size());
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.c != in_ch_) throw ValidationError(name_ + ": input channel mismatch");
        const int oh = out_h(x.h), ow = out_w(x.w);
        if (oh < 1 || ow < 1) throw ValidationError(name_ + ": input too small");
        x_cache_ = x;
        TensorT<T> y(x.n, out_ch_, oh, ow);
        const std::int64_t cols = static_cast<std::int64_t>(oh) * ow;
        const std::int64_t rows = static_cast<std::int64_t>(in_ch_) * k_ * k_;
#pragma omp parallel for schedule(static) if (x.n > 1)
        for (int i = 0; i < x.n; ++i) {
            std::vector<T> col(rows * cols);
            im2col(x.sample(i), in_ch_, x.h, x.w, k_, k_, stride_, pt_, pl_, oh, ow, col.data());
            CMapRM<T> wm(w_.data(), out_ch_, rows);
            CMapRM<T> cm(col.data(), rows, cols);
            MapRM<T> ym(y.sample(i), out_ch_, cols);
            ym.noalias() = wm * cm;
            if (has_bias_)
                for (int c = 0; c < out_ch_; ++c) ym.row(c).array() += b_[c];
        }
        return y;
    }

    TensorT<T> backward(const TensorT<T>& gy) {
        const TensorT<T>& x = x_cache_;
        const int oh = gy.h, ow = gy.w;
        const std::int64_t cols = static_cast<std::int64_t>(oh) * ow;
        const std::int64_t rows = static_cast<std::int64_t>(in_ch_) * k_ * k_;
        ensure_grads();
        TensorT<T> gx = TensorT<T>::zeros_like(x);
        std::vector<T> gw_scratch(static_cast<std::size_t>(x.n) * w_.size(), T(0));
        std::vector<T> gb_scratch(has_bias_ ? static_cast<std::size_t>(x.n) * out_ch_ : 0, T(0));
#pragma omp parallel for schedule(static) if (x.n > 1)
        for (int i = 0; i < x.n; ++i) {
            std::vector<T> col(rows * cols);
            im2col(x.sample(i), in_ch_, x.h, x.w, k_, k_, stride_, pt_, pl_, oh, ow, col.data());
            CMapRM<T> gym(gy.sample(i), out_ch_, cols);
            CMapRM<T> cm(col.data(), rows, cols);
            MapRM<T> gwm(gw_scratch.data() + i * w_.size(), out_ch_, rows);
            gwm.noalias() = gym * cm.transpose();
            if (has_bias_) {
                T* gb = gb_scratch.data() + static_cast<std::size_t>(i) * out_ch_;
                for (int c = 0; c < out_ch_; ++c) gb[c] = gym.row(c).sum();
            }
            CMapRM<T> wm(w_.data(), out_ch_, rows);
            std::vector<T> dcol(rows * cols);
            MapRM<T> dcm(dcol.data(), rows, cols);
            dcm.noalias() = wm.transpose() * gym;
            col2im(dcol.data(), in_ch_, x.h, x.w, k_, k_, stride_, pt_, pl_, oh, ow, gx.sample(i));
        }
        // Fixed-order reduction keeps results independent of thread count.
        for (int i = 0; i < x.n; ++i) {
            const T* gw = gw_scratch.data() + static_cast<std::size_t>(i) * w_.size();
            for (std::size_t j = 0; j < w_.size(); ++j) gw_[j] += gw[j];
            if (has_bias_) {
                const T* gb = gb_scratch.data() + static_cast<std::size_t>(i) * out_ch_;
                for (int c = 0; c < out_ch_; ++c) gb_[c] += gb[c];
            }
        }
        return gx;
    }

    void collect_params(std::vector<ParamRef<T>>& out) {
        ensure_grads();
        out.push_back({name_ + ".w", &w_, &gw_});
        if (has_bias_) out.push_back({name_ + ".b", &b_, &gb_});
    }

private:
    void ensure_grads() {
        if (gw_.size() != w_.size()) gw_.assign(w_.size(), T(0));
        if (has_bias_ && gb_.size() != b_.size()) gb_.assign(b_.size(), T(0));
    }

    std::string name_;
    int in_ch_ = 0, out_ch_ = 0, k_ = 0, stride_ = 1;
    int pt_ = 0, pb_ = 0, pl_ = 0, pr_ = 0;
    bool has_bias_ = true;
    std::vector<T> w_, b_, gw_, gb_;
    TensorT<T> x_cache_;
};

template <typename T>
class ConvTranspose2d {
public:
    ConvTranspose2d() = default;
    ConvTranspose2d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad,
                    bool bias = true)
        : name_(std::move(name)),
          in_ch_(in_ch),
          out_ch_(out_ch),
          k_(kernel),
          stride_(stride),
          pad_(pad),
          has_bias_(bias),
          w_(static_cast<std::size_t>(in_ch) * out_ch * kernel * kernel),
          b_(bias ? out_ch : 0) {}

    void init(Rng& rng, double stddev = 0.02) {
        for (T& v : w_) v = static_cast<T>(rng.normal() * stddev);
        for (T& v : b_) v = T(0);
    }

    int out_h(int h) const { return (h - 1) * stride_ + k_ - 2 * pad_; }
    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }

    std::int64_t param_count() const {
        return static_cast<std::int64_t>(w_.size()) + static_cast<std::int64_t>(b_.size());
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.c != in_ch_) throw ValidationError(name_ + ": input channel mismatch");
        const int oh = out_h(x.h), ow = out_h(x.w);
        x_cache_ = x;
        TensorT<T> y(x.n, out_ch_, oh, ow);
        const std::int64_t pos = static_cast<std::int64_t>(x.h) * x.w;
        const std::int64_t rows = static_cast<std::int64_t>(out_ch_) * k_ * k_;
#pragma omp parallel for schedule(static) if (x.n > 1)
        for (int i = 0; i < x.n; ++i) {
            CMapRM<T> wm(w_.data(), in_ch_, rows);
            CMapRM<T> xm(x.sample(i), in_ch_, pos);
            std::vector<T> coly(rows * pos);
            MapRM<T> cym(coly.data(), rows, pos);
            cym.noalias() = wm.transpose() * xm;
            col2im(coly.data(), out_ch_, oh, ow, k_, k_, stride_, pad_, pad_, x.h, x.w,
                   y.sample(i));
            if (has_bias_) {
                T* dst = y.sample(i);
                const std::int64_t plane = static_cast<std::int64_t>(oh) * ow;
                for (int c = 0; c < out_ch_; ++c)
                    for (std::int64_t p = 0; p < plane; ++p) dst[c * plane + p] += b_[c];
            }
        }
        return y;
    }

    TensorT<T> backward(const TensorT<T>& gy) {
        const TensorT<T>& x = x_cache_;
        const std::int64_t pos = static_cast<std::int64_t>(x.h) * x.w;
        const std::int64_t rows = static_cast<std::int64_t>(out_ch_) * k_ * k_;
        ensure_grads();
        TensorT<T> gx = TensorT<T>::zeros_like(x);
        std::vector<T> gw_scratch(static_cast<std::size_t>(x.n) * w_.size(), T(0));
        std::vector<T> gb_scratch(has_bias_ ? static_cast<std::size_t>(x.n) * out_ch_ : 0, T(0));
#pragma omp parallel for schedule(static) if (x.n > 1)
        for (int i = 0; i < x.n; ++i) {
            std::vector<T> colgy(rows * pos);
            im2col(gy.sample(i), out_ch_, gy.h, gy.w, k_, k_, stride_, pad_, pad_, x.h, x.w,
                   colgy.data());
            CMapRM<T> gym(colgy.data(), rows, pos);
            CMapRM<T> xm(x.sample(i), in_ch_, pos);
            MapRM<T> gwm(gw_scratch.data() + i * w_.size(), in_ch_, rows);
            gwm.noalias() = xm * gym.transpose();
            CMapRM<T> wm(w_.data(), in_ch_, rows);
            MapRM<T> gxm(gx.sample(i), in_ch_, pos);
            gxm.noalias() = wm * gym;
            if (has_bias_) {
                const std::int64_t plane = static_cast<std::int64_t>(gy.h) * gy.w;
                const T* src = gy.sample(i);
                T* gb = gb_scratch.data() + static_cast<std::size_t>(i) * out_ch_;
                for (int c = 0; c < out_ch_; ++c) {
                    T s = T(0);
                    for (std::int64_t p = 0; p < plane; ++p) s += src[c * plane + p];
                    gb[c] = s;
                }
            }
        }
        for (int i = 0; i < x.n; ++i) {
            const T* gw = gw_scratch.data() + static_cast<std::size_t>(i) * w_.size();
            for (std::size_t j = 0; j < w_.size(); ++j) gw_[j] += gw[j];
            if (has_bias_) {
                const T* gb = gb_scratch.data() + static_cast<std::size_t>(i) * out_ch_;
                for (int c = 0; c < out_ch_; ++c) gb_[c] += gb[c];
            }
        }
        return gx;
    }

    void collect_params(std::vector<ParamRef<T>>& out) {
        ensure_grads();
        out.push_back({name_ + ".w", &w_, &gw_});
        if (has_bias_) out.push_back({name_ + ".b", &b_, &gb_});
    }

private:
    void ensure_grads() {
        if (gw_.size() != w_.size()) gw_.assign(w_.size(), T(0));
        if (has_bias_ && gb_.size() != b_.size()) gb_.assign(b_.size(), T(0));
    }

    std::string name_;
    int in_ch_ = 0, out_ch_ = 0, k_ = 0, stride_ = 1, pad_ = 0;
    bool has_bias_ = true;
    std::vector<T> w_, b_, gw_, gb_;
    TensorT<T> x_cache_;
};

// Per-sample, per-channel normalization over spatial dims; no affine terms.
template <typename T>
class InstanceNorm2d {
public:
    explicit InstanceNorm2d(double eps = 1e-5) : eps_(eps) {}

    TensorT<T> forward(const TensorT<T>& x) {
        TensorT<T> y = TensorT<T>::zeros_like(x);
        const std::int64_t m = static_cast<std::int64_t>(x.h) * x.w;
        inv_std_.assign(static_cast<std::size_t>(x.n) * x.c, T(0));
        for (int i = 0; i < x.n; ++i) {
            for (int c = 0; c < x.c; ++c) {
                const T* src = x.sample(i) + c * m;
                T* dst = y.sample(i) + c * m;
                double mean = 0.0;
                for (std::int64_t p = 0; p < m; ++p) mean += src[p];
                mean /= static_cast<double>(m);
                double var = 0.0;
                for (std::int64_t p = 0; p < m; ++p) {
                    const double d = src[p] - mean;
                    var += d * d;
                }
                var /= static_cast<double>(m);
                const T inv = static_cast<T>(1.0 / std::sqrt(var + eps_));
                inv_std_[static_cast<std::size_t>(i) * x.c + c] = inv;
                for (std::int64_t p = 0; p < m; ++p)
                    dst[p] = static_cast<T>((src[p] - mean) * inv);
            }
        }
        y_cache_ = y;
        return y;
    }

    TensorT<T> backward(const TensorT<T>& gy) {
        const TensorT<T>& y = y_cache_;
        TensorT<T> gx = TensorT<T>::zeros_like(gy);
        const std::int64_t m = static_cast<std::int64_t>(gy.h) * gy.w;
        for (int i = 0; i < gy.n; ++i) {
            for (int c = 0; c < gy.c; ++c) {
                const T* g = gy.sample(i) + c * m;
                const T* yn = y.sample(i) + c * m;
                T* out = gx.sample(i) + c * m;
                double sum_g = 0.0, sum_gy = 0.0;
                for (std::int64_t p = 0; p < m; ++p) {
                    sum_g += g[p];
                    sum_gy += static_cast<double>(g[p]) * yn[p];
                }
                const double mean_g = sum_g / static_cast<double>(m);
                const double mean_gy = sum_gy / static_cast<double>(m);
                const double inv = inv_std_[static_cast<std::size_t>(i) * gy.c + c];
                for (std::int64_t p = 0; p < m; ++p)
                    out[p] = static_cast<T>(inv * (g[p] - mean_g - yn[p] * mean_gy));
            }
        }
        return gx;
    }

private:
    double eps_;
    std::vector<T> inv_std_;
    TensorT<T> y_cache_;
};

template <typename T>
class LeakyReLU {
public:
    explicit LeakyReLU(double slope) : slope_(static_cast<T>(slope)) {}

    TensorT<T> forward(const TensorT<T>& x) {
        x_cache_ = x;
        TensorT<T> y = x;
        for (T& v : y.data)
            if (v < T(0)) v *= slope_;
        return y;
    }

    TensorT<T> backward(const TensorT<T>& gy) {
        TensorT<T> gx = gy;
        for (std::size_t i = 0; i < gx.data.size(); ++i)
            if (x_cache_.data[i] < T(0)) gx.data[i] *= slope_;
        return gx;
    }

private:
    T slope_;
    TensorT<T> x_cache_;
};

template <typename T>
class Tanh {
public:
    TensorT<T> forward(const TensorT<T>& x) {
        TensorT<T> y = x;
        for (T& v : y.data) v = std::tanh(v);
        y_cache_ = y;
        return y;
    }

    TensorT<T> backward(const TensorT<T>& gy) {
        TensorT<T> gx = gy;
        for (std::size_t i = 0; i < gx.data.size(); ++i)
            gx.data[i] *= T(1) - y_cache_.data[i] * y_cache_.data[i];
        return gx;
    }

private:
    TensorT<T> y_cache_;
};

// Fully connected layer on [N, in] tensors (h = w = 1).
template <typename T>
class Linear {
public:
    Linear() = default;
    Linear(std::string name, int in_dim, int out_dim)
        : name_(std::move(name)),
          in_(in_dim),
          out_(out_dim),
          w_(static_cast<std::size_t>(out_dim) * in_dim),
          b_(out_dim) {}

    void init(Rng& rng, double stddev = 0.02) {
        for (T& v : w_) v = static_cast<T>(rng.normal() * stddev);
        for (T& v : b_) v = T(0);
    }

    std::int64_t param_count() const {
        return static_cast<std::int64_t>(w_.size()) + static_cast<std::int64_t>(b_.size());
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.c != in_ || x.h != 1 || x.w != 1)
            throw ValidationError(name_ + ": expected [N," + std::to_string(in_) + ",1,1] input");
        x_cache_ = x;
        TensorT<T> y(x.n, out_, 1, 1);
        CMapRM<T> xm(x.data.data(), x.n, in_);
        CMapRM<T> wm(w_.data(), out_, in_);
        MapRM<T> ym(y.data.data(), x.n, out_);
        ym.noalias() = xm * wm.transpose();
        for (int i = 0; i < x.n; ++i)
            for (int o = 0; o < out_; ++o) ym(i, o) += b_[o];
        return y;
    }

    TensorT<T> backward(const TensorT<T>& gy) {
        ensure_grads();
        const TensorT<T>& x = x_cache_;
        CMapRM<T> xm(x.data.data(), x.n, in_);
        CMapRM<T> gym(gy.data.data(), x.n, out_);
        MapRM<T> gwm(gw_.data(), out_, in_);
        gwm.noalias() += gym.transpose() * xm;
        for (int i = 0; i < x.n; ++i)
            for (int o = 0; o < out_; ++o) gb_[o] += gym(i, o);
        TensorT<T> gx(x.n, in_, 1, 1);
        MapRM<T> gxm(gx.data.data(), x.n, in_);
        CMapRM<T> wm(w_.data(), out_, in_);
        gxm.noalias() = gym * wm;
        return gx;
    }

    void collect_params(std::vector<ParamRef<T>>& out) {
        ensure_grads();
        out.push_back({name_ + ".w", &w_, &gw_});
        out.push_back({name_ + ".b", &b_, &gb_});
    }

private:
    void ensure_grads() {
        if (gw_.size() != w_.size()) gw_.assign(w_.size(), T(0));
        if (gb_.size() != b_.size()) gb_.assign(b_.size(), T(0));
    }

    std::string name_;
    int in_ = 0, out_ = 0;
    std::vector<T> w_, b_, gw_, gb_;
    TensorT<T> x_cache_;
};

template <typename T>
TensorT<T> global_avg_pool(const TensorT<T>& x) {
    TensorT<T> y(x.n, x.c, 1, 1);
    const std::int64_t m = static_cast<std::int64_t>(x.h) * x.w;
    for (int i = 0; i < x.n; ++i)
        for (int c = 0; c < x.c; ++c) {
            const T* src = x.sample(i) + c * m;
            double s = 0.0;
            for (std::int64_t p = 0; p < m; ++p) s += src[p];
            y.at(i, c, 0, 0) = static_cast<T>(s / static_cast<double>(m));
        }
    return y;
}

template <typename T>
TensorT<T> global_avg_pool_backward(const TensorT<T>& gy, int h, int w) {
    TensorT<T> gx(gy.n, gy.c, h, w);
    const std::int64_t m = static_cast<std::int64_t>(h) * w;
    for (int i = 0; i < gy.n; ++i)
        for (int c = 0; c < gy.c; ++c) {
            const T v = gy.at(i, c, 0, 0) / static_cast<T>(m);
            T* dst = gx.sample(i) + c * m;
            for (std::int64_t p = 0; p < m; ++p) dst[p] = v;
        }
    return gx;
}

}  // namespace favtgan
