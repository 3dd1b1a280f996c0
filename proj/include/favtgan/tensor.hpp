#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "favtgan/errors.hpp"

namespace favtgan {

// Dense NCHW tensor. Row-major: index = ((n*C + c)*H + h)*W + w.
template <typename T>
struct TensorT {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    TensorT() = default;
    TensorT(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0)) {}

    static TensorT zeros_like(const TensorT& other) { return TensorT(other.n, other.c, other.h, other.w); }

    std::int64_t size() const { return static_cast<std::int64_t>(n) * c * h * w; }
    std::int64_t sample_size() const { return static_cast<std::int64_t>(c) * h * w; }

    T* sample(int i) { return data.data() + i * sample_size(); }
    const T* sample(int i) const { return data.data() + i * sample_size(); }

    T& at(int ni, int ci, int hi, int wi) {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + hi) * w + wi];
    }
    T at(int ni, int ci, int hi, int wi) const {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + hi) * w + wi];
    }

    bool same_shape(const TensorT& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }

    bool all_finite() const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

// Concatenates along the channel axis. Tensors must agree on n/h/w.
template <typename T>
TensorT<T> concat_channels(const TensorT<T>& a, const TensorT<T>& b) {
    if (b.c == 0) return a;
    if (a.n != b.n || a.h != b.h || a.w != b.w)
        throw ValidationError("concat_channels: spatial/batch shapes differ");
    TensorT<T> out(a.n, a.c + b.c, a.h, a.w);
    const std::int64_t plane = static_cast<std::int64_t>(a.h) * a.w;
    for (int i = 0; i < a.n; ++i) {
        std::copy(a.sample(i), a.sample(i) + a.c * plane, out.sample(i));
        std::copy(b.sample(i), b.sample(i) + b.c * plane, out.sample(i) + a.c * plane);
    }
    return out;
}

// Copies channels [c0, c0+count) of every sample into a new tensor.
template <typename T>
TensorT<T> slice_channels(const TensorT<T>& x, int c0, int count) {
    if (c0 < 0 || c0 + count > x.c) throw ValidationError("slice_channels: range out of bounds");
    TensorT<T> out(x.n, count, x.h, x.w);
    const std::int64_t plane = static_cast<std::int64_t>(x.h) * x.w;
    for (int i = 0; i < x.n; ++i)
        std::copy(x.sample(i) + c0 * plane, x.sample(i) + (c0 + count) * plane, out.sample(i));
    return out;
}

template <typename T>
double max_abs_diff(const TensorT<T>& a, const TensorT<T>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i])));
    return m;
}

using Tensor = TensorT<float>;

}  // namespace favtgan
