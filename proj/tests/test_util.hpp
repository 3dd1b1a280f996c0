#pragma once

// Shared test helpers: temp directories, independent convolution oracles and
// a central-difference gradient checker. Oracles here are deliberately naive
// (direct loops) and share no code with the library's im2col/GEMM path.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "favtgan/layers.hpp"
#include "favtgan/rng.hpp"
#include "favtgan/tensor.hpp"

namespace testutil {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::string tmpl = (std::filesystem::temp_directory_path() / (tag + ".XXXXXX")).string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename T>
favtgan::TensorT<T> random_tensor(int n, int c, int h, int w, favtgan::Rng& rng, double lo = -1.0,
                                  double hi = 1.0) {
    favtgan::TensorT<T> t(n, c, h, w);
    for (T& v : t.data) v = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

// Direct-loop convolution, weight layout [out][in][k][k].
template <typename T>
favtgan::TensorT<T> naive_conv2d(const favtgan::TensorT<T>& x, const std::vector<T>& w,
                                 const std::vector<T>& b, int out_ch, int k, int stride,
                                 int pad_top, int pad_left, int oh, int ow) {
    const int in_ch = x.c;
    favtgan::TensorT<T> y(x.n, out_ch, oh, ow);
    for (int n = 0; n < x.n; ++n)
        for (int oc = 0; oc < out_ch; ++oc)
            for (int oi = 0; oi < oh; ++oi)
                for (int oj = 0; oj < ow; ++oj) {
                    double acc = b.empty() ? 0.0 : static_cast<double>(b[oc]);
                    for (int ic = 0; ic < in_ch; ++ic)
                        for (int ki = 0; ki < k; ++ki)
                            for (int kj = 0; kj < k; ++kj) {
                                const int ii = oi * stride + ki - pad_top;
                                const int jj = oj * stride + kj - pad_left;
                                if (ii < 0 || ii >= x.h || jj < 0 || jj >= x.w) continue;
                                acc += static_cast<double>(
                                           w[((static_cast<std::size_t>(oc) * in_ch + ic) * k + ki) * k +
                                             kj]) *
                                       x.at(n, ic, ii, jj);
                            }
                    y.at(n, oc, oi, oj) = static_cast<T>(acc);
                }
    return y;
}

// Direct-scatter transposed convolution, weight layout [in][out][k][k].
template <typename T>
favtgan::TensorT<T> naive_conv_transpose2d(const favtgan::TensorT<T>& x, const std::vector<T>& w,
                                           const std::vector<T>& b, int out_ch, int k, int stride,
                                           int pad, int oh, int ow) {
    const int in_ch = x.c;
    favtgan::TensorT<T> y(x.n, out_ch, oh, ow);
    for (int n = 0; n < x.n; ++n) {
        for (int ic = 0; ic < in_ch; ++ic)
            for (int ii = 0; ii < x.h; ++ii)
                for (int jj = 0; jj < x.w; ++jj)
                    for (int oc = 0; oc < out_ch; ++oc)
                        for (int ki = 0; ki < k; ++ki)
                            for (int kj = 0; kj < k; ++kj) {
                                const int a = ii * stride + ki - pad;
                                const int bcol = jj * stride + kj - pad;
                                if (a < 0 || a >= oh || bcol < 0 || bcol >= ow) continue;
                                y.at(n, oc, a, bcol) += static_cast<T>(
                                    x.at(n, ic, ii, jj) *
                                    w[((static_cast<std::size_t>(ic) * out_ch + oc) * k + ki) * k + kj]);
                            }
        if (!b.empty())
            for (int oc = 0; oc < out_ch; ++oc)
                for (int a = 0; a < oh; ++a)
                    for (int bcol = 0; bcol < ow; ++bcol) y.at(n, oc, a, bcol) += b[oc];
    }
    return y;
}

struct GradCheckResult {
    double max_rel_err = 0.0;
    int checked = 0;
};

// Central differences over `n_samples` randomly chosen parameter entries.
// The loss closure must be a pure function of the current parameter values.
inline GradCheckResult gradcheck(std::vector<favtgan::ParamRef<double>>& params,
                                 const std::function<double()>& loss,
                                 const std::function<void()>& compute_grads, int n_samples,
                                 favtgan::Rng& rng, double h = 1e-5) {
    for (auto& p : params) std::fill(p.grad->begin(), p.grad->end(), 0.0);
    compute_grads();

    std::vector<std::pair<int, int>> picks;  // (param index, element index)
    std::size_t total = 0;
    for (const auto& p : params) total += p.value->size();
    for (int s = 0; s < n_samples; ++s) {
        std::size_t flat = static_cast<std::size_t>(rng.uniform() * static_cast<double>(total));
        if (flat >= total) flat = total - 1;
        for (std::size_t pi = 0; pi < params.size(); ++pi) {
            if (flat < params[pi].value->size()) {
                picks.emplace_back(static_cast<int>(pi), static_cast<int>(flat));
                break;
            }
            flat -= params[pi].value->size();
        }
    }

    GradCheckResult result;
    for (const auto& [pi, ei] : picks) {
        double& w = (*params[pi].value)[ei];
        const double saved = w;
        w = saved + h;
        const double lp = loss();
        w = saved - h;
        const double lm = loss();
        w = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        const double analytic = (*params[pi].grad)[ei];
        const double denom = std::max(std::abs(analytic) + std::abs(numeric), 1e-10);
        result.max_rel_err = std::max(result.max_rel_err, std::abs(analytic - numeric) / denom);
        ++result.checked;
    }
    return result;
}

}  // namespace testutil
