#include "favtgan/metrics.hpp"

#include <cmath>
#include <limits>

#include "favtgan/errors.hpp"

namespace favtgan {

MetricImage to_metric_image(const ImageU8& img) {
    MetricImage m;
    m.h = img.h;
    m.w = img.w;
    m.c = 3;
    m.v.resize(static_cast<std::size_t>(3) * img.h * img.w);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) m.at(c, y, x) = static_cast<double>(img.at(y, x, c));
    return m;
}

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

const double* gaussian_window() {
    static double g[kWin];
    static bool ready = false;
    if (!ready) {
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i) {
            const double d = i - (kWin - 1) / 2.0;
            g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
            sum += g[i];
        }
        for (double& v : g) v /= sum;
        ready = true;
    }
    return g;
}

// Valid-region separable Gaussian filter: (h, w) -> (h-10, w-10).
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w) {
    const double* g = gaussian_window();
    const int ow = w - kWin + 1, oh = h - kWin + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWin; ++k) acc += g[k] * src[static_cast<std::size_t>(y) * w + x + k];
            tmp[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWin; ++k) acc += g[k] * tmp[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    return out;
}

double ssim_channel(const double* x, const double* y, int h, int w) {
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> xv(x, x + n), yv(y, y + n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const std::vector<double> mu_x = filter_valid(xv, h, w);
    const std::vector<double> mu_y = filter_valid(yv, h, w);
    const std::vector<double> m_xx = filter_valid(xx, h, w);
    const std::vector<double> m_yy = filter_valid(yy, h, w);
    const std::vector<double> m_xy = filter_valid(xy, h, w);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double ux = mu_x[i], uy = mu_y[i];
        const double var_x = m_xx[i] - ux * ux;
        const double var_y = m_yy[i] - uy * uy;
        const double cov = m_xy[i] - ux * uy;
        acc += ((2.0 * ux * uy + kC1) * (2.0 * cov + kC2)) /
               ((ux * ux + uy * uy + kC1) * (var_x + var_y + kC2));
    }
    return acc / static_cast<double>(mu_x.size());
}

}  // namespace

double ssim(const MetricImage& x, const MetricImage& y) {
    if (x.h != y.h || x.w != y.w || x.c != y.c)
        throw ValidationError("ssim: image shapes differ");
    if (x.h < kWin || x.w < kWin)
        throw ValidationError("ssim: images must be at least 11x11");
    double acc = 0.0;
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    for (int c = 0; c < x.c; ++c)
        acc += ssim_channel(x.v.data() + c * plane, y.v.data() + c * plane, x.h, x.w);
    return acc / static_cast<double>(x.c);
}

double psnr(const MetricImage& x, const MetricImage& y) {
    if (x.h != y.h || x.w != y.w || x.c != y.c)
        throw ValidationError("psnr: image shapes differ");
    double mse = 0.0;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        const double d = x.v[i] - y.v[i];
        mse += d * d;
    }
    mse /= static_cast<double>(x.v.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace favtgan
