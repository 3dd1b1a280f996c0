#pragma once

#include <vector>

#include "favtgan/image.hpp"

namespace favtgan {

// Image in the metric domain: double values on the [0,255] scale, planar CHW.
struct MetricImage {
    int h = 0, w = 0, c = 0;
    std::vector<double> v;

    double at(int ci, int y, int x) const {
        return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }
    double& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
};

MetricImage to_metric_image(const ImageU8& img);

// Structural similarity: 11x11 Gaussian window (sigma 1.5), K1=0.01,
// K2=0.03, dynamic range 255, computed over fully valid window positions per
// channel and averaged across channels. Symmetric in its arguments.
double ssim(const MetricImage& x, const MetricImage& y);

// 10*log10(255^2 / MSE) over all channels; +infinity when images are equal.
double psnr(const MetricImage& x, const MetricImage& y);

}  // namespace favtgan
