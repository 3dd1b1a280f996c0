#include "favtgan/image.hpp"

#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "favtgan/errors.hpp"

namespace favtgan {

namespace {

ImageU8 from_mat(const cv::Mat& bgr) {
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    ImageU8 img;
    img.h = rgb.rows;
    img.w = rgb.cols;
    img.data.resize(static_cast<std::size_t>(img.h) * img.w * 3);
    if (rgb.isContinuous()) {
        std::copy(rgb.data, rgb.data + img.data.size(), img.data.begin());
    } else {
        for (int y = 0; y < img.h; ++y)
            std::copy(rgb.ptr<std::uint8_t>(y), rgb.ptr<std::uint8_t>(y) + img.w * 3,
                      img.data.begin() + static_cast<std::size_t>(y) * img.w * 3);
    }
    return img;
}

cv::Mat to_mat_bgr(const ImageU8& img) {
    cv::Mat rgb(img.h, img.w, CV_8UC3, const_cast<std::uint8_t*>(img.data.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    return bgr;
}

}  // namespace

ImageU8 read_image(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (m.empty()) throw RuntimeFailure("cannot decode image: " + path.string());
    return from_mat(m);
}

void write_image_png(const ImageU8& img, const std::filesystem::path& path) {
    if (!cv::imwrite(path.string(), to_mat_bgr(img)))
        throw RuntimeFailure("cannot write image: " + path.string());
}

void write_image_jpeg(const ImageU8& img, const std::filesystem::path& path) {
    if (!cv::imwrite(path.string(), to_mat_bgr(img), {cv::IMWRITE_JPEG_QUALITY, 95}))
        throw RuntimeFailure("cannot write image: " + path.string());
}

ImageU8 resize_bicubic(const ImageU8& img, int size) {
    if (img.h == size && img.w == size) return img;
    cv::Mat src(img.h, img.w, CV_8UC3, const_cast<std::uint8_t*>(img.data.data()));
    cv::Mat dst;
    cv::resize(src, dst, cv::Size(size, size), 0, 0, cv::INTER_CUBIC);
    ImageU8 out;
    out.h = size;
    out.w = size;
    out.data.assign(dst.data, dst.data + static_cast<std::size_t>(size) * size * 3);
    return out;
}

Tensor image_to_tensor(const ImageU8& img) {
    Tensor t(1, 3, img.h, img.w);
    const std::int64_t plane = static_cast<std::int64_t>(img.h) * img.w;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c)
                t.data[c * plane + static_cast<std::int64_t>(y) * img.w + x] =
                    static_cast<float>(img.at(y, x, c)) / 127.5f - 1.0f;
    return t;
}

ImageU8 tensor_to_image(const Tensor& t, int sample_index) {
    if (t.c != 3) throw ValidationError("tensor_to_image: expected 3 channels");
    ImageU8 img;
    img.h = t.h;
    img.w = t.w;
    img.data.resize(static_cast<std::size_t>(t.h) * t.w * 3);
    const std::int64_t plane = static_cast<std::int64_t>(t.h) * t.w;
    const float* src = t.sample(sample_index);
    for (int y = 0; y < t.h; ++y)
        for (int x = 0; x < t.w; ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = (src[c * plane + static_cast<std::int64_t>(y) * t.w + x] + 1.0f) * 127.5f;
                img.at(y, x, c) = static_cast<std::uint8_t>(
                    std::lround(std::min(255.0f, std::max(0.0f, v))));
            }
    return img;
}

}  // namespace favtgan
