#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "favtgan/tensor.hpp"

namespace favtgan {

// 8-bit RGB image, interleaved HWC.
struct ImageU8 {
    int h = 0, w = 0;
    std::vector<std::uint8_t> data;  // size h*w*3

    std::uint8_t& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * w + x) * 3 + c]; }
    std::uint8_t at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * w + x) * 3 + c];
    }
};

ImageU8 read_image(const std::filesystem::path& path);
void write_image_png(const ImageU8& img, const std::filesystem::path& path);
void write_image_jpeg(const ImageU8& img, const std::filesystem::path& path);
ImageU8 resize_bicubic(const ImageU8& img, int size);

// 8-bit [0,255] -> float [-1,1]: v / 127.5 - 1, one tensor sample [1,3,H,W].
Tensor image_to_tensor(const ImageU8& img);

// float [-1,1] -> 8-bit: round((v + 1) * 127.5) clamped to [0,255]. Exact
// inverse of image_to_tensor on 8-bit inputs.
ImageU8 tensor_to_image(const Tensor& t, int sample_index = 0);

}  // namespace favtgan
