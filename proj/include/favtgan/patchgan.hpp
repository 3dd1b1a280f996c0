#pragma once

// PatchGAN discriminator with a shared convolutional trunk and two heads:
//  - patch head: 1-channel projection conv giving a real/fake score map
//    (16x16 for 256x256 inputs at the default trunk depth of 4);
//  - label head: global average pooling over the trunk's final feature map
//    followed by a linear layer producing sensor-class logits.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "favtgan/layers.hpp"

namespace favtgan {

template <typename T>
class PatchDiscriminatorT {
public:
    // use_norm=false ablates the instance norms (whose statistics couple all
    // spatial positions) so tests can check the trunk's receptive-field
    // geometry exactly.
    PatchDiscriminatorT(int in_ch, int n_labels, int depth, int base_width, int width_cap,
                        Rng& rng, std::string prefix = "d", bool use_norm = true)
        : in_ch_(in_ch), n_labels_(n_labels), depth_(depth) {
        if (depth < 1) throw ValidationError("discriminator depth must be >= 1");
        if (n_labels < 1) throw ValidationError("discriminator needs at least one label class");
        std::vector<int> widths(depth);
        for (int i = 0; i < depth; ++i)
            widths[i] = std::min(base_width << i, width_cap);

        int prev = in_ch;
        for (int i = 0; i < depth; ++i) {
            const bool norm = (i != 0) && use_norm;
            blocks_.push_back(Block{
                Conv2d<T>(prefix + ".block" + std::to_string(i), prev, widths[i], 4, 2, 1, !norm),
                InstanceNorm2d<T>{}, LeakyReLU<T>(0.2), norm});
            prev = widths[i];
        }
        // Same-size projection: kernel 4, stride 1, pad (top 2, bottom 1, left 2, right 1).
        proj_ = Conv2d<T>(prefix + ".proj", prev, 1, 4, 1, 2, 1, 2, 1, true);
        aux_ = Linear<T>(prefix + ".aux", prev, n_labels);

        for (auto& b : blocks_) b.conv.init(rng);
        proj_.init(rng);
        aux_.init(rng);
    }

    int in_channels() const { return in_ch_; }
    int n_labels() const { return n_labels_; }
    int trunk_depth() const { return depth_; }
    int patch_size(int input_size) const { return input_size >> depth_; }

    // Returns (patch score map [N,1,S,S], label logits [N,n_labels,1,1]).
    std::pair<TensorT<T>, TensorT<T>> forward(const TensorT<T>& x) {
        if (x.c != in_ch_)
            throw ValidationError("discriminator: input has " + std::to_string(x.c) +
                                  " channels, expected " + std::to_string(in_ch_));
        if (x.h % (1 << depth_) != 0 || x.w % (1 << depth_) != 0 || x.h < (1 << depth_) ||
            x.w < (1 << depth_))
            throw ValidationError("discriminator: spatial size must be a positive multiple of 2^depth");
        TensorT<T> h = x;
        for (auto& b : blocks_) {
            h = b.conv.forward(h);
            if (b.use_norm) h = b.norm.forward(h);
            h = b.act.forward(h);
        }
        trunk_h_ = h.h;
        trunk_w_ = h.w;
        TensorT<T> patch = proj_.forward(h);
        TensorT<T> logits = aux_.forward(global_avg_pool(h));
        return {std::move(patch), std::move(logits)};
    }

    // glogits may be an empty tensor (n == 0) when no auxiliary loss is used.
    TensorT<T> backward(const TensorT<T>& gpatch, const TensorT<T>& glogits) {
        TensorT<T> gt = proj_.backward(gpatch);
        if (glogits.size() > 0) {
            TensorT<T> gp = global_avg_pool_backward(aux_.backward(glogits), trunk_h_, trunk_w_);
            for (std::size_t i = 0; i < gt.data.size(); ++i) gt.data[i] += gp.data[i];
        }
        for (int i = depth_ - 1; i >= 0; --i) {
            gt = blocks_[i].act.backward(gt);
            if (blocks_[i].use_norm) gt = blocks_[i].norm.backward(gt);
            gt = blocks_[i].conv.backward(gt);
        }
        return gt;
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        for (auto& b : blocks_) b.conv.collect_params(out);
        proj_.collect_params(out);
        aux_.collect_params(out);
        return out;
    }

    std::int64_t param_count() {
        std::int64_t total = 0;
        for (auto& b : blocks_) total += b.conv.param_count();
        total += proj_.param_count() + aux_.param_count();
        return total;
    }

    std::int64_t first_layer_param_count() { return blocks_.front().conv.param_count(); }

private:
    struct Block {
        Conv2d<T> conv;
        InstanceNorm2d<T> norm;
        LeakyReLU<T> act;
        bool use_norm;
    };

    int in_ch_, n_labels_, depth_;
    int trunk_h_ = 0, trunk_w_ = 0;
    std::vector<Block> blocks_;
    Conv2d<T> proj_;
    Linear<T> aux_;
};

using PatchDiscriminator = PatchDiscriminatorT<float>;

}  // namespace favtgan
