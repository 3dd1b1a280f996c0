#pragma once

// U-NET image-to-image generator: `depth` stride-2 encoder stages and the
// mirror decoder, with encoder stage i concatenated into decoder stage
// depth-i. Widths double from base_width up to width_cap. Instance norm on
// every stage except the first encoder stage, the bottleneck and the output
// stage; encoder activations are LeakyReLU(0.2), decoder ReLU, output tanh.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "favtgan/layers.hpp"

namespace favtgan {

template <typename T>
class UNetGeneratorT {
public:
    UNetGeneratorT(int in_ch, int out_ch, int depth, int base_width, int width_cap, Rng& rng,
                   std::string prefix = "g")
        : in_ch_(in_ch), out_ch_(out_ch), depth_(depth) {
        if (depth < 2) throw ValidationError("generator depth must be >= 2");
        std::vector<int> widths(depth);
        for (int i = 0; i < depth; ++i)
            widths[i] = std::min(base_width << i, width_cap);

        int prev = in_ch;
        for (int i = 0; i < depth; ++i) {
            const bool norm = (i != 0) && (i != depth - 1);
            downs_.push_back(DownStage{
                Conv2d<T>(prefix + ".down" + std::to_string(i), prev, widths[i], 4, 2, 1, !norm),
                InstanceNorm2d<T>{}, LeakyReLU<T>(0.2), norm});
            prev = widths[i];
        }
        // Decoder stage j consumes the previous stage's output concatenated
        // with encoder stage depth-2-j features.
        int up_in = widths[depth - 1];  // bottleneck features
        for (int j = 0; j + 1 < depth; ++j) {
            const int out = widths[depth - 2 - j];
            ups_.push_back(UpStage{
                ConvTranspose2d<T>(prefix + ".up" + std::to_string(j), up_in, out, 4, 2, 1, false),
                InstanceNorm2d<T>{}, LeakyReLU<T>(0.0)});
            up_out_ch_.push_back(out);
            up_in = out + widths[depth - 2 - j];
        }
        final_ = ConvTranspose2d<T>(prefix + ".final", up_in, out_ch, 4, 2, 1, true);

        for (auto& d : downs_) d.conv.init(rng);
        for (auto& u : ups_) u.conv.init(rng);
        final_.init(rng);
    }

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    int depth() const { return depth_; }

    // Ablation hook: replaces skip features with zero tensors of the same
    // shape, leaving the architecture (and output shape) untouched.
    void set_use_skips(bool v) { use_skips_ = v; }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.c != in_ch_) throw ValidationError("generator: input has " + std::to_string(x.c) +
                                                 " channels, expected " + std::to_string(in_ch_));
        if (x.h % (1 << depth_) != 0 || x.w % (1 << depth_) != 0 || x.h < (1 << depth_) ||
            x.w < (1 << depth_))
            throw ValidationError("generator: spatial size must be a positive multiple of 2^depth");
        down_out_.assign(depth_, {});
        TensorT<T> h = x;
        for (int i = 0; i < depth_; ++i) {
            h = downs_[i].conv.forward(h);
            if (downs_[i].use_norm) h = downs_[i].norm.forward(h);
            h = downs_[i].act.forward(h);
            down_out_[i] = h;
        }
        TensorT<T> u = down_out_[depth_ - 1];
        for (std::size_t j = 0; j < ups_.size(); ++j) {
            u = ups_[j].conv.forward(u);
            u = ups_[j].norm.forward(u);
            u = ups_[j].act.forward(u);
            const TensorT<T>& skip = down_out_[depth_ - 2 - static_cast<int>(j)];
            u = use_skips_ ? concat_channels(u, skip)
                           : concat_channels(u, TensorT<T>::zeros_like(skip));
        }
        return tanh_.forward(final_.forward(u));
    }

    TensorT<T> backward(const TensorT<T>& gy) {
        TensorT<T> g = final_.backward(tanh_.backward(gy));
        std::vector<TensorT<T>> skip_grad(depth_);
        for (int j = static_cast<int>(ups_.size()) - 1; j >= 0; --j) {
            TensorT<T> g_up = slice_channels(g, 0, up_out_ch_[j]);
            if (use_skips_)
                skip_grad[depth_ - 2 - j] = slice_channels(g, up_out_ch_[j], g.c - up_out_ch_[j]);
            g = ups_[j].conv.backward(ups_[j].norm.backward(ups_[j].act.backward(g_up)));
        }
        for (int i = depth_ - 1; i >= 0; --i) {
            if (i < depth_ - 1 && use_skips_ && skip_grad[i].size() > 0)
                for (std::size_t p = 0; p < g.data.size(); ++p) g.data[p] += skip_grad[i].data[p];
            g = downs_[i].act.backward(g);
            if (downs_[i].use_norm) g = downs_[i].norm.backward(g);
            g = downs_[i].conv.backward(g);
        }
        return g;
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        for (auto& d : downs_) d.conv.collect_params(out);
        for (auto& u : ups_) u.conv.collect_params(out);
        final_.collect_params(out);
        return out;
    }

    std::int64_t param_count() {
        std::int64_t total = 0;
        for (auto& d : downs_) total += d.conv.param_count();
        for (auto& u : ups_) total += u.conv.param_count();
        total += final_.param_count();
        return total;
    }

private:
    struct DownStage {
        Conv2d<T> conv;
        InstanceNorm2d<T> norm;
        LeakyReLU<T> act;
        bool use_norm;
    };
    struct UpStage {
        ConvTranspose2d<T> conv;
        InstanceNorm2d<T> norm;
        LeakyReLU<T> act;  // slope 0 == plain ReLU
    };

    int in_ch_, out_ch_, depth_;
    bool use_skips_ = true;
    std::vector<DownStage> downs_;
    std::vector<UpStage> ups_;
    std::vector<int> up_out_ch_;
    ConvTranspose2d<T> final_;
    Tanh<T> tanh_;
    std::vector<TensorT<T>> down_out_;
};

using UNetGenerator = UNetGeneratorT<float>;

}  // namespace favtgan
