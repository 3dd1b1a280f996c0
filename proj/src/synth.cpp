#include "favtgan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "favtgan/errors.hpp"
#include "favtgan/rng.hpp"

namespace favtgan {

std::string to_string(SynthRule rule) {
    switch (rule) {
        case SynthRule::channel_inversion: return "channel_inversion";
        case SynthRule::blur_plus_bias: return "blur_plus_bias";
        case SynthRule::intensity_remap: return "intensity_remap";
    }
    return "unknown";
}

SynthRule parse_synth_rule(const std::string& text) {
    if (text == "channel_inversion") return SynthRule::channel_inversion;
    if (text == "blur_plus_bias") return SynthRule::blur_plus_bias;
    if (text == "intensity_remap") return SynthRule::intensity_remap;
    throw ValidationError("unknown synth rule '" + text +
                          "' (expected channel_inversion|blur_plus_bias|intensity_remap)");
}

namespace {

// Smooth structured content: per-channel gradient, a few soft blobs and a
// sinusoidal ripple. Values stay well inside [0,255] most of the time so the
// derivation rules have room to operate.
ImageU8 random_visible(int size, Rng& rng) {
    struct Blob {
        double cx, cy, r, amp[3];
    };
    double grad_a[3], grad_bx[3], grad_by[3];
    for (int c = 0; c < 3; ++c) {
        grad_a[c] = rng.uniform(60.0, 180.0);
        grad_bx[c] = rng.uniform(-70.0, 70.0);
        grad_by[c] = rng.uniform(-70.0, 70.0);
    }
    Blob blobs[3];
    for (Blob& b : blobs) {
        b.cx = rng.uniform(0.15, 0.85) * size;
        b.cy = rng.uniform(0.15, 0.85) * size;
        b.r = rng.uniform(0.08, 0.28) * size;
        for (int c = 0; c < 3; ++c) b.amp[c] = rng.uniform(-70.0, 70.0);
    }
    const double freq = rng.uniform(2.0, 5.0);
    const double phase = rng.uniform(0.0, 6.28318530717958648);
    const double dirx = std::cos(phase), diry = std::sin(phase);
    const double ripple_amp = rng.uniform(8.0, 24.0);

    ImageU8 img;
    img.h = img.w = size;
    img.data.resize(static_cast<std::size_t>(size) * size * 3);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = static_cast<double>(x) / size;
            const double v = static_cast<double>(y) / size;
            const double ripple =
                ripple_amp * std::sin(6.28318530717958648 * freq * (u * dirx + v * diry) + phase);
            for (int c = 0; c < 3; ++c) {
                double val = grad_a[c] + grad_bx[c] * u + grad_by[c] * v + ripple;
                for (const Blob& b : blobs) {
                    const double dx = x - b.cx, dy = y - b.cy;
                    val += b.amp[c] * std::exp(-(dx * dx + dy * dy) / (2.0 * b.r * b.r));
                }
                img.at(y, x, c) = static_cast<std::uint8_t>(
                    std::lround(std::clamp(val, 0.0, 255.0)));
            }
        }
    }
    return img;
}

}  // namespace

ImageU8 apply_synth_rule(const ImageU8& visible, SynthRule rule) {
    ImageU8 out = visible;
    switch (rule) {
        case SynthRule::channel_inversion:
            for (std::uint8_t& v : out.data) v = static_cast<std::uint8_t>(255 - v);
            break;
        case SynthRule::blur_plus_bias: {
            // 5x5 box blur with replicated borders, then +32.
            for (int y = 0; y < visible.h; ++y)
                for (int x = 0; x < visible.w; ++x)
                    for (int c = 0; c < 3; ++c) {
                        int sum = 0;
                        for (int dy = -2; dy <= 2; ++dy)
                            for (int dx = -2; dx <= 2; ++dx) {
                                const int yy = std::clamp(y + dy, 0, visible.h - 1);
                                const int xx = std::clamp(x + dx, 0, visible.w - 1);
                                sum += visible.at(yy, xx, c);
                            }
                        const int blurred = (sum + 12) / 25;
                        out.at(y, x, c) = static_cast<std::uint8_t>(std::min(255, blurred + 32));
                    }
            break;
        }
        case SynthRule::intensity_remap:
            for (std::uint8_t& v : out.data)
                v = static_cast<std::uint8_t>((static_cast<int>(v) * v + 127) / 255);
            break;
    }
    return out;
}

DatasetManifest synthesize_dataset(int n_pairs, int image_size, std::uint64_t seed, SynthRule rule,
                                   const std::filesystem::path& out_dir,
                                   const std::string& dataset_name) {
    if (n_pairs <= 0) throw ValidationError("synthesize_dataset: n_pairs must be positive");
    if (image_size < 8) throw ValidationError("synthesize_dataset: image_size must be >= 8");

    std::error_code ec;
    std::filesystem::create_directories(out_dir / "visible", ec);
    std::filesystem::create_directories(out_dir / "thermal", ec);
    if (ec || !std::filesystem::is_directory(out_dir / "visible") ||
        !std::filesystem::is_directory(out_dir / "thermal"))
        throw RuntimeFailure("synthesize_dataset: cannot create output directory " +
                             out_dir.string());

    const int n_train = std::max(1, (3 * n_pairs) / 4);

    DatasetManifest manifest;
    manifest.dataset_name = dataset_name;
    manifest.sensor_family = SensorFamily::synthetic;
    manifest.base_dir = out_dir;
    for (int i = 0; i < n_pairs; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const ImageU8 vis = random_visible(image_size, rng);
        const ImageU8 thr = apply_synth_rule(vis, rule);
        char name[32];
        std::snprintf(name, sizeof(name), "p%04d.png", i);
        const std::string vis_rel = std::string("visible/") + name;
        const std::string thr_rel = std::string("thermal/") + name;
        write_image_png(vis, out_dir / vis_rel);
        write_image_png(thr, out_dir / thr_rel);
        PairRecord rec;
        std::snprintf(name, sizeof(name), "p%04d", i);
        rec.pair_id = name;
        rec.visible_path = vis_rel;
        rec.thermal_path = thr_rel;
        rec.split = i < n_train ? Split::train : Split::test;
        manifest.pairs.push_back(std::move(rec));
    }
    save_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

}  // namespace favtgan
