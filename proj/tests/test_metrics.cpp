#include <doctest.h>

#include <cmath>

#include "favtgan/metrics.hpp"
#include "favtgan/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace favtgan;

namespace {

MetricImage random_metric_image(int size, Rng& rng) {
    MetricImage m;
    m.h = m.w = size;
    m.c = 3;
    m.v.resize(static_cast<std::size_t>(3) * size * size);
    for (double& v : m.v) v = rng.uniform(0.0, 255.0);
    return m;
}

// Structured natural-ish content from the synthetic generator.
MetricImage structured_image(int size, std::uint64_t seed) {
    testutil::TempDir tmp("metric");
    synthesize_dataset(1, size, seed, SynthRule::channel_inversion, tmp.path());
    return to_metric_image(read_image(tmp.path() / "visible" / "p0000.png"));
}

}  // namespace

TEST_CASE("ssim(x,x) is exactly 1 and ssim is symmetric") {
    Rng rng(61);
    const MetricImage x = random_metric_image(32, rng);
    CHECK(ssim(x, x) == 1.0);
    const MetricImage y = random_metric_image(32, rng);
    CHECK(ssim(x, y) == doctest::Approx(ssim(y, x)).epsilon(1e-15));
    CHECK(ssim(x, y) >= -1.0);
    CHECK(ssim(x, y) <= 1.0);
}

TEST_CASE("ssim matches the brute-force windowed oracle on random pairs") {
    Rng rng(62);
    for (int trial = 0; trial < 10; ++trial) {
        const MetricImage x = random_metric_image(64, rng);
        const MetricImage y = random_metric_image(64, rng);
        CHECK(std::abs(ssim(x, y) - testutil::oracle_ssim(x, y)) < 1e-6);
    }
}

TEST_CASE("ssim ordering: inversion scores far below mild noise") {
    const MetricImage x = structured_image(64, 91);
    MetricImage inverted = x;
    for (double& v : inverted.v) v = 255.0 - v;
    MetricImage noisy = x;
    Rng rng(63);
    for (double& v : noisy.v) v = std::clamp(v + rng.uniform(-4.0, 4.0), 0.0, 255.0);
    CHECK(ssim(x, inverted) < ssim(x, noisy));
    CHECK(ssim(x, noisy) > 0.8);
}

TEST_CASE("ssim is stable under a shared constant shift at matched local means") {
    // Contrast/structure terms are exactly shift-invariant; the luminance
    // term is too once local means agree. Tiny zero-mean perturbations keep
    // means matched to ~1e-3, which bounds the shift effect below 1e-9.
    const MetricImage x = structured_image(64, 92);
    MetricImage y = x;
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += ((i % 2 == 0) ? 0.005 : -0.005);
    const double base = ssim(x, y);
    for (double c : {-30.0, 10.0, 40.0}) {
        MetricImage xs = x, ys = y;
        for (double& v : xs.v) v += c;
        for (double& v : ys.v) v += c;
        CHECK(std::abs(ssim(xs, ys) - base) < 1e-6);
    }
}

TEST_CASE("psnr closed forms") {
    MetricImage x, y;
    x.h = y.h = 16;
    x.w = y.w = 16;
    x.c = y.c = 3;
    x.v.assign(768, 0.0);
    y.v.assign(768, 255.0);
    CHECK(psnr(x, y) == doctest::Approx(0.0).epsilon(1e-12));  // MSE = 255^2

    // uniform offset c=16: 10*log10(255^2/256)
    y.v.assign(768, 16.0);
    const double want = 10.0 * std::log10(65025.0 / 256.0);
    CHECK(psnr(x, y) == doctest::Approx(want).epsilon(1e-9));
    CHECK(want == doctest::Approx(24.0486).epsilon(1e-4));

    CHECK(std::isinf(psnr(x, x)));
}

TEST_CASE("psnr matches the elementwise oracle on random pairs") {
    Rng rng(64);
    for (int trial = 0; trial < 10; ++trial) {
        const MetricImage x = random_metric_image(64, rng);
        const MetricImage y = random_metric_image(64, rng);
        CHECK(std::abs(psnr(x, y) - testutil::oracle_psnr(x, y)) < 1e-9);
    }
}

TEST_CASE("psnr strictly decreases as noise amplitude grows") {
    const MetricImage x = structured_image(64, 93);
    double prev = std::numeric_limits<double>::infinity();
    for (double amp : {2.0, 8.0, 32.0}) {
        Rng rng(65);  // same noise pattern, scaled
        MetricImage y = x;
        for (double& v : y.v) v = std::clamp(v + rng.uniform(-amp, amp), 0.0, 255.0);
        const double p = psnr(x, y);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("metric shape mismatches are rejected") {
    Rng rng(66);
    const MetricImage x = random_metric_image(32, rng);
    const MetricImage y = random_metric_image(16, rng);
    CHECK_THROWS_AS(ssim(x, y), ValidationError);
    CHECK_THROWS_AS(psnr(x, y), ValidationError);
    const MetricImage tiny = random_metric_image(8, rng);
    CHECK_THROWS_AS(ssim(tiny, tiny), ValidationError);
}
