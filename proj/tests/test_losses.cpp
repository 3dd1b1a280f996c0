#include <doctest.h>

#include <cmath>

#include "favtgan/losses.hpp"
#include "test_util.hpp"

using namespace favtgan;

namespace {

TensorT<double> const_patch(double v, int n = 1, int s = 16) {
    TensorT<double> t(n, 1, s, s);
    t.fill(v);
    return t;
}

TensorT<double> logits_row(std::initializer_list<double> vals) {
    TensorT<double> t(1, static_cast<int>(vals.size()), 1, 1);
    int i = 0;
    for (double v : vals) t.data[i++] = v;
    return t;
}

}  // namespace

TEST_CASE("generator adversarial loss closed forms") {
    CHECK(adv_loss_g(const_patch(0.9), 0.9) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(adv_loss_g(const_patch(0.0), 0.9) == doctest::Approx(0.405).epsilon(1e-9));
    CHECK(adv_loss_g(const_patch(1.0), 0.9) == doctest::Approx(0.005).epsilon(1e-9));
    CHECK_THROWS_AS(adv_loss_g(const_patch(0.5), 0.0), ValidationError);
    CHECK_THROWS_AS(adv_loss_g(const_patch(0.5), 1.5), ValidationError);
}

TEST_CASE("discriminator adversarial loss closed forms") {
    {
        const auto [ar, af] = adv_loss_d(const_patch(0.9), const_patch(0.0), 0.9);
        CHECK(ar == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(af == doctest::Approx(0.0).epsilon(1e-12));
    }
    {
        const auto [ar, af] = adv_loss_d(const_patch(0.0), const_patch(1.0), 0.9);
        CHECK(ar == doctest::Approx(0.405).epsilon(1e-9));
        CHECK(af == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("constant patch minimizing adv_real + adv_fake sits at target/2") {
    // argmin_c (c-0.9)^2 + c^2 = 0.45; scan numerically.
    double best_c = -1.0, best = 1e9;
    for (int i = 0; i <= 900; ++i) {
        const double c = i / 1000.0;
        const auto [ar, af] = adv_loss_d(const_patch(c), const_patch(c), 0.9);
        if (ar + af < best) {
            best = ar + af;
            best_c = c;
        }
    }
    CHECK(best_c == doctest::Approx(0.45).epsilon(1e-6));
}

TEST_CASE("lsgan quadratic homogeneity: scaling values and target scales loss by s^2") {
    Rng rng(42);
    const TensorT<double> patch = testutil::random_tensor<double>(2, 1, 8, 8, rng);
    const double base = lsgan_loss(patch, 0.9);
    for (double s : {0.5, 2.0, 7.0}) {
        TensorT<double> scaled = patch;
        for (double& v : scaled.data) v *= s;
        CHECK(lsgan_loss(scaled, 0.9 * s) == doctest::Approx(s * s * base).epsilon(1e-9));
    }
}

TEST_CASE("auxiliary cross-entropy closed forms") {
    CHECK(aux_loss(logits_row({10.0, -10.0}), {0}) <= 1e-4);
    CHECK(aux_loss(logits_row({0.0, 0.0}), {0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(aux_loss(logits_row({0.0, 0.0, 0.0}), {2}) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(aux_loss(logits_row({0.0, 0.0}), {2}), ValidationError);
    CHECK_THROWS_AS(aux_loss(logits_row({0.0, 0.0}), {-1}), ValidationError);
}

TEST_CASE("softmax rows sum to one") {
    Rng rng(43);
    const TensorT<double> logits = testutil::random_tensor<double>(4, 5, 1, 1, rng, -3.0, 3.0);
    for (int i = 0; i < 4; ++i) {
        const std::vector<double> p = softmax(logits, i);
        double sum = 0.0;
        for (double v : p) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-6);
    }
}

TEST_CASE("l1 loss closed forms and elementwise oracle") {
    Rng rng(44);
    const TensorT<double> b = testutil::random_tensor<double>(2, 3, 6, 6, rng);
    CHECK(l1_loss(b, b) == 0.0);

    TensorT<double> ones = b, neg = b;
    ones.fill(1.0);
    neg.fill(-1.0);
    CHECK(l1_loss(ones, neg) == doctest::Approx(2.0).epsilon(1e-12));

    const TensorT<double> bh = testutil::random_tensor<double>(2, 3, 6, 6, rng);
    double oracle = 0.0;
    for (std::size_t i = 0; i < b.data.size(); ++i) oracle += std::abs(b.data[i] - bh.data[i]);
    oracle /= static_cast<double>(b.size());
    CHECK(l1_loss(b, bh) == doctest::Approx(oracle).epsilon(1e-7));

    TensorT<double> wrong(2, 3, 6, 5);
    CHECK_THROWS_AS(l1_loss(b, wrong), ValidationError);
}

TEST_CASE("total generator loss composes exactly") {
    const auto g = total_g(0.405, std::log(2.0), 0.1, 100.0, ConditioningMode::baseline);
    CHECK(g.total == doctest::Approx(0.405 + std::log(2.0) + 10.0).epsilon(1e-12));  // = 11.0981
    CHECK(g.total == g.adv + g.aux + 100.0 * g.l1);

    const auto nolambda = total_g(0.3, 0.2, 5.0, 0.0, ConditioningMode::baseline);
    CHECK(nolambda.total == doctest::Approx(0.5).epsilon(1e-12));

    const auto plain = total_g(0.5, 123.0, 0.02, 100.0, ConditioningMode::plain_pix2pix);
    CHECK(plain.aux == 0.0);
    CHECK(plain.total == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("total discriminator loss composes exactly") {
    const auto zero = total_d(0.0, 0.0, 0.0, 0.0, ConditioningMode::baseline);
    CHECK(zero.total == 0.0);

    const auto d = total_d(0.405, 0.5, std::log(2.0), std::log(2.0), ConditioningMode::baseline);
    CHECK(d.total ==
          doctest::Approx(0.5 * (0.405 + 0.5 + 2.0 * std::log(2.0))).epsilon(1e-12));  // = 1.1456
    CHECK(d.total ==
          doctest::Approx(0.5 * ((d.adv_real + d.aux_real) + (d.adv_fake + d.aux_fake)))
              .epsilon(1e-12));

    const auto plain = total_d(0.405, 0.5, 9.0, 9.0, ConditioningMode::plain_pix2pix);
    CHECK(plain.aux_real == 0.0);
    CHECK(plain.aux_fake == 0.0);
    CHECK(plain.total == doctest::Approx(0.4525).epsilon(1e-12));
}

TEST_CASE("non-finite inputs are rejected") {
    TensorT<double> bad = const_patch(0.5);
    bad.data[3] = std::nan("");
    CHECK_THROWS_AS(lsgan_loss(bad, 0.9), RuntimeFailure);
    TensorT<double> bad_logits = logits_row({0.0, std::numeric_limits<double>::infinity()});
    CHECK_THROWS_AS(aux_loss(bad_logits, {0}), RuntimeFailure);
}

TEST_CASE("loss gradients match finite differences") {
    Rng rng(45);
    TensorT<double> patch = testutil::random_tensor<double>(2, 1, 4, 4, rng);
    const TensorT<double> g = lsgan_loss_grad(patch, 0.9, 1.0);
    const double h = 1e-7;
    for (int i : {0, 7, 19, 31}) {
        const double saved = patch.data[i];
        patch.data[i] = saved + h;
        const double lp = lsgan_loss(patch, 0.9);
        patch.data[i] = saved - h;
        const double lm = lsgan_loss(patch, 0.9);
        patch.data[i] = saved;
        CHECK(std::abs((lp - lm) / (2 * h) - g.data[i]) < 1e-6);
    }

    TensorT<double> logits = testutil::random_tensor<double>(3, 4, 1, 1, rng, -2.0, 2.0);
    const std::vector<int> targets = {1, 3, 0};
    const TensorT<double> gl = aux_loss_grad(logits, targets, 1.0);
    for (int i = 0; i < static_cast<int>(logits.data.size()); ++i) {
        const double saved = logits.data[i];
        logits.data[i] = saved + h;
        const double lp = aux_loss(logits, targets);
        logits.data[i] = saved - h;
        const double lm = aux_loss(logits, targets);
        logits.data[i] = saved;
        CHECK(std::abs((lp - lm) / (2 * h) - gl.data[i]) < 1e-6);
    }
}
