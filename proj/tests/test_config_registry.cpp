#include <doctest.h>

#include <fstream>

#include "favtgan/config.hpp"
#include "favtgan/errors.hpp"
#include "favtgan/manifest.hpp"
#include "favtgan/sensor_label.hpp"
#include "test_util.hpp"

using namespace favtgan;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

constexpr const char* kMinimalConfig = R"({
  "datasets": ["a.json", "b.json"],
  "mode": "baseline",
  "seed": 3,
  "output_dir": "runs/x"
})";

DatasetManifest named_manifest(const std::string& name, SensorFamily family) {
    DatasetManifest m;
    m.dataset_name = name;
    m.sensor_family = family;
    return m;
}

}  // namespace

TEST_CASE("load_config fills documented defaults") {
    testutil::TempDir tmp("cfg");
    const auto path = tmp.path() / "c.json";
    write_text(path, kMinimalConfig);
    const ExperimentConfig c = load_config(path);
    CHECK(c.lambda_l1 == 100.0);
    CHECK(c.epochs == 2000);
    CHECK(c.batch_size == 12);
    CHECK(c.learning_rate == 0.00002);
    CHECK(c.adam_beta1 == 0.5);
    CHECK(c.adam_beta2 == 0.999);
    CHECK(c.decay_epoch == 100);
    CHECK(c.channels == 3);
    CHECK(c.image_size == 256);
    CHECK(c.smoothed_real_target == 0.9);
    CHECK(c.mode == ConditioningMode::baseline);
    CHECK(c.datasets.size() == 2);
}

TEST_CASE("decay_epoch must stay below epochs") {
    testutil::TempDir tmp("cfg");
    const auto path = tmp.path() / "c.json";
    write_text(path, R"({"datasets":["a","b"],"mode":"baseline","seed":1,
      "output_dir":"o","epochs":100,"decay_epoch":100})");
    CHECK_THROWS_WITH_AS(load_config(path),
                         doctest::Contains("decay_epoch < epochs"), ValidationError);
}

TEST_CASE("unknown and malformed fields are rejected") {
    testutil::TempDir tmp("cfg");
    const auto path = tmp.path() / "c.json";
    write_text(path, R"({"datasets":["a","b"],"mode":"baseline","seed":1,
      "output_dir":"o","typo_field":5})");
    CHECK_THROWS_WITH_AS(load_config(path), doctest::Contains("typo_field"), ValidationError);

    write_text(path, "{ not json");
    CHECK_THROWS_AS(load_config(path), ValidationError);

    CHECK_THROWS_AS(load_config(tmp.path() / "missing.json"), ValidationError);
}

TEST_CASE("hyperparameter invariants are validated") {
    ExperimentConfig c;
    c.datasets = {"a", "b"};
    c.seed = 1;
    c.output_dir = "o";
    validate_config(c);

    auto expect_invalid = [](ExperimentConfig bad, const char* needle) {
        CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains(needle), ValidationError);
    };
    {
        ExperimentConfig bad = c;
        bad.learning_rate = 0.0;
        expect_invalid(bad, "learning_rate");
    }
    {
        ExperimentConfig bad = c;
        bad.adam_beta1 = 1.0;
        expect_invalid(bad, "adam_beta1");
    }
    {
        ExperimentConfig bad = c;
        bad.adam_beta2 = -0.1;
        expect_invalid(bad, "adam_beta2");
    }
    {
        ExperimentConfig bad = c;
        bad.smoothed_real_target = 0.0;
        expect_invalid(bad, "smoothed_real_target");
    }
    {
        ExperimentConfig bad = c;
        bad.image_size = 100;  // not a multiple of 2^8
        expect_invalid(bad, "image_size");
    }
    {
        ExperimentConfig bad = c;
        bad.mode = ConditioningMode::noisy_labels;
        bad.datasets = {"only"};
        expect_invalid(bad, "at least 2 datasets");
    }
    {
        ExperimentConfig bad = c;
        bad.update_order = "simultaneous";
        expect_invalid(bad, "update_order");
    }
}

TEST_CASE("config serialization round-trips losslessly") {
    testutil::TempDir tmp("cfg");
    Rng rng(21);
    for (int trial = 0; trial < 24; ++trial) {
        ExperimentConfig c;
        c.datasets = {"m0.json", "m1.json"};
        c.mode = static_cast<ConditioningMode>(rng.uniform_int(5));
        if (c.mode == ConditioningMode::plain_pix2pix && rng.uniform_int(2) == 0)
            c.datasets = {"m0.json"};
        c.epochs = 2 + rng.uniform_int(4000);
        c.decay_epoch = 1 + rng.uniform_int(c.epochs - 1);
        c.batch_size = 1 + rng.uniform_int(16);
        c.learning_rate = rng.uniform(1e-6, 1e-2);
        c.adam_beta1 = rng.uniform(0.0, 0.999);
        c.adam_beta2 = rng.uniform(0.0, 0.9999);
        c.lambda_l1 = rng.uniform(0.1, 200.0);
        c.seed = static_cast<std::int64_t>(rng.next_u64() >> 1);
        c.smoothed_real_target = rng.uniform(0.5, 1.0);
        c.output_dir = "runs/trial" + std::to_string(trial);
        c.g_depth = 2 + rng.uniform_int(4);
        c.d_depth = 1 + rng.uniform_int(3);
        const int factor = 1 << std::max(c.g_depth, c.d_depth);
        c.image_size = factor * (1 + rng.uniform_int(4));
        c.g_base_width = 1 + rng.uniform_int(32);
        c.d_base_width = 1 + rng.uniform_int(32);
        c.width_cap = std::max(c.g_base_width, c.d_base_width) + rng.uniform_int(256);
        c.sample_interval = 1 + rng.uniform_int(100);
        c.checkpoint_interval = 1 + rng.uniform_int(100);
        c.update_order = rng.uniform_int(2) == 0 ? "d_first" : "g_first";
        validate_config(c);

        const auto path = tmp.path() / ("t" + std::to_string(trial) + ".json");
        save_config(c, path);
        const ExperimentConfig back = load_config(path);
        CHECK(back == c);
        CHECK(config_hash(back) == config_hash(c));
    }
}

TEST_CASE("config hash changes when any field changes") {
    ExperimentConfig c;
    c.datasets = {"a", "b"};
    c.seed = 1;
    c.output_dir = "o";
    ExperimentConfig d = c;
    d.learning_rate = 3e-5;
    CHECK(config_hash(c) != config_hash(d));
    ExperimentConfig e = c;
    e.seed = 2;
    CHECK(config_hash(c) != config_hash(e));
}

TEST_CASE("label registry assigns contiguous ids by manifest order") {
    {
        const auto reg = build_label_registry({named_manifest("Eurecom", SensorFamily::microbolometer),
                                               named_manifest("ADAS", SensorFamily::microbolometer)});
        REQUIRE(reg.size() == 2);
        CHECK(reg[0] == SensorLabel{0, "Eurecom", SensorFamily::microbolometer});
        CHECK(reg[1] == SensorLabel{1, "ADAS", SensorFamily::microbolometer});
    }
    {
        const auto reg =
            build_label_registry({named_manifest("Iris", SensorFamily::bst_ferroelectric),
                                  named_manifest("OSU", SensorFamily::bst_ferroelectric)});
        REQUIRE(reg.size() == 2);
        CHECK(reg[0] == SensorLabel{0, "Iris", SensorFamily::bst_ferroelectric});
        CHECK(reg[1] == SensorLabel{1, "OSU", SensorFamily::bst_ferroelectric});
    }
    {
        const auto reg = build_label_registry({named_manifest("solo", SensorFamily::synthetic)});
        REQUIRE(reg.size() == 1);
        CHECK(reg[0].id == 0);
    }
}

TEST_CASE("label registry is a pure function of manifest order") {
    const std::vector<DatasetManifest> ms = {named_manifest("x", SensorFamily::synthetic),
                                             named_manifest("y", SensorFamily::microbolometer)};
    CHECK(build_label_registry(ms) == build_label_registry(ms));
}

TEST_CASE("duplicate dataset names are rejected") {
    CHECK_THROWS_AS(build_label_registry({named_manifest("same", SensorFamily::synthetic),
                                          named_manifest("same", SensorFamily::synthetic)}),
                    ValidationError);
    CHECK_THROWS_AS(build_label_registry({}), ValidationError);
}

TEST_CASE("registry lookup reports a registry mismatch for unknown datasets") {
    const auto reg = build_label_registry({named_manifest("a", SensorFamily::synthetic),
                                           named_manifest("b", SensorFamily::synthetic)});
    CHECK(registry_label_for(reg, "b") == 1);
    CHECK_THROWS_WITH_AS(registry_label_for(reg, "c"), doctest::Contains("registry mismatch"),
                         ValidationError);
}

TEST_CASE("manifest parsing validates structure") {
    testutil::TempDir tmp("man");
    const auto path = tmp.path() / "m.json";
    write_text(path, R"({
      "dataset_name": "demo",
      "sensor_family": "microbolometer",
      "pairs": [
        {"pair_id": "p0", "visible": "v/p0.png", "thermal": "t/p0.png", "split": "train"},
        {"pair_id": "p1", "visible": "v/p1.png", "thermal": "t/p1.png", "split": "test"}
      ]
    })");
    const DatasetManifest m = load_manifest(path);
    CHECK(m.dataset_name == "demo");
    CHECK(m.sensor_family == SensorFamily::microbolometer);
    CHECK(m.split_size(Split::train) == 1);
    CHECK(m.split_size(Split::test) == 1);
    CHECK(m.resolve("v/p0.png") == tmp.path() / "v/p0.png");

    write_text(path, R"({
      "dataset_name": "demo",
      "sensor_family": "microbolometer",
      "pairs": [
        {"pair_id": "dup", "visible": "a", "thermal": "b", "split": "train"},
        {"pair_id": "dup", "visible": "c", "thermal": "d", "split": "train"}
      ]
    })");
    CHECK_THROWS_WITH_AS(load_manifest(path), doctest::Contains("duplicate pair_id"),
                         ValidationError);
}
