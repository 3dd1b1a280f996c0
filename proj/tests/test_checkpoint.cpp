#include <doctest.h>

#include <fstream>

#include "favtgan/checkpoint.hpp"
#include "favtgan/trainer.hpp"
#include "test_util.hpp"

using namespace favtgan;

namespace {

ExperimentConfig ckpt_config() {
    ExperimentConfig c;
    c.datasets = {"dsA.json", "dsB.json"};
    c.mode = ConditioningMode::baseline;
    c.seed = 99;
    c.output_dir = "unused";
    c.epochs = 20;
    c.decay_epoch = 10;
    c.batch_size = 2;
    c.learning_rate = 1e-4;
    c.image_size = 16;
    c.g_depth = 3;
    c.d_depth = 2;
    c.g_base_width = 8;
    c.d_base_width = 8;
    c.width_cap = 32;
    return c;
}

std::vector<SensorLabel> ckpt_registry() {
    return {{0, "dsA", SensorFamily::synthetic}, {1, "dsB", SensorFamily::synthetic}};
}

Batch seeded_batch(std::uint64_t seed) {
    Rng rng(seed);
    Batch b;
    b.visible = testutil::random_tensor<float>(2, 3, 16, 16, rng);
    b.thermal = testutil::random_tensor<float>(2, 3, 16, 16, rng);
    b.labels = {0, 1};
    b.pair_ids = {"a", "b"};
    return b;
}

}  // namespace

TEST_CASE("checkpoint save/load is the identity on training state") {
    testutil::TempDir tmp("ckpt");
    TrainState state = init_train_state(ckpt_config(), ckpt_registry());
    for (int s = 0; s < 3; ++s) train_step(state, seeded_batch(40 + s));

    const auto path = tmp.path() / "state.bin";
    write_checkpoint(snapshot_state(state), path);
    const Checkpoint back = read_checkpoint(path);

    CHECK(back.config == state.config);
    CHECK(back.config_hash == state.hash);
    CHECK(back.registry == state.registry);
    CHECK(back.epoch == state.epoch);
    CHECK(back.global_step == 3);
    CHECK(back.rng_state == state.rng.state());
    REQUIRE(back.g_params.size() == state.g_params.size());
    for (std::size_t i = 0; i < back.g_params.size(); ++i) {
        CHECK(back.g_params[i].name == state.g_params[i].name);
        CHECK(back.g_params[i].data == *state.g_params[i].value);
    }
    CHECK(back.g_opt.t == state.g_opt.t());
    CHECK(back.g_opt.m == state.g_opt.m());
    CHECK(back.d_opt.v == state.d_opt.v());
}

TEST_CASE("resume reproduces the uninterrupted run bitwise") {
    testutil::TempDir tmp("ckpt");

    // Uninterrupted: 10 steps.
    TrainState full = init_train_state(ckpt_config(), ckpt_registry());
    std::vector<std::string> full_log;
    for (int s = 0; s < 10; ++s)
        full_log.push_back(format_loss_report(train_step(full, seeded_batch(60 + s))));

    // Interrupted at 5, checkpointed, restored into a fresh state.
    TrainState half = init_train_state(ckpt_config(), ckpt_registry());
    for (int s = 0; s < 5; ++s) train_step(half, seeded_batch(60 + s));
    const auto path = tmp.path() / "halfway.bin";
    write_checkpoint(snapshot_state(half), path);

    TrainState resumed = init_train_state(ckpt_config(), ckpt_registry());
    restore_state(resumed, read_checkpoint(path));
    CHECK(resumed.global_step == 5);
    for (int s = 5; s < 10; ++s) {
        const std::string row = format_loss_report(train_step(resumed, seeded_batch(60 + s)));
        CHECK(row == full_log[s]);
    }
}

TEST_CASE("resume with an edited config is refused with a hash mismatch") {
    testutil::TempDir tmp("ckpt");
    TrainState state = init_train_state(ckpt_config(), ckpt_registry());
    train_step(state, seeded_batch(70));
    const auto path = tmp.path() / "state.bin";
    write_checkpoint(snapshot_state(state), path);

    ExperimentConfig edited = ckpt_config();
    edited.learning_rate = 5e-4;
    TrainState other = init_train_state(edited, ckpt_registry());
    CHECK_THROWS_WITH_AS(restore_state(other, read_checkpoint(path)),
                         doctest::Contains("hash mismatch"), ValidationError);
}

TEST_CASE("truncated or tampered checkpoint files are rejected without state changes") {
    testutil::TempDir tmp("ckpt");
    TrainState state = init_train_state(ckpt_config(), ckpt_registry());
    train_step(state, seeded_batch(80));
    const auto path = tmp.path() / "state.bin";
    write_checkpoint(snapshot_state(state), path);

    const std::string bytes = testutil::read_file_bytes(path);

    {  // truncation
        std::ofstream out(tmp.path() / "cut.bin", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_WITH_AS(read_checkpoint(tmp.path() / "cut.bin"), doctest::Contains("corrupt"),
                         RuntimeFailure);

    {  // bit flip in the payload
        std::string flipped = bytes;
        flipped[bytes.size() / 2] ^= 0x40;
        std::ofstream out(tmp.path() / "flip.bin", std::ios::binary);
        out.write(flipped.data(), static_cast<std::streamsize>(flipped.size()));
    }
    CHECK_THROWS_WITH_AS(read_checkpoint(tmp.path() / "flip.bin"), doctest::Contains("corrupt"),
                         RuntimeFailure);

    CHECK_THROWS_AS(read_checkpoint(tmp.path() / "missing.bin"), RuntimeFailure);
}

TEST_CASE("generator_from_checkpoint rebuilds an identical forward map") {
    testutil::TempDir tmp("ckpt");
    TrainState state = init_train_state(ckpt_config(), ckpt_registry());
    for (int s = 0; s < 2; ++s) train_step(state, seeded_batch(90 + s));
    const auto path = tmp.path() / "state.bin";
    write_checkpoint(snapshot_state(state), path);

    auto g = generator_from_checkpoint(read_checkpoint(path));
    Rng rng(123);
    const Tensor x = testutil::random_tensor<float>(1, 5, 16, 16, rng);
    CHECK(max_abs_diff(g->forward(x), state.g->forward(x)) == 0.0);
}
