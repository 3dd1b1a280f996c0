#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "favtgan/adam.hpp"
#include "favtgan/checkpoint.hpp"
#include "favtgan/config.hpp"
#include "favtgan/dataset.hpp"
#include "favtgan/patchgan.hpp"
#include "favtgan/unet.hpp"

namespace favtgan {

// One row of the per-step metrics log: the three adversarial and three
// auxiliary components, L1 and both totals.
struct LossReport {
    std::int64_t step = 0;  // 1-based global step
    int epoch = 0;
    double lr = 0.0;
    double g_adv = 0.0, g_aux = 0.0, l1 = 0.0, g_total = 0.0;
    double d_adv_real = 0.0, d_adv_fake = 0.0, d_aux_real = 0.0, d_aux_fake = 0.0, d_total = 0.0;
};

std::string loss_report_header();
std::string format_loss_report(const LossReport& report);

// Constant base_lr before decay_epoch, then linear decay reaching 0 at
// `epochs`. Non-increasing in epoch.
double lr_schedule(int epoch, double base_lr, int epochs, int decay_epoch);

struct TrainState {
    ExperimentConfig config;
    std::string hash;
    std::vector<SensorLabel> registry;
    std::unique_ptr<UNetGenerator> g;
    std::unique_ptr<PatchDiscriminator> d;
    std::vector<ParamRef<float>> g_params, d_params;
    Adam g_opt, d_opt;
    Rng rng{0};
    std::int64_t epoch = 0;        // next epoch to run
    std::int64_t global_step = 0;  // steps completed
};

TrainState init_train_state(const ExperimentConfig& config,
                            const std::vector<SensorLabel>& registry);

// One optimization step: a discriminator update (real pair with the true
// label, fake pair with the generator's conditioning label) and a generator
// update, in config order. Throws RuntimeFailure naming the batch's pair ids
// if any loss goes non-finite.
LossReport train_step(TrainState& state, const Batch& batch);

Checkpoint snapshot_state(const TrainState& state);

// Refuses (ValidationError) when the checkpoint's config hash differs from
// the state's.
void restore_state(TrainState& state, const Checkpoint& ckpt);

// Builds a generator shaped by the checkpoint's config and loads its weights.
std::unique_ptr<UNetGenerator> generator_from_checkpoint(const Checkpoint& ckpt);

struct TrainOptions {
    std::filesystem::path resume;     // checkpoint to resume from; empty = fresh run
    std::int64_t max_steps = -1;      // stop after this many global steps (< 0: no limit)
    bool progress = false;            // per-epoch progress lines on stderr
};

// Full run: loads datasets, writes config.lock, appends metrics.log, saves
// interval + final checkpoints, and emits sample grids into the run
// directory.
void train(const ExperimentConfig& config, const TrainOptions& options = {});

}  // namespace favtgan
