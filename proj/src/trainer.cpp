#include "favtgan/trainer.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include "favtgan/image.hpp"
#include "favtgan/losses.hpp"

namespace favtgan {

namespace {

constexpr std::uint64_t kGenInitStream = 0x47454e49ULL;   // generator init
constexpr std::uint64_t kDiscInitStream = 0x44495343ULL;  // discriminator init
constexpr std::uint64_t kTrainStream = 0x54524e47ULL;     // label/noise sampling
constexpr std::uint64_t kSampleStream = 0x534d504cULL;    // sample-grid noise

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const std::string& id : ids) out += (out.empty() ? "" : ", ") + id;
    return out;
}

Tensor assemble_condition_batch(const std::vector<int>& labels, int n_labels,
                                ConditioningMode mode, CondRole role, int size, Rng& rng,
                                std::vector<int>* used_labels) {
    const int k = condition_channels(mode, role, n_labels);
    Tensor out(static_cast<int>(labels.size()), k, size, size);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ConditionTensor cond = make_condition<float>(labels[i], n_labels, mode, role, size, rng);
        if (used_labels) (*used_labels)[i] = cond.label_used;
        if (k > 0)
            std::copy(cond.channels.data.begin(), cond.channels.data.end(),
                      out.sample(static_cast<int>(i)));
    }
    return out;
}

// One-hot tensors for the discriminator input; no RNG draws involved.
Tensor one_hot_batch(const std::vector<int>& labels, int n_labels, ConditioningMode mode,
                     int size) {
    const int k = condition_channels(mode, CondRole::discriminator, n_labels);
    Tensor out(static_cast<int>(labels.size()), k, size, size);
    if (k == 0) return out;
    const std::int64_t plane = static_cast<std::int64_t>(size) * size;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        float* dst = out.sample(static_cast<int>(i)) + labels[i] * plane;
        std::fill(dst, dst + plane, 1.0f);
    }
    return out;
}

}  // namespace

std::string loss_report_header() {
    return "step,epoch,lr,g_adv,g_aux,l1,g_total,d_adv_real,d_adv_fake,d_aux_real,d_aux_fake,d_total";
}

std::string format_loss_report(const LossReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%lld,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                  static_cast<long long>(r.step), r.epoch, r.lr, r.g_adv, r.g_aux, r.l1, r.g_total,
                  r.d_adv_real, r.d_adv_fake, r.d_aux_real, r.d_aux_fake, r.d_total);
    return buf;
}

double lr_schedule(int epoch, double base_lr, int epochs, int decay_epoch) {
    if (epoch < decay_epoch) return base_lr;
    return base_lr * static_cast<double>(epochs - epoch) / static_cast<double>(epochs - decay_epoch);
}

TrainState init_train_state(const ExperimentConfig& config,
                            const std::vector<SensorLabel>& registry) {
    validate_config(config);
    if (registry.size() != config.datasets.size())
        throw ValidationError("label registry size must equal the number of configured datasets");
    const int n_labels = static_cast<int>(registry.size());
    const std::uint64_t seed = static_cast<std::uint64_t>(config.seed);

    TrainState state;
    state.config = config;
    state.hash = config_hash(config);
    state.registry = registry;

    const int g_in =
        config.channels + condition_channels(config.mode, CondRole::generator, n_labels);
    const int d_in =
        2 * config.channels + condition_channels(config.mode, CondRole::discriminator, n_labels);

    Rng g_rng(mix_seed(seed, kGenInitStream));
    Rng d_rng(mix_seed(seed, kDiscInitStream));
    state.g = std::make_unique<UNetGenerator>(g_in, config.channels, config.g_depth,
                                              config.g_base_width, config.width_cap, g_rng);
    state.d = std::make_unique<PatchDiscriminator>(d_in, n_labels, config.d_depth,
                                                   config.d_base_width, config.width_cap, d_rng);
    state.g_params = state.g->params();
    state.d_params = state.d->params();
    state.g_opt = Adam(config.adam_beta1, config.adam_beta2);
    state.d_opt = Adam(config.adam_beta1, config.adam_beta2);
    state.rng = Rng(mix_seed(seed, kTrainStream));
    return state;
}

LossReport train_step(TrainState& state, const Batch& batch) {
    const ExperimentConfig& cfg = state.config;
    const ConditioningMode mode = cfg.mode;
    const bool use_aux = mode != ConditioningMode::plain_pix2pix;
    const int n_labels = static_cast<int>(state.registry.size());
    const int size = batch.visible.h;
    const int n = batch.size();
    const double lr = lr_schedule(static_cast<int>(state.epoch), cfg.learning_rate, cfg.epochs,
                                  cfg.decay_epoch);
    const double target = cfg.smoothed_real_target;

    LossReport report;
    report.epoch = static_cast<int>(state.epoch);
    report.lr = lr;

    try {
        std::vector<int> gen_labels(n, 0);
        const Tensor cond_g = assemble_condition_batch(batch.labels, n_labels, mode,
                                                       CondRole::generator, size, state.rng,
                                                       &gen_labels);
        const Tensor cond_d_real = one_hot_batch(batch.labels, n_labels, mode, size);
        const Tensor cond_d_fake = one_hot_batch(gen_labels, n_labels, mode, size);

        Tensor b_hat = state.g->forward(concat_channels(batch.visible, cond_g));
        if (!b_hat.all_finite()) throw RuntimeFailure("generator produced non-finite values");

        const Tensor d_real_in = concat_channels(concat_channels(batch.visible, batch.thermal),
                                                 cond_d_real);
        const Tensor d_fake_in = concat_channels(concat_channels(batch.visible, b_hat),
                                                 cond_d_fake);
        const Tensor empty;

        auto d_update = [&] {
            auto [patch_real, logits_real] = state.d->forward(d_real_in);
            const double adv_real = lsgan_loss(patch_real, target);
            const double aux_real = use_aux ? aux_loss(logits_real, batch.labels) : 0.0;
            state.d->backward(lsgan_loss_grad(patch_real, target, 0.5),
                              use_aux ? aux_loss_grad(logits_real, batch.labels, 0.5) : empty);

            auto [patch_fake, logits_fake] = state.d->forward(d_fake_in);
            const double adv_fake = lsgan_loss(patch_fake, 0.0);
            const double aux_fake = use_aux ? aux_loss(logits_fake, gen_labels) : 0.0;
            state.d->backward(lsgan_loss_grad(patch_fake, 0.0, 0.5),
                              use_aux ? aux_loss_grad(logits_fake, gen_labels, 0.5) : empty);

            state.d_opt.step(state.d_params, lr);
            zero_grads(state.d_params);

            const DiscriminatorLossBreakdown d_loss =
                total_d(adv_real, adv_fake, aux_real, aux_fake, mode);
            report.d_adv_real = d_loss.adv_real;
            report.d_adv_fake = d_loss.adv_fake;
            report.d_aux_real = d_loss.aux_real;
            report.d_aux_fake = d_loss.aux_fake;
            report.d_total = d_loss.total;
        };

        auto g_update = [&] {
            auto [patch_fake, logits_fake] = state.d->forward(d_fake_in);
            const double adv = adv_loss_g(patch_fake, target);
            const double aux = use_aux ? aux_loss(logits_fake, gen_labels) : 0.0;
            const double l1 = l1_loss(batch.thermal, b_hat);

            Tensor gx = state.d->backward(
                lsgan_loss_grad(patch_fake, target, 1.0),
                use_aux ? aux_loss_grad(logits_fake, gen_labels, 1.0) : empty);
            zero_grads(state.d_params);  // this pass must not contribute to D's update

            Tensor g_bhat = slice_channels(gx, cfg.channels, cfg.channels);
            const Tensor l1_grad = l1_loss_grad_wrt_bhat(batch.thermal, b_hat, cfg.lambda_l1);
            for (std::size_t i = 0; i < g_bhat.data.size(); ++i) g_bhat.data[i] += l1_grad.data[i];

            state.g->backward(g_bhat);
            state.g_opt.step(state.g_params, lr);
            zero_grads(state.g_params);

            const GeneratorLossBreakdown g_loss = total_g(adv, aux, l1, cfg.lambda_l1, mode);
            report.g_adv = g_loss.adv;
            report.g_aux = g_loss.aux;
            report.l1 = g_loss.l1;
            report.g_total = g_loss.total;
        };

        if (cfg.update_order == "g_first") {
            g_update();
            d_update();
        } else {
            d_update();
            g_update();
        }
    } catch (const RuntimeFailure& e) {
        throw RuntimeFailure(std::string(e.what()) + " [step " +
                             std::to_string(state.global_step + 1) + ", batch pair_ids: " +
                             join_ids(batch.pair_ids) + "]");
    }

    ++state.global_step;
    report.step = state.global_step;
    return report;
}

Checkpoint snapshot_state(const TrainState& state) {
    Checkpoint ckpt;
    ckpt.config_hash = state.hash;
    ckpt.config = state.config;
    ckpt.registry = state.registry;
    ckpt.epoch = state.epoch;
    ckpt.global_step = state.global_step;
    ckpt.rng_state = state.rng.state();
    for (const auto& p : state.g_params) ckpt.g_params.push_back({p.name, *p.value});
    for (const auto& p : state.d_params) ckpt.d_params.push_back({p.name, *p.value});
    ckpt.g_opt.t = state.g_opt.t();
    ckpt.g_opt.m = state.g_opt.m();
    ckpt.g_opt.v = state.g_opt.v();
    ckpt.d_opt.t = state.d_opt.t();
    ckpt.d_opt.m = state.d_opt.m();
    ckpt.d_opt.v = state.d_opt.v();
    return ckpt;
}

namespace {

void load_named_params(std::vector<ParamRef<float>>& params,
                       const std::vector<NamedTensor>& stored, const char* net) {
    std::unordered_map<std::string, const NamedTensor*> by_name;
    for (const NamedTensor& t : stored) by_name[t.name] = &t;
    for (auto& p : params) {
        auto it = by_name.find(p.name);
        if (it == by_name.end())
            throw RuntimeFailure(std::string("checkpoint incompatible: missing ") + net +
                                 " tensor '" + p.name + "'");
        if (it->second->data.size() != p.value->size())
            throw RuntimeFailure(std::string("checkpoint incompatible: size mismatch for '") +
                                 p.name + "'");
        *p.value = it->second->data;
    }
}

void restore_opt(Adam& opt, const OptimizerSnapshot& snap,
                 const std::vector<ParamRef<float>>& params) {
    if (snap.t == 0 && snap.m.empty()) {
        opt = Adam(opt.beta1(), opt.beta2());
        return;
    }
    if (snap.m.size() != params.size() || snap.v.size() != params.size())
        throw RuntimeFailure("checkpoint incompatible: optimizer state shape mismatch");
    opt.set_t(snap.t);
    opt.m() = snap.m;
    opt.v() = snap.v;
}

}  // namespace

void restore_state(TrainState& state, const Checkpoint& ckpt) {
    if (ckpt.config_hash != state.hash)
        throw ValidationError("checkpoint config hash mismatch (checkpoint " + ckpt.config_hash +
                              " vs config " + state.hash + "): refusing to resume");
    load_named_params(state.g_params, ckpt.g_params, "generator");
    load_named_params(state.d_params, ckpt.d_params, "discriminator");
    restore_opt(state.g_opt, ckpt.g_opt, state.g_params);
    restore_opt(state.d_opt, ckpt.d_opt, state.d_params);
    state.rng.set_state(ckpt.rng_state);
    state.epoch = ckpt.epoch;
    state.global_step = ckpt.global_step;
}

std::unique_ptr<UNetGenerator> generator_from_checkpoint(const Checkpoint& ckpt) {
    const ExperimentConfig& cfg = ckpt.config;
    const int n_labels = static_cast<int>(ckpt.registry.size());
    const int g_in = cfg.channels + condition_channels(cfg.mode, CondRole::generator, n_labels);
    Rng rng(0);  // weights are overwritten below
    auto g = std::make_unique<UNetGenerator>(g_in, cfg.channels, cfg.g_depth, cfg.g_base_width,
                                             cfg.width_cap, rng);
    auto params = g->params();
    load_named_params(params, ckpt.g_params, "generator");
    return g;
}

namespace {

void emit_sample_grid(TrainState& state, const std::vector<ImagePair>& sample_pairs,
                      const std::filesystem::path& path, std::int64_t epoch_done) {
    if (sample_pairs.empty()) return;
    const int size = state.config.image_size;
    const int n_labels = static_cast<int>(state.registry.size());
    Rng rng(mix_seed(mix_seed(static_cast<std::uint64_t>(state.config.seed), kSampleStream),
                     static_cast<std::uint64_t>(epoch_done)));
    ImageU8 grid;
    grid.h = size * static_cast<int>(sample_pairs.size());
    grid.w = size * 3;
    grid.data.assign(static_cast<std::size_t>(grid.h) * grid.w * 3, 0);
    for (std::size_t row = 0; row < sample_pairs.size(); ++row) {
        const ImagePair& pair = sample_pairs[row];
        const Tensor cond =
            inference_condition<float>(pair.label, n_labels, state.config.mode, size, rng);
        const Tensor generated = state.g->forward(concat_channels(pair.visible, cond));
        const ImageU8 imgs[3] = {tensor_to_image(pair.visible), tensor_to_image(pair.thermal),
                                 tensor_to_image(generated)};
        for (int col = 0; col < 3; ++col)
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x)
                    for (int c = 0; c < 3; ++c)
                        grid.at(static_cast<int>(row) * size + y, col * size + x, c) =
                            imgs[col].at(y, x, c);
    }
    write_image_png(grid, path);
}

}  // namespace

void train(const ExperimentConfig& config, const TrainOptions& options) {
    validate_config(config);

    std::vector<DatasetManifest> manifests;
    for (const std::string& p : config.datasets) manifests.push_back(load_manifest(p));
    for (const DatasetManifest& m : manifests) {
        if (m.split_size(Split::train) == 0)
            throw ValidationError("dataset '" + m.dataset_name +
                                  "': train split is empty (both splits must be non-empty for "
                                  "training experiments)");
        if (m.split_size(Split::test) == 0)
            throw ValidationError("dataset '" + m.dataset_name +
                                  "': test split is empty (both splits must be non-empty for "
                                  "training experiments)");
    }
    const std::vector<SensorLabel> registry = build_label_registry(manifests);

    TrainState state = init_train_state(config, registry);

    const std::filesystem::path run_dir = resolve_output_path(config.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(run_dir / "checkpoints", ec);
    std::filesystem::create_directories(run_dir / "samples", ec);
    if (!std::filesystem::is_directory(run_dir / "checkpoints"))
        throw RuntimeFailure("cannot create run directory: " + run_dir.string());

    const bool resuming = !options.resume.empty();
    if (resuming) {
        const Checkpoint ckpt = read_checkpoint(options.resume);
        restore_state(state, ckpt);
    }

    std::vector<std::pair<const DatasetManifest*, Split>> train_entries, test_entries;
    for (const DatasetManifest& m : manifests) {
        train_entries.push_back({&m, Split::train});
        test_entries.push_back({&m, Split::test});
    }
    const CombinedDataset train_set = combine(train_entries, registry, config.image_size);
    const CombinedDataset test_set = combine(test_entries, registry, config.image_size);
    std::vector<ImagePair> sample_pairs;
    for (std::size_t i = 0; i < test_set.pairs.size() && i < 4; ++i)
        sample_pairs.push_back(test_set.pairs[i]);

    const std::int64_t spe = steps_per_epoch(static_cast<std::int64_t>(train_set.pairs.size()),
                                             config.batch_size);

    save_config(config, run_dir / "config.lock");
    const std::filesystem::path metrics_path = run_dir / "metrics.log";
    std::ofstream metrics;
    if (resuming) {
        metrics.open(metrics_path, std::ios::app);
    } else {
        metrics.open(metrics_path, std::ios::trunc);
        metrics << loss_report_header() << "\n";
    }
    if (!metrics) throw RuntimeFailure("cannot open metrics log: " + metrics_path.string());

    bool stopped = false;
    for (std::int64_t epoch = state.epoch; epoch < config.epochs && !stopped; ++epoch) {
        state.epoch = epoch;
        BatchIterator batches(train_set, config.batch_size,
                              static_cast<std::uint64_t>(config.seed), epoch, true);
        const std::int64_t already_done = state.global_step - epoch * spe;
        if (already_done > 0) batches.skip(already_done);

        Batch batch;
        while (batches.next(batch)) {
            const LossReport report = train_step(state, batch);
            metrics << format_loss_report(report) << "\n";
            metrics.flush();
            if (options.max_steps >= 0 && state.global_step >= options.max_steps) {
                stopped = true;
                break;
            }
        }

        const std::int64_t epochs_done = epoch + 1;
        const bool epoch_complete = state.global_step == epochs_done * spe;
        if (epoch_complete) {
            state.epoch = epochs_done;
            if (epochs_done % config.checkpoint_interval == 0) {
                char name[48];
                std::snprintf(name, sizeof(name), "ckpt_epoch_%06lld.bin",
                              static_cast<long long>(epochs_done));
                write_checkpoint(snapshot_state(state), run_dir / "checkpoints" / name);
            }
            if (epochs_done % config.sample_interval == 0) {
                char name[48];
                std::snprintf(name, sizeof(name), "epoch_%06lld.png",
                              static_cast<long long>(epochs_done));
                emit_sample_grid(state, sample_pairs, run_dir / "samples" / name, epochs_done);
            }
            if (options.progress)
                std::cerr << "epoch " << epochs_done << "/" << config.epochs << " done\n";
        }
    }

    if (!stopped)
        write_checkpoint(snapshot_state(state), run_dir / "checkpoints" / "ckpt_final.bin");
}

}  // namespace favtgan
