#include "favtgan/dataset.hpp"

#include <iostream>

#include "favtgan/errors.hpp"
#include "favtgan/image.hpp"
#include "favtgan/rng.hpp"

namespace favtgan {

std::vector<ImagePair> load_dataset(const DatasetManifest& manifest, Split split, int image_size) {
    std::vector<ImagePair> pairs;
    for (const PairRecord& rec : manifest.pairs) {
        if (rec.split != split) continue;
        const auto vis_path = manifest.resolve(rec.visible_path);
        const auto thr_path = manifest.resolve(rec.thermal_path);
        for (const auto& p : {vis_path, thr_path})
            if (!std::filesystem::exists(p))
                throw RuntimeFailure("dataset '" + manifest.dataset_name + "', pair '" +
                                     rec.pair_id + "': missing file " + p.string());
        ImageU8 vis, thr;
        try {
            vis = read_image(vis_path);
            thr = read_image(thr_path);
        } catch (const RuntimeFailure& e) {
            throw RuntimeFailure("dataset '" + manifest.dataset_name + "', pair '" + rec.pair_id +
                                 "': " + e.what());
        }
        if (vis.h != thr.h || vis.w != thr.w)
            std::cerr << "warning: pair '" << rec.pair_id << "' has mismatched dimensions ("
                      << vis.w << "x" << vis.h << " vs " << thr.w << "x" << thr.h
                      << "); resizing both to " << image_size << "x" << image_size << "\n";
        ImagePair pair;
        pair.visible = image_to_tensor(resize_bicubic(vis, image_size));
        pair.thermal = image_to_tensor(resize_bicubic(thr, image_size));
        pair.pair_id = rec.pair_id;
        pair.dataset_name = manifest.dataset_name;
        pairs.push_back(std::move(pair));
    }
    if (pairs.empty())
        throw ValidationError("dataset '" + manifest.dataset_name + "' has no pairs in split '" +
                              to_string(split) + "'");
    return pairs;
}

CombinedDataset combine(const std::vector<std::pair<const DatasetManifest*, Split>>& datasets,
                        const std::vector<SensorLabel>& registry, int image_size) {
    if (datasets.empty()) throw ValidationError("combine: no datasets given");
    const Split split = datasets.front().second;
    for (const auto& [manifest, s] : datasets)
        if (s != split) throw ValidationError("combine: all entries must use the same split");

    CombinedDataset out;
    out.registry = registry;
    out.split = split;
    for (const auto& [manifest, s] : datasets) {
        const int label = registry_label_for(registry, manifest->dataset_name);
        std::vector<ImagePair> pairs = load_dataset(*manifest, s, image_size);
        for (ImagePair& p : pairs) {
            p.label = label;
            out.pairs.push_back(std::move(p));
        }
    }
    return out;
}

BatchIterator::BatchIterator(const CombinedDataset& ds, int batch_size, std::uint64_t seed,
                             std::int64_t epoch, bool shuffle)
    : ds_(&ds), batch_size_(batch_size) {
    if (ds.pairs.empty()) throw ValidationError("batch iterator: dataset is empty");
    if (batch_size < 1) throw ValidationError("batch iterator: batch_size must be >= 1");
    order_.resize(ds.pairs.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    if (shuffle) {
        Rng rng(mix_seed(mix_seed(seed, 0x53484641ULL), static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order_.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i + 1)));
            std::swap(order_[i], order_[j]);
        }
    }
}

std::int64_t BatchIterator::num_batches() const {
    return steps_per_epoch(static_cast<std::int64_t>(order_.size()), batch_size_);
}

bool BatchIterator::next(Batch& out) {
    const std::int64_t total = static_cast<std::int64_t>(order_.size());
    if (cursor_ >= total) return false;
    const int n = static_cast<int>(std::min<std::int64_t>(batch_size_, total - cursor_));
    const ImagePair& first = ds_->pairs[order_[cursor_]];
    out.visible = Tensor(n, 3, first.visible.h, first.visible.w);
    out.thermal = Tensor(n, 3, first.thermal.h, first.thermal.w);
    out.labels.assign(n, 0);
    out.pair_ids.assign(n, "");
    for (int i = 0; i < n; ++i) {
        const ImagePair& p = ds_->pairs[order_[cursor_ + i]];
        std::copy(p.visible.data.begin(), p.visible.data.end(), out.visible.sample(i));
        std::copy(p.thermal.data.begin(), p.thermal.data.end(), out.thermal.sample(i));
        out.labels[i] = p.label;
        out.pair_ids[i] = p.pair_id;
    }
    cursor_ += n;
    return true;
}

void BatchIterator::skip(std::int64_t n_batches) {
    cursor_ = std::min<std::int64_t>(n_batches * batch_size_,
                                     static_cast<std::int64_t>(order_.size()));
}

std::int64_t steps_per_epoch(std::int64_t n_pairs, int batch_size) {
    return (n_pairs + batch_size - 1) / batch_size;
}

}  // namespace favtgan
