#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "favtgan/manifest.hpp"
#include "favtgan/sensor_label.hpp"
#include "favtgan/tensor.hpp"

namespace favtgan {

// Aligned visible/thermal pair, preprocessed: both tensors [1,3,S,S] in [-1,1].
struct ImagePair {
    Tensor visible;
    Tensor thermal;
    int label = 0;
    std::string pair_id;
    std::string dataset_name;
};

// Loads one split, resized to image_size x image_size and normalized, in
// manifest order. Dimension mismatches between the two sides of a pair are
// warned about and resolved by resizing both.
std::vector<ImagePair> load_dataset(const DatasetManifest& manifest, Split split, int image_size);

struct CombinedDataset {
    std::vector<ImagePair> pairs;
    std::vector<SensorLabel> registry;
    Split split = Split::train;
};

// Concatenation in dataset order, each pair stamped with its dataset's
// registry label. All entries must come from the same split.
CombinedDataset combine(const std::vector<std::pair<const DatasetManifest*, Split>>& datasets,
                        const std::vector<SensorLabel>& registry, int image_size);

struct Batch {
    Tensor visible;  // [N,3,S,S]
    Tensor thermal;  // [N,3,S,S]
    std::vector<int> labels;
    std::vector<std::string> pair_ids;

    int size() const { return visible.n; }
};

// Single-epoch batch stream. Shuffling is a seed- and epoch-deterministic
// permutation; the final partial batch is yielded.
class BatchIterator {
public:
    BatchIterator(const CombinedDataset& ds, int batch_size, std::uint64_t seed, std::int64_t epoch,
                  bool shuffle);

    std::int64_t num_batches() const;
    bool next(Batch& out);
    void skip(std::int64_t n_batches);

private:
    const CombinedDataset* ds_;
    std::vector<int> order_;
    int batch_size_;
    std::int64_t cursor_ = 0;  // pair index
};

std::int64_t steps_per_epoch(std::int64_t n_pairs, int batch_size);

}  // namespace favtgan
