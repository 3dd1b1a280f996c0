#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "favtgan/sensor_label.hpp"

namespace favtgan {

enum class Split { train, test };

std::string to_string(Split split);
Split parse_split(const std::string& text);

struct PairRecord {
    std::string pair_id;
    std::string visible_path;  // relative paths resolve against base_dir
    std::string thermal_path;
    Split split = Split::train;
};

// Explicit file listing for one paired dataset. Pairing is never inferred
// from filenames; the manifest is the source of truth.
struct DatasetManifest {
    std::string dataset_name;
    SensorFamily sensor_family = SensorFamily::synthetic;
    std::vector<PairRecord> pairs;
    std::filesystem::path base_dir;  // directory of the manifest file, not serialized

    int split_size(Split split) const;
    std::filesystem::path resolve(const std::string& rel) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace favtgan
