#pragma once

#include <string>
#include <vector>

namespace favtgan {

enum class SensorFamily { microbolometer, bst_ferroelectric, synthetic };

std::string to_string(SensorFamily family);
SensorFamily parse_sensor_family(const std::string& text);

// Integer identity of a thermal sensor class within one experiment. Ids form
// a contiguous range starting at 0, assigned by dataset order.
struct SensorLabel {
    int id = 0;
    std::string dataset_name;
    SensorFamily sensor_family = SensorFamily::synthetic;

    bool operator==(const SensorLabel&) const = default;
};

struct DatasetManifest;

std::vector<SensorLabel> build_label_registry(const std::vector<DatasetManifest>& manifests);

// Looks up a dataset's label id; throws ValidationError when the dataset is
// not part of the registry.
int registry_label_for(const std::vector<SensorLabel>& registry, const std::string& dataset_name);

}  // namespace favtgan
