#include "favtgan/sensor_label.hpp"

#include <unordered_set>

#include "favtgan/errors.hpp"
#include "favtgan/manifest.hpp"

namespace favtgan {

std::string to_string(SensorFamily family) {
    switch (family) {
        case SensorFamily::microbolometer: return "microbolometer";
        case SensorFamily::bst_ferroelectric: return "bst_ferroelectric";
        case SensorFamily::synthetic: return "synthetic";
    }
    return "unknown";
}

SensorFamily parse_sensor_family(const std::string& text) {
    if (text == "microbolometer") return SensorFamily::microbolometer;
    if (text == "bst_ferroelectric") return SensorFamily::bst_ferroelectric;
    if (text == "synthetic") return SensorFamily::synthetic;
    throw ValidationError("unknown sensor family '" + text +
                          "' (expected microbolometer|bst_ferroelectric|synthetic)");
}

std::vector<SensorLabel> build_label_registry(const std::vector<DatasetManifest>& manifests) {
    if (manifests.empty()) throw ValidationError("label registry needs at least one dataset");
    std::vector<SensorLabel> registry;
    std::unordered_set<std::string> seen;
    registry.reserve(manifests.size());
    for (std::size_t i = 0; i < manifests.size(); ++i) {
        if (!seen.insert(manifests[i].dataset_name).second)
            throw ValidationError("duplicate dataset name '" + manifests[i].dataset_name +
                                  "' in label registry");
        registry.push_back(
            {static_cast<int>(i), manifests[i].dataset_name, manifests[i].sensor_family});
    }
    return registry;
}

int registry_label_for(const std::vector<SensorLabel>& registry, const std::string& dataset_name) {
    for (const SensorLabel& label : registry)
        if (label.dataset_name == dataset_name) return label.id;
    std::string known;
    for (const SensorLabel& label : registry)
        known += (known.empty() ? "" : ", ") + label.dataset_name;
    throw ValidationError("registry mismatch: dataset '" + dataset_name +
                          "' is not in the label registry {" + known + "}");
}

}  // namespace favtgan
