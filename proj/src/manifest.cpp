#include "favtgan/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "favtgan/errors.hpp"

namespace favtgan {

std::string to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split parse_split(const std::string& text) {
    if (text == "train") return Split::train;
    if (text == "test") return Split::test;
    throw ValidationError("unknown split '" + text + "' (expected train|test)");
}

int DatasetManifest::split_size(Split split) const {
    int count = 0;
    for (const PairRecord& rec : pairs)
        if (rec.split == split) ++count;
    return count;
}

std::filesystem::path DatasetManifest::resolve(const std::string& rel) const {
    std::filesystem::path p(rel);
    return p.is_absolute() ? p : base_dir / p;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed manifest " + path.string() + ": " + e.what());
    }

    DatasetManifest m;
    m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    try {
        m.dataset_name = j.at("dataset_name").get<std::string>();
        m.sensor_family = parse_sensor_family(j.at("sensor_family").get<std::string>());
        std::unordered_set<std::string> ids;
        for (const auto& rec : j.at("pairs")) {
            PairRecord pr;
            pr.pair_id = rec.at("pair_id").get<std::string>();
            pr.visible_path = rec.at("visible").get<std::string>();
            pr.thermal_path = rec.at("thermal").get<std::string>();
            pr.split = parse_split(rec.at("split").get<std::string>());
            if (!ids.insert(pr.pair_id).second)
                throw ValidationError("manifest " + path.string() + ": duplicate pair_id '" +
                                      pr.pair_id + "'");
            m.pairs.push_back(std::move(pr));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest " + path.string() + ": " + e.what());
    }
    if (m.dataset_name.empty())
        throw ValidationError("manifest " + path.string() + ": dataset_name must be non-empty");
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["dataset_name"] = manifest.dataset_name;
    j["sensor_family"] = to_string(manifest.sensor_family);
    j["pairs"] = nlohmann::ordered_json::array();
    for (const PairRecord& rec : manifest.pairs) {
        nlohmann::ordered_json r;
        r["pair_id"] = rec.pair_id;
        r["visible"] = rec.visible_path;
        r["thermal"] = rec.thermal_path;
        r["split"] = to_string(rec.split);
        j["pairs"].push_back(std::move(r));
    }
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write manifest file: " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace favtgan
