#include "favtgan/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "favtgan/errors.hpp"

namespace favtgan {

namespace {

const std::unordered_set<std::string> kKnownKeys = {
    "schema_version", "datasets", "mode", "epochs", "batch_size", "learning_rate",
    "adam_beta1", "adam_beta2", "decay_epoch", "lambda_l1", "channels", "image_size",
    "seed", "smoothed_real_target", "output_dir", "g_depth", "d_depth", "g_base_width",
    "d_base_width", "width_cap", "sample_interval", "checkpoint_interval", "update_order"};

void require_positive(long long v, const char* name) {
    if (v <= 0)
        throw ValidationError(std::string("config invariant violated: ") + name +
                              " must be positive (got " + std::to_string(v) + ")");
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
    if (c.schema_version != 1)
        throw ValidationError("config invariant violated: unsupported schema_version " +
                              std::to_string(c.schema_version));
    if (c.datasets.empty())
        throw ValidationError("config invariant violated: datasets must list at least one manifest");
    {
        std::unordered_set<std::string> seen;
        for (const std::string& d : c.datasets)
            if (!seen.insert(d).second)
                throw ValidationError("config invariant violated: duplicate dataset entry '" + d + "'");
    }
    if (c.mode != ConditioningMode::plain_pix2pix && c.datasets.size() < 2)
        throw ValidationError(
            "config invariant violated: conditioned modes need at least 2 datasets "
            "(auxiliary classification requires n_labels >= 2); use plain_pix2pix for a "
            "single dataset");
    require_positive(c.epochs, "epochs");
    require_positive(c.batch_size, "batch_size");
    if (!(c.learning_rate > 0.0))
        throw ValidationError("config invariant violated: 0 < learning_rate");
    if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0))
        throw ValidationError("config invariant violated: 0 <= adam_beta1 < 1");
    if (!(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0))
        throw ValidationError("config invariant violated: 0 <= adam_beta2 < 1");
    require_positive(c.decay_epoch, "decay_epoch");
    if (!(c.decay_epoch < c.epochs))
        throw ValidationError("config invariant violated: decay_epoch < epochs (got decay_epoch=" +
                              std::to_string(c.decay_epoch) + ", epochs=" +
                              std::to_string(c.epochs) + ")");
    if (!(c.lambda_l1 > 0.0))
        throw ValidationError("config invariant violated: lambda_l1 must be positive");
    if (c.channels != 3)
        throw ValidationError("config invariant violated: channels must be 3 (pipeline carries "
                              "3-channel images)");
    require_positive(c.image_size, "image_size");
    if (!(c.smoothed_real_target > 0.0 && c.smoothed_real_target <= 1.0))
        throw ValidationError("config invariant violated: smoothed_real_target in (0, 1]");
    if (c.output_dir.empty())
        throw ValidationError("config invariant violated: output_dir must be set");
    if (c.g_depth < 2 || c.d_depth < 1)
        throw ValidationError("config invariant violated: g_depth >= 2 and d_depth >= 1");
    if (c.g_base_width < 1 || c.d_base_width < 1 || c.width_cap < c.g_base_width ||
        c.width_cap < c.d_base_width)
        throw ValidationError("config invariant violated: base widths must be >= 1 and <= width_cap");
    const int g_factor = 1 << c.g_depth;
    const int d_factor = 1 << c.d_depth;
    if (c.image_size % g_factor != 0 || c.image_size < g_factor)
        throw ValidationError("config invariant violated: image_size must be a positive multiple "
                              "of 2^g_depth");
    if (c.image_size % d_factor != 0 || c.image_size < d_factor)
        throw ValidationError("config invariant violated: image_size must be a positive multiple "
                              "of 2^d_depth");
    require_positive(c.sample_interval, "sample_interval");
    require_positive(c.checkpoint_interval, "checkpoint_interval");
    if (c.update_order != "d_first" && c.update_order != "g_first")
        throw ValidationError("config invariant violated: update_order must be d_first or g_first");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed config " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config " + path.string() + ": expected a JSON object");

    for (const auto& item : j.items())
        if (!kKnownKeys.count(item.key()))
            throw ValidationError("config " + path.string() + ": unknown field '" + item.key() + "'");

    ExperimentConfig c;
    try {
        for (const char* key : {"datasets", "mode", "seed", "output_dir"})
            if (!j.contains(key))
                throw ValidationError("config " + path.string() + ": missing required field '" +
                                      std::string(key) + "'");
        c.datasets = j.at("datasets").get<std::vector<std::string>>();
        c.mode = parse_mode(j.at("mode").get<std::string>());
        c.seed = j.at("seed").get<std::int64_t>();
        c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("schema_version")) c.schema_version = j.at("schema_version").get<int>();
        if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
        if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
        if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
        if (j.contains("adam_beta1")) c.adam_beta1 = j.at("adam_beta1").get<double>();
        if (j.contains("adam_beta2")) c.adam_beta2 = j.at("adam_beta2").get<double>();
        if (j.contains("decay_epoch")) c.decay_epoch = j.at("decay_epoch").get<int>();
        if (j.contains("lambda_l1")) c.lambda_l1 = j.at("lambda_l1").get<double>();
        if (j.contains("channels")) c.channels = j.at("channels").get<int>();
        if (j.contains("image_size")) c.image_size = j.at("image_size").get<int>();
        if (j.contains("smoothed_real_target"))
            c.smoothed_real_target = j.at("smoothed_real_target").get<double>();
        if (j.contains("g_depth")) c.g_depth = j.at("g_depth").get<int>();
        if (j.contains("d_depth")) c.d_depth = j.at("d_depth").get<int>();
        if (j.contains("g_base_width")) c.g_base_width = j.at("g_base_width").get<int>();
        if (j.contains("d_base_width")) c.d_base_width = j.at("d_base_width").get<int>();
        if (j.contains("width_cap")) c.width_cap = j.at("width_cap").get<int>();
        if (j.contains("sample_interval")) c.sample_interval = j.at("sample_interval").get<int>();
        if (j.contains("checkpoint_interval"))
            c.checkpoint_interval = j.at("checkpoint_interval").get<int>();
        if (j.contains("update_order")) c.update_order = j.at("update_order").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    validate_config(c);
    return c;
}

namespace {

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["schema_version"] = c.schema_version;
    j["datasets"] = c.datasets;
    j["mode"] = to_string(c.mode);
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["learning_rate"] = c.learning_rate;
    j["adam_beta1"] = c.adam_beta1;
    j["adam_beta2"] = c.adam_beta2;
    j["decay_epoch"] = c.decay_epoch;
    j["lambda_l1"] = c.lambda_l1;
    j["channels"] = c.channels;
    j["image_size"] = c.image_size;
    j["seed"] = c.seed;
    j["smoothed_real_target"] = c.smoothed_real_target;
    j["output_dir"] = c.output_dir;
    j["g_depth"] = c.g_depth;
    j["d_depth"] = c.d_depth;
    j["g_base_width"] = c.g_base_width;
    j["d_base_width"] = c.d_base_width;
    j["width_cap"] = c.width_cap;
    j["sample_interval"] = c.sample_interval;
    j["checkpoint_interval"] = c.checkpoint_interval;
    j["update_order"] = c.update_order;
    return j;
}

}  // namespace

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write config file: " + path.string());
    out << to_json(config).dump(2) << "\n";
}

std::string canonical_config_json(const ExperimentConfig& config) {
    return to_json(config).dump();
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string s = canonical_config_json(config);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::filesystem::path resolve_output_path(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("FAVTGAN_OUTPUT_ROOT"); root && *root)
        return std::filesystem::path(root) / p;
    return p;
}

}  // namespace favtgan
