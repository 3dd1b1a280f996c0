#include "favtgan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "favtgan/errors.hpp"

namespace favtgan {

namespace {

constexpr char kMagic[8] = {'F', 'A', 'V', 'T', 'C', 'K', 'P', '1'};
constexpr char kEndMagic[8] = {'F', 'A', 'V', 'T', 'E', 'N', 'D', '1'};

class Writer {
public:
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void i64(std::int64_t v) { raw(&v, 8); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void f32v(const std::vector<float>& v) {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(float));
    }
    const std::vector<std::uint8_t>& buffer() const { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    void raw(void* p, std::size_t n) {
        if (pos_ + n > size_) throw RuntimeFailure("corrupt checkpoint: truncated payload");
        std::memcpy(p, data_ + pos_, n);
        pos_ += n;
    }
    std::uint8_t u8() {
        std::uint8_t v;
        raw(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, 4);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, 8);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        raw(&v, 8);
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        if (pos_ + n > size_) throw RuntimeFailure("corrupt checkpoint: truncated string");
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    std::vector<float> f32v() {
        const std::uint64_t n = u64();
        if (pos_ + n * sizeof(float) > size_)
            throw RuntimeFailure("corrupt checkpoint: truncated tensor");
        std::vector<float> v(n);
        raw(v.data(), n * sizeof(float));
        return v;
    }
    bool done() const { return pos_ == size_; }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

void write_opt(Writer& w, const OptimizerSnapshot& opt) {
    w.i64(opt.t);
    w.u32(static_cast<std::uint32_t>(opt.m.size()));
    for (std::size_t i = 0; i < opt.m.size(); ++i) {
        w.f32v(opt.m[i]);
        w.f32v(opt.v[i]);
    }
}

OptimizerSnapshot read_opt(Reader& r) {
    OptimizerSnapshot opt;
    opt.t = r.i64();
    const std::uint32_t n = r.u32();
    opt.m.resize(n);
    opt.v.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        opt.m[i] = r.f32v();
        opt.v[i] = r.f32v();
    }
    return opt;
}

ExperimentConfig config_from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw RuntimeFailure(std::string("corrupt checkpoint: embedded config unparsable: ") +
                             e.what());
    }
    ExperimentConfig c;
    c.schema_version = j.at("schema_version").get<int>();
    c.datasets = j.at("datasets").get<std::vector<std::string>>();
    c.mode = parse_mode(j.at("mode").get<std::string>());
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.decay_epoch = j.at("decay_epoch").get<int>();
    c.lambda_l1 = j.at("lambda_l1").get<double>();
    c.channels = j.at("channels").get<int>();
    c.image_size = j.at("image_size").get<int>();
    c.seed = j.at("seed").get<std::int64_t>();
    c.smoothed_real_target = j.at("smoothed_real_target").get<double>();
    c.output_dir = j.at("output_dir").get<std::string>();
    c.g_depth = j.at("g_depth").get<int>();
    c.d_depth = j.at("d_depth").get<int>();
    c.g_base_width = j.at("g_base_width").get<int>();
    c.d_base_width = j.at("d_base_width").get<int>();
    c.width_cap = j.at("width_cap").get<int>();
    c.sample_interval = j.at("sample_interval").get<int>();
    c.checkpoint_interval = j.at("checkpoint_interval").get<int>();
    c.update_order = j.at("update_order").get<std::string>();
    return c;
}

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static std::uint32_t table[256];
    static bool ready = false;
    if (!ready) {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            table[i] = c;
        }
        ready = true;
    }
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    Writer w;
    w.u32(ckpt.version);
    w.str(ckpt.config_hash);
    w.str(canonical_config_json(ckpt.config));
    w.u32(static_cast<std::uint32_t>(ckpt.registry.size()));
    for (const SensorLabel& label : ckpt.registry) {
        w.u32(static_cast<std::uint32_t>(label.id));
        w.str(label.dataset_name);
        w.u8(static_cast<std::uint8_t>(label.sensor_family));
    }
    w.i64(ckpt.epoch);
    w.i64(ckpt.global_step);
    for (std::uint64_t s : ckpt.rng_state) w.u64(s);
    w.u32(static_cast<std::uint32_t>(ckpt.g_params.size()));
    for (const NamedTensor& t : ckpt.g_params) {
        w.str(t.name);
        w.f32v(t.data);
    }
    w.u32(static_cast<std::uint32_t>(ckpt.d_params.size()));
    for (const NamedTensor& t : ckpt.d_params) {
        w.str(t.name);
        w.f32v(t.data);
    }
    write_opt(w, ckpt.g_opt);
    write_opt(w, ckpt.d_opt);

    const auto& payload = w.buffer();
    const std::uint32_t crc = crc32(payload.data(), payload.size());

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw RuntimeFailure("cannot write checkpoint: " + path.string());
        out.write(kMagic, sizeof(kMagic));
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
        out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
        out.write(kEndMagic, sizeof(kEndMagic));
        if (!out) throw RuntimeFailure("cannot write checkpoint: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeFailure("cannot open checkpoint: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();

    const std::size_t overhead = sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(kEndMagic);
    if (bytes.size() < overhead || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw RuntimeFailure("corrupt checkpoint: bad header in " + path.string());
    if (std::memcmp(bytes.data() + bytes.size() - sizeof(kEndMagic), kEndMagic,
                    sizeof(kEndMagic)) != 0)
        throw RuntimeFailure("corrupt checkpoint: truncated file " + path.string());

    const auto* payload = reinterpret_cast<const std::uint8_t*>(bytes.data()) + sizeof(kMagic);
    const std::size_t payload_len = bytes.size() - overhead;
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, bytes.data() + sizeof(kMagic) + payload_len, sizeof(stored_crc));
    if (crc32(payload, payload_len) != stored_crc)
        throw RuntimeFailure("corrupt checkpoint: checksum mismatch in " + path.string());

    Reader r(payload, payload_len);
    Checkpoint ckpt;
    ckpt.version = r.u32();
    if (ckpt.version != 1)
        throw RuntimeFailure("checkpoint version " + std::to_string(ckpt.version) +
                             " not supported");
    ckpt.config_hash = r.str();
    ckpt.config = config_from_json_string(r.str());
    const std::uint32_t n_labels = r.u32();
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        SensorLabel label;
        label.id = static_cast<int>(r.u32());
        label.dataset_name = r.str();
        label.sensor_family = static_cast<SensorFamily>(r.u8());
        ckpt.registry.push_back(std::move(label));
    }
    ckpt.epoch = r.i64();
    ckpt.global_step = r.i64();
    for (std::uint64_t& s : ckpt.rng_state) s = r.u64();
    const std::uint32_t ng = r.u32();
    for (std::uint32_t i = 0; i < ng; ++i) {
        NamedTensor t;
        t.name = r.str();
        t.data = r.f32v();
        ckpt.g_params.push_back(std::move(t));
    }
    const std::uint32_t nd = r.u32();
    for (std::uint32_t i = 0; i < nd; ++i) {
        NamedTensor t;
        t.name = r.str();
        t.data = r.f32v();
        ckpt.d_params.push_back(std::move(t));
    }
    ckpt.g_opt = read_opt(r);
    ckpt.d_opt = read_opt(r);
    if (!r.done()) throw RuntimeFailure("corrupt checkpoint: trailing bytes in " + path.string());
    return ckpt;
}

}  // namespace favtgan
