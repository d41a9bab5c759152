#include "run_config.hpp"

#include "occ/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace occ::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw Error(ErrorKind::Config, "config field '" + field + "': " + why);
}

template <typename T>
void read_number(const json& v, const std::string& field, T& out) {
    if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(field, "must be a number");
        out = v.get<T>();
    } else {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            fail(field, "must be a non-negative integer");
        }
        out = static_cast<T>(v.get<std::uint64_t>());
    }
}

/// Typed access to one JSON object that remembers which keys were read.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) fail(prefix_.empty() ? "<root>" : prefix_, "must be an object");
    }

    std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    template <typename T>
    void number(const std::string& key, T& out) {
        const json* v = find(key);
        if (v) read_number(*v, path(key), out);
    }

    /// null or `keyword` -> nullopt; a number -> value.
    template <typename T>
    void optional_number(const std::string& key, std::optional<T>& out, const char* keyword) {
        const json* v = find(key);
        if (!v) return;
        if (v->is_null() || (v->is_string() && v->get<std::string>() == keyword)) {
            out.reset();
            return;
        }
        T tmp{};
        read_number(*v, path(key), tmp);
        out = tmp;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) fail(path(it.key()), "unknown field");
        }
    }

private:
    const json& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

OffsetSpec parse_offset(const json& v, const std::string& field) {
    if (v.is_string() && v.get<std::string>() == "random") return std::nullopt;
    if (!v.is_number()) fail(field, "must be a fraction in [0, 1) or \"random\"");
    const double f = v.get<double>();
    if (!(f >= 0.0 && f < 1.0)) fail(field, "offset fraction must be in [0, 1)");
    return f;
}

json offset_to_json(const OffsetSpec& o) { return o ? json(*o) : json("random"); }

} // namespace

Symbols RunConfig::preamble_symbols() const {
    return preamble ? *preamble : default_preamble(preamble_length);
}

std::size_t RunConfig::payload_bit_count() const { return payload ? payload->size() : payload_bits; }

std::size_t RunConfig::payload_symbol_count() const {
    return payload_bit_count() / alphabet().bits_per_symbol();
}

Bits RunConfig::payload_for(std::uint64_t seed) const {
    return payload ? *payload : random_bits(payload_bits, seed);
}

std::size_t RunConfig::resolved_rows() const {
    if (rows) return *rows;
    const double ratio = symbol_duration / exposure();
    const auto osf = static_cast<std::size_t>(std::max(1.0, std::round(ratio)));
    const std::size_t frame = preamble_symbols().size() + payload_symbol_count();
    return (lead_idle_symbols + frame + equalizer_taps + channel_memory + 2) * osf;
}

LinkConfig RunConfig::link_config() const {
    LinkConfig link;
    link.tx.symbol_duration = symbol_duration;
    link.tx.max_intensity = max_intensity;
    link.tx.oversampling = oversampling;
    link.led.cutoff_hz = led_cutoff_hz;
    link.channel_gain = channel_gain;
    link.snr_db = snr_db;
    link.camera.exposure_time = exposure();
    link.camera.row_rate_hz = 1.0 / exposure();
    link.camera.sensor_gain = sensor_gain;
    link.camera.rows = resolved_rows();
    link.camera.cols = cols;
    link.camera.bit_depth = bit_depth;
    link.lead_idle_symbols = lead_idle_symbols;
    link.receiver.channel_memory = channel_memory;
    link.receiver.equalizer_taps = equalizer_taps;
    link.receiver.delay = delay;
    link.receiver.sync_threshold = sync_threshold;
    return link;
}

void RunConfig::validate() const {
    try {
        (void)alphabet();
    } catch (const Error& e) {
        fail("modulation_order", e.what());
    }
    const Symbols pre = preamble_symbols();
    if (pre.empty()) fail("preamble", "must not be empty");
    for (double p : pre)
        if (p != 1.0 && p != -1.0) fail("preamble", "symbols must be -1 or +1");
    if (payload_bit_count() % alphabet().bits_per_symbol() != 0) {
        fail(payload ? "payload" : "payload_bits", "bit count must be a multiple of log2(modulation_order)");
    }
    if (payload_bit_count() == 0) fail(payload ? "payload" : "payload_bits", "must carry at least one symbol");
    if (!(symbol_duration > 0.0)) fail("symbol_duration", "must be > 0");
    if (oversampling < 2) fail("oversampling", "must be >= 2");
    if (!(max_intensity > 0.0)) fail("max_intensity", "must be > 0");
    if (led_cutoff_hz && !(*led_cutoff_hz > 0.0)) fail("led_cutoff_hz", "must be > 0 or \"ideal\"");
    if (!(channel_gain > 0.0)) fail("channel_gain", "must be > 0");
    if (exposure_time && !(*exposure_time > 0.0)) fail("camera.exposure_time", "must be > 0");
    if (!(sensor_gain > 0.0)) fail("camera.sensor_gain", "must be > 0");
    if (rows && *rows == 0) fail("camera.rows", "must be >= 1 or \"auto\"");
    if (cols == 0) fail("camera.cols", "must be >= 1");
    if (bit_depth != 8 && bit_depth != 16) fail("camera.bit_depth", "must be 8 or 16");
    if (pre.size() < 2 * (channel_memory + 1)) {
        fail("channel_memory", "preamble of " + std::to_string(pre.size()) + " symbols supports at most L_c = " +
                                   std::to_string(pre.size() / 2 == 0 ? 0 : pre.size() / 2 - 1));
    }
    if (equalizer_taps == 0) fail("equalizer_taps", "must be >= 1");
    const std::size_t max_delay = channel_memory + equalizer_taps >= 2 ? channel_memory + equalizer_taps - 2 : 0;
    if (delay && *delay > max_delay) fail("delay", "must be \"auto\" or in 0.." + std::to_string(max_delay));
    if (roi_cols && roi_cols->first >= roi_cols->second) fail("roi_cols", "must be [begin, end) with begin < end");
    if (sweep.trials == 0) fail("sweep.trials", "must be >= 1");
    if (sweep.threads == 0) fail("sweep.threads", "must be >= 1");
    if (sweep.offsets.empty()) fail("sweep.offsets", "must not be empty");
    if (sweep.snr_db.empty()) fail("sweep.snr_db", "must not be empty");
    for (double f : demo_offsets)
        if (!(f >= 0.0 && f < 1.0)) fail("demo_offsets", "fractions must be in [0, 1)");
    try {
        link_config().validate();
    } catch (const Error& e) {
        fail("camera", e.what());
    }
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    ObjectReader root(j, "");
    if (const json* v = root.find("schema_version")) {
        if (!v->is_number_integer() || v->get<int>() != kSchemaVersion) {
            fail("schema_version", "must be " + std::to_string(kSchemaVersion));
        }
    }
    root.number("modulation_order", cfg.modulation_order);
    root.number("preamble_length", cfg.preamble_length);
    if (const json* v = root.find("preamble"); v && !v->is_null()) {
        if (!v->is_array()) fail("preamble", "must be an array of -1/+1 or null");
        Symbols pre;
        for (const auto& e : *v) {
            if (!e.is_number()) fail("preamble", "must contain numbers");
            pre.push_back(e.get<double>());
        }
        cfg.preamble = std::move(pre);
        cfg.preamble_length = cfg.preamble->size();
    }
    root.number("payload_bits", cfg.payload_bits);
    if (const json* v = root.find("payload"); v && !v->is_null()) {
        if (!v->is_string()) fail("payload", "must be a string of '0'/'1' or null");
        Bits bits;
        for (char c : v->get<std::string>()) {
            if (c != '0' && c != '1') fail("payload", "must contain only '0' and '1'");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        cfg.payload = std::move(bits);
        cfg.payload_bits = cfg.payload->size();
    }
    root.number("symbol_duration", cfg.symbol_duration);
    root.number("oversampling", cfg.oversampling);
    root.number("max_intensity", cfg.max_intensity);
    root.optional_number("led_cutoff_hz", cfg.led_cutoff_hz, "ideal");
    root.number("channel_gain", cfg.channel_gain);
    root.optional_number("snr_db", cfg.snr_db, "noiseless");
    if (const json* v = root.find("offset_fraction")) cfg.offset_fraction = parse_offset(*v, "offset_fraction");
    if (const json* v = root.find("camera")) {
        ObjectReader cam(*v, "camera");
        cam.optional_number("exposure_time", cfg.exposure_time, "symbol_duration");
        cam.number("sensor_gain", cfg.sensor_gain);
        cam.optional_number("rows", cfg.rows, "auto");
        cam.number("cols", cfg.cols);
        cam.number("bit_depth", cfg.bit_depth);
        cam.finish();
    }
    root.number("lead_idle_symbols", cfg.lead_idle_symbols);
    root.number("channel_memory", cfg.channel_memory);
    root.number("equalizer_taps", cfg.equalizer_taps);
    root.optional_number("delay", cfg.delay, "auto");
    root.number("sync_threshold", cfg.sync_threshold);
    root.number("master_seed", cfg.master_seed);
    if (const json* v = root.find("roi_cols"); v && !v->is_null()) {
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_unsigned() || !(*v)[1].is_number_unsigned()) {
            fail("roi_cols", "must be [begin, end] column indices or null");
        }
        cfg.roi_cols = std::make_pair((*v)[0].get<std::size_t>(), (*v)[1].get<std::size_t>());
    }
    if (const json* v = root.find("sweep")) {
        ObjectReader sw(*v, "sweep");
        if (const json* o = sw.find("offsets")) {
            if (!o->is_array()) fail("sweep.offsets", "must be an array");
            cfg.sweep.offsets.clear();
            for (const auto& e : *o) cfg.sweep.offsets.push_back(parse_offset(e, "sweep.offsets"));
        }
        if (const json* s = sw.find("snr_db")) {
            if (!s->is_array()) fail("sweep.snr_db", "must be an array of numbers or null (noiseless)");
            cfg.sweep.snr_db.clear();
            for (const auto& e : *s) {
                if (e.is_null() || (e.is_string() && e.get<std::string>() == "noiseless")) {
                    cfg.sweep.snr_db.emplace_back(std::nullopt);
                } else if (e.is_number()) {
                    cfg.sweep.snr_db.emplace_back(e.get<double>());
                } else {
                    fail("sweep.snr_db", "entries must be numbers or null");
                }
            }
        }
        sw.number("trials", cfg.sweep.trials);
        sw.number("threads", cfg.sweep.threads);
        sw.finish();
    }
    if (const json* v = root.find("demo_offsets")) {
        if (!v->is_array()) fail("demo_offsets", "must be an array of fractions");
        cfg.demo_offsets.clear();
        for (const auto& e : *v) {
            if (!e.is_number()) fail("demo_offsets", "must contain numbers");
            cfg.demo_offsets.push_back(e.get<double>());
        }
    }
    root.finish();
    cfg.validate();
    return cfg;
}

json to_json(const RunConfig& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["modulation_order"] = cfg.modulation_order;
    j["preamble_length"] = cfg.preamble_symbols().size();
    j["preamble"] = cfg.preamble_symbols();
    j["payload_bits"] = cfg.payload_bit_count();
    if (cfg.payload) {
        std::string s;
        for (auto b : *cfg.payload) s.push_back(static_cast<char>('0' + b));
        j["payload"] = s;
    } else {
        j["payload"] = nullptr;
    }
    j["symbol_duration"] = cfg.symbol_duration;
    j["oversampling"] = cfg.oversampling;
    j["max_intensity"] = cfg.max_intensity;
    j["led_cutoff_hz"] = cfg.led_cutoff_hz ? json(*cfg.led_cutoff_hz) : json("ideal");
    j["channel_gain"] = cfg.channel_gain;
    j["snr_db"] = cfg.snr_db ? json(*cfg.snr_db) : json(nullptr);
    j["offset_fraction"] = offset_to_json(cfg.offset_fraction);
    j["camera"] = {{"exposure_time", cfg.exposure()},
                   {"sensor_gain", cfg.sensor_gain},
                   {"rows", cfg.resolved_rows()},
                   {"cols", cfg.cols},
                   {"bit_depth", cfg.bit_depth}};
    j["lead_idle_symbols"] = cfg.lead_idle_symbols;
    j["channel_memory"] = cfg.channel_memory;
    j["equalizer_taps"] = cfg.equalizer_taps;
    j["delay"] = cfg.delay ? json(*cfg.delay) : json("auto");
    j["sync_threshold"] = cfg.sync_threshold;
    j["master_seed"] = cfg.master_seed;
    j["roi_cols"] = cfg.roi_cols ? json::array({cfg.roi_cols->first, cfg.roi_cols->second}) : json(nullptr);
    json offsets = json::array();
    for (const auto& o : cfg.sweep.offsets) offsets.push_back(offset_to_json(o));
    json snrs = json::array();
    for (const auto& s : cfg.sweep.snr_db) snrs.push_back(s ? json(*s) : json(nullptr));
    j["sweep"] = {{"offsets", offsets}, {"snr_db", snrs}, {"trials", cfg.sweep.trials}, {"threads", cfg.sweep.threads}};
    j["demo_offsets"] = cfg.demo_offsets;
    return j;
}

json read_config_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, "config " + path.string() + " is not valid JSON: " + e.what());
    }
}

void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorKind::Config, "override '" + assignment + "' must look like key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &tree;
    std::stringstream parts(key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.')) path.push_back(part);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->is_object()) *node = json::object();
        node = &(*node)[path[i]];
    }
    if (!node->is_object()) *node = json::object();
    (*node)[path.back()] = value;
}

} // namespace occ::app
