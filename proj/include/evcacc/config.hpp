#pragma once

// JSON run configuration, schema version 1.
//
// Parsing is strict: unknown keys and wrong types are configuration errors.
// Error messages are prefixed with "<source>:<line>:" pointing at the key
// that caused them when it can be located.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "evcacc/csv_io.hpp"
#include "evcacc/errors.hpp"
#include "evcacc/metrics.hpp"
#include "evcacc/platoon_sim.hpp"
#include "evcacc/sysid.hpp"

namespace evcacc {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

// Input iterator over a string that publishes how far the parser has read.
class CountingIterator {
public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    CountingIterator() = default;
    CountingIterator(const char* p, std::size_t* counter) : p_(p), counter_(counter) {}

    reference operator*() const { return *p_; }
    CountingIterator& operator++() {
        ++p_;
        if (counter_) ++*counter_;
        return *this;
    }
    CountingIterator operator++(int) {
        CountingIterator old = *this;
        ++*this;
        return old;
    }
    bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
    bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

private:
    const char* p_ = nullptr;
    std::size_t* counter_ = nullptr;
};

// DOM builder that also records the source line of every object key and
// array element, keyed by path ("vehicles[1].headway").
class LocatingSax {
public:
    using number_integer_t = json::number_integer_t;
    using number_unsigned_t = json::number_unsigned_t;
    using number_float_t = json::number_float_t;
    using string_t = json::string_t;
    using binary_t = json::binary_t;

    LocatingSax(json& root, const std::string& text, const std::size_t& consumed)
        : dom_(root, true), text_(text), consumed_(consumed) {}

    std::map<std::string, std::size_t> lines;

    bool null() { return value(dom_.null()); }
    bool boolean(bool v) { return value(dom_.boolean(v)); }
    bool number_integer(number_integer_t v) { return value(dom_.number_integer(v)); }
    bool number_unsigned(number_unsigned_t v) { return value(dom_.number_unsigned(v)); }
    bool number_float(number_float_t v, const string_t& s) { return value(dom_.number_float(v, s)); }
    bool string(string_t& v) { return value(dom_.string(v)); }
    bool binary(binary_t& v) { return value(dom_.binary(v)); }

    bool start_object(std::size_t n) {
        element();
        frames_.push_back({false, 0, {}});
        return dom_.start_object(n);
    }
    bool end_object() {
        frames_.pop_back();
        next_index();
        return dom_.end_object();
    }
    bool start_array(std::size_t n) {
        element();
        frames_.push_back({true, 0, {}});
        return dom_.start_array(n);
    }
    bool end_array() {
        frames_.pop_back();
        next_index();
        return dom_.end_array();
    }
    bool key(string_t& k) {
        frames_.back().key = k;
        lines.emplace(path(), line_here());
        return dom_.key(k);
    }
    template <typename Exception>
    bool parse_error(std::size_t pos, const std::string& token, const Exception& ex) {
        return dom_.parse_error(pos, token, ex);
    }

private:
    struct Frame {
        bool array;
        std::size_t index;
        std::string key;
    };

    std::size_t line_here() const {
        const std::size_t end = std::min(consumed_, text_.size());
        const auto stop = text_.begin() + static_cast<std::ptrdiff_t>(end);
        return 1 + static_cast<std::size_t>(std::count(text_.begin(), stop, '\n'));
    }

    std::string path() const {
        std::string out;
        for (const Frame& f : frames_) {
            if (f.array) {
                out += "[" + std::to_string(f.index) + "]";
            } else {
                if (!out.empty()) out += ".";
                out += f.key;
            }
        }
        return out;
    }

    // Array elements get their own entry; object members were recorded at key().
    void element() {
        if (!frames_.empty() && frames_.back().array) lines.emplace(path(), line_here());
    }

    void next_index() {
        if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
    }

    bool value(bool ok) {
        element();
        next_index();
        return ok;
    }

    nlohmann::detail::json_sax_dom_parser<json> dom_;
    const std::string& text_;
    const std::size_t& consumed_;
    std::vector<Frame> frames_;
};

} // namespace detail

struct ConfigDocument {
    json root;
    std::string source = "<config>";
    std::filesystem::path base_dir;            // relative file references resolve here
    std::map<std::string, std::size_t> lines;  // path -> 1-based line

    // Line of the longest recorded prefix of `field`, 0 if none.
    std::size_t line_of(std::string_view field) const {
        std::string f(field);
        while (!f.empty()) {
            if (auto it = lines.find(f); it != lines.end()) return it->second;
            const auto cut = f.find_last_of(".[");
            if (cut == std::string::npos) break;
            f.resize(cut);
        }
        return 0;
    }

    ConfigError anchored(const std::string& field, const std::string& message) const {
        const std::size_t line = line_of(field);
        std::string prefix = source + ":";
        if (line > 0) prefix += std::to_string(line) + ":";
        return ConfigError(prefix + " " + (field.empty() ? "" : field + ": ") + message, field);
    }
};

inline ConfigDocument parse_config_text(const std::string& text, std::string source = "<config>",
                                        std::filesystem::path base_dir = {}) {
    ConfigDocument doc;
    doc.source = std::move(source);
    doc.base_dir = std::move(base_dir);
    std::size_t consumed = 0;
    detail::LocatingSax sax(doc.root, text, consumed);
    try {
        json::sax_parse(detail::CountingIterator(text.data(), &consumed),
                        detail::CountingIterator(text.data() + text.size(), nullptr), &sax);
    } catch (const json::parse_error& e) {
        const std::size_t at = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n');
        throw ConfigError(doc.source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
    }
    doc.lines = std::move(sax.lines);
    return doc;
}

inline ConfigDocument load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string(), path.parent_path());
}

struct SweepSettings {
    std::vector<double> headways{0.1, 0.2, 0.5};
};

struct CompareSettings {
    ControllerKind proposed = ControllerKind::Lyapunov;
    ControllerKind baseline = ControllerKind::PidBaseline;
};

struct SysidSettings {
    std::string manifest; // empty: generate synthetic trials from `truth`
    VehicleParams truth;  // gamma/beta per mode of the synthetic plant
    std::size_t trials = 40;
    double noise = 0.05; // multiplicative, relative standard deviation
    double dt = 0.01;
    double duration = 10.0;
    std::vector<double> motoring_commands{0.5, 1.0, 1.5, 2.0};
    std::vector<double> regen_commands{-0.5, -1.0, -1.5, -2.0};
    FitOptions fit;
};

struct RunConfig {
    std::string name = "run";
    ScenarioConfig scenario;
    StringStabilityOptions metrics;
    SweepSettings sweep;
    CompareSettings compare;
    SysidSettings sysid;
    std::string leader_source; // drive-cycle file the trace came from, informational
    double grade = 0.0;        // rad, constant road grade
};

namespace detail {

// Reads one JSON object; remembers which keys were used so leftovers can be
// reported.
class ObjectReader {
public:
    ObjectReader(const ConfigDocument& doc, const json& j, std::string path)
        : doc_(doc), j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw doc_.anchored(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw doc_.anchored(field(key), "expected a number");
            out = v->get<double>();
        }
    }

    void count(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                throw doc_.anchored(field(key), "expected a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw doc_.anchored(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void text(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw doc_.anchored(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) throw doc_.anchored(field(key), "expected an array of numbers");
            out.clear();
            for (std::size_t k = 0; k < v->size(); ++k) {
                if (!(*v)[k].is_number()) {
                    throw doc_.anchored(field(key) + "[" + std::to_string(k) + "]", "expected a number");
                }
                out.push_back((*v)[k].get<double>());
            }
        }
    }

    ObjectReader child(const std::string& key) {
        const json* v = find(key);
        return ObjectReader(doc_, *v, field(key));
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) throw doc_.anchored(field(key), "unknown key");
        }
    }

private:
    const ConfigDocument& doc_;
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline void read_vehicle_params(ObjectReader& r, VehicleParams& p) {
    r.number("gamma_accel", p.gamma_accel);
    r.number("gamma_decel", p.gamma_decel);
    r.number("beta_accel", p.beta_accel);
    r.number("beta_decel", p.beta_decel);
    r.number("length", p.length);
    r.number("standstill", p.standstill);
    r.number("headway", p.headway);
    r.number("deadband", p.deadband);
    r.number("input_limit", p.input_limit);
    r.finish();
}

inline ControllerKind controller_from(const ConfigDocument& doc, const std::string& field, const std::string& s) {
    if (s == "lyapunov") return ControllerKind::Lyapunov;
    if (s == "pid_baseline") return ControllerKind::PidBaseline;
    throw doc.anchored(field, "expected \"lyapunov\" or \"pid_baseline\", got \"" + s + "\"");
}

inline std::vector<std::pair<double, double>> read_pairs(const ConfigDocument& doc, const json& arr,
                                                         const std::string& field) {
    if (!arr.is_array()) throw doc.anchored(field, "expected an array of [a, b] pairs");
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const json& e = arr[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw doc.anchored(field + "[" + std::to_string(k) + "]", "expected a pair of numbers");
        }
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

inline LeaderProfile read_leader(const ConfigDocument& doc, ObjectReader& r, std::string& source) {
    std::string kind;
    r.text("kind", kind);
    if (kind == "piecewise") {
        PiecewiseAcceleration pw;
        const json* seg = r.find("segments");
        if (!seg) throw doc.anchored(r.field("segments"), "required for kind \"piecewise\"");
        for (const auto& [start, accel] : read_pairs(doc, *seg, r.field("segments"))) pw.segments.push_back({start, accel});
        r.finish();
        return pw;
    }
    if (kind == "speed_trace") {
        double gain = 1.0, window = 0.5, grid = 0.01;
        r.number("speed_gain", gain);
        r.number("smoothing_window", window);
        r.number("grid_step", grid);
        std::string file;
        r.text("file", file);
        r.text("source_file", source);
        const json* points = r.find("points");
        std::vector<double> times, speeds;
        if (points && !file.empty()) throw doc.anchored(r.field("file"), "give either file or points, not both");
        if (points) {
            for (const auto& [t, v] : read_pairs(doc, *points, r.field("points"))) {
                times.push_back(t);
                speeds.push_back(v);
            }
        } else if (!file.empty()) {
            const std::filesystem::path path = doc.base_dir / file;
            try {
                const SpeedSeries s = read_speed_csv(path);
                times = s.time;
                speeds = s.speed;
            } catch (const ConfigError& e) {
                throw doc.anchored(r.field("file"), e.what());
            }
            source = file;
        } else {
            throw doc.anchored(r.field("points"), "speed_trace needs points or file");
        }
        r.finish();
        try {
            return SpeedTrace(std::move(times), std::move(speeds), gain, window, grid);
        } catch (const ConfigError& e) {
            throw doc.anchored(points ? r.field("points") : r.field("file"), e.what());
        }
    }
    throw doc.anchored(r.field("kind"), "expected \"piecewise\" or \"speed_trace\"");
}

inline void read_sysid(const ConfigDocument& doc, ObjectReader& r, SysidSettings& s) {
    r.text("manifest", s.manifest);
    if (r.has("truth")) {
        ObjectReader t = r.child("truth");
        read_vehicle_params(t, s.truth);
    }
    r.count("trials", s.trials);
    r.number("noise", s.noise);
    r.number("dt", s.dt);
    r.number("duration", s.duration);
    r.numbers("motoring_commands", s.motoring_commands);
    r.numbers("regen_commands", s.regen_commands);
    std::vector<double> bracket{s.fit.gamma_lo, s.fit.gamma_hi};
    r.numbers("gamma_bracket", bracket);
    if (bracket.size() != 2 || !(bracket[0] > 0) || !(bracket[1] > bracket[0])) {
        throw doc.anchored(r.field("gamma_bracket"), "expected [lo, hi] with 0 < lo < hi");
    }
    s.fit.gamma_lo = bracket[0];
    s.fit.gamma_hi = bracket[1];
    r.finish();
    if (s.trials < 1) throw doc.anchored(r.field("trials"), "must be >= 1");
    if (!(s.noise >= 0)) throw doc.anchored(r.field("noise"), "must be >= 0");
    if (!(s.dt > 0)) throw doc.anchored(r.field("dt"), "must be > 0");
    if (!(s.duration > s.dt)) throw doc.anchored(r.field("duration"), "must exceed dt");
    for (double c : s.motoring_commands) {
        if (!(c > 0)) throw doc.anchored(r.field("motoring_commands"), "commands must be > 0");
    }
    for (double c : s.regen_commands) {
        if (!(c < 0)) throw doc.anchored(r.field("regen_commands"), "commands must be < 0");
    }
}

} // namespace detail

inline RunConfig run_config_from_document(const ConfigDocument& doc) {
    RunConfig rc;
    ScenarioConfig& sc = rc.scenario;
    detail::ObjectReader r(doc, doc.root, "");

    double version = 0;
    r.number("schema_version", version);
    if (!r.has("schema_version")) throw doc.anchored("schema_version", "missing");
    if (version != kSchemaVersion) {
        throw doc.anchored("schema_version", "unsupported version, expected " + std::to_string(kSchemaVersion));
    }
    r.text("name", rc.name);

    std::size_t n = sc.n_vehicles;
    r.count("n_vehicles", n);
    sc.n_vehicles = n;
    r.number("dt", sc.dt);

    std::string controller = to_string(sc.controller);
    r.text("controller", controller);
    sc.controller = detail::controller_from(doc, "controller", controller);

    if (r.has("gains")) {
        auto g = r.child("gains");
        g.number("alpha1", sc.gains.alpha1);
        g.number("alpha2", sc.gains.alpha2);
        g.number("c_gain", sc.gains.c_gain);
        g.number("epsilon1", sc.gains.epsilon1);
        g.finish();
    }
    if (r.has("pid")) {
        auto g = r.child("pid");
        g.number("kp", sc.pid.kp);
        g.number("ki", sc.pid.ki);
        g.number("kd", sc.pid.kd);
        g.number("feedforward_weight", sc.pid.feedforward_weight);
        g.finish();
    }

    VehicleParams common;
    if (r.has("vehicle")) {
        auto v = r.child("vehicle");
        detail::read_vehicle_params(v, common);
    }
    sc.params.assign(sc.n_vehicles, common);
    if (const json* list = r.find("vehicles")) {
        if (!list->is_array() || list->size() != sc.n_vehicles) {
            throw doc.anchored("vehicles", "expected an array with one object per vehicle");
        }
        for (std::size_t i = 0; i < sc.n_vehicles; ++i) {
            detail::ObjectReader v(doc, (*list)[i], "vehicles[" + std::to_string(i) + "]");
            detail::read_vehicle_params(v, sc.params[i]);
        }
    }

    if (!r.has("leader")) throw doc.anchored("leader", "missing");
    {
        auto l = r.child("leader");
        sc.leader = detail::read_leader(doc, l, rc.leader_source);
    }
    const bool implied_duration = !r.has("duration");
    if (!implied_duration) {
        r.number("duration", sc.duration);
    } else if (const auto* trace = std::get_if<SpeedTrace>(&sc.leader)) {
        sc.duration = trace->end_time();
    }

    if (r.has("initial")) {
        auto in = r.child("initial");
        in.number("speed", sc.initial.speed);
        std::string spacing = "at_desired";
        in.text("spacing", spacing);
        if (spacing == "custom") {
            if (!in.has("offsets")) throw doc.anchored(in.field("offsets"), "required when spacing is \"custom\"");
            in.numbers("offsets", sc.initial.offsets);
        } else if (spacing != "at_desired") {
            throw doc.anchored(in.field("spacing"), "expected \"at_desired\" or \"custom\"");
        } else if (in.has("offsets")) {
            throw doc.anchored(in.field("offsets"), "only allowed when spacing is \"custom\"");
        }
        in.finish();
    }

    if (r.has("energy")) {
        auto e = r.child("energy");
        e.number("mass", sc.energy.mass);
        e.number("drag_area_coeff", sc.energy.drag_area_coeff);
        e.number("rolling_coeff", sc.energy.rolling_coeff);
        e.number("gravity", sc.energy.gravity);
        e.number("regen_efficiency", sc.energy.regen_efficiency);
        e.number("accessory_power", sc.energy.accessory_power);
        e.number("grade", rc.grade);
        e.finish();
    }
    if (rc.grade != 0.0) {
        const double g = rc.grade;
        sc.energy.grade = [g](double) { return g; };
    }

    std::string policy = "warn";
    r.text("on_gain_violation", policy);
    if (policy == "error") {
        sc.on_gain_violation = GainViolationPolicy::Error;
    } else if (policy != "warn") {
        throw doc.anchored("on_gain_violation", "expected \"warn\" or \"error\"");
    }

    if (r.has("metrics")) {
        auto m = r.child("metrics");
        m.boolean("subtract_initial_speed", rc.metrics.subtract_initial_speed);
        m.finish();
    }
    if (r.has("sweep")) {
        auto s = r.child("sweep");
        s.numbers("headways", rc.sweep.headways);
        s.finish();
    }
    if (r.has("compare")) {
        auto c = r.child("compare");
        std::string proposed = to_string(rc.compare.proposed), baseline = to_string(rc.compare.baseline);
        c.text("proposed", proposed);
        c.text("baseline", baseline);
        rc.compare.proposed = detail::controller_from(doc, c.field("proposed"), proposed);
        rc.compare.baseline = detail::controller_from(doc, c.field("baseline"), baseline);
        c.finish();
    }
    if (r.has("sysid")) {
        auto s = r.child("sysid");
        detail::read_sysid(doc, s, rc.sysid);
    }
    r.finish();
    if (implied_duration && !std::holds_alternative<SpeedTrace>(sc.leader)) {
        throw doc.anchored("duration", "missing (only speed traces imply a duration)");
    }

    try {
        sc.validate();
    } catch (const ConfigError& e) {
        std::string field = e.field();
        // Per-vehicle fields that were never overridden come from "vehicle".
        if (field.rfind("vehicles[", 0) == 0 && !doc.lines.count(field)) {
            const auto dot = field.find("].");
            if (dot != std::string::npos) field = "vehicle." + field.substr(dot + 2);
        }
        std::string msg = e.what();
        if (const auto colon = msg.find(": "); colon != std::string::npos && msg.rfind("vehicles[", 0) == 0) {
            msg = msg.substr(colon + 2);
        }
        throw doc.anchored(field, msg);
    }
    return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_document(load_config_file(path));
}

namespace detail {

inline json vehicle_params_json(const VehicleParams& p) {
    return {{"gamma_accel", p.gamma_accel}, {"gamma_decel", p.gamma_decel}, {"beta_accel", p.beta_accel},
            {"beta_decel", p.beta_decel},   {"length", p.length},           {"standstill", p.standstill},
            {"headway", p.headway},         {"deadband", p.deadband},       {"input_limit", p.input_limit}};
}

inline json leader_json(const LeaderProfile& leader, const std::string& source) {
    if (const auto* pw = std::get_if<PiecewiseAcceleration>(&leader)) {
        json seg = json::array();
        for (const AccelSegment& s : pw->segments) seg.push_back({s.start, s.accel});
        return {{"kind", "piecewise"}, {"segments", seg}};
    }
    const auto& tr = std::get<SpeedTrace>(leader);
    json pts = json::array();
    for (std::size_t k = 0; k < tr.times().size(); ++k) pts.push_back({tr.times()[k], tr.speeds()[k]});
    json out = {{"kind", "speed_trace"},
                {"speed_gain", tr.speed_gain()},
                {"smoothing_window", tr.smoothing_window()},
                {"grid_step", tr.grid_step()},
                {"points", pts}};
    if (!source.empty()) out["source_file"] = source;
    return out;
}

} // namespace detail

// Fully resolved configuration: every default spelled out and drive cycles
// inlined, so the document alone reproduces the run.
inline json to_json(const RunConfig& rc) {
    const ScenarioConfig& sc = rc.scenario;
    json vehicles = json::array();
    for (const VehicleParams& p : sc.params) vehicles.push_back(detail::vehicle_params_json(p));

    json initial = {{"speed", sc.initial.speed}};
    if (sc.initial.offsets.empty()) {
        initial["spacing"] = "at_desired";
    } else {
        initial["spacing"] = "custom";
        initial["offsets"] = sc.initial.offsets;
    }

    const SysidSettings& s = rc.sysid;
    json truth = detail::vehicle_params_json(s.truth);
    json sysid = {{"trials", s.trials},
                  {"noise", s.noise},
                  {"dt", s.dt},
                  {"duration", s.duration},
                  {"motoring_commands", s.motoring_commands},
                  {"regen_commands", s.regen_commands},
                  {"gamma_bracket", {s.fit.gamma_lo, s.fit.gamma_hi}},
                  {"truth", truth}};
    if (!s.manifest.empty()) sysid["manifest"] = s.manifest;

    return {
        {"schema_version", kSchemaVersion},
        {"name", rc.name},
        {"n_vehicles", sc.n_vehicles},
        {"dt", sc.dt},
        {"duration", sc.duration},
        {"controller", to_string(sc.controller)},
        {"gains",
         {{"alpha1", sc.gains.alpha1}, {"alpha2", sc.gains.alpha2}, {"c_gain", sc.gains.c_gain},
          {"epsilon1", sc.gains.epsilon1}}},
        {"pid",
         {{"kp", sc.pid.kp}, {"ki", sc.pid.ki}, {"kd", sc.pid.kd}, {"feedforward_weight", sc.pid.feedforward_weight}}},
        {"vehicles", vehicles},
        {"leader", detail::leader_json(sc.leader, rc.leader_source)},
        {"initial", initial},
        {"energy",
         {{"mass", sc.energy.mass},
          {"drag_area_coeff", sc.energy.drag_area_coeff},
          {"rolling_coeff", sc.energy.rolling_coeff},
          {"gravity", sc.energy.gravity},
          {"regen_efficiency", sc.energy.regen_efficiency},
          {"accessory_power", sc.energy.accessory_power},
          {"grade", rc.grade}}},
        {"on_gain_violation", sc.on_gain_violation == GainViolationPolicy::Error ? "error" : "warn"},
        {"metrics", {{"subtract_initial_speed", rc.metrics.subtract_initial_speed}}},
        {"sweep", {{"headways", rc.sweep.headways}}},
        {"compare", {{"proposed", to_string(rc.compare.proposed)}, {"baseline", to_string(rc.compare.baseline)}}},
        {"sysid", sysid},
    };
}

} // namespace evcacc
