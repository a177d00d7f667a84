#include "thzrf/cli.hpp"

#include <boost/algorithm/string.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace thzrf::cli {

ConfigError::ConfigError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(line > 0 ? origin + ":" + std::to_string(line) + ": " + message : origin + ": " + message),
      line_(line) {}

std::string output_name(Output o) {
    switch (o) {
        case Output::analytical: return "analytical";
        case Output::asymptotic: return "asymptotic";
        case Output::mc: return "mc";
    }
    return "";
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g;
    const auto n = static_cast<long>(std::floor((stop_db - start_db) / step_db + 1e-9));
    for (long i = 0; i <= n; ++i) g.push_back(start_db + static_cast<double>(i) * step_db);
    return g;
}

void SweepSpec::validate() const {
    if (!(start_db < stop_db)) throw std::invalid_argument("sweep: snr_db start must be below stop");
    if (!(step_db > 0.0)) throw std::invalid_argument("sweep: snr_db step must be > 0");
    if (schemes.empty()) throw std::invalid_argument("sweep: at least one scheme is required");
    if (outputs.empty()) throw std::invalid_argument("sweep: at least one output is required");
    if (outputs.count(Output::mc) && !sim) throw std::invalid_argument("sweep: mc output requires an [mc] section");
    if (sim) sim->validate();
}

linkstats::SnrModel RunConfig::model() const {
    channel::PowerNoise p;
    p.n0 = n0;
    p.p_s = p.p_r = n0;
    return linkstats::SnrModel(thz, rf, p).with_contour(contour);
}

namespace {

struct KeyDef {
    const char* key;
    const char* fallback;  // nullptr: no default
    bool required;         // must be given unless defaults are requested
};

// Link geometry and environment default to the headline scenario; fading and
// sweep settings have to be chosen explicitly.
const KeyDef kKeys[] = {
    {"thz.carrier_hz", "275e9", false},
    {"thz.distance_m", "300", false},
    {"thz.tx_gain_dbi", "52", false},
    {"thz.rx_gain_dbi", "52", false},
    {"thz.path_loss_exponent", "2", false},
    {"thz.temperature_k", "296", false},
    {"thz.pressure_hpa", "1013.25", false},
    {"thz.humidity_pct", "50", false},
    {"thz.absorption_per_m", nullptr, false},
    {"thz.alpha", "2.3", true},
    {"thz.mu", "2.25", true},
    {"thz.omega", "1.75", true},
    {"thz.phi", "6.75", true},
    {"thz.s0", "0.56", true},
    {"rf.carrier_hz", "8e9", false},
    {"rf.distance_m", "800", false},
    {"rf.tx_gain_dbi", "52", false},
    {"rf.rx_gain_dbi", "52", false},
    {"rf.path_loss_exponent", "2", false},
    {"rf.m", "2.3", true},
    {"rf.omega_m", "1.5075", true},
    {"power.n0", "1", false},
    {"sweep.snr_db", "10, 70, 10", true},
    {"sweep.schemes", "rqam:4x2:1", true},
    {"sweep.outputs", "analytical", false},
    {"sweep.out", "aser.csv", false},
    {"sweep.threads", "0", false},
    {"mc.trials", "1000000", false},
    {"mc.seed", "1", false},
    {"mc.partitions", "4", false},
    {"mc.mode", "conditional", false},
    {"mc.threads", "0", false},
    {"contour.tolerance", "1e-8", false},
    {"contour.nodes_per_axis", "64", false},
    {"contour.node_budget", "400000000", false},
};

const KeyDef* find_key(const std::string& name) {
    for (const auto& k : kKeys)
        if (name == k.key) return &k;
    return nullptr;
}

struct Value {
    std::string text;
    int line = 0;  // 0: taken from the defaults
};

class Reader {
public:
    Reader(std::string origin, std::map<std::string, Value> values)
        : origin_(std::move(origin)), values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    int line(const std::string& key) const { return has(key) ? values_.at(key).line : 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError(origin_, line(key), msg);
    }

    const std::string& text(const std::string& key) const {
        if (!has(key)) fail(key, "missing required key " + key);
        return values_.at(key).text;
    }

    double number(const std::string& key) const {
        const auto& t = text(key);
        double v = 0.0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v))
            fail(key, key + ": '" + t + "' is not a finite number");
        return v;
    }

    long long integer(const std::string& key) const {
        const auto& t = text(key);
        long long v = 0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail(key, key + ": '" + t + "' is not an integer");
        return v;
    }

    std::uint64_t unsigned_integer(const std::string& key) const {
        const auto& t = text(key);
        std::uint64_t v = 0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc() || r.ptr != t.data() + t.size())
            fail(key, key + ": '" + t + "' is not an unsigned 64-bit integer");
        return v;
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> parts;
        boost::algorithm::split(parts, text(key), boost::is_any_of(","));
        for (auto& p : parts) boost::algorithm::trim(p);
        parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
        return parts;
    }

    template <class T, class Pred>
    T checked(const std::string& key, T v, Pred ok, const char* rule) const {
        if (!ok(v)) {
            std::ostringstream os;
            os << key << " = " << text(key) << " is out of range: " << rule << " required";
            fail(key, os.str());
        }
        return v;
    }

private:
    std::string origin_;
    std::map<std::string, Value> values_;
};

std::map<std::string, Value> tokenize(const std::string& body, const std::string& origin) {
    std::map<std::string, Value> values;
    std::istringstream in(body);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw.substr(0, raw.find_first_of("#;"));
        boost::algorithm::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(origin, lineno, "malformed section header '" + line + "'");
            section = boost::algorithm::trim_copy(line.substr(1, line.size() - 2));
            static const std::set<std::string> sections = {"thz", "rf", "power", "sweep", "mc", "contour"};
            if (!sections.count(section)) throw ConfigError(origin, lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(origin, lineno, "expected 'key = value'");
        if (section.empty()) throw ConfigError(origin, lineno, "key outside of a section");
        const std::string key = section + "." + boost::algorithm::trim_copy(line.substr(0, eq));
        const std::string value = boost::algorithm::trim_copy(line.substr(eq + 1));
        if (!find_key(key)) throw ConfigError(origin, lineno, "unknown key " + key);
        if (value.empty()) throw ConfigError(origin, lineno, key + ": empty value");
        if (values.count(key))
            throw ConfigError(origin, lineno,
                              "duplicate key " + key + " (first set on line " + std::to_string(values[key].line) + ")");
        values[key] = {value, lineno};
    }
    return values;
}

}  // namespace

RunConfig parse_config_text(const std::string& body, const std::string& origin, ParseOptions opts) {
    auto values = tokenize(body, origin);
    bool any_mc = false;
    for (const auto& [k, v] : values) any_mc = any_mc || k.rfind("mc.", 0) == 0;
    for (const auto& def : kKeys) {
        if (values.count(def.key) || !def.fallback) continue;
        if (def.required && !opts.use_defaults) throw ConfigError(origin, 0, std::string("missing required key ") + def.key);
        values[def.key] = {def.fallback, 0};
    }
    const Reader r(origin, std::move(values));
    auto positive = [](double v) { return v > 0.0; };

    RunConfig cfg;
    auto& tl = cfg.thz.link;
    tl.carrier_hz = r.checked("thz.carrier_hz", r.number("thz.carrier_hz"), positive, "carrier_hz > 0");
    tl.distance_m = r.checked("thz.distance_m", r.number("thz.distance_m"), positive, "distance_m > 0");
    tl.tx_gain_db = r.number("thz.tx_gain_dbi");
    tl.rx_gain_db = r.number("thz.rx_gain_dbi");
    tl.path_loss_exp = r.checked("thz.path_loss_exponent", r.number("thz.path_loss_exponent"),
                                 [](double v) { return v >= 2.0; }, "path_loss_exponent >= 2");
    tl.temperature_k = r.checked("thz.temperature_k", r.number("thz.temperature_k"), positive, "temperature_k > 0");
    tl.pressure_hpa = r.checked("thz.pressure_hpa", r.number("thz.pressure_hpa"), positive, "pressure_hpa > 0");
    tl.rel_humidity_pct = r.checked("thz.humidity_pct", r.number("thz.humidity_pct"),
                                    [](double v) { return v >= 0.0 && v <= 100.0; }, "0 <= humidity_pct <= 100");
    if (r.has("thz.absorption_per_m"))
        tl.absorption_override = r.checked("thz.absorption_per_m", r.number("thz.absorption_per_m"),
                                           [](double v) { return v >= 0.0; }, "absorption_per_m >= 0");

    auto& fad = cfg.thz.fading;
    fad.alpha = r.checked("thz.alpha", r.number("thz.alpha"), positive, "alpha > 0");
    fad.mu = r.checked("thz.mu", r.number("thz.mu"), [](double v) { return v >= 0.5; }, "mu >= 1/2");
    fad.omega = r.checked("thz.omega", r.number("thz.omega"), positive, "omega > 0");
    cfg.thz.pointing.phi = r.checked("thz.phi", r.number("thz.phi"), positive, "phi > 0");
    cfg.thz.pointing.s0 =
        r.checked("thz.s0", r.number("thz.s0"), [](double v) { return v > 0.0 && v <= 1.0; }, "0 < s0 <= 1");

    auto& rl = cfg.rf.link;
    rl.carrier_hz = r.checked("rf.carrier_hz", r.number("rf.carrier_hz"), positive, "carrier_hz > 0");
    rl.distance_m = r.checked("rf.distance_m", r.number("rf.distance_m"), positive, "distance_m > 0");
    rl.tx_gain_db = r.number("rf.tx_gain_dbi");
    rl.rx_gain_db = r.number("rf.rx_gain_dbi");
    rl.path_loss_exp = r.checked("rf.path_loss_exponent", r.number("rf.path_loss_exponent"), positive,
                                 "path_loss_exponent > 0");
    cfg.rf.fading.m = r.checked("rf.m", r.number("rf.m"), [](double v) { return v >= 0.5; }, "m >= 1/2");
    cfg.rf.fading.omega_m = r.checked("rf.omega_m", r.number("rf.omega_m"), positive, "omega_m > 0");

    cfg.n0 = r.checked("power.n0", r.number("power.n0"), positive, "n0 > 0");

    cfg.contour.tolerance = r.checked("contour.tolerance", r.number("contour.tolerance"),
                                      [](double v) { return v > 0.0 && v < 1.0; }, "0 < tolerance < 1");
    cfg.contour.nodes_per_axis = static_cast<int>(r.checked("contour.nodes_per_axis", r.integer("contour.nodes_per_axis"),
                                                            [](long long v) { return v >= 64 && v <= 1'000'000; },
                                                            "64 <= nodes_per_axis <= 1000000"));
    cfg.contour.node_budget = r.checked("contour.node_budget", r.integer("contour.node_budget"),
                                        [](long long v) { return v >= 1000; }, "node_budget >= 1000");

    auto& sw = cfg.sweep;
    {
        const auto parts = r.list("sweep.snr_db");
        if (parts.size() != 3) r.fail("sweep.snr_db", "sweep.snr_db: expected 'start, stop, step'");
        double v[3];
        for (int i = 0; i < 3; ++i) {
            const auto& t = parts[i];
            const auto res = std::from_chars(t.data(), t.data() + t.size(), v[i]);
            if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v[i]))
                r.fail("sweep.snr_db", "sweep.snr_db: '" + t + "' is not a finite number");
        }
        sw.start_db = v[0];
        sw.stop_db = v[1];
        sw.step_db = v[2];
        if (!(sw.start_db < sw.stop_db)) r.fail("sweep.snr_db", "sweep.snr_db: start < stop required");
        if (!(sw.step_db > 0.0)) r.fail("sweep.snr_db", "sweep.snr_db: step > 0 required");
    }
    for (const auto& s : r.list("sweep.schemes")) {
        try {
            sw.schemes.push_back(aser::parse_scheme(s));
        } catch (const std::invalid_argument& e) {
            r.fail("sweep.schemes", e.what());
        }
    }
    if (sw.schemes.empty()) r.fail("sweep.schemes", "sweep.schemes: at least one scheme is required");
    sw.outputs.clear();
    for (const auto& o : r.list("sweep.outputs")) {
        if (o == "analytical")
            sw.outputs.insert(Output::analytical);
        else if (o == "asymptotic")
            sw.outputs.insert(Output::asymptotic);
        else if (o == "mc")
            sw.outputs.insert(Output::mc);
        else
            r.fail("sweep.outputs", "sweep.outputs: unknown output '" + o + "' (analytical, asymptotic, mc)");
    }
    if (sw.outputs.empty()) r.fail("sweep.outputs", "sweep.outputs: at least one output is required");
    sw.out_path = r.text("sweep.out");
    sw.threads = static_cast<int>(
        r.checked("sweep.threads", r.integer("sweep.threads"), [](long long v) { return v >= 0; }, "threads >= 0"));

    if (any_mc || sw.outputs.count(Output::mc)) {
        if (!any_mc && !opts.use_defaults) r.fail("sweep.outputs", "sweep.outputs includes mc but no [mc] section is given");
        mcsim::SimConfig sim;
        sim.trials = r.checked("mc.trials", r.integer("mc.trials"), [](long long v) { return v >= 10'000; },
                               "trials >= 10000");
        sim.seed = r.unsigned_integer("mc.seed");
        sim.partitions = static_cast<int>(r.checked("mc.partitions", r.integer("mc.partitions"),
                                                    [](long long v) { return v >= 1 && v <= 1'000'000; },
                                                    "1 <= partitions <= 1000000"));
        if (sim.trials % sim.partitions != 0) r.fail("mc.partitions", "mc.trials must be divisible by mc.partitions");
        try {
            sim.mode = mcsim::parse_mode(r.text("mc.mode"));
        } catch (const std::invalid_argument& e) {
            r.fail("mc.mode", e.what());
        }
        sim.threads = static_cast<int>(
            r.checked("mc.threads", r.integer("mc.threads"), [](long long v) { return v >= 0; }, "threads >= 0"));
        sw.sim = sim;
    }

    // Cross-field checks of the link structs, reported against the section.
    try {
        cfg.thz.link.validate();
        cfg.rf.link.validate();
        cfg.contour.validate();
    } catch (const std::exception& e) {
        throw ConfigError(origin, 0, e.what());
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, ParseOptions opts) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open file");
    std::ostringstream body;
    body << in.rdbuf();
    return parse_config_text(body.str(), path.string(), opts);
}

namespace {

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

std::string serialize(const RunConfig& cfg) {
    std::ostringstream os;
    const auto& tl = cfg.thz.link;
    os << "[thz]\n"
       << "carrier_hz = " << num(tl.carrier_hz) << "\n"
       << "distance_m = " << num(tl.distance_m) << "\n"
       << "tx_gain_dbi = " << num(tl.tx_gain_db) << "\n"
       << "rx_gain_dbi = " << num(tl.rx_gain_db) << "\n"
       << "path_loss_exponent = " << num(tl.path_loss_exp) << "\n"
       << "temperature_k = " << num(tl.temperature_k) << "\n"
       << "pressure_hpa = " << num(tl.pressure_hpa) << "\n"
       << "humidity_pct = " << num(tl.rel_humidity_pct) << "\n";
    if (tl.absorption_override) os << "absorption_per_m = " << num(*tl.absorption_override) << "\n";
    os << "alpha = " << num(cfg.thz.fading.alpha) << "\n"
       << "mu = " << num(cfg.thz.fading.mu) << "\n"
       << "omega = " << num(cfg.thz.fading.omega) << "\n"
       << "phi = " << num(cfg.thz.pointing.phi) << "\n"
       << "s0 = " << num(cfg.thz.pointing.s0) << "\n";
    const auto& rl = cfg.rf.link;
    os << "\n[rf]\n"
       << "carrier_hz = " << num(rl.carrier_hz) << "\n"
       << "distance_m = " << num(rl.distance_m) << "\n"
       << "tx_gain_dbi = " << num(rl.tx_gain_db) << "\n"
       << "rx_gain_dbi = " << num(rl.rx_gain_db) << "\n"
       << "path_loss_exponent = " << num(rl.path_loss_exp) << "\n"
       << "m = " << num(cfg.rf.fading.m) << "\n"
       << "omega_m = " << num(cfg.rf.fading.omega_m) << "\n";
    os << "\n[power]\n"
       << "n0 = " << num(cfg.n0) << "\n";
    const auto& sw = cfg.sweep;
    os << "\n[sweep]\n"
       << "snr_db = " << num(sw.start_db) << ", " << num(sw.stop_db) << ", " << num(sw.step_db) << "\n"
       << "schemes = ";
    for (std::size_t i = 0; i < sw.schemes.size(); ++i) os << (i ? ", " : "") << aser::scheme_id(sw.schemes[i]);
    os << "\noutputs = ";
    bool first = true;
    for (auto o : sw.outputs) {
        os << (first ? "" : ", ") << output_name(o);
        first = false;
    }
    os << "\nout = " << sw.out_path.string() << "\n"
       << "threads = " << sw.threads << "\n";
    if (sw.sim) {
        os << "\n[mc]\n"
           << "trials = " << sw.sim->trials << "\n"
           << "seed = " << sw.sim->seed << "\n"
           << "partitions = " << sw.sim->partitions << "\n"
           << "mode = " << mcsim::mode_name(sw.sim->mode) << "\n"
           << "threads = " << sw.sim->threads << "\n";
    }
    os << "\n[contour]\n"
       << "tolerance = " << num(cfg.contour.tolerance) << "\n"
       << "nodes_per_axis = " << cfg.contour.nodes_per_axis << "\n"
       << "node_budget = " << cfg.contour.node_budget << "\n";
    return os.str();
}

}  // namespace thzrf::cli
