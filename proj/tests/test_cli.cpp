#include "support.hpp"

#include "thzrf/cli.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace thzrf;
namespace fs = std::filesystem;

namespace {

const char* kMidpointConfig = R"(# midpoint of the parameter table
[thz]
absorption_per_m = 4e-4
alpha = 2.3
mu = 2.25
omega = 1.75
phi = 6.75
s0 = 0.56

[rf]
m = 2.3
omega_m = 1.5075

[sweep]
snr_db = 20, 40, 10
schemes = rqam:4x2:1
)";

struct TempDir {
    fs::path path;
    TempDir() {
        char tmpl[] = "/tmp/thzrf_cli_XXXXXX";
        path = mkdtemp(tmpl);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_tool(const std::string& args) {
    const std::string cmd = std::string(THZRF_TOOL) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string error_message(const std::string& text, cli::ParseOptions opts = {}) {
    try {
        cli::parse_config_text(text, "t.ini", opts);
    } catch (const cli::ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("empty configuration with defaults gives the reference link") {
    const auto cfg = cli::parse_config_text("", "empty.ini", {true});
    CHECK(cfg.thz.link.carrier_hz == 275e9);
    CHECK(cfg.rf.link.carrier_hz == 8e9);
    CHECK(cfg.thz.link.tx_gain_db == 52.0);
    CHECK(cfg.thz.link.rx_gain_db == 52.0);
    CHECK(cfg.rf.link.tx_gain_db == 52.0);
    CHECK(cfg.rf.link.rx_gain_db == 52.0);
    CHECK(cfg.thz.link.distance_m == 300.0);
    CHECK(cfg.rf.link.distance_m == 800.0);
    CHECK(cfg.thz.link.temperature_k == 296.0);
    CHECK(cfg.thz.link.pressure_hpa == 1013.25);
    CHECK(cfg.thz.link.rel_humidity_pct == 50.0);
    CHECK_FALSE(cfg.thz.link.absorption_override.has_value());
    CHECK_FALSE(cfg.sweep.sim.has_value());

    // without the flag the fading keys are required
    CHECK(error_message("").find("missing required key") != std::string::npos);
}

TEST_CASE("configuration errors name the line and the rule") {
    const std::string bad_phi = "[thz]\nalpha = 2\nphi = -1\n";
    const auto msg = error_message(bad_phi, {true});
    CHECK(msg.find("t.ini:3:") == 0);
    CHECK(msg.find("phi > 0") != std::string::npos);

    CHECK(error_message("[thz]\nbeam = 3\n", {true}).find("t.ini:2: unknown key thz.beam") == 0);
    CHECK(error_message("[thz]\nmu = 2\nmu = 3\n", {true}).find("t.ini:3: duplicate key thz.mu") == 0);
    CHECK(error_message("[laser]\n", {true}).find("t.ini:1: unknown section") == 0);
    CHECK(error_message("alpha = 2\n", {true}).find("t.ini:1:") == 0);
    CHECK(error_message("[rf]\nm = 0.2\n", {true}).find("t.ini:2:") == 0);
    CHECK(error_message("[mc]\ntrials = 100001\npartitions = 4\n", {true}).find("divisible") != std::string::npos);
    CHECK(error_message("[sweep]\nsnr_db = 40, 10, 5\n", {true}).find("start < stop") != std::string::npos);
    CHECK(error_message("[sweep]\nschemes = qpsk\n", {true}).find("t.ini:2:") == 0);
    CHECK(error_message("[sweep]\noutputs = mc\n").find("t.ini:") == 0);
    CHECK(error_message(kMidpointConfig).empty());
}

TEST_CASE("serialisation round trip") {
    const auto cfg = cli::parse_config_text(kMidpointConfig, "mid.ini");
    const auto canonical = cli::serialize(cfg);
    const auto again = cli::serialize(cli::parse_config_text(canonical, "canonical.ini"));
    CHECK(again == canonical);

    auto with_mc = std::string(kMidpointConfig) + "outputs = analytical, mc\n[mc]\ntrials = 20000\nseed = 18446744073709551615\n";
    const auto mc = cli::parse_config_text(with_mc, "mc.ini");
    REQUIRE(mc.sweep.sim.has_value());
    CHECK(mc.sweep.sim->seed == 18446744073709551615ull);
    const auto text = cli::serialize(mc);
    CHECK(cli::serialize(cli::parse_config_text(text, "x")) == text);

    // awkward decimals survive
    auto odd = std::string(kMidpointConfig);
    odd.replace(odd.find("omega = 1.75"), 12, "omega = 0.1");
    const auto oc = cli::parse_config_text(odd, "odd.ini");
    CHECK(oc.thz.fading.omega == 0.1);
    CHECK(cli::parse_config_text(cli::serialize(oc), "y").thz.fading.omega == 0.1);
}

TEST_CASE("CSV layout") {
    cli::AserCurve curve(2);
    curve[0].snr_db = 10.0;
    curve[0].scheme = "sqam:4";
    curve[0].analytical = 0.1;
    curve[1].snr_db = 20.0;
    curve[1].scheme = "sqam:4";
    curve[1].analytical = 1.0 / 3.0;
    curve[1].mc = 2.0 / 7.0;
    curve[1].mc_stderr = 1e-310;
    curve[1].mc_trials = 10'000'000;
    curve[1].flags = {"mc_stderr_high", "asymptotic_perturbed"};

    std::ostringstream os;
    cli::write_csv(curve, os);
    const auto text = os.str();
    CHECK(text.substr(0, text.find('\n')) ==
          "snr_db,scheme,aser_analytical,aser_asymptotic,aser_mc,mc_stderr,mc_trials,flags");
    // absent outputs stay empty
    CHECK(text.find("\n10,sqam:4,0.10000000000000001,,,,,\n") != std::string::npos);

    std::istringstream in(text);
    const auto back = cli::read_csv(in);
    REQUIRE(back.size() == 2);
    CHECK_FALSE(back[0].mc.has_value());
    CHECK_FALSE(back[0].asymptotic.has_value());
    CHECK(*back[1].analytical == curve[1].analytical);
    CHECK(*back[1].mc == curve[1].mc);
    CHECK(*back[1].mc_stderr == curve[1].mc_stderr);
    CHECK(*back[1].mc_trials == 10'000'000);
    CHECK(back[1].flags == curve[1].flags);

    std::istringstream wrong("snr,scheme\n");
    CHECK_THROWS(cli::read_csv(wrong));
}

TEST_CASE("analytical sweep") {
    const auto cfg = cli::parse_config_text(kMidpointConfig, "mid.ini");
    auto spec = cfg.sweep;
    const auto curve = cli::run_sweep(cfg.model(), spec);
    REQUIRE(curve.size() == 3);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        REQUIRE(curve[i].analytical.has_value());
        CHECK_FALSE(curve[i].mc.has_value());
        CHECK(curve[i].flags.empty());
        if (i) CHECK(*curve[i].analytical <= *curve[i - 1].analytical);
    }
    CHECK(*curve[1].analytical ==
          doctest::Approx(aser::aser(testing::make_model(testing::kMidpoint, 30.0), spec.schemes[0])).epsilon(1e-12));

    spec.outputs.insert(cli::Output::asymptotic);
    const auto both = cli::run_sweep(cfg.model(), spec);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(*both[i].analytical == *curve[i].analytical);
        CHECK(both[i].asymptotic.has_value());
    }
}

TEST_CASE("rows are sorted by SNR then scheme regardless of thread count") {
    auto cfg = cli::parse_config_text(kMidpointConfig, "mid.ini");
    cfg.sweep.schemes = {aser::parse_scheme("sqam:16"), aser::parse_scheme("bpsk"), aser::parse_scheme("hqam:8")};
    cfg.sweep.threads = 1;
    const auto one = cli::run_sweep(cfg.model(), cfg.sweep);
    cfg.sweep.threads = 3;
    const auto three = cli::run_sweep(cfg.model(), cfg.sweep);
    std::ostringstream a, b;
    cli::write_csv(one, a);
    cli::write_csv(three, b);
    CHECK(a.str() == b.str());
    REQUIRE(one.size() == 9);
    CHECK(one[0].scheme == "bpsk");
    CHECK(one[1].scheme == "hqam:8");
    CHECK(one[2].scheme == "sqam:16");
    CHECK(one[3].snr_db == 30.0);
}

TEST_CASE("Monte Carlo sweep output is deterministic") {
    auto text = std::string(kMidpointConfig) +
                "outputs = analytical, mc\n[mc]\ntrials = 40000\nseed = 7\npartitions = 4\n";
    const auto cfg = cli::parse_config_text(text, "mc.ini");
    std::ostringstream a, b;
    cli::write_csv(cli::run_sweep(cfg.model(), cfg.sweep), a);
    cli::write_csv(cli::run_sweep(cfg.model(), cfg.sweep), b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find(",40000,") != std::string::npos);
}

TEST_CASE("emit writes the CSV and a plot script beside it") {
    TempDir tmp;
    auto cfg = cli::parse_config_text(kMidpointConfig, "mid.ini");
    cfg.sweep.out_path = tmp.path / "nested" / "curve.csv";
    const auto curve = cli::run_sweep(cfg.model(), cfg.sweep);
    const auto script = cli::emit(curve, cfg.sweep);
    CHECK(script == tmp.path / "nested" / "curve_plot.py");
    std::istringstream in(slurp(cfg.sweep.out_path));
    const auto back = cli::read_csv(in);
    REQUIRE(back.size() == curve.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(*back[i].analytical == *curve[i].analytical);
    const auto py = slurp(script);
    CHECK(py.find("\"curve.csv\"") != std::string::npos);
    CHECK(py.find("semilogy") != std::string::npos);
    CHECK(py.find(tmp.path.string()) == std::string::npos);

    cfg.sweep.out_path = "/proc/nope/curve.csv";
    CHECK_THROWS(cli::emit(curve, cfg.sweep));
}

TEST_CASE("flag summary") {
    cli::AserCurve curve(2);
    curve[0].snr_db = 10;
    curve[0].scheme = "bpsk";
    curve[1].snr_db = 20;
    curve[1].scheme = "bpsk";
    CHECK_FALSE(cli::has_flags(curve));
    CHECK(cli::flag_summary(curve).empty());
    curve[1].flags = {"mc_stderr_high", "analytical_node_budget"};
    CHECK(cli::has_flags(curve));
    CHECK(cli::flag_summary(curve) == "snr_db=20 scheme=bpsk flags=mc_stderr_high;analytical_node_budget\n");
}

TEST_CASE("per-point failures become flags and the sweep continues") {
    auto cfg = cli::parse_config_text(kMidpointConfig, "mid.ini");
    cfg.sweep.start_db = 30.0;
    cfg.sweep.stop_db = 40.0;
    cfg.contour.node_budget = 1000;
    const auto curve = cli::run_sweep(cfg.model(), cfg.sweep);
    REQUIRE(curve.size() == 2);
    for (const auto& r : curve) {
        CHECK_FALSE(r.analytical.has_value());
        REQUIRE(r.flags.size() == 1);
        CHECK(r.flags.front() == "analytical_node_budget");
    }
}

TEST_CASE("relay position sweep") {
    const auto m = testing::make_model(testing::kMidpoint, 30.0);
    const auto s = aser::parse_scheme("rqam:4x2:1");
    const auto pts = cli::relay_position_sweep(m, s, 1100.0, {300.0, 550.0});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].aser == doctest::Approx(aser::aser(m, s)).epsilon(1e-12));
    CHECK(pts[1].d_sr == 550.0);
    CHECK_THROWS_AS(cli::relay_position_sweep(m, s, 1100.0, {1100.0}), std::invalid_argument);
}

TEST_CASE("command line tool") {
    TempDir tmp;
    const auto ini = tmp.path / "mid.ini";
    write(ini, std::string(kMidpointConfig) + "out = " + (tmp.path / "out.csv").string() + "\n");
    CHECK(run_tool("validate " + ini.string()) == 0);
    CHECK(run_tool("run " + ini.string()) == 0);
    CHECK(fs::exists(tmp.path / "out.csv"));
    CHECK(fs::exists(tmp.path / "out_plot.py"));
    CHECK(run_tool("oracle " + ini.string()) == 0);

    // asymptotic values at low SNR are not meaningful and are flagged
    const auto flagged = tmp.path / "flagged.ini";
    write(flagged, std::string(kMidpointConfig) + "outputs = analytical, asymptotic\nout = " +
                       (tmp.path / "f.csv").string() + "\n");
    CHECK(run_tool("run " + flagged.string()) == 2);

    const auto bad = tmp.path / "bad.ini";
    write(bad, "[thz]\nphi = -1\n");
    CHECK(run_tool("run --defaults " + bad.string()) == 1);
    CHECK(run_tool("run " + (tmp.path / "missing.ini").string()) == 1);
    CHECK(run_tool("frobnicate") != 0);
    CHECK(run_tool("") != 0);
}
