// Sweep runner for the dual-hop THz/RF link.
//
//   thzrf run <config>        evaluate the sweep, write CSV and plot script
//   thzrf validate <config>   parse only; print the canonical configuration
//   thzrf oracle <config>     closed form against the quadrature oracle
//   thzrf mc-check <config>   closed form against Monte Carlo
//
// Exit status: 0 clean, 1 configuration or I/O error, 2 flagged points.

#include "thzrf/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace thzrf;

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("thzrf");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("THZRF_LOG_LEVEL"); env && *env) {
        const auto lvl = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only accept the spelled-out ones
        if (lvl == spdlog::level::off && std::string(env) != "off")
            spdlog::warn("THZRF_LOG_LEVEL='{}' not recognised, keeping 'warn'", env);
        else
            spdlog::set_level(lvl);
    }
}

int cmd_run(const cli::RunConfig& cfg) {
    const auto curve = cli::run_sweep(cfg.model(), cfg.sweep);
    const auto script = cli::emit(curve, cfg.sweep);
    std::cout << "wrote " << cfg.sweep.out_path.string() << " (" << curve.size() << " rows) and " << script.string()
              << "\n";
    if (cli::has_flags(curve)) {
        std::cerr << cli::flag_summary(curve);
        return 2;
    }
    return 0;
}

int cmd_oracle(const cli::RunConfig& cfg, double tol) {
    const auto base = cfg.model();
    int failures = 0;
    std::printf("%8s  %-14s %24s %24s %10s\n", "snr_db", "scheme", "closed_form", "oracle", "rel_err");
    for (double db : cfg.sweep.grid()) {
        const auto m = base.with_snr_db(db);
        for (const auto& s : cfg.sweep.schemes) {
            const auto id = aser::scheme_id(s);
            try {
                const double cf = aser::aser(m, s);
                const auto o = aser::oracle_aser(m, s);
                const double rel = std::fabs(cf - o.value) / std::fabs(o.value);
                const bool ok = rel <= tol;
                failures += !ok;
                std::printf("%8g  %-14s %24.17g %24.17g %10.2e %s\n", db, id.c_str(), cf, o.value, rel,
                            ok ? "PASS" : "FAIL");
            } catch (const std::exception& e) {
                ++failures;
                std::printf("%8g  %-14s error: %s FAIL\n", db, id.c_str(), e.what());
            }
        }
    }
    return failures ? 2 : 0;
}

int cmd_mc_check(const cli::RunConfig& cfg, double floor) {
    if (!cfg.sweep.sim) {
        std::cerr << "mc-check needs an [mc] section\n";
        return 1;
    }
    const auto base = cfg.model();
    int failures = 0;
    std::printf("%8s  %-14s %22s %22s %10s %7s\n", "snr_db", "scheme", "analytical", "monte_carlo", "stderr", "z");
    for (double db : cfg.sweep.grid()) {
        const auto m = base.with_snr_db(db);
        const auto mc = mcsim::run_mc(m, cfg.sweep.schemes, *cfg.sweep.sim);
        for (std::size_t i = 0; i < cfg.sweep.schemes.size(); ++i) {
            const auto& s = cfg.sweep.schemes[i];
            const double an = aser::aser(m, s);
            const double z = mc[i].std_error > 0.0 ? (mc[i].aser - an) / mc[i].std_error : 0.0;
            const char* verdict = an < floor ? "skip" : (std::fabs(z) <= 3.0 ? "PASS" : "FAIL");
            failures += verdict[0] == 'F';
            std::printf("%8g  %-14s %22.15g %22.15g %10.3e %7.2f %s\n", db, aser::scheme_id(s).c_str(), an, mc[i].aser,
                        mc[i].std_error, z, verdict);
        }
    }
    return failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"ASER sweeps for a dual-hop THz/RF decode-and-forward link"};
    app.require_subcommand(1);

    std::string path;
    bool defaults = false;
    double oracle_tol = 1e-4;
    double mc_floor = 1e-4;
    std::string out_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", path, "configuration file")->required();
        sub->add_flag("--defaults", defaults, "fill fading, pointing and sweep keys with built-in values");
    };
    auto* run = app.add_subcommand("run", "evaluate the sweep and write CSV plus plot script");
    add_common(run);
    run->add_option("-o,--out", out_override, "override sweep.out");
    auto* validate = app.add_subcommand("validate", "parse and print the canonical configuration");
    add_common(validate);
    auto* oracle = app.add_subcommand("oracle", "compare closed forms with the quadrature oracle");
    add_common(oracle);
    oracle->add_option("--tolerance", oracle_tol, "relative tolerance")->check(CLI::PositiveNumber);
    auto* mccheck = app.add_subcommand("mc-check", "compare closed forms with Monte Carlo");
    add_common(mccheck);
    mccheck->add_option("--floor", mc_floor, "skip points with ASER below this value")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = cli::parse_config(path, {defaults});
        if (!out_override.empty()) cfg.sweep.out_path = out_override;
        if (validate->parsed()) {
            std::cout << cli::serialize(cfg);
            return 0;
        }
        if (run->parsed()) return cmd_run(cfg);
        if (oracle->parsed()) return cmd_oracle(cfg, oracle_tol);
        return cmd_mc_check(cfg, mc_floor);
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
