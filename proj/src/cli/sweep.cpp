#include "thzrf/cli.hpp"

#include <spdlog/spdlog.h>

#include <boost/algorithm/string.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace thzrf::cli {

namespace {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    unsigned t = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    t = static_cast<unsigned>(std::clamp<std::size_t>(t, 1, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
    };
    if (t == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

std::string failure_flag(const char* what, const std::exception& e) {
    if (dynamic_cast<const aser::AccuracyError*>(&e)) return std::string(what) + "_out_of_range";
    if (dynamic_cast<const specfun::BudgetError*>(&e)) return std::string(what) + "_node_budget";
    if (dynamic_cast<const specfun::EvaluationError*>(&e)) return std::string(what) + "_not_converged";
    if (dynamic_cast<const specfun::ContourError*>(&e)) return std::string(what) + "_no_contour";
    return std::string(what) + "_failed";
}

}  // namespace

AserCurve run_sweep(const linkstats::SnrModel& model, const SweepSpec& spec) {
    spec.validate();
    const auto grid = spec.grid();
    const std::size_t ns = spec.schemes.size();
    AserCurve rows(grid.size() * ns);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t s = 0; s < ns; ++s) {
            rows[g * ns + s].snr_db = grid[g];
            rows[g * ns + s].scheme = aser::scheme_id(spec.schemes[s]);
        }
    }

    const bool want_an = spec.outputs.count(Output::analytical) != 0;
    const bool want_as = spec.outputs.count(Output::asymptotic) != 0;
    if (want_an || want_as) {
        parallel_for(rows.size(), spec.threads, [&](std::size_t i) {
            auto& row = rows[i];
            const auto m = model.with_snr_db(row.snr_db);
            const auto& scheme = spec.schemes[i % ns];
            if (want_an) {
                try {
                    row.analytical = aser::aser(m, scheme);
                } catch (const std::exception& e) {
                    spdlog::warn("analytical ASER failed at {} dB for {}: {}", row.snr_db, row.scheme, e.what());
                    row.flags.push_back(failure_flag("analytical", e));
                }
            }
            if (want_as) {
                try {
                    row.asymptotic = aser::aser_asymptotic(m, scheme);
                    // below the high-SNR regime a negative correction term can dominate
                    if (!(*row.asymptotic > 0.0)) row.flags.push_back("asymptotic_nonpositive");
                } catch (const linkstats::PoleWarning&) {
                    row.asymptotic = aser::aser_asymptotic(m, scheme, true);
                    row.flags.push_back("asymptotic_perturbed");
                } catch (const std::exception& e) {
                    row.flags.push_back(failure_flag("asymptotic", e));
                }
            }
            spdlog::debug("{} dB {}: done", row.snr_db, row.scheme);
        });
    }

    if (spec.outputs.count(Output::mc)) {
        // One task per SNR point so that the schemes share channel draws.
        parallel_for(grid.size(), spec.threads, [&](std::size_t g) {
            const auto m = model.with_snr_db(grid[g]);
            try {
                const auto res = mcsim::run_mc(m, spec.schemes, *spec.sim);
                for (std::size_t s = 0; s < ns; ++s) {
                    auto& row = rows[g * ns + s];
                    row.mc = res[s].aser;
                    row.mc_stderr = res[s].std_error;
                    row.mc_trials = res[s].trials;
                    row.flags.insert(row.flags.end(), res[s].flags.begin(), res[s].flags.end());
                }
            } catch (const std::exception& e) {
                spdlog::warn("Monte Carlo failed at {} dB: {}", grid[g], e.what());
                for (std::size_t s = 0; s < ns; ++s) rows[g * ns + s].flags.push_back("mc_failed");
            }
            spdlog::info("Monte Carlo at {} dB done", grid[g]);
        });
    }

    std::stable_sort(rows.begin(), rows.end(), [](const AserRow& a, const AserRow& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        return a.scheme < b.scheme;
    });
    return rows;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::optional<double> opt_number(const std::string& t, int line) {
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + t + "'");
    return v;
}

}  // namespace

void write_csv(const AserCurve& curve, std::ostream& out) {
    out << kCsvHeader << "\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
    for (const auto& r : curve) {
        out << fmt17(r.snr_db) << "," << r.scheme << "," << opt(r.analytical) << "," << opt(r.asymptotic) << ","
            << opt(r.mc) << "," << opt(r.mc_stderr) << "," << (r.mc_trials ? std::to_string(*r.mc_trials) : "") << ","
            << boost::algorithm::join(r.flags, ";") << "\n";
    }
}

AserCurve read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("csv: unexpected header");
    AserCurve curve;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        boost::algorithm::split(f, line, boost::is_any_of(","));
        if (f.size() != 8) throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 8 fields");
        AserRow r;
        r.snr_db = *opt_number(f[0], lineno);
        r.scheme = f[1];
        r.analytical = opt_number(f[2], lineno);
        r.asymptotic = opt_number(f[3], lineno);
        r.mc = opt_number(f[4], lineno);
        r.mc_stderr = opt_number(f[5], lineno);
        if (!f[6].empty()) r.mc_trials = std::stoll(f[6]);
        if (!f[7].empty()) boost::algorithm::split(r.flags, f[7], boost::is_any_of(";"));
        curve.push_back(std::move(r));
    }
    return curve;
}

std::string plot_script(const std::string& csv_name) {
    std::ostringstream os;
    os << R"py(#!/usr/bin/env python3
# ASER versus average SNR on a logarithmic axis.
import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = os.path.join(here, ")py" << csv_name << R"py(")
curves = {}
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        curves.setdefault(row["scheme"], []).append(row)

fig, ax = plt.subplots(figsize=(7, 5))
for i, (scheme, rows) in enumerate(sorted(curves.items())):
    color = "C%d" % i
    def series(key):
        pts = [(float(r["snr_db"]), float(r[key])) for r in rows if r[key] and float(r[key]) > 0]
        return [p[0] for p in pts], [p[1] for p in pts]
    x, y = series("aser_analytical")
    if x:
        ax.semilogy(x, y, "-", color=color, label=scheme + " analytical")
    x, y = series("aser_asymptotic")
    if x:
        ax.semilogy(x, y, "--", color=color, label=scheme + " asymptotic")
    x, y = series("aser_mc")
    if x:
        ax.semilogy(x, y, "o", color=color, fillstyle="none", label=scheme + " Monte Carlo")

ax.set_xlabel("average SNR (dB)")
ax.set_ylabel("ASER")
ax.set_ylim(bottom=1e-9, top=1.5)
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=8)
out = os.path.splitext(path)[0] + ".png"
fig.savefig(out, dpi=150, bbox_inches="tight")
print(out)
)py";
    return os.str();
}

std::filesystem::path emit(const AserCurve& curve, const SweepSpec& spec) {
    const auto& csv_path = spec.out_path;
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write " + csv_path.string());
        write_csv(curve, out);
        if (!out) throw std::runtime_error("write failed: " + csv_path.string());
    }
    auto script = csv_path;
    script.replace_extension();
    script += "_plot.py";
    std::ofstream out(script);
    if (!out) throw std::runtime_error("cannot write " + script.string());
    out << plot_script(csv_path.filename().string());
    if (!out) throw std::runtime_error("write failed: " + script.string());
    return script;
}

bool has_flags(const AserCurve& curve) {
    return std::any_of(curve.begin(), curve.end(), [](const AserRow& r) { return !r.flags.empty(); });
}

std::string flag_summary(const AserCurve& curve) {
    std::ostringstream os;
    for (const auto& r : curve) {
        if (r.flags.empty()) continue;
        os << "snr_db=" << fmt17(r.snr_db) << " scheme=" << r.scheme
           << " flags=" << boost::algorithm::join(r.flags, ";") << "\n";
    }
    return os.str();
}

std::vector<RelayPoint> relay_position_sweep(const linkstats::SnrModel& model, const aser::ModulationScheme& scheme,
                                             double total_m, const std::vector<double>& d_sr) {
    std::vector<RelayPoint> out;
    for (double d : d_sr) {
        if (!(d > 0.0 && d < total_m)) throw std::invalid_argument("relay position must lie strictly inside the link");
        auto thz = model.thz();
        auto rf = model.rf();
        thz.link.distance_m = d;
        rf.link.distance_m = total_m - d;
        out.push_back({d, aser::aser(model.with_thz(thz).with_rf(rf), scheme)});
    }
    return out;
}

}  // namespace thzrf::cli
