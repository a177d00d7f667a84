#pragma once

#include "thzrf/aser.hpp"
#include "thzrf/linkstats.hpp"
#include "thzrf/mcsim.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace thzrf::cli {

// Parse and validation failures, prefixed with "<origin>:<line>: " when a line
// is known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& origin, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

enum class Output { analytical, asymptotic, mc };
std::string output_name(Output o);

struct SweepSpec {
    double start_db = 10.0;
    double stop_db = 70.0;
    double step_db = 10.0;
    std::vector<aser::ModulationScheme> schemes;
    std::set<Output> outputs{Output::analytical};
    std::optional<mcsim::SimConfig> sim;
    std::filesystem::path out_path = "aser.csv";
    int threads = 0;  // concurrent grid points; 0 uses the hardware thread count

    std::vector<double> grid() const;
    void validate() const;
};

struct RunConfig {
    linkstats::ThzHop thz;
    linkstats::RfHop rf;
    double n0 = 1.0;
    specfun::ContourConfig contour;
    SweepSpec sweep;

    // Model at 0 dB; the sweep rescales the transmit powers.
    linkstats::SnrModel model() const;
};

struct ParseOptions {
    // Fill the fading, pointing and sweep keys that are otherwise required.
    bool use_defaults = false;
};

RunConfig parse_config(const std::filesystem::path& path, ParseOptions opts = {});
RunConfig parse_config_text(const std::string& text, const std::string& origin, ParseOptions opts = {});
// Every key in a fixed order with shortest round-trip numbers.
std::string serialize(const RunConfig& cfg);

struct AserRow {
    double snr_db = 0.0;
    std::string scheme;
    std::optional<double> analytical, asymptotic, mc, mc_stderr;
    std::optional<std::int64_t> mc_trials;
    std::vector<std::string> flags;
};
using AserCurve = std::vector<AserRow>;

inline constexpr const char* kCsvHeader =
    "snr_db,scheme,aser_analytical,aser_asymptotic,aser_mc,mc_stderr,mc_trials,flags";

// Grid points are evaluated concurrently; rows come back sorted by (snr, scheme).
// Conditional-mode Monte Carlo shares its channel draws between the schemes of
// one SNR point.  Failures at a point become flags on its rows.
AserCurve run_sweep(const linkstats::SnrModel& model, const SweepSpec& spec);

void write_csv(const AserCurve& curve, std::ostream& out);
AserCurve read_csv(std::istream& in);
std::string plot_script(const std::string& csv_name);
// Writes the CSV to spec.out_path and a plotting script beside it; returns the script path.
std::filesystem::path emit(const AserCurve& curve, const SweepSpec& spec);

bool has_flags(const AserCurve& curve);
// One "snr_db=<x> scheme=<id> flags=<a;b>" line per flagged row.
std::string flag_summary(const AserCurve& curve);

// ASER as the relay moves along a fixed source-destination distance.
struct RelayPoint {
    double d_sr = 0.0;
    double aser = 0.0;
};
std::vector<RelayPoint> relay_position_sweep(const linkstats::SnrModel& model, const aser::ModulationScheme& scheme,
                                             double total_m, const std::vector<double>& d_sr);

}  // namespace thzrf::cli
