#pragma once

#include "thzrf/aser.hpp"
#include "thzrf/channel.hpp"
#include "thzrf/linkstats.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace thzrf::mcsim {

enum class Mode {
    conditional,   // average of P(e | min(l1, l2)) over channel draws
    symbol_level,  // two-hop modulation, AWGN and detection; a relay error is an end-to-end error
};

struct SimConfig {
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    int partitions = 1;
    Mode mode = Mode::conditional;
    int threads = 0;  // 0: one per hardware thread, capped by the partition count

    void validate() const;
};

std::string mode_name(Mode m);
Mode parse_mode(const std::string& text);

// Each partition draws from its own Mersenne Twister seeded through
// std::seed_seq{seed_lo, seed_hi, partition}, so a run is reproducible for any
// thread count.
using Rng = std::mt19937_64;
Rng partition_rng(std::uint64_t seed, int partition);

double sample_alpha_mu(const channel::AlphaMuFading& f, Rng& rng);
double sample_pointing(const channel::PointingError& p, Rng& rng);
double sample_nakagami(const channel::NakagamiFading& f, Rng& rng);

struct Constellation {
    std::vector<std::complex<double>> points;
    int label_count = 0;
    // NCFSK: label i is a unit tone on dimension i; points holds the tone amplitudes.
    bool orthogonal = false;

    double mean_energy() const;
    double min_distance() const;
};

// THZRF_DATA_DIR overrides the data directory compiled into the library.
std::filesystem::path data_dir();
std::vector<std::complex<double>> load_points(const std::filesystem::path& path);
Constellation build_constellation(const aser::ModulationScheme& scheme);

struct McResult {
    double aser = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
    std::vector<std::string> flags;
};

// Instantaneous hop SNRs for one channel draw.
struct HopSnr {
    double thz = 0.0;
    double rf = 0.0;
};
HopSnr draw_hop_snr(const linkstats::SnrModel& model, Rng& rng);

McResult run_mc(const linkstats::SnrModel& model, const aser::ModulationScheme& scheme, const SimConfig& cfg);

// Several schemes at one operating point.  In conditional mode every scheme is
// averaged over the same channel draws.
std::vector<McResult> run_mc(const linkstats::SnrModel& model, const std::vector<aser::ModulationScheme>& schemes,
                             const SimConfig& cfg);

}  // namespace thzrf::mcsim
