#include "thzrf/mcsim.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cmath>
#include <stdexcept>

namespace thzrf::mcsim {

void SimConfig::validate() const {
    if (trials < 10'000) throw std::invalid_argument("mc trials must be >= 10000");
    if (partitions < 1) throw std::invalid_argument("mc partitions must be >= 1");
    if (trials % partitions != 0) throw std::invalid_argument("mc trials must be divisible by partitions");
    if (threads < 0) throw std::invalid_argument("mc threads must be >= 0");
}

std::string mode_name(Mode m) { return m == Mode::conditional ? "conditional" : "symbol_level"; }

Mode parse_mode(const std::string& text) {
    if (text == "conditional") return Mode::conditional;
    if (text == "symbol_level") return Mode::symbol_level;
    throw std::invalid_argument("unknown mc mode '" + text + "' (expected conditional or symbol_level)");
}

Rng partition_rng(std::uint64_t seed, int partition) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(partition)};
    return Rng(seq);
}

double sample_alpha_mu(const channel::AlphaMuFading& f, Rng& rng) {
    boost::random::gamma_distribution<double> g(f.mu, 1.0);
    return f.omega * std::pow(g(rng) / f.mu, 1.0 / f.alpha);
}

double sample_pointing(const channel::PointingError& p, Rng& rng) {
    boost::random::uniform_01<double> u;
    return p.s0 * std::pow(u(rng), 1.0 / p.phi);
}

double sample_nakagami(const channel::NakagamiFading& f, Rng& rng) {
    boost::random::gamma_distribution<double> g(f.m, 1.0);
    return std::sqrt(f.omega_m * g(rng) / f.m);
}

HopSnr draw_hop_snr(const linkstats::SnrModel& model, Rng& rng) {
    const auto& pw = model.power();
    const double g1 = model.path_gain_thz() * model.absorption_gain_thz();
    const double h1 = sample_alpha_mu(model.thz().fading, rng) * sample_pointing(model.thz().pointing, rng);
    const double h2 = sample_nakagami(model.rf().fading, rng);
    const double g2 = model.path_gain_rf();
    return {pw.p_s * g1 * g1 * h1 * h1 / pw.n0, pw.p_r * g2 * g2 * h2 * h2 / pw.n0};
}

}  // namespace thzrf::mcsim
