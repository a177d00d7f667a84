#pragma once

#include "thzrf/linkstats.hpp"

#include <cmath>

namespace testing {

struct LinkParams {
    double alpha, mu, omega, phi, s0, m, omega_m;
};

// Centre of the fading and pointing ranges used throughout the tests.
inline constexpr LinkParams kMidpoint{2.3, 2.25, 1.75, 6.75, 0.56, 2.3, 1.5075};
inline constexpr double kAbsorption = 4e-4;  // 1/m, fixed so no test depends on the humidity model

inline thzrf::linkstats::SnrModel make_model(const LinkParams& p, double snr_db, double d_sr = 300.0,
                                             double d_rd = 800.0) {
    using namespace thzrf;
    linkstats::ThzHop thz;
    thz.link.distance_m = d_sr;
    thz.link.absorption_override = kAbsorption;
    thz.fading = {p.alpha, p.mu, p.omega};
    thz.pointing = {p.phi, p.s0};
    linkstats::RfHop rf;
    rf.link.distance_m = d_rd;
    rf.fading = {p.m, p.omega_m};
    return linkstats::SnrModel(thz, rf, {}).with_snr_db(snr_db);
}

// alpha = 2, mu = 1, phi = 2, m = 1 with the powers picked so that A = C = 1.
inline thzrf::linkstats::SnrModel unit_model() {
    using namespace thzrf;
    linkstats::ThzHop thz;
    thz.link.absorption_override = 0.0;
    thz.fading = {2.0, 1.0, 1.0};
    thz.pointing = {2.0, 1.0};
    linkstats::RfHop rf;
    rf.fading = {1.0, 1.0};
    const double h1 = channel::friis_gain(thz.link), h2 = channel::friis_gain(rf.link);
    return linkstats::SnrModel(thz, rf, {1.0 / (h1 * h1), 1.0 / (h2 * h2), 1.0});
}

inline double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

}  // namespace testing
