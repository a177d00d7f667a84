#include "oracles/frozen.hpp"
#include "support.hpp"

#include "thzrf/linkstats.hpp"
#include "thzrf/mcsim.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace thzrf;
using testing::make_model;
using testing::rel_err;

namespace {

constexpr testing::LinkParams kDiversityCase{2.0, 1.5, 1.0, 4.0, 0.7, 2.0, 1.0};

std::vector<double> lambda_grid(const linkstats::SnrModel& m, int n) {
    // log-spaced around the scale of the weaker hop
    const double centre = std::min(1.0 / m.A(), 1.0 / m.C());
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(centre * std::pow(10.0, -3.0 + 4.0 * i / (n - 1)));
    return out;
}

}  // namespace

TEST_CASE("derived model constants") {
    const auto m = make_model(testing::kMidpoint, 30.0);
    const double h1 = m.path_gain_thz(), ha = m.absorption_gain_thz(), h2 = m.path_gain_rf();
    CHECK(h1 == doctest::Approx(frozen::kFriisThzTable).epsilon(1e-14));
    CHECK(ha == doctest::Approx(std::exp(-0.5 * testing::kAbsorption * 300.0)).epsilon(1e-14));
    const double p = 1000.0;
    CHECK(m.A() == doctest::Approx(1.0 / (p * h1 * h1 * ha * ha * 1.75 * 1.75 * 0.56 * 0.56)).epsilon(1e-13));
    CHECK(m.C() == doctest::Approx(2.3 / (p * h2 * h2 * 1.5075)).epsilon(1e-13));
    CHECK(m.B() == doctest::Approx((6.75 / 2.3) / (std::tgamma(2.25) * std::tgamma(2.3))).epsilon(1e-13));

    // changing the power rebuilds every constant
    const auto louder = m.with_snr_db(40.0);
    CHECK(louder.A() == doctest::Approx(m.A() / 10.0).epsilon(1e-13));
    CHECK(louder.C() == doctest::Approx(m.C() / 10.0).epsilon(1e-13));
}

TEST_CASE("per-hop CDFs") {
    const auto m = make_model(testing::kMidpoint, 30.0);
    CHECK(linkstats::snr_cdf_thz(m, 0.0) == 0.0);
    CHECK(linkstats::snr_cdf_rf(m, 0.0) == 0.0);
    double last = 0.0;
    for (double l : lambda_grid(m, 100)) {
        const double f = linkstats::snr_cdf_thz(m, l);
        CHECK(f >= last);
        last = f;
        const double env = linkstats::thz_envelope_for_snr(m, l);
        CHECK(f == doctest::Approx(channel::composite_thz_cdf(m.thz().fading, m.thz().pointing, env)).epsilon(1e-10));
        const double env_rf = linkstats::rf_envelope_for_snr(m, l);
        CHECK(linkstats::snr_cdf_rf(m, l) ==
              doctest::Approx(channel::nakagami_cdf(m.rf().fading, env_rf)).epsilon(1e-12));
    }

    auto rayleigh = testing::kMidpoint;
    rayleigh.m = 1.0;
    const auto r = make_model(rayleigh, 30.0);
    CHECK(linkstats::snr_cdf_rf(r, 1.0 / r.C()) == doctest::Approx(0.6321206).epsilon(1e-7));
}

TEST_CASE("end-to-end CDF: closed form, product rule and reference") {
    const auto m = make_model(testing::kMidpoint, 30.0);
    CHECK(linkstats::snr_cdf_e2e(m, 0.0) == 0.0);
    CHECK(rel_err(linkstats::snr_cdf_e2e(m, 0.05), frozen::kCdfMid30_0p05) < 1e-9);
    CHECK(rel_err(linkstats::snr_cdf_e2e(m, 0.5), frozen::kCdfMid30_0p5) < 1e-9);
    CHECK(rel_err(linkstats::snr_cdf_e2e(m, 2.0), frozen::kCdfMid30_2) < 1e-9);
    CHECK(rel_err(linkstats::snr_ccdf_e2e(m, 5.0), frozen::kCcdfMid30_5) < 1e-8);
    CHECK(linkstats::snr_cdf_e2e(m, 1e3) > 1.0 - 1e-6);

    for (double l : lambda_grid(m, 50)) {
        CAPTURE(l);
        const double closed = linkstats::snr_cdf_e2e(m, l);
        CHECK(rel_err(closed, linkstats::snr_cdf_combination(m, l)) < 1e-9);
        CHECK(rel_err(closed, linkstats::snr_cdf_e2e_reference(m, l)) < 1e-9);
    }
}

TEST_CASE("end-to-end CDF matches the empirical CDF of min(l1, l2)") {
    const auto m = make_model(testing::kMidpoint, 30.0);
    const int n = 1'000'000;
    std::vector<double> draws(n);
    auto rng = mcsim::partition_rng(2024, 0);
    for (auto& d : draws) {
        const auto h = mcsim::draw_hop_snr(m, rng);
        d = std::min(h.thz, h.rf);
    }
    std::sort(draws.begin(), draws.end());
    // Dvoretzky-Kiefer-Wolfowitz band at 99 %
    const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
    double worst = 0.0;
    for (double l : lambda_grid(m, 60)) {
        const double ecdf = static_cast<double>(std::upper_bound(draws.begin(), draws.end(), l) - draws.begin()) / n;
        worst = std::max(worst, std::fabs(ecdf - linkstats::snr_cdf_e2e(m, l)));
    }
    CAPTURE(band);
    CHECK(worst < band);
}

TEST_CASE("MGF") {
    const auto m = make_model(testing::kMidpoint, 30.0);
    CHECK(rel_err(linkstats::mgf_e2e(m, 0.1), frozen::kMgfMid30_0p1) < 1e-8);
    CHECK(rel_err(linkstats::mgf_e2e(m, 1.0), frozen::kMgfMid30_1) < 1e-8);
    CHECK(rel_err(linkstats::mgf_e2e(m, 10.0), frozen::kMgfMid30_10) < 1e-6);
    CHECK(linkstats::mgf_e2e(m, 1e-6) >= 1.0 - 1e-3);
    CHECK(linkstats::mgf_e2e(m, 1e6) < 1e-3);
    CHECK_THROWS(linkstats::mgf_e2e(m, 0.0));

    // s int e^{-s l} F(l) dl
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double s : {0.1, 1.0, 10.0}) {
        const double laplace =
            s * ts.integrate([&](double l) { return std::exp(-s * l) * linkstats::snr_cdf_e2e_reference(m, l); }, 0.0,
                             std::numeric_limits<double>::infinity(), 1e-13);
        CAPTURE(s);
        CHECK(rel_err(linkstats::mgf_e2e(m, s), laplace) < 1e-5);
    }

    // completely monotone: alternating signs of the first three differences
    std::vector<double> v;
    for (int i = 0; i < 8; ++i) v.push_back(linkstats::mgf_e2e(m, 0.25 * std::pow(2.0, i)));
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        CHECK(v[i] > 0.0);
        CHECK(v[i] <= 1.0);
        CHECK(v[i + 1] < v[i]);
    }
    std::vector<double> s, mg;
    for (int i = 0; i < 6; ++i) {
        s.push_back(0.5 + 0.25 * i);
        mg.push_back(linkstats::mgf_e2e(m, s.back()));
    }
    for (int i = 0; i + 3 < 6; ++i) {
        const double d1 = mg[i + 1] - mg[i];
        const double d2 = mg[i + 2] - 2 * mg[i + 1] + mg[i];
        const double d3 = mg[i + 3] - 3 * mg[i + 2] + 3 * mg[i + 1] - mg[i];
        CHECK(d1 < 0.0);
        CHECK(d2 > 0.0);
        CHECK(d3 < 0.0);
    }
}

TEST_CASE("asymptotic CDF") {
    const auto hi = make_model(kDiversityCase, 60.0);
    const double l = 1.0;
    const auto terms = linkstats::snr_cdf_asymptotic_terms(hi, l);
    // With phi > alpha mu the pointing term carries Gamma(mu - phi/alpha) < 0;
    // only the leading term and the sum are positive.
    CHECK(terms.thz_multipath > 0.0);
    CHECK(terms.thz_pointing < 0.0);
    CHECK(terms.rf > 0.0);
    CHECK(terms.total() > 0.0);
    CHECK(linkstats::snr_cdf_asymptotic(hi, l) / linkstats::snr_cdf_e2e(hi, l) == doctest::Approx(1.0).epsilon(0.05));

    // the relative error shrinks as the transmit SNR grows
    double last = std::numeric_limits<double>::infinity();
    for (double db = 20.0; db <= 70.0; db += 10.0) {
        const auto m = make_model(kDiversityCase, db);
        const double err = rel_err(linkstats::snr_cdf_asymptotic(m, l), linkstats::snr_cdf_e2e(m, l));
        CAPTURE(db);
        CHECK(err < last);
        last = err;
    }

    // slope of the leading term over the transmit SNR
    const double f_lo = linkstats::snr_cdf_asymptotic(make_model(kDiversityCase, 70.0), l);
    const double f_hi = linkstats::snr_cdf_asymptotic(make_model(kDiversityCase, 100.0), l);
    const double slope = -std::log10(f_hi / f_lo) / 3.0;
    CHECK(slope == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("asymptotic split at phi = alpha mu") {
    auto p = kDiversityCase;
    p.phi = p.alpha * p.mu;  // 3
    const auto m = make_model(p, 40.0);
    CHECK(m.asymptotic_pole());
    CHECK_THROWS_AS(linkstats::snr_cdf_asymptotic(m, 1.0), linkstats::PoleWarning);
    const double v = linkstats::snr_cdf_asymptotic(m, 1.0, true);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    // the exact CDF has no such singularity
    CHECK(std::isfinite(linkstats::snr_cdf_e2e(m, 1.0)));

    auto q = kDiversityCase;
    q.phi = 5.0;  // phi / alpha - mu = 1
    CHECK(make_model(q, 40.0).asymptotic_pole());
}

TEST_CASE("diversity order") {
    CHECK(linkstats::diversity_order(make_model(kDiversityCase, 30.0)) == doctest::Approx(1.5));
    CHECK(linkstats::diversity_order(make_model({1.6, 1.0, 1.0, 1.5, 0.5, 3.0, 1.0}, 30.0)) == doctest::Approx(0.75));
    CHECK(linkstats::diversity_order(make_model({3.0, 3.0, 1.0, 12.0, 0.5, 2.0, 1.0}, 30.0)) == doctest::Approx(2.0));
}
