#include "thzrf/channel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace thzrf::channel {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double friis(double carrier_hz, double distance_m, double tx_db, double rx_db, double exponent) {
    const double gains = std::sqrt(db_to_linear(tx_db) * db_to_linear(rx_db));
    return kSpeedOfLight * gains / (4.0 * std::numbers::pi * carrier_hz) *
           std::pow(distance_m, -exponent / 2.0);
}

}  // namespace

void ThzHopConfig::validate() const {
    require(carrier_hz > 0.0, "thz.carrier_hz must be > 0");
    require(distance_m > 0.0, "thz.distance_m must be > 0");
    require(path_loss_exp >= 2.0, "thz.path_loss_exp must be >= 2");
    require(std::isfinite(tx_gain_db) && std::isfinite(rx_gain_db), "thz gains must be finite");
    require(temperature_k > 0.0, "thz.temperature_k must be > 0");
    require(pressure_hpa > 0.0, "thz.pressure_hpa must be > 0");
    require(rel_humidity_pct >= 0.0 && rel_humidity_pct <= 100.0, "thz.rel_humidity_pct must lie in [0, 100]");
    if (absorption_override) require(*absorption_override >= 0.0, "thz.absorption_override must be >= 0");
}

void RfHopConfig::validate() const {
    require(carrier_hz > 0.0, "rf.carrier_hz must be > 0");
    require(distance_m > 0.0, "rf.distance_m must be > 0");
    require(path_loss_exp > 0.0, "rf.path_loss_exp must be > 0");
    require(std::isfinite(tx_gain_db) && std::isfinite(rx_gain_db), "rf gains must be finite");
}

void AlphaMuFading::validate() const {
    require(alpha > 0.0, "alpha must be > 0");
    require(mu >= 0.5, "mu must be >= 1/2");
    require(omega > 0.0, "omega must be > 0");
}

void PointingError::validate() const {
    require(phi > 0.0, "phi must be > 0");
    require(s0 > 0.0 && s0 <= 1.0, "s0 must lie in (0, 1]");
}

void NakagamiFading::validate() const {
    require(m >= 0.5, "m must be >= 1/2");
    require(omega_m > 0.0, "omega_m must be > 0");
}

void PowerNoise::validate() const {
    require(p_s > 0.0, "p_s must be > 0");
    require(p_r > 0.0, "p_r must be > 0");
    require(n0 > 0.0, "n0 must be > 0");
}

bool WaterVaporLineModel::covers(double carrier_hz) const {
    return carrier_hz >= 275e9 && carrier_hz <= 400e9;
}

double WaterVaporLineModel::saturation_pressure_hpa(double temperature_k, double pressure_hpa) {
    const double celsius = temperature_k - 273.15;
    return 6.1121 * (1.0007 + 3.46e-6 * pressure_hpa) * std::exp(17.502 * celsius / (temperature_k - 32.18));
}

double WaterVaporLineModel::mixing_ratio(const ThzHopConfig& cfg) {
    return cfg.rel_humidity_pct / 100.0 * saturation_pressure_hpa(cfg.temperature_k, cfg.pressure_hpa) /
           cfg.pressure_hpa;
}

double WaterVaporLineModel::coefficient(const ThzHopConfig& cfg) const {
    if (!covers(cfg.carrier_hz))
        throw ModelUnavailable(name() + " does not cover " + std::to_string(cfg.carrier_hz) + " Hz");
    const double v = mixing_ratio(cfg);
    // wavenumber in 1/cm
    const double nu = cfg.carrier_hz / (100.0 * kSpeedOfLight);
    const double f = cfg.carrier_hz;

    const double a = 0.2205 * v * (0.1303 * v + 0.0294);
    const double b = std::pow(0.4093 * v + 0.0925, 2);
    const double c = 2.014 * v * (0.1702 * v + 0.0303);
    const double d = std::pow(0.537 * v + 0.0956, 2);
    const double line1 = a / (b + std::pow(nu - 10.835, 2));
    const double line2 = c / (d + std::pow(nu - 12.664, 2));
    const double background = 5.54e-37 * f * f * f - 3.94e-25 * f * f + 9.06e-14 * f - 6.36e-3;
    return line1 + line2 + background;
}

const AbsorptionModel& default_absorption_model() {
    static const WaterVaporLineModel model;
    return model;
}

double friis_gain(const ThzHopConfig& cfg) {
    cfg.validate();
    return friis(cfg.carrier_hz, cfg.distance_m, cfg.tx_gain_db, cfg.rx_gain_db, cfg.path_loss_exp);
}

double friis_gain(const RfHopConfig& cfg) {
    cfg.validate();
    return friis(cfg.carrier_hz, cfg.distance_m, cfg.tx_gain_db, cfg.rx_gain_db, cfg.path_loss_exp);
}

double absorption_coefficient(const ThzHopConfig& cfg, const AbsorptionModel* model) {
    cfg.validate();
    if (cfg.absorption_override) return *cfg.absorption_override;
    if (model == nullptr) throw ModelUnavailable("no absorption model configured and no override given");
    if (!model->covers(cfg.carrier_hz))
        throw ModelUnavailable(model->name() + " does not cover " + std::to_string(cfg.carrier_hz) + " Hz");
    return std::max(0.0, model->coefficient(cfg));
}

double absorption_gain(const ThzHopConfig& cfg, const AbsorptionModel* model) {
    return std::exp(-0.5 * absorption_coefficient(cfg, model) * cfg.distance_m);
}

double alpha_mu_cdf(const AlphaMuFading& f, double x) {
    f.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("alpha_mu_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    return boost::math::gamma_p(f.mu, f.mu * std::pow(x / f.omega, f.alpha));
}

double alpha_mu_pdf(const AlphaMuFading& f, double x) {
    f.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("alpha_mu_pdf: x must be >= 0");
    if (x == 0.0)
        return (f.alpha * f.mu == 1.0) ? f.alpha * std::pow(f.mu, f.mu) / (f.omega * std::tgamma(f.mu)) : 0.0;
    const double u = f.mu * std::pow(x / f.omega, f.alpha);
    return f.alpha / x * std::exp(f.mu * std::log(u) - u - std::lgamma(f.mu));
}

double pointing_cdf(const PointingError& p, double x) {
    p.validate();
    if (x <= 0.0) return 0.0;
    if (x >= p.s0) return 1.0;
    return std::pow(x / p.s0, p.phi);
}

double pointing_pdf(const PointingError& p, double x) {
    p.validate();
    if (x < 0.0 || x > p.s0) return 0.0;
    return p.phi / p.s0 * std::pow(x / p.s0, p.phi - 1.0);
}

namespace {

double composite_argument(const AlphaMuFading& f, const PointingError& p, double x) {
    return f.mu * std::pow(x / (f.omega * p.s0), f.alpha);
}

specfun::MeijerGSpec composite_kernel(double mu, double k) {
    return specfun::MeijerGSpec::make({}, {1.0, k + 1.0}, {mu, 0.0, k}, {});
}

}  // namespace

double composite_thz_cdf(const AlphaMuFading& f, const PointingError& p, double x,
                         const specfun::ContourConfig& contour) {
    f.validate();
    p.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("composite_thz_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double k = p.phi / f.alpha;
    const auto g = specfun::meijer_g_split(composite_kernel(f.mu, k), composite_argument(f, p, x), 0.0, contour);
    return -k / std::tgamma(f.mu) * g.tail;
}

double composite_thz_ccdf(const AlphaMuFading& f, const PointingError& p, double x,
                          const specfun::ContourConfig& contour) {
    f.validate();
    p.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("composite_thz_ccdf: x must be >= 0");
    if (x == 0.0) return 1.0;
    const double k = p.phi / f.alpha;
    return k / std::tgamma(f.mu) *
           specfun::meijer_g(composite_kernel(f.mu, k), composite_argument(f, p, x), contour);
}

double composite_thz_cdf_gamma(const AlphaMuFading& f, const PointingError& p, double x) {
    f.validate();
    p.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("composite_thz_cdf_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double k = p.phi / f.alpha;
    const double z = composite_argument(f, p, x);
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;
    const double lower = boost::math::gamma_p(f.mu, z);
    // z^k Γ(mu - k, z) = z^mu S(mu - k, z). For a positive order S itself can
    // overflow at tiny z, so that case stays in logs throughout.
    const double a = f.mu - k;
    const double log_z = std::log(z);
    double log_s;
    if (a > 0.0) {
        const double g = specfun::gamma_upper_any(a, z);
        if (g == 0.0) return lower;
        log_s = std::log(g) - a * log_z;
    } else {
        const double s = specfun::gamma_upper_scaled(a, z);
        if (s == 0.0) return lower;
        log_s = std::log(s);
    }
    return lower + std::exp(f.mu * log_z - std::lgamma(f.mu) + log_s);
}

double composite_thz_pdf(const AlphaMuFading& f, const PointingError& p, double x) {
    f.validate();
    p.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("composite_thz_pdf: x must be >= 0");
    const double k = p.phi / f.alpha;
    const double a = f.mu - k;
    const double scale = f.omega * p.s0;
    const double log_norm = std::log(p.phi) + k * std::log(f.mu) - p.phi * std::log(scale) - std::lgamma(f.mu);
    if (x == 0.0) {
        // near the origin the density behaves like x^(phi-1) Gamma(a) for a > 0
        // and like x^(alpha mu - 1) / (-a) otherwise
        const double power = a > 0.0 ? p.phi - 1.0 : f.alpha * f.mu - 1.0;
        if (power > 0.0) return 0.0;
        if (power < 0.0) return std::numeric_limits<double>::infinity();
        if (a > 0.0) return std::exp(log_norm) * std::tgamma(a);
        return std::exp(log_norm + a * std::log(f.mu) - a * f.alpha * std::log(scale)) / (-a);
    }
    const double log_z = std::log(f.mu) + f.alpha * (std::log(x) - std::log(scale));
    const double z = std::exp(log_z);
    const double log_pref = log_norm + (p.phi - 1.0) * std::log(x);
    if (z == 0.0) {
        if (a > 0.0) return std::exp(log_pref) * std::tgamma(a);
        return std::exp(log_pref + a * log_z) / (-a);
    }
    if (a > 0.0) {
        const double g = specfun::gamma_upper_any(a, z);
        return g == 0.0 ? 0.0 : std::exp(log_pref + std::log(g));
    }
    const double s = specfun::gamma_upper_scaled(a, z);
    if (s == 0.0) return 0.0;
    return std::exp(log_pref + a * log_z + std::log(s));
}

double nakagami_cdf(const NakagamiFading& f, double x) {
    f.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("nakagami_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    return boost::math::gamma_p(f.m, f.m * x * x / f.omega_m);
}

double nakagami_pdf(const NakagamiFading& f, double x) {
    f.validate();
    if (!(x >= 0.0)) throw specfun::DomainError("nakagami_pdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double u = f.m * x * x / f.omega_m;
    return 2.0 / x * std::exp(f.m * std::log(u) - u - std::lgamma(f.m));
}

}  // namespace thzrf::channel
