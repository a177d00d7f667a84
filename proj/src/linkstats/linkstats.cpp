#include "thzrf/linkstats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

namespace thzrf::linkstats {

using specfun::FoxHSpec;
using specfun::FoxHVariable;

SnrModel::SnrModel(ThzHop thz, RfHop rf, channel::PowerNoise power, const channel::AbsorptionModel* absorption)
    : thz_(std::move(thz)), rf_(std::move(rf)), power_(power), absorption_(absorption) {
    derive();
}

void SnrModel::derive() {
    thz_.link.validate();
    thz_.fading.validate();
    thz_.pointing.validate();
    rf_.link.validate();
    rf_.fading.validate();
    power_.validate();
    contour_.validate();

    h_d1_ = channel::friis_gain(thz_.link);
    h_a1_ = channel::absorption_gain(thz_.link, absorption_);
    h_d2_ = channel::friis_gain(rf_.link);

    const auto& f = thz_.fading;
    const auto& p = thz_.pointing;
    A_ = power_.n0 / (power_.p_s * h_d1_ * h_d1_ * h_a1_ * h_a1_ * f.omega * f.omega * p.s0 * p.s0);
    C_ = rf_.fading.m * power_.n0 / (power_.p_r * h_d2_ * h_d2_ * rf_.fading.omega_m);
    B_ = k() / (std::tgamma(f.mu) * std::tgamma(rf_.fading.m));
}

SnrModel SnrModel::with_power(channel::PowerNoise power) const {
    SnrModel out = *this;
    out.power_ = power;
    out.derive();
    return out;
}

SnrModel SnrModel::with_snr_db(double snr_db) const {
    channel::PowerNoise p = power_;
    p.p_s = p.p_r = std::pow(10.0, snr_db / 10.0) * p.n0;
    return with_power(p);
}

SnrModel SnrModel::with_thz(ThzHop thz) const {
    SnrModel out = *this;
    out.thz_ = std::move(thz);
    out.derive();
    return out;
}

SnrModel SnrModel::with_rf(RfHop rf) const {
    SnrModel out = *this;
    out.rf_ = std::move(rf);
    out.derive();
    return out;
}

SnrModel SnrModel::with_contour(specfun::ContourConfig c) const {
    SnrModel out = *this;
    out.contour_ = std::move(c);
    out.derive();
    return out;
}

double SnrModel::R() const {
    const double am = alpha() * mu();
    return phi() * std::pow(mu(), mu()) * std::pow(A_, am / 2.0) / ((phi() - am) * std::tgamma(mu() + 1.0));
}

double SnrModel::T_const() const {
    return std::pow(mu(), k()) * std::tgamma(mu() - k()) * std::pow(A_, phi() / 2.0) / std::tgamma(mu());
}

bool SnrModel::asymptotic_pole() const {
    const double d = k() - mu();
    const double n = std::round(d);
    return n >= 0.0 && std::fabs(d - n) <= 1e-12 * std::max(1.0, k());
}

SnrModel SnrModel::perturbed_phi(double rel) const {
    ThzHop t = thz_;
    t.pointing.phi *= (1.0 + rel);
    return with_thz(t);
}

double thz_envelope_for_snr(const SnrModel& model, double lambda) {
    const double g = model.path_gain_thz() * model.absorption_gain_thz();
    return std::sqrt(lambda * model.power().n0 / (model.power().p_s * g * g));
}

double rf_envelope_for_snr(const SnrModel& model, double lambda) {
    const double g = model.path_gain_rf();
    return std::sqrt(lambda * model.power().n0 / (model.power().p_r * g * g));
}

namespace {

void check_lambda(double lambda, const char* who) {
    if (!(lambda >= 0.0)) throw specfun::DomainError(std::string(who) + ": lambda must be >= 0");
}

double rf_cdf(const SnrModel& model, double lambda) {
    return lambda == 0.0 ? 0.0 : boost::math::gamma_p(model.m(), model.C() * lambda);
}

}  // namespace

double snr_cdf_thz(const SnrModel& model, double lambda) {
    check_lambda(lambda, "snr_cdf_thz");
    return channel::composite_thz_cdf(model.thz().fading, model.thz().pointing, thz_envelope_for_snr(model, lambda),
                                      model.contour());
}

double snr_cdf_rf(const SnrModel& model, double lambda) {
    check_lambda(lambda, "snr_cdf_rf");
    return rf_cdf(model, lambda);
}

double snr_cdf_e2e(const SnrModel& model, double lambda) {
    check_lambda(lambda, "snr_cdf_e2e");
    if (lambda == 0.0) return 0.0;
    // 1 - B G Gamma(m, C l) with G = Gamma(mu)/k + remainder.
    const auto g = specfun::meijer_g_split(
        specfun::MeijerGSpec::make({}, {1.0, model.k() + 1.0}, {model.mu(), 0.0, model.k()}, {}),
        model.mu() * std::pow(model.A() * lambda, model.alpha() / 2.0), 0.0, model.contour());
    const double f1 = -model.k() / std::tgamma(model.mu()) * g.tail;
    const double f2 = rf_cdf(model, lambda);
    return f1 + f2 - f1 * f2;
}

double snr_ccdf_e2e(const SnrModel& model, double lambda) {
    check_lambda(lambda, "snr_ccdf_e2e");
    if (lambda == 0.0) return 1.0;
    const double g = specfun::meijer_g(
        specfun::MeijerGSpec::make({}, {1.0, model.k() + 1.0}, {model.mu(), 0.0, model.k()}, {}),
        model.mu() * std::pow(model.A() * lambda, model.alpha() / 2.0), model.contour());
    return model.B() * g * boost::math::tgamma(model.m(), model.C() * lambda);
}

double snr_cdf_combination(const SnrModel& model, double lambda) {
    const double f1 = snr_cdf_thz(model, lambda);
    const double f2 = snr_cdf_rf(model, lambda);
    return f1 + f2 - f1 * f2;
}

double snr_cdf_e2e_reference(const SnrModel& model, double lambda) {
    check_lambda(lambda, "snr_cdf_e2e_reference");
    if (lambda == 0.0) return 0.0;
    const double f1 = channel::composite_thz_cdf_gamma(model.thz().fading, model.thz().pointing,
                                                       thz_envelope_for_snr(model, lambda));
    const double f2 = rf_cdf(model, lambda);
    return f1 + f2 - f1 * f2;
}

namespace {

FoxHVariable thz_variable(const SnrModel& model, double arg) {
    FoxHVariable v;
    v.arg = arg;
    v.n = 0;
    v.top = {{1.0, 1.0}, {model.k() + 1.0, 1.0}};
    v.m = 3;
    v.bottom = {{model.mu(), 1.0}, {0.0, 1.0}, {model.k(), 1.0}};
    return v;
}

FoxHVariable rf_variable(const SnrModel& model, double arg) {
    FoxHVariable v;
    v.arg = arg;
    v.n = 0;
    v.top = {{1.0, 1.0}};
    v.m = 2;
    v.bottom = {{model.m(), 1.0}, {0.0, 1.0}};
    return v;
}

// e^{-x} 1F1(1; 3/2; x) = G^{1,1}_{1,2}[x | 1/2; 0, -1/2] / 2
FoxHVariable confluent_variable(double arg) {
    FoxHVariable v;
    v.arg = arg;
    v.n = 1;
    v.top = {{0.5, 1.0}};
    v.m = 1;
    v.bottom = {{0.0, 1.0}, {-0.5, 1.0}};
    return v;
}

}  // namespace

FoxHSpec i2_spec(const SnrModel& model, double x1, double x2) {
    if (!(x2 > 0.0)) throw specfun::DomainError("I2: decay rate must be positive");
    if (!(x1 > -1.0)) throw specfun::DomainError("I2: exponent must exceed -1");
    FoxHSpec h;
    h.variables = {thz_variable(model, model.mu() * std::pow(model.A() / x2, model.alpha() / 2.0)),
                   rf_variable(model, model.C() / x2)};
    h.n_outer = 1;
    h.outer_top = {{-x1, {model.alpha() / 2.0, 1.0}}};
    h.contour = model.contour();
    return h;
}

FoxHSpec i4_spec(const SnrModel& model, double x1, double x2) {
    if (!(x2 > 0.0 && x1 > x2)) throw specfun::DomainError("I4: need 0 < x2 < x1");
    const double d = x1 - x2;
    FoxHSpec h;
    h.variables = {confluent_variable(x2 / d),
                   thz_variable(model, model.mu() * std::pow(model.A() / d, model.alpha() / 2.0)),
                   rf_variable(model, model.C() / d)};
    h.n_outer = 1;
    h.outer_top = {{0.0, {1.0, model.alpha() / 2.0, 1.0}}};
    h.contour = model.contour();
    return h;
}

double integral_i1(double x1, double x2) {
    if (!(x2 > 0.0) || !(x1 > -1.0)) throw specfun::DomainError("I1: need x1 > -1 and x2 > 0");
    return std::exp(std::lgamma(x1 + 1.0) - (x1 + 1.0) * std::log(x2));
}

double integral_i3(double x0, double x1, double x2) {
    if (!(x0 > -1.0) || !(x1 > x2) || !(x2 >= 0.0))
        throw specfun::DomainError("I3: need x0 > -1 and 0 <= x2 < x1");
    return integral_i1(x0, x1) * specfun::hyp2f1(1.0, x0 + 1.0, 1.5, x2 / x1);
}

SplitIntegral integral_i2(const SnrModel& model, double x1, double x2) {
    const auto r = specfun::fox_h_evaluate(i2_spec(model, x1, x2), {0.0, 0.0});
    const double pre = std::pow(x2, -(x1 + 1.0));
    return {pre * r.value, pre * r.residue, pre * r.tail, pre * r.abs_error};
}

SplitIntegral integral_i4(const SnrModel& model, double x1, double x2) {
    if (x2 == 0.0) return integral_i2(model, 0.0, x1);
    const auto r = specfun::fox_h_evaluate(i4_spec(model, x1, x2), {std::nullopt, 0.0, 0.0});
    const double pre = 1.0 / (2.0 * (x1 - x2));
    return {pre * r.value, pre * r.residue, pre * r.tail, pre * r.abs_error};
}

double mgf_e2e(const SnrModel& model, double s) {
    if (!(s > 0.0)) throw specfun::DomainError("mgf_e2e: s must be positive");
    // 1 - B s I2(0, s), and B s times the residue part is exactly 1.
    return -model.B() * s * integral_i2(model, 0.0, s).tail;
}

AsymptoticTerms snr_cdf_asymptotic_terms(const SnrModel& model, double lambda, bool perturb) {
    check_lambda(lambda, "snr_cdf_asymptotic");
    if (model.asymptotic_pole()) {
        if (!perturb)
            throw PoleWarning("asymptotic CDF is singular: phi/alpha - mu is a non-negative integer");
        return snr_cdf_asymptotic_terms(model.perturbed_phi(1e-6), lambda, false);
    }
    AsymptoticTerms t;
    t.thz_multipath = model.R() * std::pow(lambda, model.alpha() * model.mu() / 2.0);
    t.thz_pointing = model.T_const() * std::pow(lambda, model.phi() / 2.0);
    t.rf = std::pow(model.C() * lambda, model.m()) / std::tgamma(model.m() + 1.0);
    return t;
}

double snr_cdf_asymptotic(const SnrModel& model, double lambda, bool perturb) {
    return snr_cdf_asymptotic_terms(model, lambda, perturb).total();
}

double diversity_order(const SnrModel& model) {
    return std::min({model.alpha() * model.mu() / 2.0, model.phi() / 2.0, model.m()});
}

}  // namespace thzrf::linkstats
