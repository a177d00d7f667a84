#include "thzrf/aser.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace thzrf::aser {

using linkstats::SnrModel;

namespace {

double q(double x) { return specfun::q_function(x); }

// d/dl Q(sqrt(c l))
double dq(double c, double l) {
    return -std::sqrt(c / l) * std::exp(-c * l / 2.0) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
}

double ncfsk_weight(int m, int eta) {
    const double sign = (eta % 2 == 1) ? 1.0 : -1.0;
    return sign * boost::math::binomial_coefficient<double>(static_cast<unsigned>(m - 1), static_cast<unsigned>(eta)) /
           (eta + 1.0);
}

struct SerVisitor {
    double l;
    double operator()(const RqamScheme& s) const {
        const double qa = q(std::sqrt(s.a * s.a * l));
        const double qb = q(std::sqrt(s.b * s.b * l));
        return 2.0 * s.p * qa + 2.0 * s.q * qb - 4.0 * s.p * s.q * qa * qb;
    }
    double operator()(const HqamScheme& s) const {
        const double ah = s.alpha_h;
        const double q2 = q(std::sqrt(2.0 * ah * l / 3.0));
        return s.b_param * q(std::sqrt(ah * l)) + 2.0 / 3.0 * s.bc_param * q2 * q2 -
               2.0 * s.bc_param * q(std::sqrt(ah * l)) * q(std::sqrt(ah * l / 3.0));
    }
    double operator()(const NcfskScheme& s) const {
        double sum = 0.0;
        for (int eta = 1; eta < s.m; ++eta) sum += ncfsk_weight(s.m, eta) * std::exp(-eta * l / (eta + 1.0));
        return sum;
    }
};

struct DerivativeVisitor {
    double l;
    double operator()(const RqamScheme& s) const {
        const double a2 = s.a * s.a, b2 = s.b * s.b;
        const double qa = q(std::sqrt(a2 * l)), qb = q(std::sqrt(b2 * l));
        const double dqa = dq(a2, l);
        const double dqb = (b2 > 0.0) ? dq(b2, l) : 0.0;
        return 2.0 * s.p * dqa + 2.0 * s.q * dqb - 4.0 * s.p * s.q * (dqa * qb + qa * dqb);
    }
    double operator()(const HqamScheme& s) const {
        const double ah = s.alpha_h;
        const double q2 = q(std::sqrt(2.0 * ah * l / 3.0));
        return s.b_param * dq(ah, l) + 4.0 / 3.0 * s.bc_param * q2 * dq(2.0 * ah / 3.0, l) -
               2.0 * s.bc_param *
                   (dq(ah, l) * q(std::sqrt(ah * l / 3.0)) + q(std::sqrt(ah * l)) * dq(ah / 3.0, l));
    }
    double operator()(const NcfskScheme& s) const {
        double sum = 0.0;
        for (int eta = 1; eta < s.m; ++eta) {
            const double r = eta / (eta + 1.0);
            sum -= ncfsk_weight(s.m, eta) * r * std::exp(-r * l);
        }
        return sum;
    }
};

void check_range(double v, const char* who) {
    if (!(v >= 0.0 && v <= 1.0))
        throw AccuracyError(std::string(who) + ": result " + std::to_string(v) + " lies outside [0, 1]");
}

}  // namespace

double conditional_ser(const ModulationScheme& scheme, double lambda) {
    if (!(lambda >= 0.0)) throw specfun::DomainError("conditional_ser: lambda must be >= 0");
    return std::visit(SerVisitor{lambda}, scheme);
}

double conditional_ser_derivative(const ModulationScheme& scheme, double lambda) {
    if (!(lambda > 0.0)) throw specfun::DomainError("conditional_ser_derivative: lambda must be > 0");
    return std::visit(DerivativeVisitor{lambda}, scheme);
}

DerivativeForm derivative_form(const RqamScheme& s) {
    DerivativeForm f;
    f.value_at_zero = s.p + s.q - s.p * s.q;
    const double a2 = s.a * s.a, b2 = s.b * s.b;
    if (s.D != 0.0) f.power_exp.push_back({s.D, a2 / 2.0});
    if (s.F != 0.0) f.power_exp.push_back({s.F, b2 / 2.0});
    if (s.G != 0.0) {
        const double c = -s.G / std::sqrt(std::numbers::pi);
        f.confluent.push_back({c, (a2 + b2) / 2.0, a2 / 2.0});
        f.confluent.push_back({c, (a2 + b2) / 2.0, b2 / 2.0});
    }
    return f;
}

DerivativeForm derivative_form(const HqamScheme& s) {
    const double pi = std::numbers::pi;
    const double ah = s.alpha_h, B = s.b_param, Bc = s.bc_param;
    DerivativeForm f;
    f.value_at_zero = B / 2.0 - Bc / 3.0;
    f.power_exp = {
        {std::sqrt(ah / (2.0 * pi)) * (Bc - B) / 2.0, ah / 2.0},
        {-std::sqrt(ah / (3.0 * pi)) * Bc / 3.0, ah / 3.0},
        {std::sqrt(ah / (6.0 * pi)) * Bc / 2.0, ah / 6.0},
    };
    f.confluent = {
        {2.0 * Bc * ah / (9.0 * pi), 2.0 * ah / 3.0, ah / 3.0},
        {-Bc * ah / (2.0 * std::sqrt(3.0) * pi), 2.0 * ah / 3.0, ah / 2.0},
        {-Bc * ah / (2.0 * std::sqrt(3.0) * pi), 2.0 * ah / 3.0, ah / 6.0},
    };
    return f;
}

AserBreakdown aser_coherent(const SnrModel& model, const DerivativeForm& form) {
    AserBreakdown out;
    double tails = 0.0, poles = 0.0, err = 0.0;
    for (const auto& t : form.power_exp) {
        const auto i = linkstats::integral_i2(model, -0.5, t.rate);
        tails += t.coef * i.tail;
        poles += t.coef * i.residue;
        err += std::fabs(t.coef) * i.abs_error;
    }
    for (const auto& t : form.confluent) {
        const auto i = linkstats::integral_i4(model, t.rate, t.arg);
        tails += t.coef * i.tail;
        poles += t.coef * i.residue;
        err += std::fabs(t.coef) * i.abs_error;
    }
    out.value = model.B() * tails;
    out.abs_error = model.B() * err;
    out.constant_residual = form.value_at_zero + model.B() * poles;
    return out;
}

double aser_rqam(const SnrModel& model, const RqamScheme& s) {
    const double v = aser_coherent(model, derivative_form(s)).value;
    check_range(v, "aser_rqam");
    return v;
}

double aser_sqam(const SnrModel& model, int m) { return aser_rqam(model, RqamScheme::square(m)); }

double aser_hqam(const SnrModel& model, const HqamScheme& s) {
    const double v = aser_coherent(model, derivative_form(s)).value;
    check_range(v, "aser_hqam");
    return v;
}

double aser_ncfsk(const SnrModel& model, const NcfskScheme& s) {
    double sum = 0.0;
    for (int eta = 1; eta < s.m; ++eta) sum += ncfsk_weight(s.m, eta) * linkstats::mgf_e2e(model, eta / (eta + 1.0));
    check_range(sum, "aser_ncfsk");
    return sum;
}

double aser(const SnrModel& model, const ModulationScheme& scheme) {
    struct Visitor {
        const SnrModel& model;
        double operator()(const RqamScheme& s) const { return aser_rqam(model, s); }
        double operator()(const HqamScheme& s) const { return aser_hqam(model, s); }
        double operator()(const NcfskScheme& s) const { return aser_ncfsk(model, s); }
    };
    return std::visit(Visitor{model}, scheme);
}

double psi_inf(double x1, double x2) {
    if (!(x2 > 0.0) || !(x1 > -1.0)) throw specfun::DomainError("psi_inf: need x1 > -1 and x2 > 0");
    return std::exp(-(x1 + 1.0) / 2.0 * std::log(x2 / 2.0) + std::lgamma((x1 + 1.0) / 2.0));
}

namespace {

struct PowerLaw {
    double coef, exponent;
};

std::vector<PowerLaw> asymptotic_laws(const SnrModel& model, bool perturb) {
    const SnrModel& m = model.asymptotic_pole() && perturb ? model.perturbed_phi(1e-6) : model;
    if (m.asymptotic_pole())
        throw linkstats::PoleWarning("asymptotic ASER is singular: phi/alpha - mu is a non-negative integer");
    return {
        {m.R(), m.alpha() * m.mu() / 2.0},
        {m.T_const(), m.phi() / 2.0},
        {std::pow(m.C(), m.m()) / std::tgamma(m.m() + 1.0), m.m()},
    };
}

double asymptotic_from_form(const std::vector<PowerLaw>& laws, const DerivativeForm& form) {
    double sum = 0.0;
    for (const auto& law : laws) {
        double inner = 0.0;
        for (const auto& t : form.power_exp) inner += t.coef * psi_inf(2.0 * law.exponent, 2.0 * t.rate);
        for (const auto& t : form.confluent) inner += t.coef * linkstats::integral_i3(law.exponent, t.rate, t.arg);
        sum -= law.coef * inner;
    }
    return sum;
}

}  // namespace

double aser_rqam_asymptotic(const SnrModel& model, const RqamScheme& s, bool perturb) {
    return asymptotic_from_form(asymptotic_laws(model, perturb), derivative_form(s));
}

double aser_asymptotic(const SnrModel& model, const ModulationScheme& scheme, bool perturb) {
    const auto laws = asymptotic_laws(model, perturb);
    if (const auto* r = std::get_if<RqamScheme>(&scheme)) return asymptotic_from_form(laws, derivative_form(*r));
    if (const auto* h = std::get_if<HqamScheme>(&scheme)) return asymptotic_from_form(laws, derivative_form(*h));
    // s int e^{-s l} K l^b dl = K Gamma(b + 1) s^{-b}
    const auto& n = std::get<NcfskScheme>(scheme);
    double sum = 0.0;
    for (int eta = 1; eta < n.m; ++eta) {
        const double s = eta / (eta + 1.0);
        double mgf = 0.0;
        for (const auto& law : laws) mgf += law.coef * std::tgamma(law.exponent + 1.0) * std::pow(s, -law.exponent);
        sum += ncfsk_weight(n.m, eta) * mgf;
    }
    return sum;
}

namespace {

double slowest_decay(const ModulationScheme& scheme) {
    struct Visitor {
        double operator()(const RqamScheme& s) const {
            const double a2 = s.a * s.a / 2.0, b2 = s.b * s.b / 2.0;
            return (b2 > 0.0) ? std::min(a2, b2) : a2;
        }
        double operator()(const HqamScheme& s) const { return s.alpha_h / 6.0; }
        double operator()(const NcfskScheme&) const { return 0.5; }
    };
    return std::visit(Visitor{}, scheme);
}

}  // namespace

OracleResult oracle_aser(const SnrModel& model, const ModulationScheme& scheme, double tolerance) {
    auto integrand = [&](double l) {
        if (!(l > 0.0) || !std::isfinite(l)) return 0.0;
        return -conditional_ser_derivative(scheme, l) * linkstats::snr_cdf_e2e_reference(model, l);
    };

    // Break [0, inf) where the conditional SER and the CDF change character.
    const double decay = 1.0 / slowest_decay(scheme);
    const double thz_knee = std::pow(1.0 / model.mu(), 2.0 / model.alpha()) / model.A();
    const double rf_knee = 1.0 / model.C();
    std::vector<double> cuts = {thz_knee, rf_knee, decay};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return !(c > 0.0) || c > 60.0 * decay; }),
               cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return std::fabs(x - y) <= 1e-12 * y; }),
               cuts.end());

    boost::math::quadrature::tanh_sinh<double> ts(15);
    OracleResult out;
    double lo = 0.0;
    for (double c : cuts) {
        double err = 0.0, l1 = 0.0;
        out.value += ts.integrate(integrand, lo, c, tolerance, &err, &l1);
        out.error += err;
        lo = c;
    }
    const double start = lo;
    auto mapped = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double w = 1.0 - u;
        return integrand(start + decay * u / w) * decay / (w * w);
    };
    double err = 0.0, l1 = 0.0;
    out.value += ts.integrate(mapped, 0.0, 1.0, tolerance, &err, &l1);
    out.error += err;
    return out;
}

}  // namespace thzrf::aser
