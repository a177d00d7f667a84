#include "thzrf/specfun.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace thzrf::specfun {

namespace {

using cplx = std::complex<double>;

// Stirling series, valid for |z| >= 16 away from the negative axis.
cplx stirling(cplx z) {
    static constexpr double coef[] = {
        1.0 / 12.0,         -1.0 / 360.0,   1.0 / 1260.0,      -1.0 / 1680.0,
        1.0 / 1188.0,       -691.0 / 360360.0, 1.0 / 156.0,   -3617.0 / 122400.0,
    };
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx corr = 0.0;
    cplx pw = inv;
    for (double c : coef) {
        corr += c * pw;
        pw *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + corr;
}

// log sin(pi z) for Im z >= 0, written so that large imaginary parts do not overflow.
cplx log_sin_pi(cplx z) {
    const cplx i(0.0, 1.0);
    const cplx w = std::exp(2.0 * std::numbers::pi * i * z);
    return -i * std::numbers::pi * z + std::log(1.0 - w) + std::log(0.5 * i);
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
    if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
    if (z.real() < 0.5) {
        return std::log(std::numbers::pi) - log_sin_pi(z) - log_gamma(1.0 - z);
    }
    cplx prod = 1.0;
    bool shifted = false;
    while (std::norm(z) < 256.0) {
        prod *= z;
        z += 1.0;
        shifted = true;
    }
    cplx out = stirling(z);
    if (shifted) out -= std::log(prod);
    return out;
}

double gamma_upper(double a, double x) {
    if (!(a > 0.0)) throw DomainError("gamma_upper: a must be positive");
    if (!(x >= 0.0)) throw DomainError("gamma_upper: x must be non-negative");
    return boost::math::tgamma(a, x);
}

double gamma_lower(double a, double x) {
    if (!(a > 0.0)) throw DomainError("gamma_lower: a must be positive");
    if (!(x >= 0.0)) throw DomainError("gamma_lower: x must be non-negative");
    return boost::math::tgamma_lower(a, x);
}

namespace {

// Continued fraction for Γ(a, x), usable for any real a once x is not small.
double upper_gamma_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 4.0 * std::numeric_limits<double>::epsilon()) return std::exp(-x + a * std::log(x)) * h;
    }
    throw EvaluationError("gamma_upper_any: continued fraction did not converge",
                          std::exp(-x + a * std::log(x)) * h, std::fabs(h));
}

}  // namespace

double gamma_upper_any(double a, double x) {
    if (a > 0.0) return gamma_upper(a, x);
    if (!(x > 0.0)) throw DomainError("gamma_upper_any: x must be positive when a <= 0");
    if (x > 1.0) return upper_gamma_cf(a, x);

    const double nearest = std::round(a);
    const bool integer = std::fabs(a - nearest) < 1e-14;
    double b;
    double value;
    if (integer) {
        b = 0.0;
        value = boost::math::expint(1, x);
        if (nearest == 0.0) return value;
    } else {
        b = a + std::ceil(-a);
        if (b == 0.0) b = 1.0;  // guard, a is not an integer here
        if (b <= 0.0) b += 1.0;
        value = boost::math::tgamma(b, x);
    }
    const double ex = std::exp(-x);
    const double lx = std::log(x);
    while (b - a > 0.5) {
        b -= 1.0;
        value = (value - std::exp(b * lx) * ex) / b;
    }
    return value;
}

double gamma_upper_scaled(double a, double x) {
    if (!(x > 0.0)) throw DomainError("gamma_upper_scaled: x must be positive");
    if (a > 0.0 || x > 1.0) {
        const double g = gamma_upper_any(a, x);
        return g == 0.0 ? 0.0 : std::exp(std::log(g) - a * std::log(x));
    }
    // Same downward recurrence on S(b) = x^-b Γ(b, x):
    // S(b - 1) = (x S(b) - e^-x) / (b - 1)
    const double nearest = std::round(a);
    const double ex = std::exp(-x);
    double b;
    double value;
    if (std::fabs(a - nearest) < 1e-14) {
        b = 0.0;
        value = boost::math::expint(1, x);
        if (nearest == 0.0) return value;
    } else {
        b = a + std::ceil(-a);
        if (b <= 0.0) b += 1.0;
        value = boost::math::tgamma(b, x) * std::exp(-b * std::log(x));
    }
    while (b - a > 0.5) {
        b -= 1.0;
        value = (x * value - ex) / b;
    }
    return value;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace thzrf::specfun
