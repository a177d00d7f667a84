#include "thzrf/specfun.hpp"

#include <cmath>
#include <numbers>

namespace thzrf::specfun {

namespace {

bool non_positive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

}  // namespace

double hyp1f1(double a, double b, double z, const SeriesOptions& opt) {
    if (non_positive_integer(b)) throw DomainError("hyp1f1: b is a non-positive integer");
    // Kummer's transformation keeps every term positive for negative z.
    if (z < 0.0 && a > 0.0 && b - a >= 0.0) return std::exp(z) * hyp1f1(b - a, b, -z, opt);

    double sum = 1.0;
    double comp = 0.0;
    double term = 1.0;
    for (int n = 0; n < opt.max_terms; ++n) {
        term *= (a + n) / (b + n) * z / (n + 1);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term == 0.0) return sum;
        if (n > std::fabs(z) && std::fabs(term) <= opt.tolerance * std::fabs(sum)) return sum;
    }
    throw EvaluationError("hyp1f1: series did not converge within the iteration cap", sum,
                          std::fabs(term) * opt.max_terms);
}

double hyp1f1_1_32_scaled(double x) {
    if (x < 0.0) throw DomainError("hyp1f1_1_32_scaled: x must be non-negative");
    if (x < 1e-8) return 1.0 - 2.0 * x / 3.0;
    const double r = std::sqrt(x);
    return std::sqrt(std::numbers::pi) * std::erf(r) / (2.0 * r);
}

double hyp2f1(double a, double b, double c, double z, const SeriesOptions& opt) {
    if (!(z >= 0.0 && z < 1.0)) throw DomainError("hyp2f1: z must lie in [0, 1)");
    if (non_positive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
    double sum = 1.0;
    double comp = 0.0;
    double term = 1.0;
    for (int n = 0; n < opt.max_terms; ++n) {
        const double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        term *= ratio;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term == 0.0) return sum;
        if (std::fabs(ratio) < 1.0 && std::fabs(term) <= opt.tolerance * std::fabs(sum)) {
            return sum;
        }
    }
    throw EvaluationError("hyp2f1: series did not converge within the iteration cap", sum,
                          std::fabs(term) / (1.0 - z));
}

double hyp2f1_11_32(double z) {
    if (!(z >= 0.0 && z < 1.0)) throw DomainError("hyp2f1_11_32: z must lie in [0, 1)");
    return hyp2f1(1.0, 1.0, 1.5, z);
}

}  // namespace thzrf::specfun
