#pragma once

#include "thzrf/linkstats.hpp"

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace thzrf::aser {

// A closed-form result fell outside [0, 1] or an oracle missed its tolerance.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RqamScheme {
    int m_i = 2;
    int m_q = 2;
    double beta = 1.0;
    // derived
    double p = 0.0, q = 0.0, a = 0.0, b = 0.0;
    double D = 0.0, F = 0.0, G = 0.0;

    static RqamScheme make(int m_i, int m_q, double beta = 1.0);
    static RqamScheme square(int m);
    static RqamScheme bpsk();
};

struct HqamScheme {
    int m = 4;
    double b_param = 0.0;
    double bc_param = 0.0;
    double alpha_h = 0.0;

    // Parameters of the bundled constellation of size m (4, 8, 16, 32 or 64).
    static HqamScheme table(int m);
};

struct NcfskScheme {
    int m = 2;
    static NcfskScheme make(int m);
};

using ModulationScheme = std::variant<RqamScheme, HqamScheme, NcfskScheme>;

// "rqam:4x2:1", "sqam:16", "bpsk", "hqam:8", "ncfsk:4"
ModulationScheme parse_scheme(const std::string& text);
std::string scheme_id(const ModulationScheme& scheme);
int constellation_size(const ModulationScheme& scheme);

// Nearest-neighbour pair count, unit-triangle count and minimum distance of a
// unit-energy hexagonal point set, and the scheme parameters they imply.
struct HexGeometryStats {
    int pairs = 0;
    int triangles = 0;
    double min_distance = 0.0;
    double b_param = 0.0, bc_param = 0.0, alpha_h = 0.0;
};
HexGeometryStats hex_geometry_stats(const std::vector<std::complex<double>>& points);

// Conditional symbol error probability at SNR lambda and its lambda-derivative.
double conditional_ser(const ModulationScheme& scheme, double lambda);
double conditional_ser_derivative(const ModulationScheme& scheme, double lambda);

// The derivative of every coherent conditional SER used here is a combination
//   sum_i c_i l^{-1/2} e^{-x_i l} + sum_j d_j e^{-u_j l} 1F1(1; 3/2; v_j l).
struct PowerExpTerm {
    double coef, rate;
};
struct ConfluentTerm {
    double coef, rate, arg;
};
struct DerivativeForm {
    double value_at_zero = 0.0;
    std::vector<PowerExpTerm> power_exp;
    std::vector<ConfluentTerm> confluent;
};
DerivativeForm derivative_form(const RqamScheme& s);
DerivativeForm derivative_form(const HqamScheme& s);

struct AserBreakdown {
    double value = 0.0;
    double abs_error = 0.0;
    // P(0) + B * (sum of the pole contributions); identically zero in exact arithmetic.
    double constant_residual = 0.0;
};

AserBreakdown aser_coherent(const linkstats::SnrModel& model, const DerivativeForm& form);

double aser_rqam(const linkstats::SnrModel& model, const RqamScheme& s);
double aser_sqam(const linkstats::SnrModel& model, int m);
double aser_hqam(const linkstats::SnrModel& model, const HqamScheme& s);
double aser_ncfsk(const linkstats::SnrModel& model, const NcfskScheme& s);
double aser(const linkstats::SnrModel& model, const ModulationScheme& scheme);

// (x2/2)^{-(x1+1)/2} Gamma((x1+1)/2)
double psi_inf(double x1, double x2);

double aser_rqam_asymptotic(const linkstats::SnrModel& model, const RqamScheme& s, bool perturb = false);
// High-SNR expansion for any coherent scheme, from the same derivative form.
double aser_asymptotic(const linkstats::SnrModel& model, const ModulationScheme& scheme, bool perturb = false);

struct OracleResult {
    double value = 0.0;
    double error = 0.0;
};

// -int_0^inf P'(e|l) F(l) dl by tanh-sinh quadrature, with P' from
// Q-function derivatives and F from incomplete gamma functions.
OracleResult oracle_aser(const linkstats::SnrModel& model, const ModulationScheme& scheme,
                         double tolerance = 1e-12);

}  // namespace thzrf::aser
