#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thzrf::specfun {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when an iterative evaluation stops before reaching its tolerance.
// Carries the best value obtained so far and a bound on its error.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double partial, double bound)
        : std::runtime_error(what), partial_(partial), bound_(bound) {}
    double partial_value() const { return partial_; }
    double error_bound() const { return bound_; }

private:
    double partial_;
    double bound_;
};

// No vertical line separates the left and right pole families.
class ContourError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The quadrature grid would exceed the configured node budget.
class BudgetError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

// ---------------------------------------------------------------- gamma family

std::complex<double> log_gamma(std::complex<double> z);

// Γ(a, x) for a > 0, x >= 0.
double gamma_upper(double a, double x);
// γ(a, x) for a > 0, x >= 0.
double gamma_lower(double a, double x);
// Γ(a, x) for any real a and x > 0 (x >= 0 when a > 0).  Non-positive a goes
// through the downward recurrence Γ(a,x) = (Γ(a+1,x) - x^a e^-x)/a or, for
// large x, a continued fraction.
double gamma_upper_any(double a, double x);
// x^-a Γ(a, x) for x > 0.  Stays finite for negative a and tiny x, where
// Γ(a, x) alone overflows.
double gamma_upper_scaled(double a, double x);

double q_function(double x);

// ------------------------------------------------------------ hypergeometric

struct SeriesOptions {
    int max_terms = 200000;
    double tolerance = 1e-16;
};

double hyp1f1(double a, double b, double z, const SeriesOptions& opt = {});
// e^{-x} 1F1(1; 3/2; x) = sqrt(pi) erf(sqrt x) / (2 sqrt x); finite for all x >= 0.
double hyp1f1_1_32_scaled(double x);
double hyp2f1_11_32(double z);
// Gauss series for 0 <= z < 1.
double hyp2f1(double a, double b, double c, double z, const SeriesOptions& opt = {});

// ------------------------------------------------------- Mellin-Barnes specs

enum class Refinement { fixed, halving };

struct ContourConfig {
    std::vector<double> offsets;    // real parts of the Bromwich lines; empty selects automatically
    double half_length = 0.0;       // truncation of [-T, T]; <= 0 probes automatically
    int nodes_per_axis = 64;        // fixed mode node count; lower bound on resolution otherwise
    Refinement refinement = Refinement::halving;
    double tolerance = 1e-8;        // relative change accepted between successive halvings
    double truncation = 1e-16;      // envelope level at which lines are cut
    double cancellation_budget = 1e4;  // allowed |integrand| growth traded for pole clearance
    std::int64_t node_budget = 400'000'000;
    int max_halvings = 8;

    void validate() const;
};

// Meijer G^{m,n}_{p,q}.  a_top holds a_1..a_n, a_bot a_{n+1}..a_p, b_top
// b_1..b_m, b_bot b_{m+1}..b_q.
struct MeijerGSpec {
    std::vector<double> a_top, a_bot, b_top, b_bot;
    int m = 0, n = 0, p = 0, q = 0;

    static MeijerGSpec make(std::vector<double> a_top, std::vector<double> a_bot,
                            std::vector<double> b_top, std::vector<double> b_bot);
    void validate() const;
};

struct ParamPair {
    double coef;
    double weight;
};

struct CoupledParam {
    double coef;
    std::vector<double> weights;  // one per variable
};

// One variable of a multivariate Fox H function: argument plus the
// (c_j, gamma_j) and (d_j, delta_j) lists with their m, n split points.
struct FoxHVariable {
    double arg = 1.0;
    int m = 0;
    int n = 0;
    std::vector<ParamPair> top;     // (c_j, gamma_j), j = 1..p_k
    std::vector<ParamPair> bottom;  // (d_j, delta_j), j = 1..q_k
};

struct FoxHSpec {
    std::vector<FoxHVariable> variables;
    int n_outer = 0;                        // leading entries of outer_top in the numerator
    std::vector<CoupledParam> outer_top;    // (a_j; alpha_j^(1..N))
    std::vector<CoupledParam> outer_bottom; // (b_j; beta_j^(1..N))
    ContourConfig contour;

    void validate() const;
};

struct MellinBarnesResult {
    double value = 0.0;
    double residue = 0.0;    // contribution of the peeled poles (all of them at once)
    double tail = 0.0;       // value - residue, evaluated without subtracting when possible
    double abs_error = 0.0;
    std::int64_t nodes = 0;
    bool crossed_route = false;
};

double meijer_g(const MeijerGSpec& spec, double x, const ContourConfig& contour = {});
MellinBarnesResult meijer_g_split(const MeijerGSpec& spec, double x, double pole,
                                  const ContourConfig& contour = {});

// General evaluation.  peel[k], when set, names a pole location of variable
// k belonging to a single-variable numerator factor; the result then also
// reports the residue taken at all peeled poles together and the remainder.
MellinBarnesResult fox_h_evaluate(const FoxHSpec& spec,
                                  const std::vector<std::optional<double>>& peel = {});
double fox_h_bivariate(const FoxHSpec& spec);
double fox_h_trivariate(const FoxHSpec& spec);

// Real offsets the automatic placement would pick for the unsplit integral.
std::vector<double> fox_h_auto_offsets(const FoxHSpec& spec);

}  // namespace thzrf::specfun
