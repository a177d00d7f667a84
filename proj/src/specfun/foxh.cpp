#include "mellin_barnes.hpp"
#include "thzrf/specfun.hpp"

#include <cmath>
#include <string>

namespace thzrf::specfun {

void ContourConfig::validate() const {
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw DomainError("contour: tolerance must lie in (0, 1)");
    if (!(truncation > 0.0 && truncation < 1.0)) throw DomainError("contour: truncation must lie in (0, 1)");
    if (nodes_per_axis < 64) throw DomainError("contour: nodes_per_axis must be at least 64");
    if (!(cancellation_budget >= 1.0)) throw DomainError("contour: cancellation_budget must be >= 1");
    if (node_budget <= 0) throw DomainError("contour: node_budget must be positive");
    if (max_halvings < 1) throw DomainError("contour: max_halvings must be at least 1");
    for (double o : offsets)
        if (!std::isfinite(o)) throw DomainError("contour: offsets must be finite");
}

MeijerGSpec MeijerGSpec::make(std::vector<double> a_top, std::vector<double> a_bot,
                              std::vector<double> b_top, std::vector<double> b_bot) {
    MeijerGSpec s;
    s.n = static_cast<int>(a_top.size());
    s.m = static_cast<int>(b_top.size());
    s.p = s.n + static_cast<int>(a_bot.size());
    s.q = s.m + static_cast<int>(b_bot.size());
    s.a_top = std::move(a_top);
    s.a_bot = std::move(a_bot);
    s.b_top = std::move(b_top);
    s.b_bot = std::move(b_bot);
    s.validate();
    return s;
}

void MeijerGSpec::validate() const {
    if (static_cast<int>(a_top.size()) != n || static_cast<int>(b_top.size()) != m ||
        static_cast<int>(a_top.size() + a_bot.size()) != p ||
        static_cast<int>(b_top.size() + b_bot.size()) != q)
        throw DomainError("meijer_g: parameter counts do not match m, n, p, q");
    if (m + n == 0) throw DomainError("meijer_g: m + n must be positive");
    auto finite = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    if (!finite(a_top) || !finite(a_bot) || !finite(b_top) || !finite(b_bot))
        throw DomainError("meijer_g: parameters must be finite");
}

void FoxHSpec::validate() const {
    const std::size_t dim = variables.size();
    if (dim == 0) throw DomainError("fox_h: at least one variable is required");
    for (std::size_t k = 0; k < dim; ++k) {
        const auto& v = variables[k];
        const std::string tag = "fox_h: variable " + std::to_string(k + 1);
        if (!(v.arg > 0.0) || !std::isfinite(v.arg)) throw DomainError(tag + " argument must be positive");
        if (v.m < 0 || v.m > static_cast<int>(v.bottom.size())) throw DomainError(tag + " has m out of range");
        if (v.n < 0 || v.n > static_cast<int>(v.top.size())) throw DomainError(tag + " has n out of range");
        for (const auto& pp : v.top)
            if (!(pp.weight > 0.0) || !std::isfinite(pp.coef)) throw DomainError(tag + " has a bad top pair");
        for (const auto& pp : v.bottom)
            if (!(pp.weight > 0.0) || !std::isfinite(pp.coef)) throw DomainError(tag + " has a bad bottom pair");
    }
    if (n_outer < 0 || n_outer > static_cast<int>(outer_top.size()))
        throw DomainError("fox_h: n_outer out of range");
    auto check = [&](const CoupledParam& c) {
        if (c.weights.size() != dim) throw DomainError("fox_h: coupled parameter needs one weight per variable");
        if (!std::isfinite(c.coef)) throw DomainError("fox_h: coupled coefficient must be finite");
        for (double w : c.weights)
            if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("fox_h: coupled weights must be non-negative");
    };
    for (const auto& c : outer_top) check(c);
    for (const auto& c : outer_bottom) check(c);
    contour.validate();
}

namespace {

FoxHSpec from_meijer(const MeijerGSpec& g, double x, const ContourConfig& contour) {
    g.validate();
    if (!(x > 0.0)) throw DomainError("meijer_g: argument must be positive");
    FoxHVariable v;
    v.arg = x;
    v.n = g.n;
    v.m = g.m;
    for (double a : g.a_top) v.top.push_back({a, 1.0});
    for (double a : g.a_bot) v.top.push_back({a, 1.0});
    for (double b : g.b_top) v.bottom.push_back({b, 1.0});
    for (double b : g.b_bot) v.bottom.push_back({b, 1.0});
    FoxHSpec spec;
    spec.variables.push_back(std::move(v));
    spec.contour = contour;
    return spec;
}

}  // namespace

double meijer_g(const MeijerGSpec& spec, double x, const ContourConfig& contour) {
    return fox_h_evaluate(from_meijer(spec, x, contour)).value;
}

MellinBarnesResult meijer_g_split(const MeijerGSpec& spec, double x, double pole, const ContourConfig& contour) {
    return fox_h_evaluate(from_meijer(spec, x, contour), {pole});
}

MellinBarnesResult fox_h_evaluate(const FoxHSpec& spec, const std::vector<std::optional<double>>& peel) {
    const auto f = detail::lower(spec);
    return detail::evaluate(f, spec.contour, peel);
}

double fox_h_bivariate(const FoxHSpec& spec) {
    if (spec.variables.size() != 2) throw DomainError("fox_h_bivariate: expected two variables");
    return fox_h_evaluate(spec).value;
}

double fox_h_trivariate(const FoxHSpec& spec) {
    if (spec.variables.size() != 3) throw DomainError("fox_h_trivariate: expected three variables");
    return fox_h_evaluate(spec).value;
}

std::vector<double> fox_h_auto_offsets(const FoxHSpec& spec) {
    const auto f = detail::lower(spec);
    return detail::place(f, spec.contour);
}

}  // namespace thzrf::specfun
