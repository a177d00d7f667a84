#pragma once

// Internal representation of a Mellin-Barnes integrand
//   (2 pi i)^-N  \int  prod_forms F_i(L_i(s))  prod_k z_k^{s_k}  ds
// where every L_i is an affine function of the contour variables and F_i is
// Gamma, 1/Gamma or a simple pole 1/L.

#include "thzrf/specfun.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace thzrf::specfun::detail {

enum class FormKind { gamma, inv_gamma, pole };
enum class Window { canonical, crossed };

struct LinearForm {
    FormKind kind = FormKind::gamma;
    double offset = 0.0;
    std::vector<double> weights;
    Window window = Window::canonical;

    int support() const;
    double at(const std::vector<double>& c) const;
};

struct Integrand {
    std::vector<double> log_args;
    std::vector<LinearForm> forms;
    double log_scale = 0.0;
    double sign = 1.0;

    int dim() const { return static_cast<int>(log_args.size()); }
};

struct Outcome {
    double value = 0.0;
    double abs_error = 0.0;
    std::int64_t nodes = 0;
};

Integrand lower(const FoxHSpec& spec);
// Replace Gamma(L)/Gamma(L+1) pairs by 1/L and fold constant forms into the prefactor.
void canonicalize(Integrand& f);

double log_center(const Integrand& f, const std::vector<double>& c);
std::vector<double> place(const Integrand& f, const ContourConfig& cfg);
void check_offsets(const Integrand& f, const std::vector<double>& c);

Outcome integrate(const Integrand& f, const ContourConfig& cfg, bool user_offsets);

MellinBarnesResult evaluate(const Integrand& f, const ContourConfig& cfg,
                            const std::vector<std::optional<double>>& peel);

}  // namespace thzrf::specfun::detail
