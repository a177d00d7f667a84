#pragma once

#include "thzrf/channel.hpp"
#include "thzrf/specfun.hpp"

#include <stdexcept>
#include <string>

namespace thzrf::linkstats {

// The asymptotic split divides by (phi - alpha mu) and uses Gamma(mu - phi/alpha);
// both are singular on measure-zero parameter sets.
class PoleWarning : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ThzHop {
    channel::ThzHopConfig link;
    channel::AlphaMuFading fading;
    channel::PointingError pointing;
};

struct RfHop {
    channel::RfHopConfig link;
    channel::NakagamiFading fading;
};

// Immutable description of the dual-hop link.  The derived constants are
// computed at construction; use the with_* helpers to obtain modified copies.
class SnrModel {
public:
    SnrModel(ThzHop thz, RfHop rf, channel::PowerNoise power,
             const channel::AbsorptionModel* absorption = &channel::default_absorption_model());

    const ThzHop& thz() const { return thz_; }
    const RfHop& rf() const { return rf_; }
    const channel::PowerNoise& power() const { return power_; }

    SnrModel with_power(channel::PowerNoise power) const;
    // P_s = P_r = 10^(snr_db/10) * n0.
    SnrModel with_snr_db(double snr_db) const;
    SnrModel with_thz(ThzHop thz) const;
    SnrModel with_rf(RfHop rf) const;

    double path_gain_thz() const { return h_d1_; }
    double absorption_gain_thz() const { return h_a1_; }
    double path_gain_rf() const { return h_d2_; }

    double alpha() const { return thz_.fading.alpha; }
    double mu() const { return thz_.fading.mu; }
    double phi() const { return thz_.pointing.phi; }
    double m() const { return rf_.fading.m; }
    double k() const { return phi() / alpha(); }  // phi / alpha

    double A() const { return A_; }
    double B() const { return B_; }
    double C() const { return C_; }
    // Coefficients of lambda^{alpha mu / 2} and lambda^{phi / 2} in the small-lambda THz CDF.
    double R() const;
    double T_const() const;

    // True when phi = alpha mu or phi/alpha - mu is a non-negative integer.
    bool asymptotic_pole() const;
    // Copy with phi scaled by (1 + rel); used to step off the asymptotic pole.
    SnrModel perturbed_phi(double rel = 1e-6) const;

    const specfun::ContourConfig& contour() const { return contour_; }
    SnrModel with_contour(specfun::ContourConfig c) const;

private:
    void derive();

    ThzHop thz_;
    RfHop rf_;
    channel::PowerNoise power_;
    const channel::AbsorptionModel* absorption_;
    specfun::ContourConfig contour_;
    double h_d1_ = 0.0, h_a1_ = 0.0, h_d2_ = 0.0;
    double A_ = 0.0, B_ = 0.0, C_ = 0.0;
};

double snr_cdf_thz(const SnrModel& model, double lambda);
double snr_cdf_rf(const SnrModel& model, double lambda);
// Closed form with the G^{3,0}_{2,3} kernel evaluated by Mellin-Barnes quadrature.
double snr_cdf_e2e(const SnrModel& model, double lambda);
double snr_ccdf_e2e(const SnrModel& model, double lambda);
// F1 + F2 - F1 F2 from the per-hop CDFs.
double snr_cdf_combination(const SnrModel& model, double lambda);
// Incomplete-gamma evaluation of the end-to-end CDF.  Used by the quadrature oracles.
double snr_cdf_e2e_reference(const SnrModel& model, double lambda);

double mgf_e2e(const SnrModel& model, double s);

// Envelope value for the channel-only statistic (THz hop) corresponding to an SNR.
double thz_envelope_for_snr(const SnrModel& model, double lambda);
double rf_envelope_for_snr(const SnrModel& model, double lambda);

struct AsymptoticTerms {
    double thz_multipath = 0.0;  // R lambda^{alpha mu / 2}
    double thz_pointing = 0.0;   // T lambda^{phi / 2}
    double rf = 0.0;             // (C lambda)^m / Gamma(m + 1)
    double total() const { return thz_multipath + thz_pointing + rf; }
};

// Throws PoleWarning on the singular parameter set unless `perturb` is set,
// in which case phi is moved by 1e-6 relative.
AsymptoticTerms snr_cdf_asymptotic_terms(const SnrModel& model, double lambda, bool perturb = false);
double snr_cdf_asymptotic(const SnrModel& model, double lambda, bool perturb = false);

double diversity_order(const SnrModel& model);

// Building blocks of the ASER closed forms.
//   I1(x1, x2) = int_0^inf l^x1 e^{-x2 l} dl
//   I2(x1, x2) = int_0^inf l^x1 e^{-x2 l} G(mu (A l)^{alpha/2}) Gamma(m, C l) dl
//   I3(x0, x1, x2) = int_0^inf l^x0 e^{-x1 l} 1F1(1; 3/2; x2 l) dl
//   I4(x1, x2) = int_0^inf e^{-x1 l} 1F1(1; 3/2; x2 l) G(...) Gamma(m, C l) dl
// where G is the G^{3,0}_{2,3} kernel of the THz CDF.  Each I2/I4 result is
// split into the contribution of the poles at the origin (the "residue",
// equal to I1 or I3 divided by B) and the remainder ("tail").
struct SplitIntegral {
    double value = 0.0;
    double residue = 0.0;
    double tail = 0.0;
    double abs_error = 0.0;
};

double integral_i1(double x1, double x2);
double integral_i3(double x0, double x1, double x2);
SplitIntegral integral_i2(const SnrModel& model, double x1, double x2);
SplitIntegral integral_i4(const SnrModel& model, double x1, double x2);

specfun::FoxHSpec i2_spec(const SnrModel& model, double x1, double x2);
specfun::FoxHSpec i4_spec(const SnrModel& model, double x1, double x2);

}  // namespace thzrf::linkstats
