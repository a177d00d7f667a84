#pragma once

#include "thzrf/specfun.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace thzrf::channel {

inline constexpr double kSpeedOfLight = 299792458.0;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// No absorption coefficient could be produced for the requested carrier.
class ModelUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ThzHopConfig {
    double carrier_hz = 275e9;
    double distance_m = 300.0;
    double tx_gain_db = 52.0;
    double rx_gain_db = 52.0;
    double path_loss_exp = 2.0;
    double temperature_k = 296.0;
    double pressure_hpa = 1013.25;
    double rel_humidity_pct = 50.0;
    std::optional<double> absorption_override;  // 1/m

    void validate() const;
};

struct RfHopConfig {
    double carrier_hz = 8e9;
    double distance_m = 800.0;
    double tx_gain_db = 52.0;
    double rx_gain_db = 52.0;
    double path_loss_exp = 2.0;

    void validate() const;
};

struct AlphaMuFading {
    double alpha = 2.0;
    double mu = 1.0;
    double omega = 1.0;

    void validate() const;
};

struct PointingError {
    double phi = 4.0;
    double s0 = 1.0;

    void validate() const;
};

struct NakagamiFading {
    double m = 1.0;
    double omega_m = 1.0;

    void validate() const;
};

struct PowerNoise {
    double p_s = 1.0;
    double p_r = 1.0;
    double n0 = 1.0;

    void validate() const;
};

// Source of the molecular absorption coefficient (1/m) of the THz hop.
class AbsorptionModel {
public:
    virtual ~AbsorptionModel() = default;
    virtual std::string name() const = 0;
    virtual bool covers(double carrier_hz) const = 0;
    virtual double coefficient(const ThzHopConfig& cfg) const = 0;
};

// Two water-vapour resonance lines plus a polynomial background, fitted for
// the 275-400 GHz window.  Humidity enters through the water-vapour mixing
// ratio obtained from the Buck saturation pressure formula.
class WaterVaporLineModel final : public AbsorptionModel {
public:
    std::string name() const override { return "water-vapor-lines-275-400GHz"; }
    bool covers(double carrier_hz) const override;
    double coefficient(const ThzHopConfig& cfg) const override;

    static double saturation_pressure_hpa(double temperature_k, double pressure_hpa);
    static double mixing_ratio(const ThzHopConfig& cfg);
};

const AbsorptionModel& default_absorption_model();

double friis_gain(const ThzHopConfig& cfg);
double friis_gain(const RfHopConfig& cfg);

// Override when present, else the model; `model == nullptr` means no model is configured.
double absorption_coefficient(const ThzHopConfig& cfg,
                              const AbsorptionModel* model = &default_absorption_model());
double absorption_gain(const ThzHopConfig& cfg,
                       const AbsorptionModel* model = &default_absorption_model());

double alpha_mu_cdf(const AlphaMuFading& f, double x);
double alpha_mu_pdf(const AlphaMuFading& f, double x);

double pointing_cdf(const PointingError& p, double x);
double pointing_pdf(const PointingError& p, double x);

// The composite envelope h_f * h_p.  The CDF goes through the Meijer G^{3,0}_{2,3}
// representation; the pole at the origin is split off so small x keeps full
// relative accuracy.
double composite_thz_cdf(const AlphaMuFading& f, const PointingError& p, double x,
                         const specfun::ContourConfig& contour = {});
double composite_thz_ccdf(const AlphaMuFading& f, const PointingError& p, double x,
                          const specfun::ContourConfig& contour = {});
// Same CDF through incomplete gamma functions.
double composite_thz_cdf_gamma(const AlphaMuFading& f, const PointingError& p, double x);
double composite_thz_pdf(const AlphaMuFading& f, const PointingError& p, double x);

double nakagami_cdf(const NakagamiFading& f, double x);
double nakagami_pdf(const NakagamiFading& f, double x);

}  // namespace thzrf::channel
