#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slimecap/constants.hpp"
#include "slimecap/error.hpp"
#include "slimecap/growthfit.hpp"

namespace slimecap {

enum class BoundKind { Hydro, Chem, KE, QO };

std::string to_string(BoundKind kind);
BoundKind bound_kind_from_string(const std::string& s);

/// Cumulative operation count N(t) for one capacity bound.
struct BoundSeries {
    std::string sample_id;
    BoundKind kind = BoundKind::Hydro;
    std::vector<double> times;           // h
    std::vector<double> cumulative_ops;
    std::vector<double> rate_ops_per_s;
    std::vector<double> energy_J;        // E = pi hbar * rate; empty when not defined
};

// --- Instantaneous rates and energy equivalents -------------------------

/// n_hydro_local * P / l_d, ops/s.
double hydro_rate(double perimeter_cm, const PhysicalConstants& c = {});
/// pi hbar * hydro_rate, J.
double hydro_energy(double perimeter_cm, const PhysicalConstants& c = {});

/// 0.664 rho0 A l, J.
double chem_energy(double area_cm2, const PhysicalConstants& c = {});
double chem_rate(double area_cm2, const PhysicalConstants& c = {});

/// (n_actin / tau) A, ops/s.
double qo_rate(double area_cm2, const PhysicalConstants& c = {});
double qo_energy(double area_cm2, const PhysicalConstants& c = {});

/// Front kinetic energy 1/2 rho_m f A l v^2 in J, with v in cm/h.
double ke_energy(double area_cm2, double front_speed_cm_per_h, double fraction, const PhysicalConstants& c = {});
double ke_rate(double area_cm2, double front_speed_cm_per_h, double fraction, const PhysicalConstants& c = {});

/// int_0^1 tanh(gain x) + offset dx by adaptive quadrature.
double atp_shape_integral(double profile_gain = 1.472, double offset = 0.1);

// --- Closed forms from growth fits (exact t = 0 lower-limit terms) -------

double hydro_bound(const GrowthCurve& perimeter_fit, double t_h, const PhysicalConstants& c = {});
double chem_bound(const GrowthCurve& area_fit, double t_h, const PhysicalConstants& c = {});
double qo_bound(const GrowthCurve& area_fit, double t_h, const PhysicalConstants& c = {});

/// Substitutions for the kinetic-energy integral in z = 1 + exp(-eta (t - theta)).
struct KEClosedFormParams {
    double a = 1.0;      // beta / eta
    double log_b = 0.0;  // ln b = beta (gamma - theta); kept in log form against overflow
    double f_avg = 0.1;

    double b() const;
    void validate() const;
};

/// Integrand (z-1) / ((1 + b (z-1)^a) z^4) of the T_{a,b} family.
double ke_t_integrand(double z, double a, double log_b);

/// T_{a,b}(z_hi) - T_{a,b}(z_lo) for 1 < z_lo <= z_hi, by adaptive
/// Gauss-Kronrod on log-spaced panels that crowd toward z = 1.
double ke_t_difference(double a, double log_b, double z_lo, double z_hi);

/// Kinetic-energy bound for single-sigmoid area and perimeter fits:
/// rho_m f alpha eta delta^2 l / (2 pi hbar) [T(1+e^{eta theta}) - T(1+e^{-eta(t-theta)})].
double ke_bound_closed(const SigmoidParams& area_fit, const SigmoidParams& perimeter_fit, double f_avg,
                       double t_h, const PhysicalConstants& c = {});

/// Kinetic-energy bound by adaptive time-domain quadrature of
/// rho_m f l / (2 pi hbar) int_0^t A P'^2 dt'. Works for any curve shapes;
/// zero-amplitude phases are allowed.
double ke_bound_quadrature(const GrowthCurve& area_fit, const GrowthCurve& perimeter_fit, double f_avg,
                           double t_h, const PhysicalConstants& c = {});

/// Two-phase kinetic-energy bound (alias of ke_bound_quadrature).
double ke_bound_bisigmoid(const BiSigmoidParams& area_fit, const BiSigmoidParams& perimeter_fit,
                          double f_avg, double t_h, const PhysicalConstants& c = {});

/// Per-step growth fraction f_i = (A_i - A_{i-1}) / A_i; f_0 is undefined and
/// returned as 0.
std::vector<double> growth_fraction(std::span<const double> areas);

/// Trapezoid-weighted average of f over [t_lower, t_upper] with the given
/// weights. Throws DataError if the weight integral vanishes.
double weighted_time_average(std::span<const double> times, std::span<const double> f,
                             std::span<const double> weights, double t_lower, double t_upper);

/// f_avg with raw-data f(t) and fitted front speed: weights A_data(t) P'_fit(t)^2
/// on the data grid from t_lower (default 0.5 h) to the last time.
double f_avg(std::span<const double> times, std::span<const double> areas, const GrowthCurve& perimeter_fit,
             double t_lower = 0.5);

/// Pure-fit variant: f and A from the area fit sampled on `times`.
double f_avg_from_fits(std::span<const double> times, const GrowthCurve& area_fit,
                       const GrowthCurve& perimeter_fit, double t_lower = 0.5);

/// Pure-data variant: P' by finite differences of the perimeter data.
double f_avg_from_data(std::span<const double> times, std::span<const double> areas,
                       std::span<const double> perimeters, double t_lower = 0.5);

/// Cumulative trapezoid of f A P'^2 from t_start, scaled by rho_m l / (2 pi hbar).
/// `fraction` may be empty (f computed from the areas as growth_fraction).
/// A non-uniform grid is linearly resampled to its median step, with a warning.
BoundSeries ke_bound_numeric(std::span<const double> times, std::span<const double> areas,
                             std::span<const double> front_speed_cm_per_h, std::span<const double> fraction,
                             const PhysicalConstants& c = {}, double t_start = 0.5,
                             Warnings* warnings = nullptr);

/// Samples a closed-form bound, its rate and energy on a time grid.
/// `f_avg` is only used for the KE kind.
BoundSeries make_bound_series(BoundKind kind, const GrowthCurve& area_fit, const GrowthCurve& perimeter_fit,
                              std::span<const double> times, const PhysicalConstants& c = {},
                              double f_avg = 0.0);

/// Uniform grid t0, t0+step, ..., up to t1 (inclusive within step/1000).
std::vector<double> time_grid(double t0, double t1, double step);

struct GroupAggregate {
    std::string group;
    BoundKind kind = BoundKind::Hydro;
    std::vector<double> times;
    std::vector<std::optional<double>> geo_mean;
    std::vector<std::optional<double>> mult_se_factor;
    std::vector<int> n_at_time;
    int n_samples = 0;
};

/// Geometric mean and multiplicative standard error exp(sd(ln x)/sqrt(n)) per
/// time point; non-positive values are dropped, an all-zero time point is
/// left undefined. All series must share the same time grid.
GroupAggregate aggregate_group(const std::vector<BoundSeries>& per_sample, const std::string& group = {});

}  // namespace slimecap
