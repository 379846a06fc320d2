#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slimecap/bounds.hpp"
#include "slimecap/growthfit.hpp"

namespace slimecap {

/// Fraction of the peak growth rate that marks the steady-state transition.
inline constexpr double kNessRateFraction = 0.15;

struct NessReport {
    int phase = 1;                      // 1-based; per-phase reports for two-phase fits
    double t_ness = 0.0;                // h
    double t_max_rate = 0.0;            // h, time of the (local) rate maximum
    double threshold = 0.0;             // cm^2/h
    double max_rate = 0.0;              // cm^2/h
    double rate_at_cutoff = 0.0;        // cm^2/h
    double second_deriv_at_cutoff = 0.0;// cm^2/h^2
    double area_fraction_at_cutoff = 0.0;
};

struct NessOptions {
    double grid_step = 0.01;      // h
    double refine_tolerance = 1e-4;  // h
};

/// Steady-state transitions of an area fit. The rate maximum is located on a
/// grid and refined by bisection on A''; t_ness is the earliest time after it
/// where A' <= 0.15 max and stays below until the next rate peak (or for
/// good). One report per local rate peak that reaches its cutoff.
std::vector<NessReport> detect_ness(const GrowthCurve& area_fit, const NessOptions& opts = {});

/// Single-phase convenience wrapper.
NessReport detect_ness(const SigmoidParams& area_fit, const NessOptions& opts = {});

struct LinearTailFit {
    double slope = 0.0;       // ops/h
    double intercept = 0.0;   // ops
    double x_intercept = 0.0; // h
    double r_squared = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
};

/// OLS line through the bound samples with t >= window_start. Needs >= 5
/// points; a flat series raises DataError.
LinearTailFit tail_linear_fit(const BoundSeries& bound, double window_start,
                              std::optional<double> window_end = std::nullopt);

enum class TailRegime { SinglePhase, BetweenPhases, BeyondBoth };
enum class InterceptReference { Auto, FirstInflection, SecondInflection, WeightedAverage };

std::string to_string(TailRegime regime);

struct InterceptCheck {
    TailRegime regime = TailRegime::SinglePhase;
    double expected = 0.0;
    double observed = 0.0;
    double relative_error = 0.0;
    bool pass = false;
};

inline constexpr double kInterceptTolerance = 0.02;

/// Compares a tail intercept with the inflection (single phase, or first
/// phase while the window lies between the inflections) or with the
/// amplitude-weighted mean inflection once the window is past both.
InterceptCheck intercept_consistency(const GrowthCurve& fit, const LinearTailFit& tail,
                                     InterceptReference reference = InterceptReference::Auto,
                                     double tolerance = kInterceptTolerance);

/// Start of the late-time window used for a bound built on `fit`: the latest
/// phase settling time (inflection + 5/rate) that leaves at least
/// `min_points` samples before t_end, else the last `min_points` samples.
double default_tail_window(const GrowthCurve& fit, double t_end, double grid_step, int min_points = 5);

}  // namespace slimecap
