#pragma once

#include <optional>
#include <span>

namespace slimecap {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope*x + intercept. Throws DataError when
/// fewer than two points are given or x has no spread.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);

/// Sample standard deviation (n-1 denominator); zero for n < 2.
double sample_sd(std::span<const double> v);

/// Pearson correlation; nullopt when either series has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// 1 - SS_res/SS_tot about the mean of `observed`; nullopt if SS_tot == 0.
std::optional<double> r_squared(std::span<const double> observed, std::span<const double> predicted);

}  // namespace slimecap
