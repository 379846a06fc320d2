#pragma once

#include <functional>
#include <span>
#include <vector>

namespace slimecap {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    int max_panels = 4000;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Panels with the
/// largest error estimate are bisected until the total estimate satisfies
/// max(abs_tol, rel_tol*|I|). Throws NumericalError on non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

/// Same as integrate() but starts from the given breakpoints (sorted,
/// first/last are the limits).
double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const QuadratureOptions& opts = {});

/// Trapezoid rule over sampled data.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Running trapezoid; result[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

}  // namespace slimecap
