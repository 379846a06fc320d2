#include "slimecap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slimecap/error.hpp"

namespace slimecap {
namespace {

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    // max_depth 0: a single Kronrod panel with its embedded Gauss error estimate.
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

}  // namespace

double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const QuadratureOptions& opts) {
    if (breakpoints.size() < 2) throw UsageError("integrate: need at least two breakpoints");
    std::priority_queue<Panel> panels;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] == breakpoints[i]) continue;
        Panel p = gk15(f, breakpoints[i], breakpoints[i + 1]);
        total += p.value;
        total_err += p.error;
        panels.push(p);
    }
    int count = static_cast<int>(panels.size());
    while (!panels.empty() && total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (count >= opts.max_panels)
            throw NumericalError("integrate: adaptive quadrature did not converge");
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Re-sum to shed the drift of incremental updates.
    double sum = 0.0;
    while (!panels.empty()) {
        sum += panels.top().value;
        panels.pop();
    }
    if (!std::isfinite(sum)) throw NumericalError("integrate: non-finite result");
    return sum;
}

double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, opts);
    const double pts[2] = {a, b};
    return integrate(f, std::span<const double>(pts, 2), opts);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("trapezoid: size mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("cumulative_trapezoid: size mismatch");
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return out;
}

}  // namespace slimecap
