#include "slimecap/ness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slimecap/stats.hpp"

namespace slimecap {

namespace {

template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
    // f(lo) and f(hi) have opposite signs (or f(lo) == 0).
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<NessReport> detect_ness(const GrowthCurve& area_fit, const NessOptions& opts) {
    const auto phases = phases_of(area_fit);
    for (const auto& p : phases) p.validate();
    if (!(opts.grid_step > 0)) throw UsageError("detect_ness: grid_step must be positive");

    double t_lo = phases.front().inflection, t_hi = t_lo;
    for (const auto& p : phases) {
        t_lo = std::min(t_lo, p.inflection - 15.0 / p.rate);
        t_hi = std::max(t_hi, p.inflection + 30.0 / p.rate);
    }
    double step = opts.grid_step;
    if ((t_hi - t_lo) / step > 4e6) step = (t_hi - t_lo) / 4e6;
    const auto grid = time_grid(t_lo, t_hi, step);
    const std::size_t n = grid.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = derivative(area_fit, grid[i]);
    const double global_max = *std::max_element(d.begin(), d.end());

    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (d[i] >= d[i - 1] && d[i] > d[i + 1] && d[i] > 1e-9 * global_max) peaks.push_back(i);

    const double tol = opts.refine_tolerance;
    const double asym = asymptote(area_fit);
    std::vector<NessReport> out;
    for (std::size_t k = 0; k < peaks.size(); ++k) {
        const std::size_t ip = peaks[k];
        // The search for this peak's cutoff ends at the next rate minimum.
        std::size_t end = n - 1;
        if (k + 1 < peaks.size()) {
            end = ip;
            for (std::size_t i = ip; i <= peaks[k + 1]; ++i)
                if (d[i] < d[end]) end = i;
        }
        const double t_peak = bisect([&](double t) { return second_derivative(area_fit, t); }, grid[ip - 1],
                                     grid[ip + 1], tol * 1e-3);
        const double max_rate = derivative(area_fit, t_peak);
        const double thr = kNessRateFraction * max_rate;

        // Earliest index after which d stays <= thr through `end`.
        std::size_t j = end + 1;
        for (std::size_t i = end + 1; i-- > ip;) {
            if (d[i] > thr) break;
            j = i;
        }
        if (j > end) continue;  // never drops below before the next phase takes over
        const double t_cut = bisect([&](double t) { return derivative(area_fit, t) - thr; }, grid[j - 1], grid[j],
                                    tol);
        NessReport r;
        r.phase = static_cast<int>(out.size()) + 1;
        r.t_ness = t_cut;
        r.t_max_rate = t_peak;
        r.threshold = thr;
        r.max_rate = max_rate;
        r.rate_at_cutoff = derivative(area_fit, t_cut);
        r.second_deriv_at_cutoff = second_derivative(area_fit, t_cut);
        r.area_fraction_at_cutoff = evaluate(area_fit, t_cut) / asym;
        out.push_back(r);
    }
    return out;
}

NessReport detect_ness(const SigmoidParams& area_fit, const NessOptions& opts) {
    const auto r = detect_ness(GrowthCurve{area_fit}, opts);
    if (r.empty()) throw NumericalError("detect_ness: no rate peak found");
    return r.front();
}

LinearTailFit tail_linear_fit(const BoundSeries& bound, double window_start, std::optional<double> window_end) {
    std::vector<double> t, y;
    const double hi = window_end.value_or(std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < bound.times.size(); ++i) {
        if (bound.times[i] < window_start - 1e-9 || bound.times[i] > hi + 1e-9) continue;
        t.push_back(bound.times[i]);
        y.push_back(bound.cumulative_ops[i]);
    }
    if (t.size() < 5) throw DataError("tail_linear_fit: fewer than 5 points in the window");
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); }))
        throw DataError("tail_linear_fit: flat series");
    const LineFit lf = fit_line(t, y);
    if (!(lf.slope > 0)) throw DataError("tail_linear_fit: non-increasing tail");
    LinearTailFit out;
    out.slope = lf.slope;
    out.intercept = lf.intercept;
    out.x_intercept = -lf.intercept / lf.slope;
    out.r_squared = lf.r_squared;
    out.window_start = t.front();
    out.window_end = t.back();
    return out;
}

std::string to_string(TailRegime regime) {
    switch (regime) {
        case TailRegime::SinglePhase: return "single_phase";
        case TailRegime::BetweenPhases: return "between_phases";
        case TailRegime::BeyondBoth: return "beyond_both";
    }
    return "unknown";
}

InterceptCheck intercept_consistency(const GrowthCurve& fit, const LinearTailFit& tail,
                                     InterceptReference reference, double tolerance) {
    if (!(tail.slope > 0) || !std::isfinite(tail.x_intercept))
        throw DataError("intercept_consistency: regime undetermined for a flat tail");
    auto phases = phases_of(fit);
    std::sort(phases.begin(), phases.end(),
              [](const SigmoidParams& a, const SigmoidParams& b) { return a.inflection < b.inflection; });

    InterceptCheck c;
    c.observed = tail.x_intercept;
    if (phases.size() == 1) {
        c.regime = TailRegime::SinglePhase;
    } else {
        const auto& p2 = phases[1];
        c.regime = tail.window_start >= p2.inflection ? TailRegime::BeyondBoth : TailRegime::BetweenPhases;
    }
    double wsum = 0.0, asum = 0.0;
    for (const auto& p : phases) {
        wsum += p.amplitude * p.inflection;
        asum += p.amplitude;
    }
    switch (reference) {
        case InterceptReference::Auto:
            c.expected = c.regime == TailRegime::BeyondBoth ? wsum / asum : phases.front().inflection;
            break;
        case InterceptReference::FirstInflection: c.expected = phases.front().inflection; break;
        case InterceptReference::SecondInflection: c.expected = phases.back().inflection; break;
        case InterceptReference::WeightedAverage: c.expected = wsum / asum; break;
    }
    c.relative_error = std::abs(c.observed - c.expected) / std::max(std::abs(c.expected), 1e-12);
    c.pass = c.relative_error <= tolerance;
    return c;
}

double default_tail_window(const GrowthCurve& fit, double t_end, double grid_step, int min_points) {
    std::vector<double> settle;
    for (const auto& p : phases_of(fit)) settle.push_back(p.inflection + 5.0 / p.rate);
    std::sort(settle.rbegin(), settle.rend());
    for (double s : settle) {
        const double count = std::floor((t_end - std::max(s, 0.0)) / grid_step + 1e-6) + 1.0;
        if (count >= min_points) return std::max(s, 0.0);
    }
    return t_end - (min_points - 1) * grid_step;
}

}  // namespace slimecap
