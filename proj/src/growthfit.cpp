#include "slimecap/growthfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "levenberg_marquardt.hpp"
#include "slimecap/stats.hpp"

namespace slimecap {

// ---------------------------------------------------------------------------
// Evaluation

double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

void SigmoidParams::validate() const {
    if (!(amplitude > 0) || !(rate > 0) || !std::isfinite(inflection))
        throw DataError("sigmoid parameters need amplitude > 0, rate > 0 and a finite inflection");
}

void BiSigmoidParams::validate() const {
    phase1.validate();
    phase2.validate();
    if (phase1.inflection > phase2.inflection)
        throw DataError("bi-sigmoid phases must be ordered by inflection");
}

double eval_sigmoid(const SigmoidParams& p, double t) {
    return p.amplitude * logistic(p.rate * (t - p.inflection));
}

double sigmoid_derivative(const SigmoidParams& p, double t) {
    const double s = logistic(p.rate * (t - p.inflection));
    return p.amplitude * p.rate * s * (1.0 - s);
}

double sigmoid_second_derivative(const SigmoidParams& p, double t) {
    const double x = p.rate * (t - p.inflection);
    const double s = logistic(x);
    // 1 - 2s loses precision for s near 1/2 only in absolute terms; tanh keeps
    // the sign exact around the inflection.
    return p.amplitude * p.rate * p.rate * s * (1.0 - s) * (-std::tanh(0.5 * x));
}

double sigmoid_time_integral(const SigmoidParams& p, double t0, double t1) {
    const double x1 = p.rate * (t1 - p.inflection);
    const double x0 = p.rate * (t0 - p.inflection);
    return p.amplitude / p.rate * (softplus(x1) - softplus(x0));
}

std::vector<SigmoidParams> phases_of(const GrowthCurve& curve) {
    if (const auto* s = std::get_if<SigmoidParams>(&curve)) return {*s};
    const auto& b = std::get<BiSigmoidParams>(curve);
    return {b.phase1, b.phase2};
}

double evaluate(const GrowthCurve& curve, double t) {
    double v = 0.0;
    for (const auto& p : phases_of(curve)) v += eval_sigmoid(p, t);
    return v;
}

double derivative(const GrowthCurve& curve, double t) {
    double v = 0.0;
    for (const auto& p : phases_of(curve)) v += sigmoid_derivative(p, t);
    return v;
}

double second_derivative(const GrowthCurve& curve, double t) {
    double v = 0.0;
    for (const auto& p : phases_of(curve)) v += sigmoid_second_derivative(p, t);
    return v;
}

double time_integral(const GrowthCurve& curve, double t0, double t1) {
    double v = 0.0;
    for (const auto& p : phases_of(curve)) v += sigmoid_time_integral(p, t0, t1);
    return v;
}

double asymptote(const GrowthCurve& curve) {
    double v = 0.0;
    for (const auto& p : phases_of(curve)) v += p.amplitude;
    return v;
}

double CircFitParams::total_drop() const {
    double s = 0.0;
    for (const auto& ph : phases) s += ph.drop;
    return s;
}

double eval_circularity_model(const CircFitParams& p, double t) {
    double v = 1.0;
    for (const auto& ph : p.phases) v -= ph.drop * logistic(ph.rate * (t - ph.midpoint));
    return v;
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Sigmoid: return "sigmoid";
        case ModelKind::BiSigmoid: return "bisigmoid";
        case ModelKind::Circ1: return "circ1";
        case ModelKind::Circ2: return "circ2";
    }
    return "unknown";
}

GrowthCurve FitResult::curve() const {
    if (const auto* s = std::get_if<SigmoidParams>(&params)) return *s;
    if (const auto* b = std::get_if<BiSigmoidParams>(&params)) return *b;
    throw UsageError("circularity fits do not define a growth curve");
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

using detail::LmResult;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_series(std::span<const double> t, std::span<const double> y, std::size_t min_points,
                  const char* what) {
    if (t.size() != y.size()) throw DataError(std::string(what) + ": time and value lengths differ");
    if (t.size() < min_points)
        throw DataError(std::string(what) + ": need at least " + std::to_string(min_points) + " points");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw DataError(std::string(what) + ": non-finite input");
        if (i > 0 && t[i] <= t[i - 1]) throw DataError(std::string(what) + ": times must be strictly increasing");
    }
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*lo == *hi) throw DataError(std::string(what) + ": degenerate (constant) series");
}

struct Guess {
    double amplitude, rate, inflection;
};

// Amplitude from the maximum, inflection at the first half-crossing and rate
// from the steepest finite-difference slope.
Guess initial_sigmoid(std::span<const double> t, std::span<const double> y) {
    const double amp = std::max(*std::max_element(y.begin(), y.end()), 1e-12);
    double inflection = t.back();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] >= 0.5 * amp) {
            inflection = t[i];
            break;
        }
    }
    double max_slope = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        max_slope = std::max(max_slope, (y[i] - y[i - 1]) / (t[i] - t[i - 1]));
    double rate = 4.0 * max_slope / amp;
    if (!(rate > 0)) rate = 1.0 / std::max(t.back() - t.front(), 1e-9);
    return {amp, rate, inflection};
}

// Index that splits a two-phase series: middle of the longest interior run
// where the smoothed derivative stays below 20% of its peak.
std::size_t plateau_split(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? n - 1 : i + 1;
        d[i] = (y[b] - y[a]) / (t[b] - t[a]);
    }
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= 2 ? i - 2 : 0;
        const std::size_t b = std::min(n - 1, i + 2);
        double acc = 0.0;
        for (std::size_t k = a; k <= b; ++k) acc += d[k];
        s[i] = acc / static_cast<double>(b - a + 1);
    }
    const double thr = 0.2 * *std::max_element(s.begin(), s.end());
    std::size_t best_len = 0, best_mid = n / 2;
    std::size_t i = 0;
    bool seen_high = false;
    while (i < n) {
        if (s[i] > thr) {
            seen_high = true;
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && s[j] <= thr) ++j;
        const bool interior = seen_high && j < n;
        if (interior && j - i > best_len) {
            best_len = j - i;
            best_mid = (i + j - 1) / 2;
        }
        i = j;
    }
    return std::clamp<std::size_t>(best_mid, 2, n - 3);
}

struct Start {
    VectorXd p;
};

FitResult finish(ModelKind kind, std::span<const double> y, const VectorXd& residuals, int iterations) {
    FitResult out;
    out.model_kind = kind;
    out.iterations = iterations;
    out.residuals.assign(residuals.data(), residuals.data() + residuals.size());
    std::vector<double> predicted(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) predicted[i] = y[i] + residuals[static_cast<Eigen::Index>(i)];
    out.r_squared = r_squared(y, predicted).value_or(0.0);
    out.rmse = std::sqrt(residuals.squaredNorm() / static_cast<double>(y.size()));
    return out;
}

template <class ToResult>
FitResult run_starts(const detail::ResidualFn& fn, const std::vector<VectorXd>& starts, const FitOptions& opts,
                     ModelKind kind, std::span<const double> y, ToResult&& to_params) {
    LmResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (const auto& p0 : starts) {
        LmResult r = detail::levenberg_marquardt(fn, p0, opts.max_iterations, opts.relative_cost_tolerance);
        if (!std::isfinite(r.cost)) continue;
        const bool better = r.cost < best.cost * (1.0 - 1e-12) || (r.converged && !best.converged && r.cost <= best.cost);
        if (better || !std::isfinite(best.cost)) best = r;
    }
    if (!std::isfinite(best.cost)) throw NumericalError(to_string(kind) + " fit: no finite solution");
    VectorXd r;
    fn(best.params, r, nullptr);
    FitResult out = finish(kind, y, r, best.iterations);
    out.params = to_params(best.params);
    if (!best.converged) throw FitError(to_string(kind) + " fit did not converge", out);
    return out;
}

// Residual blocks for one logistic phase with [ln amplitude, ln rate, inflection].
void sigmoid_block(std::span<const double> t, const double* p, VectorXd& m, MatrixXd* J, Eigen::Index col) {
    const double amp = std::exp(p[0]), rate = std::exp(p[1]), c = p[2];
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const double s = logistic(rate * (t[i] - c));
        m[k] += amp * s;
        if (J) {
            const double ds = s * (1.0 - s);
            (*J)(k, col) = amp * s;
            (*J)(k, col + 1) = amp * rate * (t[i] - c) * ds;
            (*J)(k, col + 2) = -amp * rate * ds;
        }
    }
}

VectorXd to_log_params(const Guess& g) {
    VectorXd p(3);
    p << std::log(g.amplitude), std::log(g.rate), g.inflection;
    return p;
}

SigmoidParams from_log_params(const double* p) {
    return {std::exp(p[0]), std::exp(p[1]), p[2]};
}

BiSigmoidParams ordered(SigmoidParams a, SigmoidParams b) {
    if (a.inflection > b.inflection) std::swap(a, b);
    return {a, b};
}

std::vector<VectorXd> sigmoid_starts(std::span<const double> t, std::span<const double> y) {
    const Guess g = initial_sigmoid(t, y);
    std::vector<VectorXd> starts;
    starts.push_back(to_log_params(g));
    starts.push_back(to_log_params({1.5 * g.amplitude, g.rate, g.inflection + 1.0 / g.rate}));
    starts.push_back(to_log_params({3.0 * g.amplitude, 0.5 * g.rate, t.back()}));
    return starts;
}

std::vector<VectorXd> bisigmoid_starts(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    std::vector<VectorXd> starts;
    auto add_split = [&](std::size_t split) {
        const auto t1 = t.subspan(0, split + 1);
        const auto y1 = y.subspan(0, split + 1);
        Guess g1 = initial_sigmoid(t1, y1);
        const double base = y[split];
        std::vector<double> y2(y.begin() + static_cast<std::ptrdiff_t>(split), y.end());
        for (double& v : y2) v -= base;
        Guess g2 = initial_sigmoid(t.subspan(split), y2);
        if (!(g2.amplitude > 1e-6 * g1.amplitude)) g2.amplitude = 0.1 * g1.amplitude;
        VectorXd p(6);
        p << std::log(g1.amplitude), std::log(g1.rate), g1.inflection, std::log(g2.amplitude), std::log(g2.rate),
            g2.inflection;
        starts.push_back(p);
    };
    add_split(plateau_split(t, y));
    add_split(n / 2);
    const Guess g = initial_sigmoid(t, y);
    VectorXd p(6);
    p << std::log(0.5 * g.amplitude), std::log(g.rate), g.inflection - 1.0 / g.rate, std::log(0.5 * g.amplitude),
        std::log(g.rate), g.inflection + 1.0 / g.rate;
    starts.push_back(p);
    return starts;
}

}  // namespace

FitResult fit_sigmoid(std::span<const double> t, std::span<const double> y, const FitOptions& opts) {
    check_series(t, y, 5, "fit_sigmoid");
    for (double v : y)
        if (v < 0) throw DataError("fit_sigmoid: values must be non-negative");
    const auto n = static_cast<Eigen::Index>(t.size());
    detail::ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
        r = VectorXd::Zero(n);
        if (J) J->resize(n, 3);
        sigmoid_block(t, p.data(), r, J, 0);
        for (Eigen::Index i = 0; i < n; ++i) r[i] -= y[static_cast<std::size_t>(i)];
    };
    return run_starts(fn, sigmoid_starts(t, y), opts, ModelKind::Sigmoid, y,
                      [](const VectorXd& p) { return from_log_params(p.data()); });
}

FitResult fit_bisigmoid(std::span<const double> t, std::span<const double> y, const FitOptions& opts) {
    check_series(t, y, 9, "fit_bisigmoid");
    for (double v : y)
        if (v < 0) throw DataError("fit_bisigmoid: values must be non-negative");
    const auto n = static_cast<Eigen::Index>(t.size());
    detail::ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
        r = VectorXd::Zero(n);
        if (J) J->resize(n, 6);
        sigmoid_block(t, p.data(), r, J, 0);
        sigmoid_block(t, p.data() + 3, r, J, 3);
        for (Eigen::Index i = 0; i < n; ++i) r[i] -= y[static_cast<std::size_t>(i)];
    };
    return run_starts(fn, bisigmoid_starts(t, y), opts, ModelKind::BiSigmoid, y, [](const VectorXd& p) {
        return ordered(from_log_params(p.data()), from_log_params(p.data() + 3));
    });
}

FitResult fit_circularity(std::span<const double> t, std::span<const double> y, int phases,
                          const FitOptions& opts) {
    if (phases != 1 && phases != 2) throw UsageError("fit_circularity: phases must be 1 or 2");
    check_series(t, y, phases == 1 ? 5 : 9, "fit_circularity");
    for (double v : y)
        if (!(v > 0) || v > 1.05) throw DataError("fit_circularity: values must lie in (0, 1.05]");
    const auto n = static_cast<Eigen::Index>(t.size());
    std::vector<double> drop(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) drop[i] = std::max(0.0, 1.0 - y[i]);
    auto logit = [](double p) { return std::log(p / (1.0 - p)); };

    if (phases == 1) {
        // p = [logit phi, ln kappa, xi]
        detail::ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
            r.resize(n);
            if (J) J->resize(n, 3);
            const double phi = logistic(p[0]), k = std::exp(p[1]), xi = p[2];
            for (Eigen::Index i = 0; i < n; ++i) {
                const double ti = t[static_cast<std::size_t>(i)];
                const double s = logistic(k * (ti - xi));
                r[i] = 1.0 - phi * s - y[static_cast<std::size_t>(i)];
                if (J) {
                    const double ds = s * (1.0 - s);
                    (*J)(i, 0) = -phi * (1.0 - phi) * s;
                    (*J)(i, 1) = -phi * k * (ti - xi) * ds;
                    (*J)(i, 2) = phi * k * ds;
                }
            }
        };
        std::vector<VectorXd> starts;
        for (const auto& s : sigmoid_starts(t, drop)) {
            VectorXd p = s;
            p[0] = logit(std::clamp(std::exp(s[0]), 0.02, 0.98));
            starts.push_back(p);
        }
        return run_starts(fn, starts, opts, ModelKind::Circ1, y, [](const VectorXd& p) {
            return CircFitParams{{DecayPhase{logistic(p[0]), std::exp(p[1]), p[2]}}};
        });
    }

    // p = [logit total, logit share, ln k1, xi1, ln k2, xi2]
    detail::ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
        r.resize(n);
        if (J) J->resize(n, 6);
        const double total = logistic(p[0]), q = logistic(p[1]);
        const double phi1 = total * q, phi2 = total * (1.0 - q);
        const double k1 = std::exp(p[2]), xi1 = p[3], k2 = std::exp(p[4]), xi2 = p[5];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ti = t[static_cast<std::size_t>(i)];
            const double s1 = logistic(k1 * (ti - xi1)), s2 = logistic(k2 * (ti - xi2));
            r[i] = 1.0 - phi1 * s1 - phi2 * s2 - y[static_cast<std::size_t>(i)];
            if (J) {
                const double d1 = s1 * (1.0 - s1), d2 = s2 * (1.0 - s2);
                (*J)(i, 0) = -total * (1.0 - total) * (q * s1 + (1.0 - q) * s2);
                (*J)(i, 1) = -total * q * (1.0 - q) * (s1 - s2);
                (*J)(i, 2) = -phi1 * k1 * (ti - xi1) * d1;
                (*J)(i, 3) = phi1 * k1 * d1;
                (*J)(i, 4) = -phi2 * k2 * (ti - xi2) * d2;
                (*J)(i, 5) = phi2 * k2 * d2;
            }
        }
    };
    std::vector<VectorXd> starts;
    for (const auto& s : bisigmoid_starts(t, drop)) {
        const double a1 = std::exp(s[0]), a2 = std::exp(s[3]);
        VectorXd p(6);
        p << logit(std::clamp(a1 + a2, 0.02, 0.98)), logit(std::clamp(a1 / (a1 + a2), 0.02, 0.98)), s[1], s[2], s[4],
            s[5];
        starts.push_back(p);
    }
    return run_starts(fn, starts, opts, ModelKind::Circ2, y, [](const VectorXd& p) {
        const double total = logistic(p[0]), q = logistic(p[1]);
        DecayPhase a{total * q, std::exp(p[2]), p[3]};
        DecayPhase b{total * (1.0 - q), std::exp(p[4]), p[5]};
        if (a.midpoint > b.midpoint) std::swap(a, b);
        return CircFitParams{{a, b}};
    });
}

ModelKind select_model(const FitResult& sigmoid_fit, const FitResult& bisigmoid_fit) {
    const auto* sig = std::get_if<SigmoidParams>(&sigmoid_fit.params);
    const auto* bi = std::get_if<BiSigmoidParams>(&bisigmoid_fit.params);
    if (!sig || !bi) throw UsageError("select_model: expects a sigmoid and a bi-sigmoid fit");
    const double total = bi->phase1.amplitude + bi->phase2.amplitude;
    const bool amplitude_floor = std::min(bi->phase1.amplitude, bi->phase2.amplitude) >= 0.05 * total;
    const bool sigmoid_exact = sigmoid_fit.rmse <= 1e-9 * sig->amplitude;
    const bool improves = bisigmoid_fit.rmse < 0.9 * sigmoid_fit.rmse;
    return (improves && !sigmoid_exact && amplitude_floor) ? ModelKind::BiSigmoid : ModelKind::Sigmoid;
}

FitResult fit_growth(std::span<const double> t, std::span<const double> y, const FitOptions& opts) {
    FitResult sig = fit_sigmoid(t, y, opts);
    if (t.size() < 9) return sig;
    try {
        FitResult bi = fit_bisigmoid(t, y, opts);
        return select_model(sig, bi) == ModelKind::BiSigmoid ? bi : sig;
    } catch (const Error&) {
        return sig;
    }
}

}  // namespace slimecap
