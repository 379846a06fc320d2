#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slimecap/error.hpp"

namespace slimecap {

/// amplitude / (1 + exp(-rate (t - inflection))). Amplitude carries the unit
/// of the fitted index (cm^2 for area, cm for perimeter); rate is 1/h.
struct SigmoidParams {
    double amplitude = 1.0;
    double rate = 1.0;
    double inflection = 0.0;

    void validate() const;
};

/// Sum of two logistic phases; phase1 has the earlier inflection.
struct BiSigmoidParams {
    SigmoidParams phase1;
    SigmoidParams phase2;

    void validate() const;
};

using GrowthCurve = std::variant<SigmoidParams, BiSigmoidParams>;

// Single-phase logistic and its analytic derivatives. All are finite for
// |rate (t - inflection)| up to 700.
double eval_sigmoid(const SigmoidParams& p, double t);
double sigmoid_derivative(const SigmoidParams& p, double t);
double sigmoid_second_derivative(const SigmoidParams& p, double t);

/// Exact integral over [t0, t1] of the logistic:
/// (amplitude/rate) [softplus(rate (t1-c)) - softplus(rate (t0-c))].
double sigmoid_time_integral(const SigmoidParams& p, double t0, double t1);

/// Numerically safe ln(1 + e^x).
double softplus(double x);

/// Standard logistic 1/(1+e^-x) without overflow.
double logistic(double x);

// Curve-level versions: sums over phases.
std::vector<SigmoidParams> phases_of(const GrowthCurve& curve);
double evaluate(const GrowthCurve& curve, double t);
double derivative(const GrowthCurve& curve, double t);
double second_derivative(const GrowthCurve& curve, double t);
double time_integral(const GrowthCurve& curve, double t0, double t1);
double asymptote(const GrowthCurve& curve);

/// One decaying phase of the circularity model.
struct DecayPhase {
    double drop = 0.5;      // phi
    double rate = 1.0;      // kappa, 1/h
    double midpoint = 0.0;  // xi, h
};

/// 1 - sum_i drop_i / (1 + exp(-rate_i (t - midpoint_i))), one or two phases.
struct CircFitParams {
    std::vector<DecayPhase> phases;

    double total_drop() const;
};

double eval_circularity_model(const CircFitParams& p, double t);

enum class ModelKind { Sigmoid, BiSigmoid, Circ1, Circ2 };

std::string to_string(ModelKind kind);

struct FitResult {
    ModelKind model_kind = ModelKind::Sigmoid;
    std::variant<SigmoidParams, BiSigmoidParams, CircFitParams> params;
    double r_squared = 0.0;
    double rmse = 0.0;
    std::vector<double> residuals;  // model - data
    int iterations = 0;

    /// The fitted growth curve; throws UsageError for circularity fits.
    GrowthCurve curve() const;
};

/// Raised when the optimizer exhausts its iteration budget; carries the best
/// parameters found.
class FitError : public NumericalError {
public:
    FitError(const std::string& what, FitResult best) : NumericalError(what), best_(std::move(best)) {}
    const FitResult& best() const { return best_; }

private:
    FitResult best_;
};

struct FitOptions {
    int max_iterations = 200;
    double relative_cost_tolerance = 1e-10;
};

/// Least-squares logistic fit (damped Gauss-Newton with analytic Jacobian;
/// amplitude and rate are log-parameterized). Needs >= 5 non-negative values.
FitResult fit_sigmoid(std::span<const double> t, std::span<const double> y, const FitOptions& opts = {});

/// Six-parameter two-phase fit; needs >= 9 points. Phases are returned ordered
/// by inflection.
FitResult fit_bisigmoid(std::span<const double> t, std::span<const double> y, const FitOptions& opts = {});

/// Decaying one- or two-phase circularity fit with 0 < sum(drop) < 1 enforced
/// by a logistic parameterization. Values must lie in (0, 1.05].
FitResult fit_circularity(std::span<const double> t, std::span<const double> y, int phases,
                          const FitOptions& opts = {});

/// Bi-sigmoid wins iff its RMSE is more than 10% below the sigmoid RMSE, the
/// sigmoid is not already exact to round-off, and each phase carries at least
/// 5% of the total amplitude.
ModelKind select_model(const FitResult& sigmoid_fit, const FitResult& bisigmoid_fit);

/// Fits both models and returns the selected one. A failed bi-sigmoid fit
/// falls back to the sigmoid.
FitResult fit_growth(std::span<const double> t, std::span<const double> y, const FitOptions& opts = {});

}  // namespace slimecap
