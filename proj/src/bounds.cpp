#include "slimecap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slimecap/quadrature.hpp"
#include "slimecap/stats.hpp"

namespace slimecap {

void PhysicalConstants::validate() const {
    const double fields[] = {hbar,  n_hydro_local, l_d,     rho0,   atp_shape_integral,
                             thickness_l, rho_m, n_actin, tau_sr, seconds_per_hour};
    for (double v : fields)
        if (!(v > 0) || !std::isfinite(v)) throw DataError("physical constants must be finite and positive");
}

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::Hydro: return "hydro";
        case BoundKind::Chem: return "chem";
        case BoundKind::KE: return "ke";
        case BoundKind::QO: return "qo";
    }
    return "unknown";
}

BoundKind bound_kind_from_string(const std::string& s) {
    if (s == "hydro") return BoundKind::Hydro;
    if (s == "chem") return BoundKind::Chem;
    if (s == "ke") return BoundKind::KE;
    if (s == "qo") return BoundKind::QO;
    throw UsageError("unknown bound kind '" + s + "'");
}

// Instantaneous rates --------------------------------------------------------

double hydro_rate(double perimeter_cm, const PhysicalConstants& c) {
    return c.n_hydro_local * perimeter_cm / c.l_d;
}

double hydro_energy(double perimeter_cm, const PhysicalConstants& c) {
    return c.pi_hbar() * hydro_rate(perimeter_cm, c);
}

double chem_energy(double area_cm2, const PhysicalConstants& c) {
    return c.atp_shape_integral * c.rho0 * area_cm2 * c.thickness_l;
}

double chem_rate(double area_cm2, const PhysicalConstants& c) {
    return chem_energy(area_cm2, c) / c.pi_hbar();
}

double qo_rate(double area_cm2, const PhysicalConstants& c) {
    return c.n_actin / c.tau_sr * area_cm2;
}

double qo_energy(double area_cm2, const PhysicalConstants& c) {
    return c.pi_hbar() * qo_rate(area_cm2, c);
}

double ke_energy(double area_cm2, double front_speed_cm_per_h, double fraction, const PhysicalConstants& c) {
    const double v = front_speed_cm_per_h * units::kMetersPerCm / c.seconds_per_hour;
    return 0.5 * units::g_per_cm3_to_kg_per_m3(c.rho_m) * fraction * units::cm2_to_m2(area_cm2) *
           units::cm_to_m(c.thickness_l) * v * v;
}

double ke_rate(double area_cm2, double front_speed_cm_per_h, double fraction, const PhysicalConstants& c) {
    return ke_energy(area_cm2, front_speed_cm_per_h, fraction, c) / c.pi_hbar();
}

double atp_shape_integral(double profile_gain, double offset) {
    return integrate([&](double x) { return std::tanh(profile_gain * x) + offset; }, 0.0, 1.0);
}

// Closed forms ---------------------------------------------------------------

namespace {

// sum_i (amp_i/rate_i) [softplus(rate_i (t - c_i)) - softplus(-rate_i c_i)], in value*h.
double integral_from_zero(const GrowthCurve& fit, double t_h) {
    return time_integral(fit, 0.0, t_h);
}

double ke_prefactor(const PhysicalConstants& c, double f) {
    // rho_m f l / (2 pi hbar) in SI
    return units::g_per_cm3_to_kg_per_m3(c.rho_m) * f * units::cm_to_m(c.thickness_l) / (2.0 * c.pi_hbar());
}

// int g(u) du with z = 1 + e^u; g is the T-family integrand times dz/du.
double t_difference_log(double a, double log_b, double u_lo, double u_hi) {
    if (u_hi <= u_lo) return 0.0;
    // exp() underflows to zero well inside these limits.
    u_lo = std::max(u_lo, -750.0);
    u_hi = std::min(u_hi, 750.0);
    if (u_hi <= u_lo) return 0.0;
    auto g = [a, log_b](double u) {
        return std::exp(2.0 * u - softplus(a * u + log_b) - 4.0 * softplus(u));
    };
    const int panels = std::clamp(static_cast<int>(std::ceil((u_hi - u_lo) / 2.0)), 1, 400);
    std::vector<double> pts(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i) pts[static_cast<std::size_t>(i)] = u_lo + (u_hi - u_lo) * i / panels;
    pts.back() = u_hi;
    QuadratureOptions opts;
    opts.abs_tol = 1e-300;
    opts.rel_tol = 1e-11;
    return integrate(g, pts, opts);
}

}  // namespace

double hydro_bound(const GrowthCurve& perimeter_fit, double t_h, const PhysicalConstants& c) {
    return c.n_hydro_local / c.l_d * integral_from_zero(perimeter_fit, t_h) * c.seconds_per_hour;
}

double chem_bound(const GrowthCurve& area_fit, double t_h, const PhysicalConstants& c) {
    return c.atp_shape_integral * c.rho0 * c.thickness_l / c.pi_hbar() * integral_from_zero(area_fit, t_h) *
           c.seconds_per_hour;
}

double qo_bound(const GrowthCurve& area_fit, double t_h, const PhysicalConstants& c) {
    return c.n_actin / c.tau_sr * integral_from_zero(area_fit, t_h) * c.seconds_per_hour;
}

double KEClosedFormParams::b() const { return std::exp(log_b); }

void KEClosedFormParams::validate() const {
    if (!(a > 0) || !std::isfinite(log_b)) throw DataError("KE closed form needs a > 0 and finite b > 0");
    if (!(f_avg > 0) || !(f_avg < 1)) throw DataError("f_avg must lie in (0, 1)");
}

double ke_t_integrand(double z, double a, double log_b) {
    if (!(z > 1)) return 0.0;
    const double lw = std::log(z - 1.0);
    return std::exp(lw - softplus(a * lw + log_b) - 4.0 * std::log(z));
}

double ke_t_difference(double a, double log_b, double z_lo, double z_hi) {
    if (!(z_lo >= 1.0) || !(z_hi >= z_lo)) throw UsageError("ke_t_difference: need 1 <= z_lo <= z_hi");
    const double u_lo = z_lo == 1.0 ? -750.0 : std::log(z_lo - 1.0);
    const double u_hi = std::isinf(z_hi) ? 750.0 : std::log(z_hi - 1.0);
    return t_difference_log(a, log_b, u_lo, u_hi);
}

double ke_bound_closed(const SigmoidParams& area_fit, const SigmoidParams& perimeter_fit, double f_avg,
                       double t_h, const PhysicalConstants& c) {
    area_fit.validate();
    perimeter_fit.validate();
    if (t_h <= 0) return 0.0;
    const double beta = area_fit.rate, gamma = area_fit.inflection;
    const double eta = perimeter_fit.rate, theta = perimeter_fit.inflection;
    KEClosedFormParams kp{beta / eta, beta * (gamma - theta), f_avg};
    kp.validate();
    // z0 = 1 + e^{eta theta} at t = 0, z_t = 1 + e^{-eta (t - theta)}
    const double T = t_difference_log(kp.a, kp.log_b, -eta * (t_h - theta), eta * theta);
    const double alpha_si = units::cm2_to_m2(area_fit.amplitude);
    const double delta_si = units::cm_to_m(perimeter_fit.amplitude);
    const double eta_si = eta / c.seconds_per_hour;
    return ke_prefactor(c, f_avg) * alpha_si * eta_si * delta_si * delta_si * T;
}

double ke_bound_quadrature(const GrowthCurve& area_fit, const GrowthCurve& perimeter_fit, double f_avg,
                           double t_h, const PhysicalConstants& c) {
    if (t_h <= 0) return 0.0;
    std::vector<double> pts{0.0, t_h};
    for (const auto& ph : phases_of(perimeter_fit)) {
        if (!(ph.rate > 0)) continue;
        for (double k : {-5.0, -2.0, 0.0, 2.0, 5.0}) {
            const double x = ph.inflection + k / ph.rate;
            if (x > 0 && x < t_h) pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto integrand = [&](double t) {
        const double v = derivative(perimeter_fit, t);
        return evaluate(area_fit, t) * v * v;
    };
    QuadratureOptions opts;
    opts.abs_tol = 1e-300;
    opts.rel_tol = 1e-11;
    const double I = integrate(integrand, pts, opts);  // cm^2 * cm^2/h^2 * h
    // to SI: cm^4 -> m^4, 1/h -> 1/s
    const double si = units::kSquareMetersPerSquareCm * units::kMetersPerCm * units::kMetersPerCm / c.seconds_per_hour;
    return ke_prefactor(c, f_avg) * I * si;
}

double ke_bound_bisigmoid(const BiSigmoidParams& area_fit, const BiSigmoidParams& perimeter_fit, double f_avg,
                          double t_h, const PhysicalConstants& c) {
    return ke_bound_quadrature(area_fit, perimeter_fit, f_avg, t_h, c);
}

// f_avg ------------------------------------------------------------------------

std::vector<double> growth_fraction(std::span<const double> areas) {
    std::vector<double> f(areas.size(), 0.0);
    for (std::size_t i = 1; i < areas.size(); ++i)
        f[i] = areas[i] > 0 ? (areas[i] - areas[i - 1]) / areas[i] : 0.0;
    return f;
}

double weighted_time_average(std::span<const double> times, std::span<const double> f,
                             std::span<const double> weights, double t_lower, double t_upper) {
    if (times.size() != f.size() || times.size() != weights.size())
        throw DataError("weighted_time_average: size mismatch");
    std::vector<double> t, fw, w;
    const double eps = 1e-9;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lower - eps || times[i] > t_upper + eps) continue;
        t.push_back(times[i]);
        fw.push_back(f[i] * weights[i]);
        w.push_back(weights[i]);
    }
    if (t.size() < 2) throw DataError("weighted_time_average: fewer than two samples in the window");
    const double den = trapezoid(t, w);
    if (!(den > 0)) throw DataError("weighted_time_average: weights integrate to zero");
    return trapezoid(t, fw) / den;
}

namespace {

double f_avg_impl(std::span<const double> times, std::span<const double> areas, std::span<const double> speed,
                  double t_lower) {
    if (times.size() != areas.size() || times.size() != speed.size())
        throw DataError("f_avg: size mismatch");
    if (times.empty()) throw DataError("f_avg: empty series");
    const auto f = growth_fraction(areas);
    std::vector<double> w(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) w[i] = areas[i] * speed[i] * speed[i];
    return weighted_time_average(times, f, w, t_lower, times.back());
}

}  // namespace

double f_avg(std::span<const double> times, std::span<const double> areas, const GrowthCurve& perimeter_fit,
             double t_lower) {
    std::vector<double> v(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) v[i] = derivative(perimeter_fit, times[i]);
    return f_avg_impl(times, areas, v, t_lower);
}

double f_avg_from_fits(std::span<const double> times, const GrowthCurve& area_fit,
                       const GrowthCurve& perimeter_fit, double t_lower) {
    std::vector<double> a(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) a[i] = evaluate(area_fit, times[i]);
    return f_avg(times, a, perimeter_fit, t_lower);
}

double f_avg_from_data(std::span<const double> times, std::span<const double> areas,
                       std::span<const double> perimeters, double t_lower) {
    const std::size_t n = times.size();
    if (perimeters.size() != n || n < 2) throw DataError("f_avg_from_data: need matching series of >= 2 points");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? n - 1 : i + 1;
        v[i] = (perimeters[b] - perimeters[a]) / (times[b] - times[a]);
    }
    return f_avg_impl(times, areas, v, t_lower);
}

// Numerical KE bound -------------------------------------------------------------

namespace {

double interp(std::span<const double> x, std::span<const double> y, double t) {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + w * (y[j] - y[j - 1]);
}

}  // namespace

BoundSeries ke_bound_numeric(std::span<const double> times, std::span<const double> areas,
                             std::span<const double> front_speed_cm_per_h, std::span<const double> fraction,
                             const PhysicalConstants& c, double t_start, Warnings* warnings) {
    const std::size_t n = times.size();
    if (areas.size() != n || front_speed_cm_per_h.size() != n || (!fraction.empty() && fraction.size() != n))
        throw DataError("ke_bound_numeric: size mismatch");
    if (n < 2) throw DataError("ke_bound_numeric: need at least two samples");
    for (std::size_t i = 1; i < n; ++i)
        if (times[i] <= times[i - 1]) throw DataError("ke_bound_numeric: times must increase");

    std::vector<double> f = fraction.empty() ? growth_fraction(areas)
                                             : std::vector<double>(fraction.begin(), fraction.end());
    std::vector<double> t(times.begin(), times.end());
    std::vector<double> a(areas.begin(), areas.end());
    std::vector<double> v(front_speed_cm_per_h.begin(), front_speed_cm_per_h.end());

    std::vector<double> steps(n - 1);
    for (std::size_t i = 1; i < n; ++i) steps[i - 1] = t[i] - t[i - 1];
    std::vector<double> sorted = steps;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double h = sorted[sorted.size() / 2];
    const bool uniform = std::all_of(steps.begin(), steps.end(), [h](double s) { return std::abs(s - h) <= 1e-6 * h; });
    if (!uniform) {
        warn(warnings, "ke_bound_numeric: non-uniform grid resampled to a step of " + std::to_string(h) + " h");
        const auto grid = time_grid(t.front(), t.back(), h);
        std::vector<double> a2, v2, f2;
        for (double x : grid) {
            a2.push_back(interp(t, a, x));
            v2.push_back(interp(t, v, x));
            f2.push_back(interp(t, f, x));
        }
        if (fraction.empty()) f2 = growth_fraction(a2);
        t = grid;
        a = std::move(a2);
        v = std::move(v2);
        f = std::move(f2);
    }

    BoundSeries out;
    out.kind = BoundKind::KE;
    std::vector<double> ts, integrand;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_start - 1e-9) continue;
        if (!(a[i] > 0)) throw DataError("ke_bound_numeric: areas must be positive in the window");
        ts.push_back(t[i]);
        const double rate = ke_rate(a[i], v[i], f[i], c);
        integrand.push_back(rate);
        out.rate_ops_per_s.push_back(rate);
        out.energy_J.push_back(ke_energy(a[i], v[i], f[i], c));
    }
    if (ts.empty()) throw DataError("ke_bound_numeric: no samples after t_start");
    std::vector<double> ts_s(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ts_s[i] = units::hours_to_seconds(ts[i]);
    out.cumulative_ops = cumulative_trapezoid(ts_s, integrand);
    out.times = std::move(ts);
    return out;
}

// Series and aggregation ----------------------------------------------------------

std::vector<double> time_grid(double t0, double t1, double step) {
    if (!(step > 0)) throw UsageError("time_grid: step must be positive");
    if (t1 < t0) throw UsageError("time_grid: t1 < t0");
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-3));
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[i] = t0 + static_cast<double>(i) * step;
    return g;
}

BoundSeries make_bound_series(BoundKind kind, const GrowthCurve& area_fit, const GrowthCurve& perimeter_fit,
                              std::span<const double> times, const PhysicalConstants& c, double f_avg) {
    BoundSeries s;
    s.kind = kind;
    s.times.assign(times.begin(), times.end());
    const auto* a_sig = std::get_if<SigmoidParams>(&area_fit);
    const auto* p_sig = std::get_if<SigmoidParams>(&perimeter_fit);
    for (double t : times) {
        double cum = 0.0, rate = 0.0;
        switch (kind) {
            case BoundKind::Hydro:
                cum = hydro_bound(perimeter_fit, t, c);
                rate = hydro_rate(evaluate(perimeter_fit, t), c);
                break;
            case BoundKind::Chem:
                cum = chem_bound(area_fit, t, c);
                rate = chem_rate(evaluate(area_fit, t), c);
                break;
            case BoundKind::QO:
                cum = qo_bound(area_fit, t, c);
                rate = qo_rate(evaluate(area_fit, t), c);
                break;
            case BoundKind::KE:
                cum = (a_sig && p_sig) ? ke_bound_closed(*a_sig, *p_sig, f_avg, t, c)
                                       : ke_bound_quadrature(area_fit, perimeter_fit, f_avg, t, c);
                rate = ke_rate(evaluate(area_fit, t), derivative(perimeter_fit, t), f_avg, c);
                break;
        }
        s.cumulative_ops.push_back(cum);
        s.rate_ops_per_s.push_back(rate);
        s.energy_J.push_back(c.pi_hbar() * rate);
    }
    return s;
}

GroupAggregate aggregate_group(const std::vector<BoundSeries>& per_sample, const std::string& group) {
    if (per_sample.empty()) throw DataError("aggregate_group: no samples");
    const auto& ref = per_sample.front();
    for (const auto& s : per_sample) {
        if (s.kind != ref.kind) throw DataError("aggregate_group: mixed bound kinds");
        if (s.times.size() != ref.times.size() || s.cumulative_ops.size() != s.times.size())
            throw DataError("aggregate_group: samples must share a time grid");
        for (std::size_t i = 0; i < s.times.size(); ++i)
            if (std::abs(s.times[i] - ref.times[i]) > 1e-9) throw DataError("aggregate_group: time grids differ");
    }
    GroupAggregate g;
    g.group = group;
    g.kind = ref.kind;
    g.times = ref.times;
    g.n_samples = static_cast<int>(per_sample.size());
    for (std::size_t i = 0; i < ref.times.size(); ++i) {
        std::vector<double> logs;
        for (const auto& s : per_sample)
            if (s.cumulative_ops[i] > 0) logs.push_back(std::log(s.cumulative_ops[i]));
        g.n_at_time.push_back(static_cast<int>(logs.size()));
        if (logs.empty()) {
            g.geo_mean.emplace_back();
            g.mult_se_factor.emplace_back();
            continue;
        }
        g.geo_mean.push_back(std::exp(mean(logs)));
        g.mult_se_factor.push_back(std::exp(sample_sd(logs) / std::sqrt(static_cast<double>(logs.size()))));
    }
    return g;
}

}  // namespace slimecap
