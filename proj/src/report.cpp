#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace slimecap::report {

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json sigmoid_json(const SigmoidParams& p) {
    return {{"amplitude", p.amplitude}, {"rate", p.rate}, {"inflection", p.inflection}};
}

}  // namespace

json fit_json(const FitResult& fit) {
    json params;
    if (const auto* s = std::get_if<SigmoidParams>(&fit.params)) {
        params = sigmoid_json(*s);
    } else if (const auto* b = std::get_if<BiSigmoidParams>(&fit.params)) {
        params = {{"phase1", sigmoid_json(b->phase1)}, {"phase2", sigmoid_json(b->phase2)}};
    } else {
        const auto& c = std::get<CircFitParams>(fit.params);
        params = json::array();
        for (const auto& ph : c.phases)
            params.push_back({{"drop", ph.drop}, {"rate", ph.rate}, {"midpoint", ph.midpoint}});
    }
    return {{"model", to_string(fit.model_kind)},
            {"params", params},
            {"r2", fit.r_squared},
            {"rmse", fit.rmse},
            {"iterations", fit.iterations}};
}

json ness_json(const NessReport& r) {
    return {{"phase", r.phase},
            {"t_ness", r.t_ness},
            {"t_max_rate", r.t_max_rate},
            {"threshold", r.threshold},
            {"max_rate", r.max_rate},
            {"rate_at_cutoff", r.rate_at_cutoff},
            {"second_deriv_at_cutoff", r.second_deriv_at_cutoff},
            {"area_fraction_at_cutoff", r.area_fraction_at_cutoff}};
}

json tail_json(const LinearTailFit& t) {
    return {{"slope", t.slope},
            {"intercept", t.intercept},
            {"x_intercept", t.x_intercept},
            {"r2", t.r_squared},
            {"window", {t.window_start, t.window_end}}};
}

json intercept_json(const InterceptCheck& c) {
    return {{"regime", to_string(c.regime)},
            {"expected", c.expected},
            {"observed", c.observed},
            {"relative_error", c.relative_error},
            {"pass", c.pass}};
}

json sample_json(const SampleAnalysis& s) {
    json j;
    j["sample_id"] = s.sample_id;
    j["group"] = s.group;
    j["ok"] = s.ok;
    if (!s.ok) {
        j["error"] = s.error;
        j["warnings"] = s.warnings;
        return j;
    }
    j["fits"]["area"] = fit_json(s.fits.area);
    j["fits"]["perimeter"] = fit_json(s.fits.perimeter);
    j["fits"]["circularity"] = s.fits.circularity ? fit_json(*s.fits.circularity) : json(nullptr);
    j["ness"] = json::array();
    for (const auto& n : s.ness) j["ness"].push_back(ness_json(n));
    j["f_avg"] = opt(s.f_avg);
    json b = json::object();
    for (const auto& br : s.bounds) {
        json e;
        e["final_ops"] = br.series.cumulative_ops.empty() ? json(nullptr) : json(br.series.cumulative_ops.back());
        e["tail_fit"] = br.tail ? tail_json(*br.tail) : json(nullptr);
        e["intercept_check"] = br.intercept ? intercept_json(*br.intercept) : json(nullptr);
        b[to_string(br.series.kind)] = e;
    }
    j["bounds"] = b;
    if (s.ke_numeric && !s.ke_numeric->cumulative_ops.empty()) {
        j["ke_numeric"] = {{"t_start", s.ke_numeric->times.front()},
                           {"t_end", s.ke_numeric->times.back()},
                           {"final_ops", s.ke_numeric->cumulative_ops.back()}};
    } else {
        j["ke_numeric"] = nullptr;
    }
    j["warnings"] = s.warnings;
    return j;
}

std::string bounds_csv_rows(const SampleAnalysis& s) {
    std::string out;
    for (const auto& br : s.bounds) {
        const auto& b = br.series;
        for (std::size_t i = 0; i < b.times.size(); ++i) {
            const std::string energy = i < b.energy_J.size() ? fmt::format("{}", b.energy_J[i]) : std::string();
            out += fmt::format("{},{},{},{},{},{}\n", s.sample_id, to_string(b.kind), b.times[i], b.cumulative_ops[i],
                               b.rate_ops_per_s[i], energy);
        }
    }
    return out;
}

json group_aggregate_json(const GroupReport& g, std::size_t index) {
    const auto& a = g.aggregates.at(index);
    json j;
    j["group"] = g.group;
    j["kind"] = to_string(a.kind);
    j["times"] = a.times;
    j["geo_mean"] = json::array();
    j["mult_se"] = json::array();
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        j["geo_mean"].push_back(opt(a.geo_mean[i]));
        j["mult_se"].push_back(opt(a.mult_se_factor[i]));
    }
    j["n_samples"] = a.n_samples;
    const auto& tail = g.tails.at(index);
    j["tail_fit"] = tail ? json{{"slope", tail->slope},
                                {"intercept", tail->intercept},
                                {"x_intercept", tail->x_intercept},
                                {"r2", tail->r_squared}}
                         : json(nullptr);
    j["t_ness"] = opt(g.t_ness);
    return j;
}

json allometry_json(const AllometryReport& a) {
    return {{"group", a.group},
            {"slope", a.slope},
            {"intercept", a.intercept},
            {"r2", a.r_squared},
            {"zones", {{"acclimation_end", a.zones.acclimation_end}, {"boundary_start", a.zones.boundary_start}}},
            {"m0_g", a.m0},
            {"log_mass", a.log_mass},
            {"log_ops", a.log_ops},
            {"in_fit", a.in_fit}};
}

// SVG --------------------------------------------------------------------------

namespace {

constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 30, kB = 50;

struct Axis {
    double lo, hi;
    double px(double v, double p0, double p1) const { return p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

std::string svg_open(const std::string& title) {
    return fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">{3}</text>\n",
        kW, kH, kL, title);
}

std::string frame(const Axis& x, const Axis& y, const std::string& xlabel, const std::string& ylabel) {
    std::string s = fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                                kL, kT, kW - kL - kR, kH - kT - kB);
    for (int i = 0; i <= 4; ++i) {
        const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
        const double yv = y.lo + (y.hi - y.lo) * i / 4.0;
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" text-anchor=\"middle\">{:.3g}</text>\n",
                         x.px(xv, kL, kW - kR), kH - kB + 14, xv);
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
                         kL - 4, y.px(yv, kH - kB, kT) + 3, yv);
    }
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                     (kL + kW - kR) / 2, kH - 12, xlabel);
    s += fmt::format(
        "<text x=\"14\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1f})\">{}</text>\n",
        (kT + kH - kB) / 2, (kT + kH - kB) / 2, ylabel);
    return s;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* style) {
    if (pts.empty()) return {};
    std::string s = "<polyline fill=\"none\" ";
    s += style;
    s += " points=\"";
    for (const auto& [x, y] : pts) s += fmt::format("{:.2f},{:.2f} ", x, y);
    s += "\"/>\n";
    return s;
}

}  // namespace

std::string bound_plot_svg(const GroupReport& g, std::size_t index) {
    const auto& a = g.aggregates.at(index);
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (!a.geo_mean[i]) continue;
        const double se = a.mult_se_factor[i].value_or(1.0);
        ymin = std::min(ymin, std::log10(*a.geo_mean[i] / se));
        ymax = std::max(ymax, std::log10(*a.geo_mean[i] * se));
    }
    std::string s = svg_open(fmt::format("{} {} bound", g.group, to_string(a.kind)));
    if (!std::isfinite(ymin) || a.times.size() < 2) return s + "</svg>\n";
    if (ymax - ymin < 1e-6) ymax = ymin + 1.0;
    const Axis xa{a.times.front(), a.times.back()}, ya{ymin, ymax};
    s += frame(xa, ya, "time (h)", "log10 operations");

    std::vector<std::pair<double, double>> mid, band_hi, band_lo;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (!a.geo_mean[i]) continue;
        const double se = a.mult_se_factor[i].value_or(1.0);
        const double x = xa.px(a.times[i], kL, kW - kR);
        mid.emplace_back(x, ya.px(std::log10(*a.geo_mean[i]), kH - kB, kT));
        band_hi.emplace_back(x, ya.px(std::log10(*a.geo_mean[i] * se), kH - kB, kT));
        band_lo.emplace_back(x, ya.px(std::log10(*a.geo_mean[i] / se), kH - kB, kT));
    }
    std::string poly = "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : band_hi) poly += fmt::format("{:.2f},{:.2f} ", x, y);
    for (auto it = band_lo.rbegin(); it != band_lo.rend(); ++it) poly += fmt::format("{:.2f},{:.2f} ", it->first, it->second);
    s += poly + "\"/>\n";
    s += polyline(mid, "stroke=\"#08519c\" stroke-width=\"2\"");

    const auto& tail = g.tails.at(index);
    if (tail) {
        std::vector<std::pair<double, double>> tl;
        const int n = 40;
        for (int i = 0; i <= n; ++i) {
            const double t = tail->window_start + (a.times.back() - tail->window_start) * i / n;
            const double v = tail->slope * t + tail->intercept;
            if (v > 0) tl.emplace_back(xa.px(t, kL, kW - kR), ya.px(std::log10(v), kH - kB, kT));
        }
        s += polyline(tl, "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
    }
    if (g.t_ness && *g.t_ness >= xa.lo && *g.t_ness <= xa.hi) {
        const double x = xa.px(*g.t_ness, kL, kW - kR);
        s += fmt::format("<line x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1}\" y2=\"{2}\" stroke=\"black\" "
                         "stroke-dasharray=\"2,3\"/>\n",
                         x, kT, kH - kB);
    }
    return s + "</svg>\n";
}

std::string allometry_svg(const AllometryReport& a) {
    std::string s = svg_open(fmt::format("{} allometry, slope {:.3f}", a.group, a.slope));
    if (a.log_mass.size() < 2) return s + "</svg>\n";
    const auto [xmin, xmax] = std::minmax_element(a.log_mass.begin(), a.log_mass.end());
    const auto [ymin, ymax] = std::minmax_element(a.log_ops.begin(), a.log_ops.end());
    const Axis xa{*xmin, *xmax == *xmin ? *xmin + 1 : *xmax}, ya{*ymin, *ymax == *ymin ? *ymin + 1 : *ymax};

    // Shade the points outside the fitted zone: pink before, grey after.
    bool seen_fit = false;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (a.in_fit[i]) {
            seen_fit = true;
            continue;
        }
        const double x0 = xa.px(a.log_mass[i > 0 ? i - 1 : i], kL, kW - kR);
        const double x1 = xa.px(a.log_mass[i], kL, kW - kR);
        s += fmt::format("<rect x=\"{:.2f}\" y=\"{}\" width=\"{:.2f}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.3\"/>\n",
                         std::min(x0, x1), kT, std::abs(x1 - x0), kH - kT - kB, seen_fit ? "#bbbbbb" : "#f4a6c0");
    }
    s += frame(xa, ya, "log10 M/M0", "log10 N_chem");
    for (std::size_t i = 0; i < a.times.size(); ++i)
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", xa.px(a.log_mass[i], kL, kW - kR),
                         ya.px(a.log_ops[i], kH - kB, kT), a.in_fit[i] ? "#08519c" : "#888888");
    std::vector<std::pair<double, double>> line;
    for (double x : {xa.lo, xa.hi}) line.emplace_back(xa.px(x, kL, kW - kR), ya.px(a.slope * x + a.intercept, kH - kB, kT));
    s += polyline(line, "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
    return s + "</svg>\n";
}

}  // namespace slimecap::report
