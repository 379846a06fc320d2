// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <array>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "slimecap/bounds.hpp"
#include "slimecap/growthfit.hpp"
#include "slimecap/morphometry.hpp"
#include "slimecap/ness.hpp"
#include "slimecap/oscillators.hpp"
#include "slimecap/pipeline.hpp"

using namespace slimecap;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Check energy_spot_checks() {
    Check c;
    const double eh = hydro_energy(100.0);
    c.expect(rel(eh, 1.25e-32) <= 0.01, fmt::format("hydro_energy(100 cm) = {:.4e} J", eh));
    const double eq = qo_energy(20.0);
    c.expect(rel(eq, 1.33e-16) <= 0.01, fmt::format("qo_energy(20 cm2) = {:.4e} J", eq));
    const double kev = eq / 1.602176634e-19 / 1e3;
    c.expect(rel(kev, 0.827) <= 0.01, fmt::format("qo_energy(20 cm2) = {:.4f} keV", kev));
    c.detail = c.ok ? fmt::format("E_hydro {:.4e} J, E_QO {:.4e} J = {:.4f} keV", eh, eq, kev) : c.detail;
    return c;
}

Check atp_shape() {
    Check c;
    const double v = atp_shape_integral();
    const double exact = std::log(std::cosh(1.472)) / 1.472 + 0.1;
    c.expect(std::abs(v - 0.664) <= 0.001, fmt::format("integral {:.6f}", v));
    c.expect(std::abs(v - exact) <= 1e-9, fmt::format("vs analytic diff {:.2e}", std::abs(v - exact)));
    if (c.ok) c.detail = fmt::format("{:.10f} vs analytic {:.10f}", v, exact);
    return c;
}

Check oscillator_ratios() {
    Check c;
    auto iso = [](int dims, int modes) {
        ModeSpectrum s;
        s.dims = dims;
        for (int i = 0; i < modes; ++i) s.modes.push_back({1.0, 1});
        return mean_ratio_enumerate(s, 200);
    };
    const double r1 = iso(1, 1), r2 = iso(2, 1), r3 = iso(3, 1), r9 = iso(1, 9);
    c.expect(std::abs(r1 - 0.5) <= 1e-12, fmt::format("1D {:.6f}", r1));
    c.expect(std::abs(r2 - 2.0 / 3.0) <= 0.005, fmt::format("2D {:.6f}", r2));
    c.expect(std::abs(r3 - 0.75) <= 0.005, fmt::format("3D {:.6f}", r3));
    c.expect(std::abs(r9 - 0.9) <= 0.005, fmt::format("nine 1D {:.6f}", r9));
    // Independent brute force at a small cutoff for the same statistic.
    const double bf = oracle::brute_force_ratio({{1.0, 3, 12}});
    ModeSpectrum s3;
    s3.dims = 3;
    s3.modes.push_back({1.0, 1});
    c.expect(std::abs(mean_ratio_enumerate(s3, 12) - bf) <= 1e-12, "3D enumeration disagrees with brute force");
    const double tc = three_coupled_ratio(1.0, 1.0);
    c.expect(std::abs(tc - 45.0 / 56.0) <= 1e-15, fmt::format("three_coupled(1,1) = {:.17g}", tc));
    const double hi = three_coupled_ratio(1e9, 1.0), lo = three_coupled_ratio(1e-9, 1.0);
    c.expect(std::abs(hi - 0.75) <= 1e-6, fmt::format("limit w->inf {:.9f}", hi));
    c.expect(std::abs(lo - 6.0 / 7.0) <= 1e-6, fmt::format("limit w->0 {:.9f}", lo));
    if (c.ok)
        c.detail = fmt::format("1D {:.4f} 2D {:.4f} 3D {:.4f} 9x1D {:.4f} 3-coupled {:.6f} limits {:.6f}/{:.6f}", r1,
                               r2, r3, r9, tc, hi, lo);
    return c;
}

Check ring_spectra() {
    Check c;
    const double m = 1.3, w = 2.0, k = 0.7;
    double worst = 0.0;
    for (int eta : {3, 4, 5}) {
        const auto ev = ring_stiffness_eigenvalues(eta, m, w, k);
        // Circulant closed form computed here, not through the library.
        std::vector<double> cf;
        for (int j = 0; j < eta; ++j) cf.push_back(m * w * w + 2 * k * (1 - std::cos(2 * std::numbers::pi * j / eta)));
        std::sort(cf.begin(), cf.end());
        for (int j = 0; j < eta; ++j) worst = std::max(worst, rel(std::sqrt(ev[j] / m), std::sqrt(cf[j] / m)));
        const auto spec = ring_mode_spectrum(eta, m, w, k);
        c.expect(spec.max_degeneracy() == 2, fmt::format("eta {} max degeneracy {}", eta, spec.max_degeneracy()));
    }
    c.expect(worst <= 1e-10, fmt::format("frequency mismatch {:.2e}", worst));
    if (c.ok) c.detail = fmt::format("max relative frequency error {:.2e}, G = 2 for eta 3,4,5", worst);
    return c;
}

Check scaling_law() {
    Check c;
    const double day = 86400.0;
    const auto fast = slime_scaling(1e-3, day, 1e-3);
    const auto slow = slime_scaling(1e-3 / 3600.0, day, 1e-3);
    c.expect(fast.t_slime >= 2.5e-15 && fast.t_slime <= 2.8e-15, fmt::format("t_slime(1 mm/s) {:.4e}", fast.t_slime));
    c.expect(slow.t_slime >= 2.0e-6 && slow.t_slime <= 2.2e-6, fmt::format("t_slime(1 mm/h) {:.4e}", slow.t_slime));
    c.expect(slow.motional_ops >= 0.9e22 && fast.motional_ops <= 1.4e29,
             fmt::format("motional ops {:.3e} .. {:.3e}", slow.motional_ops, fast.motional_ops));
    if (c.ok)
        c.detail = fmt::format("t_slime {:.4e} s / {:.4e} s, ops {:.3e} .. {:.3e}", fast.t_slime, slow.t_slime,
                               slow.motional_ops, fast.motional_ops);
    return c;
}

Check ness_analytics() {
    Check c;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ua(1, 100), ub(0.1, 2), ug(2, 40);
    const double exact = oracle::ness_offset();
    double worst_off = 0.0, worst_exact = 0.0, worst_frac = 0.0;
    for (int i = 0; i < 100; ++i) {
        const SigmoidParams p{ua(rng), ub(rng), ug(rng)};
        const auto r = detect_ness(p);
        const double off = (r.t_ness - p.inflection) * p.rate;
        worst_off = std::max(worst_off, std::abs(off - 3.2046));
        worst_exact = std::max(worst_exact, std::abs(off - exact));
        worst_frac = std::max(worst_frac, std::abs(r.area_fraction_at_cutoff - 0.961));
    }
    c.expect(worst_off <= 1e-3, fmt::format("max |offset - 3.2046| {:.2e}", worst_off));
    c.expect(worst_exact <= 1e-3, fmt::format("max |offset - root| {:.2e}", worst_exact));
    c.expect(worst_frac <= 0.005, fmt::format("max |fraction - 0.961| {:.2e}", worst_frac));
    if (c.ok)
        c.detail = fmt::format("exact root {:.6f}; worst deviation {:.2e} (vs 3.2046 {:.2e}), fraction {:.2e}", exact,
                               worst_exact, worst_off, worst_frac);
    return c;
}

Check tail_intercepts() {
    Check c;
    const auto grid = time_grid(0.0, 72.0, 0.5);
    double worst = 0.0, min_r2 = 1.0;
    const SigmoidParams area_sets[] = {{20, 0.5, 10}, {5, 1.2, 6}, {60, 0.3, 15}};
    const SigmoidParams perim_sets[] = {{100, 0.5, 12}, {30, 0.8, 8}, {200, 0.35, 14}};
    for (int i = 0; i < 3; ++i) {
        const GrowthCurve a = area_sets[i], p = perim_sets[i];
        for (BoundKind kind : {BoundKind::Hydro, BoundKind::Chem, BoundKind::QO}) {
            const auto series = make_bound_series(kind, a, p, grid);
            const GrowthCurve& fit = kind == BoundKind::Hydro ? p : a;
            const auto tail = tail_linear_fit(series, default_tail_window(fit, 72.0, 0.5));
            const auto chk = intercept_consistency(fit, tail);
            worst = std::max(worst, chk.relative_error);
            min_r2 = std::min(min_r2, tail.r_squared);
            c.expect(chk.pass, fmt::format("set {} {} intercept {:.4f} vs {:.4f}", i, to_string(kind), chk.observed,
                                           chk.expected));
        }
    }
    const BiSigmoidParams bi{{10, 0.6, 8}, {15, 0.4, 30}};
    const auto bseries = make_bound_series(BoundKind::Chem, bi, bi, grid);
    const auto btail = tail_linear_fit(bseries, default_tail_window(bi, 72.0, 0.5));
    const double weighted = (10 * 8 + 15 * 30) / 25.0;
    const double berr = rel(btail.x_intercept, weighted);
    c.expect(berr <= 0.02, fmt::format("bi-sigmoid intercept {:.4f} vs {:.4f}", btail.x_intercept, weighted));
    min_r2 = std::min(min_r2, btail.r_squared);
    c.expect(min_r2 > 0.95, fmt::format("min tail R2 {:.5f}", min_r2));
    if (c.ok)
        c.detail = fmt::format("single-phase worst error {:.2e}; bi-sigmoid {:.4f} vs {:.4f}; min R2 {:.6f}", worst,
                               btail.x_intercept, weighted, min_r2);
    return c;
}

Check oracle_equivalence() {
    Check c;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ua(1, 100), ub(0.1, 2), ug(2, 40), coin(0, 1);
    const PhysicalConstants k;
    const double t = 24.0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        GrowthCurve fit;
        std::vector<std::array<double, 3>> phases;
        if (coin(rng) < 0.5) {
            const SigmoidParams s{ua(rng), ub(rng), ug(rng)};
            fit = s;
            phases.push_back({s.amplitude, s.rate, s.inflection});
        } else {
            SigmoidParams s1{ua(rng), ub(rng), ug(rng)}, s2{ua(rng), ub(rng), ug(rng)};
            if (s1.inflection > s2.inflection) std::swap(s1, s2);
            fit = BiSigmoidParams{s1, s2};
            phases.push_back({s1.amplitude, s1.rate, s1.inflection});
            phases.push_back({s2.amplitude, s2.rate, s2.inflection});
        }
        auto value = [&](double th) {
            double v = 0;
            for (const auto& ph : phases) v += oracle::logistic(ph[0], ph[1], ph[2], th);
            return v;
        };
        // Rates in ops/s from the constants, integrated over seconds.
        const double integral_s = oracle::trapezoid(value, 0.0, t, 96000) * 3600.0;
        const double hydro_ref = 0.017 / 0.045 * integral_s;
        const double chem_ref = 0.664 * 0.0612 * 0.01 / (std::numbers::pi * oracle::kHbar) * integral_s;
        const double qo_ref = 2e5 / 1e-11 * integral_s;
        worst = std::max({worst, rel(hydro_bound(fit, t, k), hydro_ref), rel(chem_bound(fit, t, k), chem_ref),
                          rel(qo_bound(fit, t, k), qo_ref)});
    }
    c.expect(worst <= 1e-4, fmt::format("hydro/chem/qo worst {:.2e}", worst));

    double worst_ke = 0.0;
    for (int i = 0; i < 20; ++i) {
        const SigmoidParams a{ua(rng), ub(rng), ug(rng)};
        const SigmoidParams p{ua(rng) * 3, ub(rng), ug(rng)};
        const double f = 0.01 + 0.2 * coin(rng);
        const double closed = ke_bound_closed(a, p, f, t, k);
        const double ref = oracle::ke_time_domain(a.amplitude, a.rate, a.inflection, p.amplitude, p.rate,
                                                  p.inflection, f, t, 96000);
        worst_ke = std::max(worst_ke, rel(closed, ref));
    }
    c.expect(worst_ke <= 1e-4, fmt::format("KE closed vs time domain worst {:.2e}", worst_ke));

    double worst_num = 0.0;
    const std::pair<SigmoidParams, SigmoidParams> smooth[] = {
        {{20, 0.5, 10}, {60, 0.5, 10}}, {{15, 0.4, 12}, {80, 0.3, 14}}, {{30, 0.6, 9}, {100, 0.45, 11}}};
    for (const auto& [a, p] : smooth) {
        const auto grid = time_grid(0.0, t, 0.5);
        const double f = 0.1;
        std::vector<double> area, speed, frac(grid.size(), f);
        for (double x : grid) {
            area.push_back(eval_sigmoid(a, x));
            speed.push_back(sigmoid_derivative(p, x));
        }
        const auto num = ke_bound_numeric(grid, area, speed, frac, k, 0.5);
        const double closed = ke_bound_closed(a, p, f, t, k) - ke_bound_closed(a, p, f, 0.5, k);
        worst_num = std::max(worst_num, rel(num.cumulative_ops.back(), closed));
    }
    c.expect(worst_num <= 0.02, fmt::format("numeric KE vs closed worst {:.2e}", worst_num));
    if (c.ok)
        c.detail = fmt::format("closed vs trapezoid {:.2e}; KE closed vs time domain {:.2e}; KE numeric {:.2e}", worst,
                               worst_ke, worst_num);
    return c;
}

Check morphometry() {
    Check c;
    // Koch curve, depth 6, 3^6 px base.
    const auto pts = oracle::koch(6, 729.0);
    const auto pix = oracle::rasterize(pts, 2.0, 2.0);
    std::vector<Pixel> koch;
    int w = 0, h = 0;
    for (const auto& [x, y] : pix) {
        koch.push_back({x, y});
        w = std::max(w, x + 3);
        h = std::max(h, y + 3);
    }
    const auto kf = box_count_dimension(koch, default_box_sizes(w, h));
    const double koch_exact = std::log(4.0) / std::log(3.0);
    c.expect(std::abs(kf.d_f - koch_exact) <= 0.05, fmt::format("Koch d_f {:.4f}", kf.d_f));

    std::vector<Pixel> line;
    for (int x = 0; x < 512; ++x) line.push_back({x, 100});
    const auto lf = box_count_dimension(line, {2, 4, 8, 16, 32});
    c.expect(std::abs(lf.d_f - 1.0) <= 0.05, fmt::format("line d_f {:.4f}", lf.d_f));

    const double scale = 2.54 / 1600;
    BinaryMask disk(520, 520, scale);
    for (int y = 0; y < 520; ++y)
        for (int x = 0; x < 520; ++x)
            if (std::hypot(x - 259.5, y - 259.5) <= 200.0) disk.set(x, y);
    const auto dc = circularity(disk.area(), boundary_length(disk));
    c.expect(dc && *dc >= 0.95 && *dc <= 1.05, fmt::format("disk circularity {:.4f}", dc.value_or(-1)));

    BinaryMask sq(140, 140, scale);
    for (int y = 20; y < 120; ++y)
        for (int x = 20; x < 120; ++x) sq.set(x, y);
    const auto sc = circularity(sq.area(), boundary_length(sq));
    c.expect(sc && rel(*sc, std::numbers::pi / 4) <= 0.02, fmt::format("square circularity {:.4f}", sc.value_or(-1)));
    if (c.ok)
        c.detail = fmt::format("Koch {:.4f} (exact {:.4f}), line {:.4f}, disk C {:.4f}, square C {:.4f}", kf.d_f,
                               koch_exact, lf.d_f, *dc, *sc);
    return c;
}

Check fit_quality() {
    Check c;
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto t = time_grid(0.0, 24.0, 0.5);
    double min_area = 1, min_perim = 1, min_circ = 1;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a, p, circ;
        for (double x : t) {
            a.push_back(eval_sigmoid({20, 0.5, 10}, x) * (1 + 0.02 * noise(rng)));
            p.push_back(eval_sigmoid({100, 0.4, 11}, x) * (1 + 0.02 * noise(rng)));
            circ.push_back((0.9 - 0.7 / (1.0 + std::exp(-0.8 * (x - 6)))) * (1 + 0.02 * noise(rng)));
        }
        min_area = std::min(min_area, fit_sigmoid(t, a).r_squared);
        min_perim = std::min(min_perim, fit_sigmoid(t, p).r_squared);
        min_circ = std::min(min_circ, fit_circularity(t, circ, 1).r_squared);
    }
    c.expect(min_area > 0.97, fmt::format("area R2 {:.5f}", min_area));
    c.expect(min_perim > 0.97, fmt::format("perimeter R2 {:.5f}", min_perim));
    c.expect(min_circ >= 0.96, fmt::format("circularity R2 {:.5f}", min_circ));
    if (c.ok)
        c.detail = fmt::format("min R2 over 20 noisy series: area {:.5f}, perimeter {:.5f}, circularity {:.5f}",
                               min_area, min_perim, min_circ);
    return c;
}

Check order_hierarchy() {
    Check c;
    // Area settles early; the perimeter keeps extending afterwards as the
    // network branches. A -> 20 cm^2, P -> 100 cm.
    const SigmoidParams a{20.0, 1.0, 6.0};
    const SigmoidParams p{100.0, 0.6, 14.0};
    const auto grid = time_grid(0.0, 24.0, 0.5);
    std::vector<double> area;
    for (double x : grid) area.push_back(eval_sigmoid(a, x));
    const double f = f_avg(grid, area, GrowthCurve{p});
    const double hydro = hydro_bound(p, 24.0), chem = chem_bound(a, 24.0), qo = qo_bound(a, 24.0);
    const double ke = ke_bound_closed(a, p, f, 24.0);
    c.expect(chem / qo >= 1e10, fmt::format("chem/qo {:.3e}", chem / qo));
    c.expect(hydro < ke && ke < qo && qo < chem,
             fmt::format("hydro {:.3e} ke {:.3e} qo {:.3e} chem {:.3e}", hydro, ke, qo, chem));
    if (c.ok)
        c.detail = fmt::format("hydro {:.3e} < ke {:.3e} < qo {:.3e} < chem {:.3e} (f_avg {:.3e}, chem/qo {:.2e})",
                               hydro, ke, qo, chem, f, chem / qo);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check determinism() {
    Check c;
    const fs::path root = fs::temp_directory_path() / "slimecap_acceptance_det";
    fs::remove_all(root);
    SyntheticSpec spec;
    spec.area_model = BiSigmoidParams{{10, 0.6, 8}, {15, 0.4, 30}};
    spec.perimeter_model = BiSigmoidParams{{50, 0.5, 9}, {70, 0.35, 31}};
    spec.noise_sigma_rel = 0.02;
    spec.n_samples = 4;
    spec.seed = 99;
    spec.t_end_h = 48;
    std::vector<std::map<std::string, std::string>> runs;
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = root / fmt::format("run{}", run);
        RunConfig cfg;
        cfg.input = run_synth(spec, dir / "synth");
        cfg.output_dir = dir / "out";
        cfg.t_end_h = 48;
        cfg.threads = run == 0 ? 1 : 3;
        run_analyze(cfg);
        std::map<std::string, std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
        runs.push_back(std::move(files));
    }
    c.expect(runs[0].size() == runs[1].size() && runs[0].size() > 5, fmt::format("file counts {} vs {}",
                                                                                 runs[0].size(), runs[1].size()));
    std::size_t diffs = 0;
    for (const auto& [name, body] : runs[0]) {
        auto it = runs[1].find(name);
        if (it == runs[1].end() || it->second != body) ++diffs;
    }
    c.expect(diffs == 0, fmt::format("{} files differ", diffs));
    if (c.ok) c.detail = fmt::format("{} files byte-identical across runs (1 vs 3 threads)", runs[0].size());
    fs::remove_all(root);
    return c;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Check()>> criteria[] = {
        {"energy spot-checks", energy_spot_checks},
        {"ATP shape constant", atp_shape},
        {"oscillator mean-energy ratios", oscillator_ratios},
        {"ring spectra", ring_spectra},
        {"scaling law", scaling_law},
        {"NESS analytics", ness_analytics},
        {"tail intercepts", tail_intercepts},
        {"oracle equivalence", oracle_equivalence},
        {"morphometry", morphometry},
        {"fit quality floor", fit_quality},
        {"order hierarchy", order_hierarchy},
        {"end-to-end determinism", determinism},
    };
    int failed = 0, n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        failed += !c.ok;
        std::printf("%s %2d %-30s %s\n", c.ok ? "PASS" : "FAIL", n, name, c.detail.c_str());
    }
    std::printf("%d/%d criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
