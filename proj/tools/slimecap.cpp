#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "slimecap/error.hpp"
#include "slimecap/oscillators.hpp"
#include "slimecap/pipeline.hpp"

namespace fs = std::filesystem;
using namespace slimecap;
using nlohmann::ordered_json;

namespace {

struct GlobalFlags {
    std::string config;
    std::string out;
    std::optional<double> t_end;
    std::optional<double> grid;
    std::optional<int> threads;
};

struct SegmentFlags {
    std::optional<int> inner_threshold, outer_threshold, median_radius;
    std::optional<double> radius_fraction, min_blob_area, dpi;
    bool organism_light = false;
};

RunConfig build_config(const GlobalFlags& g, const SegmentFlags& s, const std::string& input) {
    RunConfig cfg;
    if (!g.config.empty()) cfg = load_run_config(g.config);
    if (!input.empty()) cfg.input = input;
    if (!g.out.empty()) cfg.output_dir = g.out;
    if (g.t_end) cfg.t_end_h = *g.t_end;
    if (g.grid) cfg.grid_step_h = *g.grid;
    if (g.threads) cfg.threads = *g.threads;
    auto& seg = cfg.segmentation;
    if (s.inner_threshold) seg.inner_threshold = *s.inner_threshold;
    if (s.outer_threshold) seg.outer_threshold = *s.outer_threshold;
    if (s.median_radius) seg.median_filter_radius = *s.median_radius;
    if (s.radius_fraction) seg.radius_fraction = *s.radius_fraction;
    if (s.min_blob_area) seg.min_blob_area = *s.min_blob_area;
    if (s.organism_light) seg.organism_dark = false;
    if (s.dpi) cfg.dpi = *s.dpi;
    if (cfg.input.empty()) throw UsageError("no input given (positional argument or 'input' config key)");
    cfg.validate();
    return cfg;
}

void add_segment_flags(CLI::App* cmd, SegmentFlags& s) {
    cmd->add_option("--inner-threshold", s.inner_threshold, "Threshold inside radius_fraction of the plate");
    cmd->add_option("--outer-threshold", s.outer_threshold, "Threshold in the outer annulus");
    cmd->add_option("--radius-fraction", s.radius_fraction, "Inner zone radius as a fraction of the plate");
    cmd->add_option("--min-blob-area", s.min_blob_area, "Smallest kept component, cm^2");
    cmd->add_option("--median-radius", s.median_radius, "Median filter radius in px (0 disables)");
    cmd->add_flag("--organism-light", s.organism_light, "Organism is brighter than the agar");
    cmd->add_option("--dpi", s.dpi, "Scan resolution");
}

GrowthCurve parse_curve(const std::vector<double>& v, const char* what) {
    if (v.size() == 3) return SigmoidParams{v[0], v[1], v[2]};
    if (v.size() == 6) return BiSigmoidParams{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
    throw UsageError(fmt::format("--{} expects 3 (sigmoid) or 6 (bi-sigmoid) numbers", what));
}

void print_warnings(const Warnings& w) {
    for (const auto& m : w) std::cerr << "warning: " << m << '\n';
}

int cmd_oscillators(const std::vector<double>& three, const std::vector<int>& ratio, std::optional<double> speed,
                    double window_s, double mass_kg, double nu, bool as_json) {
    ordered_json out;
    std::ostringstream text;
    const bool any = !three.empty() || !ratio.empty() || speed;
    if (!three.empty()) {
        const double r = three_coupled_ratio(three[0], three[1]);
        out["three_coupled"] = {{"freq_ratio", three[0]}, {"cutoff_ratio", three[1]}, {"ratio", r}};
        text << fmt::format("three-coupled ratio (w={}, b={}): {:.4f}\n", three[0], three[1], r);
    }
    if (!ratio.empty()) {
        const double r = mean_ratio_formula(ratio[0], ratio[1]);
        out["ratio"] = {{"G", ratio[0]}, {"d", ratio[1]}, {"ratio", r}};
        text << fmt::format("Gd/(Gd+1) for G={}, d={}: {:.4f}\n", ratio[0], ratio[1], r);
    }
    if (speed) {
        const auto s = slime_scaling(*speed, window_s, mass_kg, nu);
        out["scaling"] = {{"v_m_per_s", s.v_slime},      {"t_slime_s", s.t_slime},
                          {"t_window_s", s.t_window},    {"time_ratio", s.time_ratio},
                          {"nu", s.ops_exponent_nu},     {"scaling_ops", s.scaling_ops},
                          {"motional_ops", s.motional_ops}};
        text << fmt::format("v = {:.4e} m/s  t_slime = {:.4e} s  t/t_slime = {:.4e}  motional ops = {:.4e}\n",
                            s.v_slime, s.t_slime, s.time_ratio, s.motional_ops);
    }
    if (!any) {
        // Default table: formula against exact enumeration for isotropic spectra.
        text << fmt::format("{:>3} {:>3} {:>10} {:>12}\n", "G", "d", "Gd/(Gd+1)", "enumerated");
        ordered_json rows = ordered_json::array();
        for (int g = 1; g <= 3; ++g) {
            for (int d = 1; d <= 3; ++d) {
                ModeSpectrum sp;
                sp.dims = d;
                sp.modes.push_back({1.0, g});
                const double f = mean_ratio_formula(g, d), e = mean_ratio_enumerate(sp, 200);
                rows.push_back({{"G", g}, {"d", d}, {"formula", f}, {"enumerated", e}});
                text << fmt::format("{:>3} {:>3} {:>10.4f} {:>12.4f}\n", g, d, f, e);
            }
        }
        out["ratios"] = rows;
        ordered_json scal = ordered_json::array();
        for (double v : {1e-3, 1e-3 / 3600.0}) {
            const auto s = slime_scaling(v, window_s, mass_kg, nu);
            scal.push_back({{"v_m_per_s", v}, {"t_slime_s", s.t_slime}, {"motional_ops", s.motional_ops}});
            text << fmt::format("v = {:.4e} m/s  t_slime = {:.4e} s  motional ops = {:.4e}\n", v, s.t_slime,
                                s.motional_ops);
        }
        out["scaling"] = scal;
    }
    if (as_json)
        std::cout << out.dump(2) << '\n';
    else
        std::cout << text.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Computational capacity bounds from organism morphology time-lapses"};
    app.require_subcommand(1);
    GlobalFlags g;
    app.add_option("--config", g.config, "key = value configuration file");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--t-end", g.t_end, "Analysis horizon, h");
    app.add_option("--grid", g.grid, "Bound grid step, h");
    app.add_option("--threads", g.threads, "Worker threads");

    SegmentFlags seg_flags;
    std::string input;

    auto* segment = app.add_subcommand("segment", "Segment plate images into masks and a morphology CSV");
    segment->add_option("input", input, "Directory of <sample_id>_t<minutes>.png images");
    add_segment_flags(segment, seg_flags);

    auto* analyze = app.add_subcommand("analyze", "Fit, detect NESS, compute bounds and write reports");
    analyze->add_option("input", input, "Morphology CSV or image directory");
    add_segment_flags(analyze, seg_flags);

    SyntheticSpec spec;
    std::vector<double> area_model, perim_model;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic morphology CSV");
    synth->add_option("--area", area_model, "alpha,beta,gamma[,alpha2,beta2,gamma2]")->delimiter(',');
    synth->add_option("--perimeter", perim_model, "delta,eta,theta[,delta2,eta2,theta2]")->delimiter(',');
    synth->add_option("--noise", spec.noise_sigma_rel, "Relative Gaussian noise sigma");
    synth->add_option("--samples", spec.n_samples, "Number of samples");
    synth->add_option("--seed", spec.seed, "RNG seed");
    synth->add_option("--group", spec.group, "Group label");
    synth->add_flag("--images", spec.images, "Also rasterize growing-disk plate images");
    synth->add_option("--image-dpi", spec.image_dpi, "Resolution of the rasterized images");

    std::vector<double> three;
    std::vector<int> ratio;
    std::optional<double> speed;
    double window_s = 86400.0, mass_kg = 1e-3, nu = 1.0;
    bool as_json = false;
    auto* osc = app.add_subcommand("oscillators", "Mean-energy ratios and slime scaling tables");
    osc->add_option("--three-coupled", three, "freq_ratio cutoff_ratio")->expected(2);
    osc->add_option("--ratio", ratio, "G d")->expected(2);
    osc->add_option("--scaling", speed, "Characteristic speed, m/s");
    osc->add_option("--window", window_s, "Time window for the scaling law, s");
    osc->add_option("--mass", mass_kg, "Mass for the motional bound, kg");
    osc->add_option("--nu", nu, "Operation exponent");
    osc->add_flag("--json", as_json, "Print JSON instead of text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (segment->parsed()) {
            Warnings w;
            const auto csv = run_segment(build_config(g, seg_flags, input), &w);
            print_warnings(w);
            std::cout << csv.string() << '\n';
        } else if (analyze->parsed()) {
            const auto summary = run_analyze(build_config(g, seg_flags, input));
            print_warnings(summary.warnings);
            std::cout << fmt::format("{} samples ({} failed), {} groups\n", summary.samples, summary.failed,
                                     summary.groups);
        } else if (synth->parsed()) {
            if (!area_model.empty()) spec.area_model = parse_curve(area_model, "area");
            if (!perim_model.empty()) spec.perimeter_model = parse_curve(perim_model, "perimeter");
            if (g.t_end) spec.t_end_h = *g.t_end;
            if (g.grid) spec.grid_step_h = *g.grid;
            std::cout << run_synth(spec, g.out.empty() ? fs::path("synth") : fs::path(g.out)).string() << '\n';
        } else if (osc->parsed()) {
            return cmd_oscillators(three, ratio, speed, window_s, mass_kg, nu, as_json);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Numerical);
    }
    return 0;
}
