#include "slimecap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "report.hpp"
#include "slimecap/morphometry.hpp"
#include "slimecap/stats.hpp"
#include "slimecap/units.hpp"

namespace fs = std::filesystem;

namespace slimecap {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written by index so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

std::string safe_name(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return out.empty() ? "_" : out;
}

double to_number(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw UsageError("config: '" + key + "' expects a number");
    }
    if (pos != v.size()) throw UsageError("config: '" + key + "' expects a number");
    return d;
}

}  // namespace

// Configuration ------------------------------------------------------------------

void RunConfig::validate() const {
    if (!(t_end_h > 0)) throw UsageError("t_end must be positive");
    if (!(grid_step_h > 0)) throw UsageError("grid step must be positive");
    if (grid_step_h > t_end_h) throw UsageError("grid step exceeds t_end");
    if (threads < 1) throw UsageError("threads must be >= 1");
    if (!(dpi > 0)) throw UsageError("dpi must be positive");
    constants.validate();
    segmentation.validate();
}

RunConfig parse_run_config(const std::string& text, RunConfig cfg) {
    auto kv = parse_key_values(text);
    apply_segmentation_keys(cfg.segmentation, kv);
    PlateGeometry plate = cfg.plate.value_or(PlateGeometry{});
    bool plate_set = cfg.plate.has_value();
    auto& c = cfg.constants;
    const std::pair<const char*, double*> constant_fields[] = {
        {"hbar", &c.hbar},           {"n_hydro_local", &c.n_hydro_local},
        {"l_d", &c.l_d},             {"rho0", &c.rho0},
        {"atp_shape_integral", &c.atp_shape_integral},
        {"thickness_l", &c.thickness_l},
        {"rho_m", &c.rho_m},         {"n_actin", &c.n_actin},
        {"tau_sr", &c.tau_sr}};
    for (const auto& [key, value] : kv) {
        if (key == "input") {
            cfg.input = value;
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "grid_step_h") {
            cfg.grid_step_h = to_number(key, value);
        } else if (key == "t_end_h") {
            cfg.t_end_h = to_number(key, value);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(to_number(key, value));
        } else if (key == "dpi") {
            cfg.dpi = to_number(key, value);
        } else if (key == "plate_center_x") {
            plate.center_x = to_number(key, value);
            plate_set = true;
        } else if (key == "plate_center_y") {
            plate.center_y = to_number(key, value);
            plate_set = true;
        } else if (key == "plate_radius") {
            plate.radius = to_number(key, value);
            plate_set = true;
        } else if (key.rfind("group.", 0) == 0) {
            cfg.groups[key.substr(6)] = value;
        } else if (key.rfind("constants.", 0) == 0) {
            const std::string field = key.substr(10);
            auto it = std::find_if(std::begin(constant_fields), std::end(constant_fields),
                                   [&](const auto& f) { return field == f.first; });
            if (it == std::end(constant_fields)) throw UsageError("config: unknown constant '" + field + "'");
            *it->second = to_number(key, value);
        } else {
            throw UsageError("config: unknown key '" + key + "'");
        }
    }
    if (plate_set) cfg.plate = plate;
    return cfg;
}

RunConfig load_run_config(const fs::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), std::move(base));
}

// Synthetic data -------------------------------------------------------------------

void SyntheticSpec::validate() const {
    for (const auto& p : phases_of(area_model)) p.validate();
    for (const auto& p : phases_of(perimeter_model)) p.validate();
    if (!(noise_sigma_rel >= 0)) throw UsageError("synth: noise must be non-negative");
    if (n_samples < 1) throw UsageError("synth: n_samples must be >= 1");
    if (!(t_end_h > 0) || !(grid_step_h > 0)) throw UsageError("synth: t_end and grid step must be positive");
    if (!(image_dpi > 0)) throw UsageError("synth: image dpi must be positive");
}

namespace {

struct SynthSample {
    std::string id;
    std::vector<double> t, area, perimeter;
};

std::vector<SynthSample> synth_samples(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto grid = time_grid(0.0, spec.t_end_h, spec.grid_step_h);
    std::vector<SynthSample> out;
    for (int i = 0; i < spec.n_samples; ++i) {
        SynthSample s;
        s.id = fmt::format("{}_{:03d}", spec.group, i + 1);
        for (double t : grid) {
            const double a = evaluate(spec.area_model, t) * (1.0 + spec.noise_sigma_rel * normal(rng));
            const double p = evaluate(spec.perimeter_model, t) * (1.0 + spec.noise_sigma_rel * normal(rng));
            s.t.push_back(t);
            s.area.push_back(std::max(a, 0.0));
            s.perimeter.push_back(std::max(p, 0.0));
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::string synth_csv(const SyntheticSpec& spec) {
    std::string out = "sample_id,time_h,area_cm2,perimeter_cm,circularity,group\n";
    for (const auto& s : synth_samples(spec)) {
        for (std::size_t k = 0; k < s.t.size(); ++k) {
            const auto c = circularity(s.area[k], s.perimeter[k]);
            out += fmt::format("{},{},{},{},{},{}\n", s.id, s.t[k], s.area[k], s.perimeter[k],
                               c ? fmt::format("{}", *c) : std::string(), spec.group);
        }
    }
    return out;
}

fs::path run_synth(const SyntheticSpec& spec, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const fs::path csv = out_dir / "morphology.csv";
    write_text(csv, synth_csv(spec));
    if (!spec.images) return csv;

    // Growing dark disks on light agar, one plate per sample.
    const fs::path img_dir = out_dir / "images";
    fs::create_directories(img_dir);
    const double scale = units::cm_per_pixel(spec.image_dpi);
    const auto samples = synth_samples(spec);
    double a_max = 0.0;
    for (const auto& s : samples) a_max = std::max(a_max, *std::max_element(s.area.begin(), s.area.end()));
    const double r_max = std::sqrt(a_max / std::numbers::pi) / scale;
    const int size = 2 * static_cast<int>(std::ceil(r_max / 0.8 + 4.0)) + 3;
    const double c = (size - 1) / 2.0;
    for (const auto& s : samples) {
        for (std::size_t k = 0; k < s.t.size(); ++k) {
            const double r = std::sqrt(s.area[k] / std::numbers::pi) / scale;
            GrayImage img(size, size, 200);
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x)
                    if (std::hypot(x - c, y - c) <= r) img.at(x, y) = 40;
            const int minutes = static_cast<int>(std::lround(s.t[k] * 60.0));
            write_png(img_dir / fmt::format("{}_t{}.png", s.id, minutes), img);
        }
    }
    return csv;
}

// Segmentation ------------------------------------------------------------------------

fs::path run_segment(const RunConfig& cfg, Warnings* warnings) {
    cfg.validate();
    if (!fs::is_directory(cfg.input)) throw UsageError("segment: input must be a directory of PNG images");
    struct Item {
        std::string sample;
        int minutes;
        fs::path path;
    };
    std::vector<Item> items;
    for (const auto& e : fs::directory_iterator(cfg.input)) {
        if (!e.is_regular_file()) continue;
        if (auto name = parse_image_name(e.path().filename().string()))
            items.push_back({name->sample_id, name->minutes, e.path()});
    }
    if (items.empty()) throw DataError("segment: no <sample>_t<minutes>.png images in " + cfg.input.string());
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return a.sample != b.sample ? a.sample < b.sample : a.minutes < b.minutes;
    });
    for (std::size_t i = 1; i < items.size(); ++i)
        if (items[i].sample == items[i - 1].sample && items[i].minutes == items[i - 1].minutes)
            throw DataError("segment: duplicate timestamp for " + items[i].sample);

    const fs::path mask_dir = cfg.output_dir / "masks";
    fs::create_directories(mask_dir);
    std::vector<MorphologyRecord> records(items.size());
    std::vector<Warnings> local(items.size());
    parallel_for(items.size(), cfg.threads, [&](std::size_t i) {
        PlateImage img;
        img.pixels = read_png(items[i].path);
        img.dpi = cfg.dpi;
        img.timestamp = items[i].minutes / 60.0;
        if (cfg.plate) {
            img.center_x = cfg.plate->center_x;
            img.center_y = cfg.plate->center_y;
            img.radius = cfg.plate->radius;
        } else {
            detect_plate_circle(img);
        }
        BinaryMask mask = segment_plate(img, cfg.segmentation, &local[i]);
        GrayImage out(mask.width, mask.height);
        for (std::size_t k = 0; k < mask.bits.size(); ++k) out.pixels[k] = mask.bits[k] ? 255 : 0;
        write_png(mask_dir / items[i].path.filename(), out);
        records[i] = measure_mask(mask, img.timestamp, &local[i]);
    });

    std::string csv = "sample_id,time_h,area_cm2,perimeter_cm,circularity,fractal_dim,group\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (auto& w : local[i]) warn(warnings, items[i].path.filename().string() + ": " + w);
        const auto& r = records[i];
        auto g = cfg.groups.find(items[i].sample);
        csv += fmt::format("{},{},{},{},{},{},{}\n", items[i].sample, r.time, r.area, r.perimeter,
                           r.circularity ? fmt::format("{}", *r.circularity) : std::string(),
                           r.fractal_dim ? fmt::format("{}", *r.fractal_dim) : std::string(),
                           g == cfg.groups.end() ? std::string() : g->second);
    }
    fs::create_directories(cfg.output_dir);
    const fs::path path = cfg.output_dir / "morphology.csv";
    write_text(path, csv);
    return path;
}

// Analysis ------------------------------------------------------------------------------

namespace {

FitResult fit_or_best(std::span<const double> t, std::span<const double> y, const char* what, Warnings& w) {
    try {
        return fit_growth(t, y);
    } catch (const FitError& e) {
        warn(&w, std::string(what) + " fit did not converge; using the best iterate");
        return e.best();
    }
}

const GrowthCurve* curve_for(BoundKind kind, const GrowthCurve& area, const GrowthCurve& perimeter) {
    return kind == BoundKind::Hydro ? &perimeter : &area;
}

}  // namespace

SampleAnalysis analyze_sample(const MorphologySeries& series, const RunConfig& cfg) {
    SampleAnalysis s;
    s.sample_id = series.sample_id;
    auto g = cfg.groups.find(series.sample_id);
    s.group = g != cfg.groups.end() ? g->second : (series.group_label.empty() ? "all" : series.group_label);
    try {
        const auto t = series.times();
        const auto a = series.areas();
        const auto p = series.perimeters();
        s.fits.area = fit_or_best(t, a, "area", s.warnings);
        s.fits.perimeter = fit_or_best(t, p, "perimeter", s.warnings);
        const GrowthCurve area = s.fits.area.curve();
        const GrowthCurve perim = s.fits.perimeter.curve();

        // Points outside (0, 1.05] are discretization artefacts (tiny early
        // footprints); they are left out of the circularity fit.
        std::vector<double> ct, circ;
        for (const auto& r : series.records) {
            if (r.circularity && *r.circularity > 0 && *r.circularity <= kCircularityTolerance) {
                ct.push_back(r.time);
                circ.push_back(*r.circularity);
            }
        }
        if (circ.size() < series.records.size())
            warn(&s.warnings, fmt::format("circularity fit uses {} of {} points", circ.size(), series.records.size()));
        if (circ.size() >= 6) {
            try {
                const int phases = s.fits.area.model_kind == ModelKind::BiSigmoid ? 2 : 1;
                s.fits.circularity = fit_circularity(ct, circ, phases);
            } catch (const FitError& e) {
                warn(&s.warnings, "circularity fit did not converge; using the best iterate");
                s.fits.circularity = e.best();
            } catch (const Error& e) {
                warn(&s.warnings, std::string("circularity fit skipped: ") + e.what());
            }
        }

        s.ness = detect_ness(area);

        try {
            const double f = f_avg(t, a, perim, 0.5);
            if (f > 0 && f < 1)
                s.f_avg = f;
            else
                warn(&s.warnings, fmt::format("f_avg = {} outside (0, 1); KE bound skipped", f));
        } catch (const Error& e) {
            warn(&s.warnings, std::string("f_avg undefined: ") + e.what());
        }

        const auto grid = time_grid(0.0, cfg.t_end_h, cfg.grid_step_h);
        for (BoundKind kind : {BoundKind::Hydro, BoundKind::Chem, BoundKind::KE, BoundKind::QO}) {
            if (kind == BoundKind::KE && !s.f_avg) continue;
            BoundReport br;
            br.series = make_bound_series(kind, area, perim, grid, cfg.constants, s.f_avg.value_or(0.0));
            br.series.sample_id = s.sample_id;
            // The kinetic bound saturates instead of growing linearly.
            if (kind != BoundKind::KE) {
                const GrowthCurve& fit = *curve_for(kind, area, perim);
                try {
                    const double w0 = default_tail_window(fit, cfg.t_end_h, cfg.grid_step_h);
                    br.tail = tail_linear_fit(br.series, w0);
                    br.intercept = intercept_consistency(fit, *br.tail);
                } catch (const Error& e) {
                    warn(&s.warnings, fmt::format("{} tail fit skipped: {}", to_string(kind), e.what()));
                }
            }
            s.bounds.push_back(std::move(br));
        }

        try {
            std::vector<double> v(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) v[i] = derivative(perim, t[i]);
            s.ke_numeric = ke_bound_numeric(t, a, v, {}, cfg.constants, 0.5, &s.warnings);
            s.ke_numeric->sample_id = s.sample_id;
        } catch (const Error& e) {
            warn(&s.warnings, std::string("numerical KE bound skipped: ") + e.what());
        }
        s.ok = true;
    } catch (const Error& e) {
        s.ok = false;
        s.error = e.what();
    }
    return s;
}

GroupReport analyze_group(const std::string& group, const std::vector<const SampleAnalysis*>& samples,
                          const RunConfig& cfg, Warnings* warnings) {
    GroupReport g;
    g.group = group;
    std::vector<double> first_ness;
    for (const auto* s : samples)
        if (s->ok && !s->ness.empty()) first_ness.push_back(s->ness.front().t_ness);
    if (!first_ness.empty()) g.t_ness = mean(first_ness);

    for (BoundKind kind : {BoundKind::Hydro, BoundKind::Chem, BoundKind::KE, BoundKind::QO}) {
        std::vector<BoundSeries> series;
        std::vector<double> windows;
        for (const auto* s : samples) {
            if (!s->ok) continue;
            for (const auto& br : s->bounds) {
                if (br.series.kind != kind) continue;
                series.push_back(br.series);
                if (br.tail) windows.push_back(br.tail->window_start);
            }
        }
        if (series.empty()) continue;
        GroupAggregate agg = aggregate_group(series, group);
        std::optional<LinearTailFit> tail;
        if (kind != BoundKind::KE && !windows.empty()) {
            BoundSeries gm;
            gm.kind = kind;
            for (std::size_t i = 0; i < agg.times.size(); ++i) {
                if (!agg.geo_mean[i]) continue;
                gm.times.push_back(agg.times[i]);
                gm.cumulative_ops.push_back(*agg.geo_mean[i]);
            }
            try {
                tail = tail_linear_fit(gm, mean(windows));
            } catch (const Error& e) {
                warn(warnings, fmt::format("group {} {} tail fit skipped: {}", group, to_string(kind), e.what()));
            }
        }
        g.aggregates.push_back(std::move(agg));
        g.tails.push_back(tail);
    }

    // Allometry on the group-aggregate chemical bound against geometric-mean mass.
    auto chem = std::find_if(g.aggregates.begin(), g.aggregates.end(),
                             [](const GroupAggregate& a) { return a.kind == BoundKind::Chem; });
    if (chem != g.aggregates.end()) {
        BoundSeries n;
        n.sample_id = group;
        n.kind = BoundKind::Chem;
        std::vector<double> mass;
        for (std::size_t i = 0; i < chem->times.size(); ++i) {
            if (!chem->geo_mean[i]) continue;
            std::vector<double> logs;
            for (const auto* s : samples) {
                if (!s->ok) continue;
                const double m = cfg.constants.rho_m * evaluate(s->fits.area.curve(), chem->times[i]) *
                                 cfg.constants.thickness_l;
                if (m > 0) logs.push_back(std::log(m));
            }
            if (logs.empty()) continue;
            n.times.push_back(chem->times[i]);
            n.cumulative_ops.push_back(*chem->geo_mean[i]);
            mass.push_back(std::exp(mean(logs)));
        }
        try {
            g.allometry = allometric_fit(n, mass, g.t_ness);
            g.allometry->group = group;
        } catch (const Error& e) {
            warn(warnings, fmt::format("group {} allometry skipped: {}", group, e.what()));
        }
    }
    return g;
}

AnalyzeSummary run_analyze(const RunConfig& cfg) {
    cfg.validate();
    AnalyzeSummary summary;
    fs::path csv = cfg.input;
    if (fs::is_directory(cfg.input)) csv = run_segment(cfg, &summary.warnings);
    const auto all = load_morphology_csv(csv, &summary.warnings);

    std::vector<SampleAnalysis> results(all.size());
    parallel_for(all.size(), cfg.threads, [&](std::size_t i) { results[i] = analyze_sample(all[i], cfg); });

    const fs::path out = cfg.output_dir;
    for (const char* d : {"samples", "groups", "allometry", "plots"}) fs::create_directories(out / d);

    report::json fits = report::json::array();
    std::string bounds_csv = report::kBoundsCsvHeader;
    std::vector<std::string> group_order;
    for (const auto& s : results) {
        ++summary.samples;
        if (!s.ok) {
            ++summary.failed;
            warn(&summary.warnings, fmt::format("sample {} failed: {}", s.sample_id, s.error));
        }
        for (const auto& w : s.warnings) warn(&summary.warnings, fmt::format("sample {}: {}", s.sample_id, w));
        write_text(out / "samples" / (safe_name(s.sample_id) + ".json"), report::sample_json(s).dump(2) + "\n");
        if (!s.ok) continue;
        auto add_fit = [&](const char* target, const FitResult& f) {
            auto j = report::fit_json(f);
            fits.push_back({{"sample_id", s.sample_id},
                            {"target", target},
                            {"model", j["model"]},
                            {"params", j["params"]},
                            {"r2", j["r2"]},
                            {"rmse", j["rmse"]}});
        };
        add_fit("area", s.fits.area);
        add_fit("perimeter", s.fits.perimeter);
        if (s.fits.circularity) add_fit("circularity", *s.fits.circularity);
        bounds_csv += report::bounds_csv_rows(s);
        if (std::find(group_order.begin(), group_order.end(), s.group) == group_order.end())
            group_order.push_back(s.group);
    }
    write_text(out / "fits.json", fits.dump(2) + "\n");
    write_text(out / "bounds.csv", bounds_csv);

    for (const auto& name : group_order) {
        std::vector<const SampleAnalysis*> members;
        for (const auto& s : results)
            if (s.ok && s.group == name) members.push_back(&s);
        const GroupReport g = analyze_group(name, members, cfg, &summary.warnings);
        for (std::size_t k = 0; k < g.aggregates.size(); ++k) {
            const std::string stem = safe_name(name) + "_" + to_string(g.aggregates[k].kind);
            write_text(out / "groups" / (stem + ".json"), report::group_aggregate_json(g, k).dump(2) + "\n");
            write_text(out / "plots" / (stem + ".svg"), report::bound_plot_svg(g, k));
        }
        if (g.allometry) {
            write_text(out / "allometry" / (safe_name(name) + ".json"),
                       report::allometry_json(*g.allometry).dump(2) + "\n");
            write_text(out / "allometry" / (safe_name(name) + ".svg"), report::allometry_svg(*g.allometry));
        }
        ++summary.groups;
    }
    if (summary.samples > 0 && summary.failed == summary.samples) throw DataError("analyze: every sample failed");
    return summary;
}

}  // namespace slimecap
