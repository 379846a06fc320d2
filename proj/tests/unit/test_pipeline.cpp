#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "slimecap/pipeline.hpp"

using namespace slimecap;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("slimecap_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run config parsing") {
    const auto cfg = parse_run_config(
        "input = data.csv\nt_end_h = 48\nthreads = 2\ngroup.s1 = young\nconstants.tau_sr = 2e-11\n"
        "plate_radius = 500\ninner_threshold = 90\n");
    CHECK(cfg.input == "data.csv");
    CHECK(cfg.t_end_h == 48);
    CHECK(cfg.threads == 2);
    CHECK(cfg.groups.at("s1") == "young");
    CHECK(cfg.constants.tau_sr == 2e-11);
    REQUIRE(cfg.plate.has_value());
    CHECK(cfg.plate->radius == 500);
    CHECK(cfg.segmentation.inner_threshold == 90);
    CHECK_THROWS_AS(parse_run_config("colour = red\n"), UsageError);
    CHECK_THROWS_AS(parse_run_config("constants.speed_of_light = 3\n"), UsageError);
    CHECK_THROWS_AS(parse_run_config("t_end_h = soon\n"), UsageError);
    RunConfig bad;
    bad.t_end_h = -1;
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("synthetic data generation") {
    SyntheticSpec spec;
    spec.n_samples = 3;
    spec.noise_sigma_rel = 0.02;
    spec.seed = 8;
    const auto a = synth_csv(spec), b = synth_csv(spec);
    CHECK(a == b);
    const auto series = parse_morphology_csv(a);
    REQUIRE(series.size() == 3);
    std::set<std::string> ids;
    for (const auto& s : series) ids.insert(s.sample_id);
    CHECK(ids.size() == 3);
    spec.seed = 9;
    CHECK(synth_csv(spec) != a);
    spec.noise_sigma_rel = -1;
    CHECK_THROWS_AS(synth_csv(spec), UsageError);
}

TEST_CASE("noiseless synth round-trips through the fit") {
    SyntheticSpec spec;
    const auto series = parse_morphology_csv(synth_csv(spec));
    const auto r = fit_sigmoid(series[0].times(), series[0].areas());
    const auto p = std::get<SigmoidParams>(r.params);
    CHECK(p.amplitude == Approx(20).epsilon(1e-6));
    CHECK(p.rate == Approx(0.5).epsilon(1e-6));
    CHECK(p.inflection == Approx(10).epsilon(1e-6));
}

TEST_CASE("group chem bound matches the generating parameters") {
    const auto dir = scratch("group");
    SyntheticSpec spec;
    spec.n_samples = 10;
    spec.noise_sigma_rel = 0.02;
    spec.seed = 21;
    RunConfig cfg;
    cfg.input = run_synth(spec, dir / "in");
    cfg.output_dir = dir / "out";
    const auto summary = run_analyze(cfg);
    CHECK(summary.samples == 10);
    CHECK(summary.failed == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "groups" / "synthetic_chem.json"));
    const double final = j["geo_mean"].back().get<double>();
    CHECK(final == Approx(chem_bound(SigmoidParams{20, 0.5, 10}, 24)).epsilon(0.05));
    for (const char* f : {"fits.json", "bounds.csv", "plots/synthetic_chem.svg", "allometry/synthetic.json"})
        CHECK(fs::exists(dir / "out" / f));
    fs::remove_all(dir);
}

TEST_CASE("bi-sigmoid synth over 48 h reports a second transition") {
    const auto dir = scratch("bisig");
    SyntheticSpec spec;
    spec.area_model = BiSigmoidParams{{10, 0.6, 8}, {15, 0.4, 30}};
    spec.perimeter_model = BiSigmoidParams{{50, 0.5, 9}, {70, 0.35, 31}};
    spec.t_end_h = 48;
    RunConfig cfg;
    cfg.input = run_synth(spec, dir / "in");
    cfg.output_dir = dir / "out";
    cfg.t_end_h = 48;
    run_analyze(cfg);
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "samples" / "synthetic_001.json"));
    REQUIRE(j["ness"].size() == 2);
    CHECK(j["ness"][1]["t_ness"].get<double>() == Approx(30 + 3.2038 / 0.4).epsilon(0.01));
    fs::remove_all(dir);
}

TEST_CASE("analyze rejects empty input") {
    const auto dir = scratch("empty");
    fs::create_directories(dir);
    std::ofstream(dir / "m.csv") << "sample_id,time_h,area_cm2,perimeter_cm\n";
    RunConfig cfg;
    cfg.input = dir / "m.csv";
    cfg.output_dir = dir / "out";
    CHECK_THROWS_AS(run_analyze(cfg), DataError);
    fs::remove_all(dir);
}

TEST_CASE("per-sample failures are skipped") {
    const auto dir = scratch("partial");
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "sample_id,time_h,area_cm2,perimeter_cm\n";
    for (int i = 0; i <= 48; ++i) {
        const double t = 0.5 * i;
        csv << "good," << t << ',' << 20 / (1 + std::exp(-0.5 * (t - 10))) << ','
            << 100 / (1 + std::exp(-0.5 * (t - 10))) << '\n';
    }
    for (int i = 0; i <= 48; ++i) csv << "flat," << 0.5 * i << ",3,9\n";
    std::ofstream(dir / "m.csv") << csv.str();
    RunConfig cfg;
    cfg.input = dir / "m.csv";
    cfg.output_dir = dir / "out";
    const auto summary = run_analyze(cfg);
    CHECK(summary.samples == 2);
    CHECK(summary.failed == 1);
    fs::remove_all(dir);
}

TEST_CASE("segment a synthetic image stack") {
    const auto dir = scratch("segment");
    SyntheticSpec spec;
    spec.images = true;
    spec.t_end_h = 12;
    spec.grid_step_h = 2;
    spec.image_dpi = 200;
    const auto csv = run_synth(spec, dir / "in");
    std::size_t images = 0;
    for (const auto& e : fs::directory_iterator(dir / "in" / "images")) images += e.path().extension() == ".png";

    RunConfig cfg;
    cfg.input = dir / "in" / "images";
    cfg.output_dir = dir / "seg";
    cfg.dpi = 200;
    const auto out = run_segment(cfg);
    const auto first = slurp(out);
    const auto series = load_morphology_csv(out);
    REQUIRE(series.size() == 1);
    CHECK(series[0].records.size() == images);

    const auto truth = parse_morphology_csv(slurp(csv));
    for (std::size_t i = 0; i < series[0].records.size(); ++i) {
        const double want = truth[0].records[i].area;
        if (want > 1.0) CHECK(series[0].records[i].area == Approx(want).epsilon(0.02));
    }
    run_segment(cfg);
    CHECK(slurp(out) == first);
    fs::remove_all(dir);
}
