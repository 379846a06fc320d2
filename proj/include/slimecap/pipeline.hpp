#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slimecap/bounds.hpp"
#include "slimecap/constants.hpp"
#include "slimecap/growthfit.hpp"
#include "slimecap/ingest.hpp"
#include "slimecap/ness.hpp"
#include "slimecap/scaling.hpp"

namespace slimecap {

struct PlateGeometry {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
};

struct RunConfig {
    std::filesystem::path input;          // morphology CSV or a directory of plate images
    std::filesystem::path output_dir = "slimecap_out";
    std::map<std::string, std::string> groups;  // sample_id -> group label (overrides the CSV column)
    PhysicalConstants constants;
    double grid_step_h = 0.5;
    double t_end_h = 24.0;
    int threads = 1;
    SegmentationConfig segmentation;
    double dpi = 1600.0;
    std::optional<PlateGeometry> plate;   // auto-detected when absent

    void validate() const;
};

/// Reads `key = value` lines. Recognised keys: input, output_dir, grid_step_h,
/// t_end_h, threads, dpi, plate_center_x, plate_center_y, plate_radius,
/// group.<sample_id>, constants.<field>, and the segmentation keys.
/// Unknown keys raise UsageError.
RunConfig parse_run_config(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

struct SyntheticSpec {
    GrowthCurve area_model = SigmoidParams{20.0, 0.5, 10.0};
    GrowthCurve perimeter_model = SigmoidParams{100.0, 0.5, 10.0};
    double noise_sigma_rel = 0.0;
    int n_samples = 1;
    std::uint64_t seed = 1;
    std::string group = "synthetic";
    double t_end_h = 24.0;
    double grid_step_h = 0.5;
    bool images = false;     // also rasterize growing disks
    double image_dpi = 200.0;

    void validate() const;
};

/// Morphology CSV text for a synthetic run; identical input gives identical bytes.
std::string synth_csv(const SyntheticSpec& spec);

/// Writes morphology.csv (and images/ when requested) under `out_dir`.
/// Returns the CSV path.
std::filesystem::path run_synth(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

/// Segments every `<sample_id>_t<minutes>.png` under cfg.input, writes
/// masks/ and morphology.csv under cfg.output_dir. Returns the CSV path.
std::filesystem::path run_segment(const RunConfig& cfg, Warnings* warnings = nullptr);

struct FitSummary {
    FitResult area;
    FitResult perimeter;
    std::optional<FitResult> circularity;
};

struct BoundReport {
    BoundSeries series;
    std::optional<LinearTailFit> tail;
    std::optional<InterceptCheck> intercept;
};

struct SampleAnalysis {
    std::string sample_id;
    std::string group;
    bool ok = false;
    std::string error;
    FitSummary fits;
    std::vector<NessReport> ness;
    std::optional<double> f_avg;
    std::vector<BoundReport> bounds;       // hydro, chem, ke, qo (those that succeeded)
    std::optional<BoundSeries> ke_numeric;
    Warnings warnings;
};

/// Fits, NESS, bounds and tail checks for one series on the [0, t_end] grid.
/// Failures are recorded in the result rather than thrown.
SampleAnalysis analyze_sample(const MorphologySeries& series, const RunConfig& cfg);

struct GroupReport {
    std::string group;
    std::vector<GroupAggregate> aggregates;
    std::vector<std::optional<LinearTailFit>> tails;  // parallel to aggregates
    std::optional<double> t_ness;                     // mean first transition over samples
    std::optional<AllometryReport> allometry;
};

GroupReport analyze_group(const std::string& group, const std::vector<const SampleAnalysis*>& samples,
                          const RunConfig& cfg, Warnings* warnings = nullptr);

struct AnalyzeSummary {
    int samples = 0;
    int failed = 0;
    int groups = 0;
    Warnings warnings;
};

/// Full analysis of cfg.input (images are segmented first). Writes fits.json,
/// samples/, bounds.csv, groups/, allometry/ and plots/ under cfg.output_dir.
/// Throws DataError when the input is empty or every sample fails.
AnalyzeSummary run_analyze(const RunConfig& cfg);

}  // namespace slimecap
