#pragma once

// Serialization of analysis results: JSON documents, the bounds CSV and SVG plots.

#include <string>

#include <json.hpp>

#include "slimecap/pipeline.hpp"

namespace slimecap::report {

using nlohmann::json;

json fit_json(const FitResult& fit);
json ness_json(const NessReport& r);
json tail_json(const LinearTailFit& t);
json intercept_json(const InterceptCheck& c);
json sample_json(const SampleAnalysis& s);

/// Rows for one sample; header is kBoundsCsvHeader.
inline constexpr const char* kBoundsCsvHeader = "sample_id,kind,time_h,cum_ops,rate_ops_s,energy_J\n";
std::string bounds_csv_rows(const SampleAnalysis& s);

/// {group, kind, times[], geo_mean[], mult_se[], tail_fit{...}, t_ness}
json group_aggregate_json(const GroupReport& g, std::size_t index);
json allometry_json(const AllometryReport& a);

/// Log-scale plot of a group aggregate with its multiplicative SE band, NESS
/// marker (dotted) and tail fit (dashed).
std::string bound_plot_svg(const GroupReport& g, std::size_t index);

/// log10 N_chem against log10 M/M0 with shaded acclimation and boundary zones.
std::string allometry_svg(const AllometryReport& a);

}  // namespace slimecap::report
