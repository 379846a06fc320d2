#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slimecap/bounds.hpp"
#include "slimecap/constants.hpp"

namespace slimecap {

/// M = rho_m A l in grams.
std::vector<double> mass_series(std::span<const double> areas_cm2, const PhysicalConstants& c = {});

struct AllometryZones {
    double acclimation_end = 0.0;  // h
    double boundary_start = 0.0;   // h
};

struct AllometryReport {
    std::string group;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    AllometryZones zones;
    double m0 = 0.0;                 // g
    std::vector<double> times;       // h
    std::vector<double> log_mass;    // log10(M/M0)
    std::vector<double> log_ops;     // log10(N_chem)
    std::vector<bool> in_fit;        // point lies in the intermediate zone
};

/// Log-log regression of the chemical bound against normalized mass on the
/// intermediate zone. Without an override, the acclimation zone ends at the
/// first point whose 5-point local slope lies within 15% of the median local
/// slope and the boundary zone starts at `t_ness` (or never). Needs >= 5
/// intermediate points.
AllometryReport allometric_fit(const BoundSeries& n_chem, std::span<const double> mass_g,
                               std::optional<double> t_ness = std::nullopt,
                               std::optional<AllometryZones> zones = std::nullopt);

}  // namespace slimecap
