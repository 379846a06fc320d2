#include "slimecap/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slimecap/stats.hpp"

namespace slimecap {

std::vector<double> mass_series(std::span<const double> areas_cm2, const PhysicalConstants& c) {
    std::vector<double> m;
    m.reserve(areas_cm2.size());
    for (double a : areas_cm2) {
        if (a < 0) throw DataError("mass_series: negative area");
        m.push_back(c.rho_m * a * c.thickness_l);
    }
    return m;
}

AllometryReport allometric_fit(const BoundSeries& n_chem, std::span<const double> mass_g,
                               std::optional<double> t_ness, std::optional<AllometryZones> zones) {
    if (n_chem.times.size() != mass_g.size() || n_chem.cumulative_ops.size() != mass_g.size())
        throw DataError("allometric_fit: bound and mass series differ in length");
    AllometryReport r;
    r.group = n_chem.sample_id;
    // Zero values (t = 0 of the bound) have no logarithm and are left out.
    std::vector<double> t, m, n;
    for (std::size_t i = 0; i < mass_g.size(); ++i) {
        if (n_chem.cumulative_ops[i] > 0 && mass_g[i] > 0) {
            t.push_back(n_chem.times[i]);
            m.push_back(mass_g[i]);
            n.push_back(n_chem.cumulative_ops[i]);
        }
    }
    if (t.size() < 5) throw DataError("allometric_fit: fewer than 5 positive points");
    r.m0 = *std::max_element(m.begin(), m.end());
    if (*std::min_element(m.begin(), m.end()) == r.m0) throw DataError("allometric_fit: degenerate (constant) mass");
    r.times = t;
    for (std::size_t i = 0; i < t.size(); ++i) {
        r.log_mass.push_back(std::log10(m[i] / r.m0));
        r.log_ops.push_back(std::log10(n[i]));
    }

    if (zones) {
        r.zones = *zones;
    } else {
        const std::size_t k = t.size();
        std::vector<double> local(k, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 2; i + 2 < k; ++i) {
            const std::span<const double> x(r.log_mass.data() + i - 2, 5), y(r.log_ops.data() + i - 2, 5);
            if (x.back() - x.front() <= 1e-12) continue;
            local[i] = fit_line(x, y).slope;
        }
        std::vector<double> finite;
        for (double s : local)
            if (std::isfinite(s)) finite.push_back(s);
        r.zones.acclimation_end = t.front();
        if (!finite.empty()) {
            std::nth_element(finite.begin(), finite.begin() + static_cast<std::ptrdiff_t>(finite.size() / 2),
                             finite.end());
            const double med = finite[finite.size() / 2];
            for (std::size_t i = 0; i < k; ++i) {
                if (std::isfinite(local[i]) && std::abs(local[i] - med) <= 0.15 * std::abs(med)) {
                    r.zones.acclimation_end = t[i];
                    break;
                }
            }
        }
        r.zones.boundary_start = t_ness.value_or(t.back());
        if (r.zones.boundary_start <= r.zones.acclimation_end) r.zones.boundary_start = t.back();
    }
    if (!(r.zones.acclimation_end < r.zones.boundary_start))
        throw UsageError("allometric_fit: acclimation zone must end before the boundary zone");

    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const bool in = t[i] >= r.zones.acclimation_end - 1e-9 && t[i] <= r.zones.boundary_start + 1e-9;
        r.in_fit.push_back(in);
        if (in) {
            x.push_back(r.log_mass[i]);
            y.push_back(r.log_ops[i]);
        }
    }
    if (x.size() < 5) throw DataError("allometric_fit: fewer than 5 points in the intermediate zone");
    const LineFit lf = fit_line(x, y);
    r.slope = lf.slope;
    r.intercept = lf.intercept;
    r.r_squared = lf.r_squared;
    return r;
}

}  // namespace slimecap
