#pragma once

#include <numbers>

#include "slimecap/units.hpp"

namespace slimecap {

/// Physical inputs to the four capacity bounds. Units are noted per field;
/// per-area and per-volume quantities are CGS (cm) to match morphology data.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;         // J s
    double n_hydro_local = 0.017;          // ops/s per oscillating segment (60 s period)
    double l_d = 0.045;                    // cm, pseudopod segment width
    double rho0 = 0.0612;                  // J/cm^3, ATP energy density at the front (2 mM)
    double atp_shape_integral = 0.664;     // int_0^1 tanh(1.472x)+0.1 dx
    double thickness_l = 0.01;             // cm
    double rho_m = 1.1;                    // g/cm^3
    double n_actin = 2e5;                  // fibers/cm^2 (2 per 1000 um^2)
    double tau_sr = 1e-11;                 // s, superradiant lifetime
    double seconds_per_hour = units::kSecondsPerHour;

    double pi_hbar() const { return std::numbers::pi * hbar; }

    /// ATP energy density in eV/cm^3 (derived, not stored).
    double rho0_ev_per_cm3() const { return units::joules_to_ev(rho0); }

    /// Throws DataError if any field is not strictly positive.
    void validate() const;
};

/// Newtonian gravitational constant, m^3 kg^-1 s^-2.
inline constexpr double kGravitationalConstant = 6.67430e-11;

}  // namespace slimecap
