#pragma once

// Unit conversions. Lengths are stored in cm and times in hours throughout the
// library; everything that touches hbar goes through these helpers into SI.

namespace slimecap::units {

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kMetersPerCm = 1e-2;
inline constexpr double kSquareMetersPerSquareCm = 1e-4;
inline constexpr double kKgPerM3PerGPerCm3 = 1000.0;
inline constexpr double kCmPerInch = 2.54;
inline constexpr double kJoulesPerEv = 1.602176634e-19;

constexpr double hours_to_seconds(double h) { return h * kSecondsPerHour; }
constexpr double seconds_to_hours(double s) { return s / kSecondsPerHour; }
constexpr double cm_to_m(double cm) { return cm * kMetersPerCm; }
constexpr double cm2_to_m2(double cm2) { return cm2 * kSquareMetersPerSquareCm; }
constexpr double g_per_cm3_to_kg_per_m3(double rho) { return rho * kKgPerM3PerGPerCm3; }
constexpr double per_hour_to_per_second(double r) { return r / kSecondsPerHour; }
constexpr double cm_per_hour_to_m_per_s(double v) { return cm_to_m(v) / kSecondsPerHour; }
constexpr double joules_to_ev(double j) { return j / kJoulesPerEv; }

/// Pixel pitch of a scan at the given resolution.
constexpr double cm_per_pixel(double dpi) { return kCmPerInch / dpi; }

}  // namespace slimecap::units
