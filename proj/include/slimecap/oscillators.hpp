#pragma once

#include <cstdint>
#include <vector>

namespace slimecap {

/// Minimum orthogonalization time pi hbar / (2 <E>), s. Throws DataError for
/// non-positive energy.
double ml_min_time(double mean_energy_J, double hbar = 1.054571817e-34);

/// Macroscopic-limit operation rate E_max / (pi hbar), ops/s.
double ml_max_rate(double e_max_J, double hbar = 1.054571817e-34);

/// Gd / (Gd + 1).
double mean_ratio_formula(int max_degeneracy, int dims);

/// A set of normal modes grouped by distinct frequency. Each frequency family
/// spans degeneracy_per_dim * dims modes and has its own cutoff on the total
/// number of quanta in that family; E_max = sum_i cutoff_i * hbar * Omega_i.
struct ModeSpectrum {
    struct Mode {
        double frequency = 1.0;       // rad/s
        int degeneracy_per_dim = 1;
    };
    std::vector<Mode> modes;
    int dims = 1;
    std::vector<std::int64_t> cutoffs;  // per family; empty = use the enumeration default

    /// Largest degeneracy per dimension (G).
    int max_degeneracy() const;
    /// Total number of independent oscillator modes.
    int mode_count() const;
    void validate() const;
};

/// Exact ratio <E>/E_max with every occupation-number state of energy within
/// the family cutoffs weighted equally (ground state at zero). States are
/// counted level by level, family by family; the result is exact for
/// incommensurate frequencies because families are never merged.
/// `max_total_level` is the cutoff for families without an explicit one.
/// Throws DataError if a level count overflows long double, suggesting the
/// asymptotic formula.
double mean_ratio_enumerate(const ModeSpectrum& spectrum, std::int64_t max_total_level);

/// Brute-force product iteration over occupation numbers of `mode_count`
/// identical modes with total quanta <= cutoff, pruning by remaining budget.
/// Returns <n>/cutoff. Guarded at 1e8 states.
double mean_ratio_explicit(int mode_count, std::int64_t cutoff);

inline constexpr double kEnumerationStateLimit = 1e8;

/// (6/7 + 3 x / 4) / (1 + x), x = freq_ratio / cutoff_ratio, where freq_ratio
/// is the non-degenerate over the doubly-degenerate normal-mode frequency and
/// cutoff_ratio the degenerate over the non-degenerate family cutoff.
double three_coupled_ratio(double freq_ratio, double cutoff_ratio);

/// Eigenvalues of the ring stiffness matrix (diag m w^2 + 2k, ring neighbours -k), ascending.
std::vector<double> ring_stiffness_eigenvalues(int eta, double mass, double omega, double coupling);

/// Closed form m w^2 + 2k (1 - cos(2 pi j / eta)), ascending.
std::vector<double> circulant_eigenvalues(int eta, double mass, double omega, double coupling);

/// Normal modes of eta ring-coupled isotropic oscillators, frequencies
/// grouped with relative tolerance 1e-9.
ModeSpectrum ring_mode_spectrum(int eta, double mass, double omega, double coupling, int dims = 3);

struct ScalingLaw {
    double v_slime = 0.0;          // m/s
    double t_slime = 0.0;          // s, sqrt(G hbar / v^5)
    double ops_exponent_nu = 1.0;  // <= d_f <= 2
    double t_window = 0.0;         // s
    double time_ratio = 0.0;       // t_window / t_slime
    double scaling_ops = 0.0;      // time_ratio^nu
    double motional_ops = 0.0;     // (m v^2 / 2) / (pi hbar) * t_window
};

ScalingLaw slime_scaling(double v_slime_m_per_s, double t_window_s, double mass_kg, double nu = 1.0,
                         double hbar = 1.054571817e-34);

}  // namespace slimecap
