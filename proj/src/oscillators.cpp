#include "slimecap/oscillators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "slimecap/constants.hpp"
#include "slimecap/error.hpp"

namespace slimecap {

double ml_min_time(double mean_energy_J, double hbar) {
    if (!(mean_energy_J > 0)) throw DataError("ml_min_time: mean energy must be positive");
    return std::numbers::pi * hbar / (2.0 * mean_energy_J);
}

double ml_max_rate(double e_max_J, double hbar) {
    if (e_max_J < 0) throw DataError("ml_max_rate: energy must be non-negative");
    return e_max_J / (std::numbers::pi * hbar);
}

double mean_ratio_formula(int max_degeneracy, int dims) {
    if (max_degeneracy < 1 || dims < 1) throw UsageError("mean_ratio_formula: G and d must be >= 1");
    const double gd = static_cast<double>(max_degeneracy) * dims;
    return gd / (gd + 1.0);
}

int ModeSpectrum::max_degeneracy() const {
    int g = 0;
    for (const auto& m : modes) g = std::max(g, m.degeneracy_per_dim);
    return g;
}

int ModeSpectrum::mode_count() const {
    int n = 0;
    for (const auto& m : modes) n += m.degeneracy_per_dim * dims;
    return n;
}

void ModeSpectrum::validate() const {
    if (modes.empty()) throw UsageError("mode spectrum is empty");
    if (dims < 1) throw UsageError("mode spectrum: dims must be >= 1");
    for (const auto& m : modes)
        if (!(m.frequency > 0) || m.degeneracy_per_dim < 1)
            throw UsageError("mode spectrum: frequencies must be positive and degeneracies >= 1");
    if (!cutoffs.empty() && cutoffs.size() != modes.size())
        throw UsageError("mode spectrum: one cutoff per frequency family");
    for (auto c : cutoffs)
        if (c < 1) throw UsageError("mode spectrum: cutoffs must be >= 1");
}

namespace {

// Mean number of quanta over all states of `m` modes with total quanta <= n_max.
// Level counts C(n+m-1, m-1) are built up one level at a time.
long double family_mean_quanta(int m, std::int64_t n_max) {
    long double count = 1.0L;  // states at level 0
    long double states = 1.0L, quanta = 0.0L;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        count = count * static_cast<long double>(n + m - 1) / static_cast<long double>(n);
        if (!(count < 1e4900L))
            throw DataError("mean_ratio_enumerate: state count overflows; use mean_ratio_formula instead");
        states += count;
        quanta += count * static_cast<long double>(n);
    }
    return quanta / states;
}

}  // namespace

double mean_ratio_enumerate(const ModeSpectrum& spectrum, std::int64_t max_total_level) {
    spectrum.validate();
    if (max_total_level < 1) throw UsageError("mean_ratio_enumerate: cutoff must be >= 1");

    struct Family {
        double freq;
        int modes;
        std::int64_t cutoff;
    };
    std::vector<Family> fam;
    for (std::size_t i = 0; i < spectrum.modes.size(); ++i) {
        const auto& m = spectrum.modes[i];
        const std::int64_t cut = spectrum.cutoffs.empty() ? max_total_level : spectrum.cutoffs[i];
        const int count = m.degeneracy_per_dim * spectrum.dims;
        // Repeated frequencies without explicit cutoffs are one family.
        auto same = std::find_if(fam.begin(), fam.end(), [&](const Family& f) {
            return spectrum.cutoffs.empty() && std::abs(f.freq - m.frequency) <= 1e-9 * m.frequency;
        });
        if (same != fam.end())
            same->modes += count;
        else
            fam.push_back({m.frequency, count, cut});
    }
    // Families are independent under uniform weighting, so the mean energy is
    // the sum of per-family means.
    long double mean = 0.0L, emax = 0.0L;
    for (const auto& f : fam) {
        mean += static_cast<long double>(f.freq) * family_mean_quanta(f.modes, f.cutoff);
        emax += static_cast<long double>(f.freq) * static_cast<long double>(f.cutoff);
    }
    return static_cast<double>(mean / emax);
}

namespace {

void explicit_walk(int modes_left, std::int64_t budget, std::int64_t used, long double& states,
                   long double& quanta) {
    if (modes_left == 0) {
        states += 1.0L;
        quanta += static_cast<long double>(used);
        return;
    }
    for (std::int64_t n = 0; n <= budget; ++n) explicit_walk(modes_left - 1, budget - n, used + n, states, quanta);
}

}  // namespace

double mean_ratio_explicit(int mode_count, std::int64_t cutoff) {
    if (mode_count < 1 || cutoff < 1) throw UsageError("mean_ratio_explicit: need mode_count >= 1 and cutoff >= 1");
    // Number of states is C(cutoff + M, M).
    double total = 1.0;
    for (int k = 1; k <= mode_count; ++k) total = total * static_cast<double>(cutoff + k) / k;
    if (total > kEnumerationStateLimit)
        throw DataError("mean_ratio_explicit: " + std::to_string(total) +
                        " states exceed the enumeration limit; use mean_ratio_formula");
    long double states = 0.0L, quanta = 0.0L;
    explicit_walk(mode_count, cutoff, 0, states, quanta);
    return static_cast<double>(quanta / states / static_cast<long double>(cutoff));
}

double three_coupled_ratio(double freq_ratio, double cutoff_ratio) {
    if (!(freq_ratio > 0) || !(cutoff_ratio > 0)) throw UsageError("three_coupled_ratio: arguments must be positive");
    const double x = freq_ratio / cutoff_ratio;
    return (6.0 / 7.0 + 0.75 * x) / (1.0 + x);
}

std::vector<double> ring_stiffness_eigenvalues(int eta, double mass, double omega, double coupling) {
    if (eta < 2) throw UsageError("ring needs at least two oscillators");
    if (!(mass > 0) || !(omega > 0) || !(coupling > 0)) throw UsageError("ring parameters must be positive");
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(eta, eta);
    for (int i = 0; i < eta; ++i) {
        K(i, i) += mass * omega * omega + 2.0 * coupling;
        K(i, (i + 1) % eta) -= coupling;
        K(i, (i + eta - 1) % eta) -= coupling;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("ring eigen decomposition failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> circulant_eigenvalues(int eta, double mass, double omega, double coupling) {
    std::vector<double> out;
    for (int j = 0; j < eta; ++j)
        out.push_back(mass * omega * omega + 2.0 * coupling * (1.0 - std::cos(2.0 * std::numbers::pi * j / eta)));
    std::sort(out.begin(), out.end());
    return out;
}

ModeSpectrum ring_mode_spectrum(int eta, double mass, double omega, double coupling, int dims) {
    ModeSpectrum s;
    s.dims = dims;
    for (double lambda : ring_stiffness_eigenvalues(eta, mass, omega, coupling)) {
        const double f = std::sqrt(lambda / mass);
        if (!s.modes.empty() && std::abs(s.modes.back().frequency - f) <= 1e-9 * f)
            ++s.modes.back().degeneracy_per_dim;
        else
            s.modes.push_back({f, 1});
    }
    return s;
}

ScalingLaw slime_scaling(double v, double t_window_s, double mass_kg, double nu, double hbar) {
    if (!(v > 0)) throw UsageError("slime_scaling: speed must be positive");
    if (t_window_s < 0 || mass_kg < 0) throw UsageError("slime_scaling: window and mass must be non-negative");
    if (nu > 2.0) throw UsageError("slime_scaling: exponent nu cannot exceed 2");
    ScalingLaw s;
    s.v_slime = v;
    s.t_slime = std::sqrt(kGravitationalConstant * hbar / std::pow(v, 5));
    s.ops_exponent_nu = nu;
    s.t_window = t_window_s;
    s.time_ratio = t_window_s / s.t_slime;
    s.scaling_ops = std::pow(s.time_ratio, nu);
    s.motional_ops = 0.5 * mass_kg * v * v / (std::numbers::pi * hbar) * t_window_s;
    return s;
}

}  // namespace slimecap
