#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "slimecap/error.hpp"
#include "slimecap/oscillators.hpp"

using namespace slimecap;
using doctest::Approx;

TEST_CASE("Margolus-Levitin helpers") {
    const double hbar = 1.054571817e-34;
    CHECK(ml_min_time(std::numbers::pi * hbar / 2) == Approx(1.0));
    CHECK(ml_min_time(1.602176634e-19) == Approx(1.034e-15).epsilon(1e-3));
    CHECK(ml_min_time(2.0) == Approx(ml_min_time(1.0) / 2));
    CHECK_THROWS_AS(ml_min_time(0.0), DataError);
    CHECK(ml_max_rate(std::numbers::pi * hbar) == Approx(1.0));
    CHECK(ml_max_rate(0.0) == 0.0);
}

TEST_CASE("closed-form mean ratio") {
    CHECK(mean_ratio_formula(1, 1) == 0.5);
    CHECK(mean_ratio_formula(1, 3) == 0.75);
    CHECK(mean_ratio_formula(2, 3) == Approx(6.0 / 7.0));
}

TEST_CASE("enumeration of a single 1D mode is exactly one half") {
    ModeSpectrum s;
    s.modes.push_back({1.0, 1});
    for (int n : {1, 2, 7, 200}) CHECK(mean_ratio_enumerate(s, n) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("enumeration matches brute force") {
    ModeSpectrum s;
    s.dims = 2;
    s.modes.push_back({1.0, 1});
    CHECK(mean_ratio_enumerate(s, 15) == Approx(oracle::brute_force_ratio({{1.0, 2, 15}})).epsilon(1e-13));
    CHECK(mean_ratio_explicit(4, 10) == Approx(oracle::brute_force_ratio({{1.0, 4, 10}})).epsilon(1e-13));

    // Two incommensurate families with their own cutoffs.
    ModeSpectrum two;
    two.modes = {{1.0, 1}, {std::sqrt(2.0), 2}};
    two.cutoffs = {9, 6};
    const double bf = oracle::brute_force_ratio({{1.0, 1, 9}, {std::sqrt(2.0), 2, 6}});
    CHECK(mean_ratio_enumerate(two, 1) == Approx(bf).epsilon(1e-13));
}

TEST_CASE("enumeration converges toward the formula") {
    ModeSpectrum s;
    s.dims = 3;
    s.modes.push_back({1.0, 1});
    CHECK(mean_ratio_enumerate(s, 200) == Approx(0.75).epsilon(0.01));
    ModeSpectrum nine;
    for (int i = 0; i < 9; ++i) nine.modes.push_back({1.0, 1});
    CHECK(mean_ratio_enumerate(nine, 400) == Approx(0.9).epsilon(0.005));
}

TEST_CASE("enumerated ratio of small rings approaches eta d / (eta d + 1)") {
    for (int eta = 2; eta <= 4; ++eta) {
        for (int d = 1; d <= 2; ++d) {
            ModeSpectrum s;
            s.dims = d;
            s.modes.push_back({1.0, eta});
            const double m = eta * d;
            CHECK(mean_ratio_enumerate(s, 300) == Approx(m / (m + 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("explicit enumeration guard") {
    CHECK_THROWS_AS(mean_ratio_explicit(30, 1000), DataError);
}

TEST_CASE("three coupled oscillators") {
    CHECK(three_coupled_ratio(1, 1) == 45.0 / 56.0);
    CHECK(three_coupled_ratio(2, 1) == Approx((6.0 / 7 + 1.5) / 3));
    double prev = 1.0;
    for (double w : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double r = three_coupled_ratio(w, 1.0);
        CHECK(r > 0.75);
        CHECK(r < 6.0 / 7.0);
        CHECK(r < prev);
        prev = r;
    }
    // Equal frequencies and equal family cutoffs: the enumerated ratio is 45/56.
    ModeSpectrum split;
    split.dims = 3;
    split.modes = {{1.0, 1}, {1.0, 2}};
    split.cutoffs = {200, 200};
    CHECK(mean_ratio_enumerate(split, 1) == Approx(45.0 / 56.0).epsilon(1e-12));
}

TEST_CASE("ring spectra") {
    const double m = 2.0, w = 1.5, k = 0.8;
    const auto s3 = ring_mode_spectrum(3, m, w, k);
    REQUIRE(s3.modes.size() == 2);
    CHECK(s3.modes[0].frequency == Approx(w));
    CHECK(s3.modes[0].degeneracy_per_dim == 1);
    CHECK(s3.modes[1].frequency == Approx(std::sqrt(w * w + 3 * k / m)));
    CHECK(s3.modes[1].degeneracy_per_dim == 2);
    CHECK(s3.mode_count() == 9);

    const auto s4 = ring_mode_spectrum(4, m, w, k);
    REQUIRE(s4.modes.size() == 3);
    CHECK(s4.modes[0].degeneracy_per_dim == 1);
    CHECK(s4.modes[1].degeneracy_per_dim == 2);
    CHECK(s4.modes[2].degeneracy_per_dim == 1);

    for (int eta : {3, 4, 5}) {
        const auto a = ring_stiffness_eigenvalues(eta, m, w, k), b = circulant_eigenvalues(eta, m, w, k);
        for (int j = 0; j < eta; ++j) CHECK(a[j] == Approx(b[j]).epsilon(1e-12));
    }
}

TEST_CASE("slime scaling law") {
    const auto fast = slime_scaling(1e-3, 86400, 1e-3);
    CHECK(fast.t_slime == Approx(2.65e-15).epsilon(0.01));
    CHECK(fast.motional_ops == Approx(1.3e29).epsilon(0.01));
    const auto slow = slime_scaling(1e-3 / 3600, 86400, 1e-3);
    CHECK(slow.t_slime == Approx(2.1e-6).epsilon(0.02));
    CHECK(slow.motional_ops == Approx(1.0e22).epsilon(0.01));
    CHECK(fast.scaling_ops == Approx(fast.time_ratio));
    CHECK_THROWS(slime_scaling(-1, 1, 1));
}
