#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slimecap/ness.hpp"

using namespace slimecap;
using doctest::Approx;

TEST_CASE("single sigmoid transition") {
    const SigmoidParams p{20, 0.5, 10};
    const auto r = detect_ness(p);
    CHECK(r.t_ness == Approx(10 + oracle::ness_offset() / 0.5).epsilon(1e-5));
    CHECK(r.t_max_rate == Approx(10).epsilon(1e-4));
    CHECK(r.area_fraction_at_cutoff == Approx(0.961).epsilon(0.005));
    CHECK(r.second_deriv_at_cutoff < 0);
    CHECK(r.rate_at_cutoff == Approx(0.15 * r.max_rate).epsilon(1e-3));
}

TEST_CASE("two-phase transitions") {
    const BiSigmoidParams p{{10, 0.6, 8}, {15, 0.4, 30}};
    const auto reports = detect_ness(GrowthCurve{p});
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].phase == 1);
    CHECK(reports[1].phase == 2);
    CHECK(reports[0].t_ness < reports[1].t_max_rate);
    CHECK(reports[1].t_ness == Approx(30 + oracle::ness_offset() / 0.4).epsilon(1e-3));
}

TEST_CASE("tail fit intercepts") {
    const auto grid = time_grid(0, 48, 0.5);
    const SigmoidParams a{20, 0.5, 10};
    const auto chem = make_bound_series(BoundKind::Chem, a, a, grid);
    const auto tail = tail_linear_fit(chem, 10 + 5 / 0.5);
    CHECK(tail.x_intercept == Approx(10).epsilon(0.02));
    CHECK(tail.r_squared > 0.95);
    const auto chk = intercept_consistency(a, tail);
    CHECK(chk.pass);
    CHECK(chk.regime == TailRegime::SinglePhase);
    CHECK(chk.relative_error < 0.02);
}

TEST_CASE("bi-sigmoid tail regimes") {
    const BiSigmoidParams p{{10, 0.6, 8}, {15, 0.4, 30}};
    const auto grid = time_grid(0, 72, 0.5);
    const auto s = make_bound_series(BoundKind::QO, p, p, grid);

    const auto late = tail_linear_fit(s, 55);
    const double weighted = (10 * 8 + 15 * 30) / 25.0;
    CHECK(late.x_intercept == Approx(weighted).epsilon(0.02));
    const auto ok = intercept_consistency(p, late);
    CHECK(ok.regime == TailRegime::BeyondBoth);
    CHECK(ok.pass);
    const auto against_second = intercept_consistency(p, late, InterceptReference::SecondInflection);
    CHECK_FALSE(against_second.pass);

    const auto mid = tail_linear_fit(s, 15, 20);
    CHECK(mid.x_intercept == Approx(8).epsilon(0.05));
    CHECK(intercept_consistency(p, mid).regime == TailRegime::BetweenPhases);
}

TEST_CASE("flat bound has no tail") {
    BoundSeries s;
    for (int i = 0; i < 10; ++i) {
        s.times.push_back(i);
        s.cumulative_ops.push_back(5.0);
    }
    CHECK_THROWS_AS(tail_linear_fit(s, 0), DataError);
    s.cumulative_ops.resize(3);
    s.times.resize(3);
    CHECK_THROWS_AS(tail_linear_fit(s, 0), DataError);
}

TEST_CASE("default tail window") {
    const SigmoidParams a{20, 0.5, 10};
    CHECK(default_tail_window(a, 48, 0.5) == Approx(20));
    // Settling time past t_end falls back to the last five samples.
    CHECK(default_tail_window(SigmoidParams{20, 0.1, 30}, 24, 0.5) == Approx(22));
    CHECK(to_string(TailRegime::BeyondBoth) == "beyond_both");
}
