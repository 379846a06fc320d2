#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "slimecap/bounds.hpp"
#include "slimecap/oscillators.hpp"

using namespace slimecap;
using doctest::Approx;

TEST_CASE("hydrodynamic rate and energy") {
    CHECK(hydro_rate(0) == 0.0);
    CHECK(hydro_rate(100) == Approx(37.777777).epsilon(1e-6));
    CHECK(hydro_rate(0.045) == Approx(0.017));
    CHECK(hydro_energy(100) == Approx(1.25e-32).epsilon(0.01));
    CHECK(hydro_energy(200) == Approx(2 * hydro_energy(100)));
    CHECK(hydro_energy(0) == 0.0);
    // Margolus-Levitin round trip.
    CHECK(ml_max_rate(hydro_energy(100)) == Approx(hydro_rate(100)).epsilon(1e-15));
}

TEST_CASE("hydro bound in the constant-perimeter limit") {
    // Very steep step just after t = 0.
    const SigmoidParams step{100, 200, 0.0};
    CHECK(hydro_bound(step, 24) == Approx(37.7777777 * 86400).epsilon(1e-3));
}

TEST_CASE("chem and qo constants") {
    CHECK(chem_rate(20) == Approx(2.45e31).epsilon(0.01));
    CHECK(qo_rate(20) == Approx(4e17));
    CHECK(qo_energy(20) / 1.602176634e-19 / 1e3 == Approx(0.827).epsilon(0.01));
    const SigmoidParams step{20, 200, 0.0};
    CHECK(chem_bound(step, 24) == Approx(2.45e31 * 86400).epsilon(0.01));
    CHECK(qo_bound(step, 24) == Approx(3.456e22).epsilon(1e-3));
}

TEST_CASE("atp shape integral") {
    CHECK(atp_shape_integral() == Approx(0.664).epsilon(0.0015));
    CHECK(std::abs(atp_shape_integral(1e-12, 0.0)) < 1e-9);
    CHECK(std::abs(atp_shape_integral(2.0, 0.3) - (std::log(std::cosh(2.0)) / 2.0 + 0.3)) < 1e-9);
}

TEST_CASE("T_{a,b} integral on [1,2] with a = b = 1") {
    const double exact = (-1.0 / (3 * 8) + 1.0 / (4 * 16)) - (-1.0 / 3 + 1.0 / 4);
    CHECK(exact == Approx(0.0572917).epsilon(1e-6));
    CHECK(ke_t_difference(1.0, 0.0, 1.0 + 1e-15, 2.0) == Approx(exact).epsilon(1e-10));
    CHECK(ke_t_integrand(2.0, 1.0, 0.0) == Approx(1.0 / 32));
}

TEST_CASE("KE closed form against time-domain quadrature") {
    const SigmoidParams a{20, 0.5, 10}, p{60, 0.5, 10};
    const double closed = ke_bound_closed(a, p, 0.1, 24);
    const double ref = oracle::ke_time_domain(20, 0.5, 10, 60, 0.5, 10, 0.1, 24, 100000);
    CHECK(closed == Approx(ref).epsilon(1e-4));
    CHECK(ke_bound_quadrature(a, p, 0.1, 24) == Approx(ref).epsilon(1e-6));
}

TEST_CASE("two-phase KE bound") {
    const SigmoidParams a{20, 0.5, 10}, p{60, 0.5, 10};
    const BiSigmoidParams a2{a, {0, 0.3, 20}}, p2{p, {0, 0.3, 20}};
    CHECK(ke_bound_bisigmoid(a2, p2, 0.1, 24) == Approx(ke_bound_closed(a, p, 0.1, 24)).epsilon(1e-6));
    const BiSigmoidParams flat{{0, 0.5, 10}, {0, 0.3, 20}};
    CHECK(ke_bound_bisigmoid(BiSigmoidParams{{10, 0.5, 8}, {5, 0.4, 20}}, flat, 0.1, 24) == 0.0);
    const BiSigmoidParams x{{10, 0.5, 8}, {5, 0.4, 20}}, y{{30, 0.6, 9}, {40, 0.3, 18}};
    const BiSigmoidParams xs{x.phase2, x.phase1}, ys{y.phase2, y.phase1};
    CHECK(ke_bound_quadrature(xs, ys, 0.1, 24) == Approx(ke_bound_bisigmoid(x, y, 0.1, 24)).epsilon(1e-12));
}

TEST_CASE("weighted fraction f_avg") {
    const auto t = time_grid(0, 10, 0.5);
    const std::vector<double> f(t.size(), 0.05), w(t.size(), 1.0);
    CHECK(weighted_time_average(t, f, w, 0.5, 10) == Approx(0.05));

    std::vector<double> half, wh;
    for (double x : t) {
        half.push_back(x <= 5 ? 0.1 : 0.0);
        wh.push_back(x <= 5 ? 1.0 : 1e-9);
    }
    CHECK(weighted_time_average(t, half, wh, 0.5, 10) == Approx(0.1).epsilon(1e-3));

    // Exponential area: the growth fraction is constant.
    const double lambda = 0.3;
    std::vector<double> area;
    for (double x : t) area.push_back(2.0 * std::exp(lambda * x));
    const double expect = 1 - std::exp(-lambda * 0.5);
    CHECK(f_avg(t, area, SigmoidParams{50, 0.4, 6}) == Approx(expect).epsilon(1e-10));
    CHECK(growth_fraction(area)[0] == 0.0);
}

TEST_CASE("numeric KE bound") {
    const SigmoidParams a{20, 0.5, 10}, p{60, 0.5, 10};
    auto run = [&](double step) {
        const auto t = time_grid(0, 24, step);
        std::vector<double> area, v, f(t.size(), 0.1);
        for (double x : t) {
            area.push_back(eval_sigmoid(a, x));
            v.push_back(sigmoid_derivative(p, x));
        }
        return ke_bound_numeric(t, area, v, f).cumulative_ops.back();
    };
    const double closed = ke_bound_closed(a, p, 0.1, 24) - ke_bound_closed(a, p, 0.1, 0.5);
    CHECK(run(0.5) == Approx(closed).epsilon(0.02));
    CHECK(std::abs(run(0.25) - run(0.5)) <= 0.005 * run(0.25));

    const auto t = time_grid(0, 24, 0.5);
    const std::vector<double> area(t.size(), 10.0), zero(t.size(), 0.0), f(t.size(), 0.1);
    CHECK(ke_bound_numeric(t, area, zero, f).cumulative_ops.back() == 0.0);
}

TEST_CASE("numeric KE resamples an irregular grid") {
    const std::vector<double> t{0, 0.5, 1.0, 1.6, 2.0, 2.5, 3.0};
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7}, v{1, 1, 1, 1, 1, 1, 1};
    Warnings w;
    const auto s = ke_bound_numeric(t, a, v, {}, {}, 0.5, &w);
    CHECK_FALSE(w.empty());
    CHECK(s.times.size() == 6);
    CHECK(s.times.front() == 0.5);
}

TEST_CASE("bound series carries energies") {
    const auto t = time_grid(0, 24, 0.5);
    const SigmoidParams a{20, 0.5, 10}, p{100, 0.5, 10};
    const auto s = make_bound_series(BoundKind::QO, a, p, t);
    REQUIRE(s.times.size() == t.size());
    CHECK(s.cumulative_ops.front() == 0.0);
    CHECK(s.energy_J.back() == Approx(std::numbers::pi * 1.054571817e-34 * s.rate_ops_per_s.back()));
    CHECK(s.cumulative_ops.back() == Approx(qo_bound(a, 24)));
    CHECK(bound_kind_from_string(to_string(BoundKind::KE)) == BoundKind::KE);
    CHECK_THROWS_AS(bound_kind_from_string("nope"), UsageError);
}

TEST_CASE("group aggregation") {
    auto series = [](double v) {
        BoundSeries s;
        s.times = {0, 1};
        s.cumulative_ops = {0, v};
        return s;
    };
    auto g = aggregate_group({series(10), series(1000)});
    CHECK(*g.geo_mean[1] == Approx(100));
    CHECK_FALSE(g.geo_mean[0].has_value());

    g = aggregate_group({series(7), series(7), series(7)});
    CHECK(*g.geo_mean[1] == Approx(7));
    CHECK(*g.mult_se_factor[1] == Approx(1.0));

    g = aggregate_group({series(std::exp(1.0)), series(std::exp(3.0))});
    CHECK(*g.geo_mean[1] == Approx(std::exp(2.0)));
    CHECK(*g.mult_se_factor[1] == Approx(std::exp(1.0)));
}

TEST_CASE("constants validation") {
    PhysicalConstants c;
    CHECK_NOTHROW(c.validate());
    c.tau_sr = 0;
    CHECK_THROWS_AS(c.validate(), DataError);
}
