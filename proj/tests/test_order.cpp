#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace stochord;

TEST_CASE("identical laws have an empty violation set") {
    Cdf f = Cdf::normal(0.0, 1.0);
    ViolationSet s = violation_set(f, f);
    CHECK(s.empty());
    CHECK(s.measure() == 0.0);
    PartialDistances d = partial_distances(f, f);
    CHECK(d.measure == 0.0);
    CHECK(d.l1_partial == 0.0);
    CHECK(d.wp_partial == 0.0);
    CHECK_FALSE(d.l1_divergent);
    CHECK(precedence_prob(f, f) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("fully reversed pair: violation set is everything") {
    Cdf fx = Cdf::uniform(1.0, 2.0), fy = Cdf::uniform(0.0, 1.0);
    ViolationSet s = violation_set(fx, fy);
    CHECK(s.measure() == doctest::Approx(1.0).epsilon(1e-9));
    PartialDistances d = partial_distances(fx, fy);
    CHECK(d.l1_partial == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(d.wp_partial == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(precedence_prob(fx, fy) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("single-crossing uniform pair: closed-form diagnostics") {
    // q_X(u) = u, q_Y(u) = 0.25 + 0.5 u cross at u = 1/2
    Cdf fx = Cdf::uniform(0.0, 1.0), fy = Cdf::uniform(0.25, 0.75);
    ViolationSet s = violation_set(fx, fy);
    REQUIRE(s.intervals.size() == 1);
    CHECK(s.intervals[0].lo == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(s.intervals[0].hi == doctest::Approx(1.0).epsilon(1e-12));
    PartialDistances d = partial_distances(fx, fy);
    CHECK(d.measure == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(d.l1_partial == doctest::Approx(0.0625).epsilon(1e-6));
    CHECK(d.wp_partial == doctest::Approx(0.25 * 0.125 / 3.0).epsilon(1e-5));

    // x-space region {F_X < F_Y} = (0.5, 1) carries mass 1/2 under both laws
    ViolationMass vm = violation_mass(fx, fy);
    REQUIRE(vm.x_intervals.size() == 1);
    CHECK(vm.mass_x == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(vm.mass_y == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(partial_l1_xspace(fx, fy).value == doctest::Approx(0.0625).epsilon(1e-6));
}

TEST_CASE("normal vs cauchy: half-line violation set with divergent integrals") {
    Cdf fx = Cdf::normal(0.0, 1.0), fy = Cdf::cauchy(0.0, 1.0);
    ViolationSet s = violation_set(fx, fy);
    REQUIRE(s.intervals.size() == 1);
    CHECK(s.intervals[0].lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.intervals[0].hi == doctest::Approx(0.5).epsilon(1e-8));
    PartialDistances d = partial_distances(fx, fy);
    CHECK(d.measure == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(d.l1_divergent);
    CHECK(d.wp_divergent);
}

TEST_CASE("violation_mass refuses discontinuous inputs") {
    CHECK_THROWS_AS(violation_mass(Cdf::degenerate(0.0), Cdf::uniform(0.0, 1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(violation_mass(Cdf::uniform(0.0, 1.0), Cdf::empirical({1.0, 2.0})),
                    std::invalid_argument);
}

TEST_CASE("partial_distances validates p") {
    Cdf f = Cdf::uniform(0.0, 1.0);
    CHECK_THROWS_AS(partial_distances(f, f, 0.0, 0.5), std::domain_error);
    // p = 3 raises the gap to the third power
    Cdf fx = Cdf::uniform(1.0, 2.0), fy = Cdf::uniform(0.0, 1.0);
    PartialDistances d3 = partial_distances(fx, fy, 0.0, 3.0);
    CHECK(d3.wp_partial == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("precedence probability closed forms") {
    // competing exponentials: P{X <= Y} = rate_x / (rate_x + rate_y)
    CHECK(precedence_prob(Cdf::exponential(1.0), Cdf::exponential(0.5)) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(precedence_prob(Cdf::exponential(0.5), Cdf::exponential(1.0)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    // point mass in the middle of a uniform
    CHECK(precedence_prob(Cdf::degenerate(0.0), Cdf::uniform(-1.0, 1.0)) ==
          doctest::Approx(0.5).epsilon(1e-6));
    // disjoint supports
    CHECK(precedence_prob(Cdf::uniform(0.0, 1.0), Cdf::uniform(2.0, 3.0)) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coupled Monte Carlo precedence estimator") {
    Cdf f = Cdf::normal(0.0, 1.0);
    // comonotone coupling of X with itself: X <= Y always
    JointSampler comono = [f](std::mt19937_64& rng) {
        double u = stochord::detail::uniform01(rng);
        double x = f.quantile_left(u);
        return std::make_pair(x, x);
    };
    CoupledEstimate c = precedence_prob_coupled(comono, 10000, 5);
    CHECK(c.estimate == 1.0);
    CHECK(c.ci95 == 0.0);
    // antithetic coupling: X <= -X iff X <= 0
    JointSampler anti = [f](std::mt19937_64& rng) {
        double u = stochord::detail::uniform01(rng);
        return std::make_pair(f.quantile_left(u), -f.quantile_left(u));
    };
    CoupledEstimate a = precedence_prob_coupled(anti, 100000, 5);
    CHECK(std::fabs(a.estimate - 0.5) <= 3.0 * a.ci95 + 1e-12);
    // deterministic per seed
    CoupledEstimate a2 = precedence_prob_coupled(anti, 100000, 5);
    CHECK(a.estimate == a2.estimate);
    CHECK_THROWS_AS(precedence_prob_coupled(anti, 10, 5), std::domain_error);
}

TEST_CASE("independent samplers agree with the quadrature value") {
    Cdf fx = Cdf::exponential(1.0), fy = Cdf::exponential(0.5);
    double exact = 2.0 / 3.0;
    CoupledEstimate mc = precedence_prob_mc(fx, fy, 200000, 42);
    CHECK(std::fabs(mc.estimate - exact) <= 3.0 * mc.ci95);
    CoupledEstimate mc2 = precedence_prob_mc(fx, fy, 200000, 42);
    CHECK(mc.estimate == mc2.estimate);
    CoupledEstimate cp = precedence_prob_coupled(independent_sampler(fx, fy), 200000, 9);
    CHECK(std::fabs(cp.estimate - exact) <= 3.0 * cp.ci95);
}

// ---------------------------------------------------------------------------
// randomized property suites (the acceptance runner re-runs these with
// larger instance counts)

TEST_CASE("property: four-way inverse-mode measure equality") {
    auto r = support::prop_fourway(60, 101);
    INFO(r.detail);
    CHECK(r.ok());
}

TEST_CASE("property: x-mass equality for continuous pairs") {
    auto r = support::prop_mass_equality(60, 102);
    INFO(r.detail);
    CHECK(r.ok());
}

TEST_CASE("property: precedence lower bound from the violation measure") {
    auto r = support::prop_asp_bound(60, 103);
    INFO(r.detail);
    CHECK(r.ok());
}

TEST_CASE("property: Cauchy-Schwarz bound between partial distances") {
    auto r = support::prop_holder(60, 104);
    INFO(r.detail);
    CHECK(r.ok());
}

TEST_CASE("property: u-space and x-space partial L1 agree") {
    auto r = support::prop_w1_l1(60, 105);
    INFO(r.detail);
    CHECK(r.ok());
}

TEST_CASE("property: negation reverses the comparison") {
    auto r = support::prop_negation(60, 106);
    INFO(r.detail);
    CHECK(r.ok());
}

TEST_CASE("property: monotone transforms preserve the comparison") {
    auto r = support::prop_transform_closure(60, 107);
    INFO(r.detail);
    CHECK(r.ok());
}
