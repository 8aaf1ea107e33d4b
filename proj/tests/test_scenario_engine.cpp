#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "scenmargin/oracles.hpp"
#include "scenmargin/scenario.hpp"

using namespace scenmargin;
using namespace scenmargin::testing;

TEST_CASE("unit-sphere samples have unit norm") {
    const auto s = sample_scenarios(UnitSphere{2}, 5, 1);
    CHECK(s.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(norm(s.row(i)) - 1.0) <= 1e-12);
}

TEST_CASE("finite empirical resampling draws only table rows") {
    const std::vector<Vector> rows{{1, 2}, {3, 4}, {5, 6}};
    const auto s = sample_scenarios(FiniteEmpirical{rows, "inline"}, 10, 2);
    CHECK(s.size() == 10);
    for (const auto& r : s.rows()) CHECK(std::find(rows.begin(), rows.end(), r) != rows.end());
}

TEST_CASE("sampling is deterministic and worker independent") {
    const DistributionSpec g = IsotropicGaussian{{0.5, -1.0, 2.0}, 0.7};
    const auto a = sample_scenarios(g, 10000, 42, 1);
    const auto b = sample_scenarios(g, 10000, 42, 1);
    const auto c = sample_scenarios(g, 10000, 42, 4);
    CHECK(a.data() == b.data());
    CHECK(a.data() == c.data());
    CHECK(sample_scenarios(g, 10000, 43).data() != a.data());
    // A prefix of a larger sample is the smaller sample.
    CHECK(sample_scenarios(g, 5000, 42).data() == a.slice(0, 5000).data());
}

TEST_CASE("uniform box samples stay inside the box") {
    const auto s = sample_scenarios(UniformBox{{-1, 2}, {0, 3}}, 2000, 5);
    for (const auto& r : s.rows()) {
        CHECK(r[0] >= -1.0);
        CHECK(r[0] < 0.0);
        CHECK(r[1] >= 2.0);
        CHECK(r[1] < 3.0);
    }
}

TEST_CASE("Monte Carlo at the origin never violates") {
    const auto c = circle_chain();
    const auto est = monte_carlo_violation(c.chain, Vector{0, 0}, UnitSphere{2}, 10000, 1, 0.05);
    CHECK(est.estimate == 0.0);
    CHECK(est.violations == 0);
    CHECK(est.upper <= 5e-4);
    CHECK(est.lower == 0.0);
}

TEST_CASE("Monte Carlo at the -30/-100 tangent vertex") {
    const auto c = circle_chain();
    const double r = 1.0 / std::cos(35.0 * std::numbers::pi / 180.0);
    const auto dir = unit(-65.0);
    const Vector x{r * dir[0], r * dir[1]};
    const auto est = monte_carlo_violation(c.chain, x, UnitSphere{2}, 1000000, 7, 0.05, 2);
    CHECK(std::abs(est.estimate - 35.0 / 180.0) <= 0.002);
    CHECK(est.lower <= 35.0 / 180.0);
    CHECK(est.upper >= 35.0 / 180.0);
}

TEST_CASE("single violating draw") {
    const auto c = circle_chain();
    const auto est = monte_carlo_violation(c.chain, Vector{0, 0}, FiniteEmpirical{{{1, 0}}, ""}, 1, 0, 0.05);
    CHECK(est.estimate == 0.0);
    const auto bad = monte_carlo_violation(c.chain, Vector{2, 0}, FiniteEmpirical{{{1, 0}}, ""}, 1, 0, 0.05);
    CHECK(bad.estimate == 1.0);
    CHECK(bad.lower == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(bad.upper == 1.0);
}

TEST_CASE("Clopper-Pearson endpoints") {
    const auto ci = clopper_pearson(0, 10, 0.05);
    CHECK(ci.lower == 0.0);
    CHECK(ci.upper == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-12));
    const auto mid = clopper_pearson(5, 10, 0.05);
    CHECK(mid.lower == doctest::Approx(0.18708602).epsilon(1e-7));
    CHECK(mid.upper == doctest::Approx(0.81291398).epsilon(1e-7));
    CHECK_THROWS_AS(clopper_pearson(11, 10, 0.05), InvalidArgument);
}

TEST_CASE("Monte Carlo is invariant to the worker count") {
    const auto c = two_component_chain("plus", "sin");
    const Vector x{0.6, -0.3};
    const auto a = monte_carlo_violation(c.chain, x, box4(), 300000, 11, 0.05, 1);
    const auto b = monte_carlo_violation(c.chain, x, box4(), 300000, 11, 0.05, 3);
    CHECK(a.violations == b.violations);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("Monte Carlo agrees with the arc oracle on 20 random points") {
    const auto c = circle_chain();
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> rad(1.0 + 1e-9, 2.0), ang(-std::numbers::pi, std::numbers::pi);
    for (int t = 0; t < 20; ++t) {
        const double r = rad(gen), a = ang(gen);
        const Vector x{r * std::cos(a), r * std::sin(a)};
        const double exact = exact_violation_circle(x);
        const auto est = monte_carlo_violation(c.chain, x, UnitSphere{2}, 50000, 100 + t);
        const double sd = std::sqrt(exact * (1.0 - exact) / 50000.0);
        CHECK(std::abs(est.estimate - exact) <= 4.0 * sd + 1e-12);
    }
}
