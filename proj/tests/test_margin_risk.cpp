#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "scenmargin/margin_risk.hpp"
#include "scenmargin/scenario.hpp"

using namespace scenmargin;
using namespace scenmargin::testing;

TEST_CASE("margin loss values") {
    const MarginSpec pw(0.5), ind(0.5, LossKind::indicator);
    CHECK(margin_loss(-0.5, pw) == 0.0);
    CHECK(margin_loss(-0.25, pw) == 0.5);
    CHECK(margin_loss(0.0, pw) == 1.0);
    CHECK(margin_loss(3.0, pw) == 1.0);
    CHECK(margin_loss(-0.5, ind) == 0.0);
    CHECK(margin_loss(-0.5 + 1e-12, ind) == 1.0);
    CHECK_THROWS_AS(MarginSpec(0.0), InvalidArgument);
    CHECK_THROWS_AS(MarginSpec(-1.0), InvalidArgument);
}

TEST_CASE("empirical risks on the circle chain") {
    const auto c = circle_chain();
    const auto s1 = ScenarioSet::from_rows({{1, 0}});
    const MarginSpec spec(0.5);

    const auto origin = empirical_risks(c.chain, Vector{0, 0}, sample_scenarios(UnitSphere{2}, 50, 3), spec);
    CHECK(origin.violation == 0.0);
    CHECK(origin.margin_risk == 0.0);

    const auto far = empirical_risks(c.chain, Vector{2, 0}, s1, spec);
    CHECK(far.violation == 1.0);
    CHECK(far.margin_risk == 1.0);

    const auto over = empirical_risks(c.chain, Vector{1.25, 0}, s1, spec);
    CHECK(over.violation == 1.0);
    CHECK(over.margin_risk == 1.0);

    const auto inside = empirical_risks(c.chain, Vector{0.9, 0}, s1, spec);
    CHECK(inside.violation == 0.0);
    CHECK(inside.margin_risk == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(inside.margin_violations == 1);
}

TEST_CASE("loss dominance, gamma monotonicity and range") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> val(-3.0, 3.0), gam(1e-3, 2.0);
    for (int t = 0; t < 20000; ++t) {
        const double v = val(gen), g = gam(gen), g2 = g + gam(gen);
        const double pw = margin_loss(v, MarginSpec(g));
        CHECK(violation_loss(v) <= pw);
        CHECK(pw <= margin_loss(v, MarginSpec(g, LossKind::indicator)));
        CHECK(pw <= margin_loss(v, MarginSpec(g2)));
        CHECK(pw >= 0.0);
        CHECK(pw <= 1.0);
    }
}

TEST_CASE("empirical violation is the mean of the indicator losses") {
    const auto c = circle_chain();
    const auto s = sample_scenarios(UnitSphere{2}, 997, 4);
    const Vector x{1.1, -0.4};
    const auto r = empirical_risks(c.chain, x, s, MarginSpec(0.3));
    std::size_t k = 0;
    for (std::size_t i = 0; i < s.size(); ++i) k += c.chain.evaluate(x, s.row(i)) > 0.0 ? 1 : 0;
    CHECK(r.violations == k);
    CHECK(r.violation == static_cast<double>(k) / 997.0);
    CHECK(r.margin_risk >= r.violation);
    CHECK(r.size() == 997);
}
