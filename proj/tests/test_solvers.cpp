#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "scenmargin/certificates.hpp"
#include "scenmargin/harness.hpp"
#include "scenmargin/oracles.hpp"
#include "scenmargin/solvers.hpp"

using namespace scenmargin;
using namespace scenmargin::testing;

namespace {

ScenarioSet fig1_scenarios() { return ScenarioSet::from_rows(circle_figure_scenarios()); }

double worst(const ConstraintChain& chain, const Vector& x, const ScenarioSet& s) {
    double w = -INFINITY;
    for (std::size_t i = 0; i < s.size(); ++i) w = std::max(w, chain.evaluate(x, s.row(i)));
    return w;
}

void check_sound(const ConstraintChain& chain, const ScenarioSet& s, const Domain& d, const SolveResult& r,
                 double tol) {
    CHECK(d.contains(r.x));
    CHECK(r.worst_value == worst(chain, r.x, s));
    if (r.status == FeasibilityStatus::margin_feasible) CHECK(r.worst_value <= -r.gamma + tol);
}

double grid_minimum(const ConstraintChain& chain, const ScenarioSet& s, const Domain& d, std::size_t per_axis) {
    double best = INFINITY;
    for (const auto& x : uniform_grid(d, per_axis)) best = std::min(best, worst(chain, x, s));
    return best;
}

}  // namespace

TEST_CASE("hard margin on the five-scenario circle instance") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    SolverConfig cfg;
    const auto r = solve_hard_margin(c.chain, s, 0.3, c.domain, cfg);
    CHECK(r.status == FeasibilityStatus::margin_feasible);
    CHECK(norm(r.x) <= 0.98994949 + 1e-9);
    CHECK(exact_violation_circle(r.x) == 0.0);
    check_sound(c.chain, s, c.domain, r, cfg.tolerance);
}

TEST_CASE("hard margin reports an infeasible candidate for gamma = 1.5") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    const auto r = solve_hard_margin(c.chain, s, 1.5, c.domain, SolverConfig{});
    CHECK(r.status != FeasibilityStatus::margin_feasible);
    CHECK(r.worst_value > -1.5);
    check_sound(c.chain, s, c.domain, r, 1e-9);
}

TEST_CASE("single half-plane is margin feasible deep along -theta") {
    const auto c = circle_chain();
    const auto s = ScenarioSet::from_rows({unit(20)});
    const auto r = solve_hard_margin(c.chain, s, 0.8, c.domain, SolverConfig{});
    CHECK(r.status == FeasibilityStatus::margin_feasible);
    const auto mm = solve_max_margin(c.chain, s, c.domain, SolverConfig{});
    // Minimum of theta^T x over [-2,2]^2 is -2(|cos|+|sin|).
    const auto u = unit(20);
    CHECK(mm.gamma == doctest::Approx(1.0 + 2.0 * (std::abs(u[0]) + std::abs(u[1]))).epsilon(1e-9));
}

TEST_CASE("soft margin on a hard-feasible instance has zero slack") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    SolverConfig cfg;
    const auto soft = solve_soft_margin(c.chain, s, 0.3, c.domain, cfg);
    const auto hard = solve_hard_margin(c.chain, s, 0.3, c.domain, cfg);
    REQUIRE(soft.objective.has_value());
    CHECK(*soft.objective <= 1e-9);
    CHECK(soft.status == hard.status);
    for (double xi : soft.slacks) CHECK(xi <= 1e-9);
}

TEST_CASE("soft margin slack with a fixed point") {
    const auto c = circle_chain();
    const auto s = ScenarioSet::from_rows({{0.6, 0.8}});
    const Vector x0{1.5, -0.25};
    const auto r = solve_soft_margin(c.chain, s, 0.4, Domain::singleton(x0), SolverConfig{});
    const double f = 0.6 * 1.5 - 0.8 * 0.25 - 1.0;
    REQUIRE(r.slacks.size() == 1);
    CHECK(r.slacks[0] == doctest::Approx(std::max(0.0, f + 0.4)).epsilon(1e-15));
    CHECK(r.x == x0);
}

TEST_CASE("soft margin beats hard margin on the ellipse tangent instance") {
    const auto e = halfplane_chain();
    const auto rows = read_scenario_csv(SCENMARGIN_TEST_DATA "/ellipse_tangents.csv");
    REQUIRE(rows.size() == 8);
    CHECK(rows == ellipse_tangent_scenarios());
    const auto set = ScenarioSet::from_rows(rows);
    SolverConfig cfg;
    const auto hard = solve_max_margin(e.chain, set, e.domain, cfg);
    double best = -INFINITY;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<Vector> rest = rows;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        best = std::max(best, solve_max_margin(e.chain, ScenarioSet::from_rows(rest), e.domain, cfg).gamma);
    }
    CHECK(best > hard.gamma + 0.1);
    const auto soft = solve_soft_margin(e.chain, set, best, e.domain, cfg);
    CHECK(*soft.objective > 0.0);
    // The hard solve cannot reach the soft margin.
    CHECK(solve_hard_margin(e.chain, set, best, e.domain, cfg).status != FeasibilityStatus::margin_feasible);
}

TEST_CASE("max margin with three symmetric tangents") {
    const auto c = circle_chain();
    const auto s = ScenarioSet::from_rows({unit(0), unit(120), unit(240)});
    const auto r = solve_max_margin(c.chain, s, c.domain, SolverConfig{});
    CHECK(r.gamma == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm(r.x) <= 1e-6);
    CHECK(-grid_minimum(c.chain, s, c.domain, 401) <= r.gamma + 1e-12);
    CHECK(r.status == FeasibilityStatus::margin_feasible);
}

TEST_CASE("duplicate scenarios do not change the max margin") {
    const auto c = circle_chain();
    const auto a = ScenarioSet::from_rows({unit(10), unit(130), unit(250)});
    const auto b = ScenarioSet::from_rows({unit(10), unit(130), unit(130), unit(250), unit(10)});
    const auto ra = solve_max_margin(c.chain, a, c.domain, SolverConfig{});
    const auto rb = solve_max_margin(c.chain, b, c.domain, SolverConfig{});
    CHECK(ra.gamma == doctest::Approx(rb.gamma).epsilon(1e-9));
}

TEST_CASE("heuristic matches a 400x400 grid oracle on random small instances") {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> count(3, 12);
    SolverConfig cfg;
    for (int t = 0; t < 10; ++t) {
        const auto desc = t % 2 == 0 ? circle_chain() : two_component_chain(t % 4 == 1 ? "max" : "plus", "sin");
        const DistributionSpec dist = t % 2 == 0 ? DistributionSpec{UnitSphere{2}} : box4();
        const auto s = sample_scenarios(dist, static_cast<std::size_t>(count(gen)), 1000 + t);
        cfg.seed = static_cast<std::uint64_t>(t);
        const auto r = solve_max_margin(desc.chain, s, desc.domain, cfg);
        const double heuristic = r.worst_value;
        const double grid = grid_minimum(desc.chain, s, desc.domain, 400);
        CHECK_MESSAGE(heuristic <= grid + 1e-3, "instance " << t);
    }
}

TEST_CASE("objective solves respect the margin and its monotonicity") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    SolverConfig cfg;
    const auto J = Objective::linear({1.0, 0.0});
    const auto r0 = solve_with_objective(c.chain, s, 0.0, c.domain, J, cfg);
    const auto r3 = solve_with_objective(c.chain, s, 0.3, c.domain, J, cfg);
    CHECK(r3.status == FeasibilityStatus::margin_feasible);
    CHECK(*r3.objective >= *r0.objective - 1e-9);
    // Grid oracle for the leftmost point of the margin polygon.
    double best = INFINITY;
    for (const auto& x : uniform_grid(c.domain, 801))
        if (worst(c.chain, x, s) <= -0.3) best = std::min(best, x[0]);
    CHECK(*r3.objective <= best + 1e-6);
    CHECK(*r3.objective >= best - 0.01);
}

TEST_CASE("standard solution sits on the -30/-100 vertex") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    const auto u = unit(-65);
    const auto r = solve_with_objective(c.chain, s, 0.0, c.domain, Objective::linear({-u[0], -u[1]}), SolverConfig{});
    const double rho = 1.0 / std::cos(35.0 * std::numbers::pi / 180.0);
    CHECK(norm(r.x) == doctest::Approx(rho).epsilon(1e-8));
    CHECK(std::abs(exact_violation_circle(r.x) - 35.0 / 180.0) <= 1e-6);
}

TEST_CASE("zero objective reduces to hard-margin feasibility") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    const auto r = solve_with_objective(c.chain, s, 0.3, c.domain, Objective::zero(), SolverConfig{});
    CHECK(r.status == FeasibilityStatus::margin_feasible);
    check_sound(c.chain, s, c.domain, r, 1e-9);
}

TEST_CASE("vanishing lambda recovers the fixed-gamma solution") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    const auto J = Objective::linear({1.0, 0.5});
    SolverConfig cfg;
    const auto fixed = solve_with_objective(c.chain, s, 0.3, c.domain, J, cfg);
    const auto tiny = solve_with_objective(c.chain, s, 0.3, c.domain, J, cfg, 1e-9);
    CHECK(tiny.status == FeasibilityStatus::margin_feasible);
    CHECK(J(tiny.x) == doctest::Approx(J(fixed.x)).epsilon(1e-5));
    const auto large = solve_with_objective(c.chain, s, 0.3, c.domain, J, cfg, 100.0);
    CHECK(large.achieved_margin() >= fixed.achieved_margin() - 1e-9);
}

TEST_CASE("regularized solve picks the origin when it is margin feasible") {
    const auto c = circle_chain();
    const auto s = fig1_scenarios();
    const auto r = solve_regularized(c.chain, s, 0.3, c.domain, {Vector{0, 0}}, SolverConfig{});
    CHECK(r.status == FeasibilityStatus::margin_feasible);
    CHECK(norm(r.x) <= 1e-6);
    CHECK(*r.lambda_bar == 1.0);

    const Vector x0{1.2, 0.4};
    const auto fixed = solve_regularized(c.chain, s, 0.3, Domain::singleton(x0), {Vector{0, 0}}, SolverConfig{});
    CHECK(*fixed.lambda_bar == lambda_bar(c.chain, x0, {Vector{0, 0}}));
}

TEST_CASE("regularized pick has the smaller a posteriori bound") {
    const auto c = circle_chain();
    const auto s = sample_scenarios(UnitSphere{2}, 200, 3);
    const auto far = Domain::box({1.5, 1.5}, {1.9, 1.9});
    const auto reg = solve_regularized(c.chain, s, 0.3, far, {Vector{0, 0}}, SolverConfig{});
    const Vector other{1.9, 1.9};
    const auto a = a_posteriori_bound(c.chain, reg.x, s, 0.3, 0.05, {Vector{0, 0}});
    const auto b = a_posteriori_bound(c.chain, other, s, 0.3, 0.05, {Vector{0, 0}});
    CHECK(a.term("complexity") <= b.term("complexity"));
}

TEST_CASE("integer coordinates stay integral") {
    const auto c = circle_chain();
    auto d = Domain::box({-3, -2}, {3, 2});
    d.integer = {true, false};
    const auto s = fig1_scenarios();
    const auto r = solve_with_objective(c.chain, s, 0.1, d, Objective::linear({-1.0, 0.2}), SolverConfig{});
    CHECK(d.contains(r.x));
    CHECK(r.x[0] == std::round(r.x[0]));
    check_sound(c.chain, s, d, r, 1e-9);

    const auto lookup = Objective::lookup(0, -3, {5, 4, 3, 0.5, 3, 4, 5});
    const auto rl = solve_with_objective(c.chain, s, 0.1, d, lookup, SolverConfig{});
    CHECK(rl.x[0] == 0.0);
}

TEST_CASE("solver results are deterministic and worker independent") {
    const auto c = two_component_chain("plus", "sin");
    const auto s = sample_scenarios(box4(), 40, 2);
    SolverConfig one, four;
    four.workers = 4;
    const auto a = solve_max_margin(c.chain, s, c.domain, one);
    const auto b = solve_max_margin(c.chain, s, c.domain, four);
    CHECK(a.x == b.x);
    CHECK(a.to_json() == b.to_json());
    const auto h1 = solve_hard_margin(c.chain, s, 0.1, c.domain, one);
    const auto h4 = solve_hard_margin(c.chain, s, 0.1, c.domain, four);
    CHECK(h1.x == h4.x);
}

TEST_CASE("fixed-budget procedure") {
    const auto c = circle_chain();
    const auto k = compute_constants(c.chain, c.domain, {UnitSphere{2}});
    const auto out = fixed_budget_procedure(c.chain, k, 1600, 0.5, 0.1, c.domain, Objective::zero(), UnitSphere{2}, 4,
                                            SolverConfig{});
    CHECK(out.gamma == doctest::Approx(0.2988772215622263).epsilon(1e-12));
    CHECK(out.solve.status == FeasibilityStatus::margin_feasible);
    CHECK(std::abs(out.certificate.raw_value - 0.5) <= 1e-10);

    const Vector x0{1.8, 0.0};
    const auto stuck = fixed_budget_procedure(c.chain, k, 1600, 0.5, 0.1, Domain::singleton(x0), Objective::zero(),
                                              UnitSphere{2}, 4, SolverConfig{});
    CHECK(stuck.solve.status == FeasibilityStatus::infeasible_candidate);
    CHECK(std::abs(stuck.certificate.raw_value - (stuck.solve.risk.margin_risk + 0.5)) <= 1e-10);
}

TEST_CASE("solver config and objective validation") {
    SolverConfig bad;
    bad.multistarts = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK_THROWS_AS(Objective::from_json({{"kind", "cubic"}}), InvalidArgument);
    const auto q = Objective::quadratic({1, 0, 0, 2}, {1, -1}, 3);
    CHECK(q(Vector{1, 2}) == 1 + 8 + 1 - 2 + 3);
    CHECK(Objective::from_json(q.to_json()).to_json() == q.to_json());
    CHECK(SolverConfig::from_json(SolverConfig{}.to_json()).to_json() == SolverConfig{}.to_json());
}
