#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "scenmargin/certificates.hpp"
#include "scenmargin/constants.hpp"
#include "scenmargin/oracles.hpp"
#include "scenmargin/scenario.hpp"

using namespace scenmargin;
using namespace scenmargin::testing;

TEST_CASE("single-candidate class averages to zero") {
    const auto c = circle_chain();
    const auto s = sample_scenarios(UnitSphere{2}, 50, 1);
    const auto est = estimate_empirical_rademacher(c.chain, s, {Vector{0.7, -0.2}}, 4096, 3);
    CHECK(std::abs(est.estimate) <= 3.0 * est.standard_error);
}

TEST_CASE("two constant functions match the exact random-walk expectation") {
    const double c = 0.8;
    // E|sum of N signs| / N from enumeration of all 2^N patterns.
    const std::vector<std::pair<std::size_t, double>> exact{{4, 0.375}, {8, 0.2734375}, {12, 0.2255859375}};
    for (const auto& [n, walk] : exact) {
        const std::vector<Vector> values{Vector(n, c), Vector(n, -c)};
        const auto est = estimate_rademacher_from_values(values, 20000, 5);
        CHECK(std::abs(est.estimate - c * walk) <= 3.0 * est.standard_error);
        double enumerated = 0.0;
        for (std::uint32_t p = 0; p < (1u << n); ++p) {
            const int ones = std::popcount(p);
            enumerated += std::abs(2 * ones - static_cast<int>(n));
        }
        CHECK(enumerated / std::pow(2.0, static_cast<double>(n)) / static_cast<double>(n) == walk);
    }
}

TEST_CASE("circle class stays below its empirical bound") {
    const auto c = circle_chain();
    const auto s = sample_scenarios(UnitSphere{2}, 50, 2);
    const auto k = compute_constants(c.chain, c.domain, {UnitSphere{2}});
    const auto est = estimate_empirical_rademacher(c.chain, s, uniform_grid(c.domain, 8), 2048, 4);
    CHECK(est.candidates == 64);
    const double bound = empirical_rademacher_bound(k, c.chain, s);
    CHECK(bound == doctest::Approx(2.0 * std::sqrt(2.0) / std::sqrt(50.0)).epsilon(1e-12));
    CHECK(est.estimate <= bound + 3.0 * est.standard_error);
}

TEST_CASE("Rademacher estimate grows with nested candidate sets") {
    const auto c = two_component_chain("max");
    const auto s = sample_scenarios(box4(), 30, 6);
    const auto coarse = uniform_grid(c.domain, 3);
    const auto fine = uniform_grid(c.domain, 5);  // contains the 3x3 grid
    auto nested = coarse;
    nested.insert(nested.end(), fine.begin(), fine.end());
    const auto a = estimate_empirical_rademacher(c.chain, s, coarse, 512, 9);
    const auto b = estimate_empirical_rademacher(c.chain, s, nested, 512, 9);
    CHECK(b.estimate >= a.estimate);
}

TEST_CASE("estimates are worker independent") {
    const auto c = circle_chain();
    const auto s = sample_scenarios(UnitSphere{2}, 40, 2);
    const auto grid = uniform_grid(c.domain, 6);
    const auto a = estimate_empirical_rademacher(c.chain, s, grid, 300, 1, 1);
    const auto b = estimate_empirical_rademacher(c.chain, s, grid, 300, 1, 3);
    CHECK(a.estimate == b.estimate);
    CHECK(a.standard_error == b.standard_error);
}

TEST_CASE("candidate sets") {
    const auto d = Domain::box({-1, 0, 2}, {1, 1, 3});
    const auto g = uniform_grid(d, 4);
    CHECK(g.size() == 64);
    for (const auto& x : g) CHECK(d.contains(x));
    const auto d5 = Domain::box(Vector(5, -1.0), Vector(5, 1.0));
    const auto lhs = latin_hypercube(d5, 100, 3);
    CHECK(lhs.size() == 100);
    for (std::size_t j = 0; j < 5; ++j) {
        std::vector<int> strata(100, 0);
        for (const auto& x : lhs) ++strata[std::min<std::size_t>(99, static_cast<std::size_t>((x[j] + 1.0) * 50.0))];
        CHECK(std::all_of(strata.begin(), strata.end(), [](int k) { return k == 1; }));
    }
    CHECK(candidate_set(d5, 50, 1).size() == 50);
    CHECK_THROWS_AS(uniform_grid(Domain::box({-INFINITY}, {1.0}), 3), InvalidArgument);
}

TEST_CASE("greedy cover basics") {
    const std::vector<Vector> same(5, Vector{1, 2, 3});
    CHECK(greedy_cover(same, 1e-9).size == 1);
    const std::vector<Vector> pair{{0, 0, 0}, {0.5, -0.2, 0.1}};
    CHECK(sup_distance(pair[0], pair[1]) == 0.5);
    CHECK(greedy_cover(pair, 0.5).size == 2);
    CHECK(greedy_cover(pair, 0.5000001).size == 1);
}

namespace {

bool covers(const std::vector<Vector>& rows, std::uint32_t mask, double eps) {
    for (const auto& r : rows) {
        bool hit = false;
        for (std::size_t c = 0; c < rows.size() && !hit; ++c)
            if ((mask >> c) & 1u) hit = sup_distance(r, rows[c]) < eps;
        if (!hit) return false;
    }
    return true;
}

/// Largest subset with pairwise sup distance >= sep. Any cover at scale
/// sep/2 (with arbitrary centers) needs at least this many centers.
int max_packing(const std::vector<Vector>& rows, double sep) {
    int best = 0;
    for (std::uint32_t mask = 1; mask < (1u << rows.size()); ++mask) {
        bool ok = true;
        for (std::size_t a = 0; a < rows.size() && ok; ++a)
            for (std::size_t b = a + 1; b < rows.size() && ok; ++b)
                if (((mask >> a) & 1u) && ((mask >> b) & 1u)) ok = sup_distance(rows[a], rows[b]) >= sep;
        if (ok) best = std::max(best, std::popcount(mask));
    }
    return best;
}

}  // namespace

TEST_CASE("greedy cover against brute force on 12 rows") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vector> rows(12, Vector(6));
        for (auto& r : rows)
            for (auto& v : r) v = u(gen);
        for (double eps : {0.2, 0.4, 0.6, 0.9}) {
            const auto greedy2 = greedy_cover(rows, 2.0 * eps).size;
            CHECK(static_cast<int>(greedy2) <= max_packing(rows, 2.0 * eps));
            int proper = 13;
            for (std::uint32_t mask = 1; mask < (1u << 12); ++mask)
                if (std::popcount(mask) < proper && covers(rows, mask, eps)) proper = std::popcount(mask);
            CHECK(static_cast<int>(greedy_cover(rows, eps).size) >= proper);
        }
    }
}

TEST_CASE("greedy cover size is nonincreasing in epsilon") {
    const auto c = circle_chain();
    const auto s = sample_scenarios(UnitSphere{2}, 25, 3);
    const auto values = constraint_values(c.chain, s, uniform_grid(c.domain, 12));
    std::size_t prev = values.size() + 1;
    for (double eps = 0.05; eps < 3.0; eps *= 1.3) {
        const auto r = greedy_cover(values, eps);
        CHECK(r.size <= prev);
        prev = r.size;
        for (std::size_t i = 0; i < values.size(); ++i) {
            bool hit = false;
            for (auto c2 : r.centers) hit = hit || sup_distance(values[i], values[c2]) < eps;
            CHECK(hit);
        }
    }
}

TEST_CASE("exact circle violation") {
    CHECK(exact_violation_circle(Vector{1, 0}) == 0.0);
    CHECK(exact_violation_circle(Vector{0.3, 0.4}) == 0.0);
    const double r = 1.0 / std::cos(35.0 * std::numbers::pi / 180.0);
    const auto u = unit(-65);
    CHECK(std::abs(exact_violation_circle(Vector{r * u[0], r * u[1]}) - 35.0 / 180.0) <= 1e-12);
    CHECK(exact_violation_circle(Vector{1e12, 0}) == doctest::Approx(0.5).epsilon(1e-10));
}
