#include "scenmargin/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "scenmargin/parallel.hpp"

namespace scenmargin {

nlohmann::json RademacherEstimate::to_json() const {
    return {{"estimate", estimate}, {"standard_error", standard_error}, {"draws", draws}, {"candidates", candidates}};
}

RademacherEstimate estimate_rademacher_from_values(const std::vector<Vector>& values, std::size_t sigma_draws,
                                                   std::uint64_t seed, unsigned workers) {
    if (values.empty()) throw InvalidArgument("rademacher estimate: empty candidate set");
    if (sigma_draws == 0) throw InvalidArgument("rademacher estimate: sigma_draws must be at least 1");
    const std::size_t n = values.front().size();
    if (n == 0) throw InvalidArgument("rademacher estimate: no scenarios");
    for (const auto& row : values)
        if (row.size() != n) throw InvalidArgument("rademacher estimate: ragged value matrix");

    Vector sups(sigma_draws);
    parallel_for(sigma_draws, workers, [&](std::size_t t) {
        auto rng = CounterRng::substream(seed, Purpose::rademacher, t);
        thread_local Vector sigma;
        sigma.resize(n);
        for (std::size_t i = 0; i < n; ++i) sigma[i] = (rng() >> 63) ? 1.0 : -1.0;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : values) best = std::max(best, dot(sigma, row));
        sups[t] = best / static_cast<double>(n);
    });
    CompensatedSum s;
    for (double v : sups) s.add(v);
    RademacherEstimate r;
    r.draws = sigma_draws;
    r.candidates = values.size();
    r.estimate = s.value() / static_cast<double>(sigma_draws);
    if (sigma_draws > 1) {
        CompensatedSum ss;
        for (double v : sups) ss.add((v - r.estimate) * (v - r.estimate));
        r.standard_error = std::sqrt(ss.value() / static_cast<double>(sigma_draws - 1) / static_cast<double>(sigma_draws));
    }
    return r;
}

std::vector<Vector> constraint_values(const ConstraintChain& chain, const ScenarioSet& scenarios,
                                      const std::vector<Vector>& candidates) {
    const auto features = precompute_features(chain, scenarios);
    std::vector<Vector> values(candidates.size(), Vector(scenarios.size()));
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto phi = chain.decision_features(candidates[c]);
        for (std::size_t i = 0; i < scenarios.size(); ++i) values[c][i] = chain.evaluate(phi, features[i]);
    }
    return values;
}

RademacherEstimate estimate_empirical_rademacher(const ConstraintChain& chain, const ScenarioSet& scenarios,
                                                 const std::vector<Vector>& candidates, std::size_t sigma_draws,
                                                 std::uint64_t seed, unsigned workers) {
    if (candidates.empty()) throw InvalidArgument("rademacher estimate: empty candidate set");
    return estimate_rademacher_from_values(constraint_values(chain, scenarios, candidates), sigma_draws, seed, workers);
}

namespace {

void require_bounded(const Domain& domain) {
    domain.validate();
    if (!domain.bounded()) throw InvalidArgument("candidate grids need a bounded domain");
}

}  // namespace

std::vector<Vector> uniform_grid(const Domain& domain, std::size_t per_axis) {
    require_bounded(domain);
    if (per_axis == 0) throw InvalidArgument("uniform_grid: per_axis must be positive");
    const std::size_t d = domain.dimension();
    std::vector<Vector> out;
    std::vector<std::size_t> pos(d, 0);
    while (true) {
        Vector x(d);
        for (std::size_t i = 0; i < d; ++i) {
            const double t = per_axis == 1 ? 0.5 : static_cast<double>(pos[i]) / static_cast<double>(per_axis - 1);
            x[i] = domain.lower[i] + t * (domain.upper[i] - domain.lower[i]);
        }
        out.push_back(domain.project(x));
        std::size_t i = 0;
        while (i < d && ++pos[i] == per_axis) pos[i++] = 0;
        if (i == d) break;
    }
    return out;
}

std::vector<Vector> latin_hypercube(const Domain& domain, std::size_t count, std::uint64_t seed) {
    require_bounded(domain);
    const std::size_t d = domain.dimension();
    auto rng = CounterRng::substream(seed, Purpose::rademacher, ~std::uint64_t{0});
    std::vector<Vector> out(count, Vector(d));
    std::vector<std::size_t> perm(count);
    for (std::size_t i = 0; i < d; ++i) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = count; k > 1; --k) std::swap(perm[k - 1], perm[rng() % k]);
        for (std::size_t c = 0; c < count; ++c) {
            const double t = (static_cast<double>(perm[c]) + rng.uniform01()) / static_cast<double>(count);
            out[c][i] = domain.lower[i] + t * (domain.upper[i] - domain.lower[i]);
        }
    }
    for (auto& x : out) x = domain.project(x);
    return out;
}

std::vector<Vector> candidate_set(const Domain& domain, std::size_t count, std::uint64_t seed) {
    const std::size_t d = domain.dimension();
    if (d <= 3) {
        const auto per_axis = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(count), 1.0 / static_cast<double>(d))));
        return uniform_grid(domain, std::max<std::size_t>(1, per_axis));
    }
    return latin_hypercube(domain, count, seed);
}

nlohmann::json CoverReport::to_json() const {
    return {{"epsilon", epsilon}, {"size", size}, {"candidates", candidates}, {"metric", metric}, {"centers", centers}};
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

CoverReport greedy_cover(const std::vector<Vector>& values, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("greedy_cover: epsilon must be positive");
    if (values.empty()) throw InvalidArgument("greedy_cover: empty value matrix");
    CoverReport r;
    r.epsilon = epsilon;
    r.candidates = values.size();
    for (std::size_t c = 0; c < values.size(); ++c) {
        if (values[c].size() != values.front().size()) throw InvalidArgument("greedy_cover: ragged value matrix");
        const bool covered = std::any_of(r.centers.begin(), r.centers.end(),
                                         [&](std::size_t k) { return sup_distance(values[k], values[c]) < epsilon; });
        if (!covered) r.centers.push_back(c);
    }
    r.size = r.centers.size();
    return r;
}

double exact_violation_circle(std::span<const double> x) {
    const double r = norm(x);
    if (r <= 1.0) return 0.0;
    return std::acos(1.0 / r) / std::numbers::pi;
}

}  // namespace scenmargin
