#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/chain.hpp"
#include "scenmargin/domain.hpp"
#include "scenmargin/scenario.hpp"

namespace scenmargin {

struct RademacherEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t draws = 0;
    std::size_t candidates = 0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Mean over sigma draws of max_c (1/N) sum_i sigma_i values[c][i]. Draw t
/// uses substream (seed, rademacher, t), so equal seeds share sign patterns.
RademacherEstimate estimate_rademacher_from_values(const std::vector<Vector>& values, std::size_t sigma_draws,
                                                   std::uint64_t seed, unsigned workers = 1);

/// Monte-Carlo empirical Rademacher complexity of {theta -> f(x, theta) : x in candidates}.
/// A lower-bound witness for the class over all of X, never a certificate input.
RademacherEstimate estimate_empirical_rademacher(const ConstraintChain& chain, const ScenarioSet& scenarios,
                                                 const std::vector<Vector>& candidates, std::size_t sigma_draws,
                                                 std::uint64_t seed, unsigned workers = 1);

/// values[c][i] = f(candidates[c], theta_i)
std::vector<Vector> constraint_values(const ConstraintChain& chain, const ScenarioSet& scenarios,
                                      const std::vector<Vector>& candidates);

/// per_axis^d lattice over a bounded box, including the corners.
std::vector<Vector> uniform_grid(const Domain& domain, std::size_t per_axis);

/// count Latin-hypercube points in a bounded box.
std::vector<Vector> latin_hypercube(const Domain& domain, std::size_t count, std::uint64_t seed);

/// Uniform grid with about `count` points for d <= 3, Latin hypercube otherwise.
std::vector<Vector> candidate_set(const Domain& domain, std::size_t count, std::uint64_t seed);

struct CoverReport {
    double epsilon = 0.0;
    std::size_t size = 0;
    std::size_t candidates = 0;
    std::string metric = "sup_over_scenarios";
    std::vector<std::size_t> centers;  ///< row indices of the net

    [[nodiscard]] nlohmann::json to_json() const;
};

/// max_i |a_i - b_i|
double sup_distance(std::span<const double> a, std::span<const double> b);

/// First-fit proper cover: a row opens a new center unless some existing
/// center lies strictly closer than epsilon.
CoverReport greedy_cover(const std::vector<Vector>& values, double epsilon);

/// V(x) for f(x, theta) = theta^T x - 1 with theta uniform on the unit circle:
/// 0 if ||x|| <= 1, else arccos(1/||x||)/pi.
double exact_violation_circle(std::span<const double> x);

}  // namespace scenmargin
