#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/certificates.hpp"
#include "scenmargin/chain.hpp"
#include "scenmargin/domain.hpp"
#include "scenmargin/margin_risk.hpp"
#include "scenmargin/scenario.hpp"

namespace scenmargin {

struct SolverConfig {
    std::size_t multistarts = 8;
    std::size_t iterations = 1500;   ///< subgradient iterations per start
    double initial_step = 0.25;      ///< relative to the widest finite box side
    std::size_t stall_limit = 100;   ///< restart from the best point after this many idle iterations
    std::size_t polish_iterations = 60;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    int rounding_radius = 1;
    unsigned workers = 1;
    std::size_t penalty_escalations = 6;

    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
    static SolverConfig from_json(const nlohmann::json& j);
};

enum class FeasibilityStatus { margin_feasible, feasible_no_margin, infeasible_candidate };

std::string to_string(FeasibilityStatus s);

/// margin_feasible iff worst <= -gamma + tol, otherwise feasible_no_margin iff worst <= 0.
FeasibilityStatus classify(double worst, double gamma, double tolerance);

/// J(x) from a closed catalog.
///
///   zero       0
///   linear     c^T x + c0
///   quadratic  x^T Q x + c^T x + c0, Q row-major d x d
///   lookup     table[x_j - offset] for an integer coordinate j
class Objective {
public:
    enum class Kind { zero, linear, quadratic, lookup };

    static Objective zero();
    static Objective linear(Vector c, double constant = 0.0);
    static Objective quadratic(Vector q, Vector c, double constant = 0.0);
    static Objective lookup(std::size_t coordinate, std::int64_t offset, Vector table);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double operator()(std::span<const double> x) const;
    /// grad += dJ/dx (zero for lookup tables).
    void accumulate_gradient(std::span<const double> x, std::span<double> grad) const;
    /// Throws InvalidArgument when J does not fit the domain.
    void check(const Domain& domain) const;

    [[nodiscard]] nlohmann::json to_json() const;
    static Objective from_json(const nlohmann::json& j);

private:
    Kind kind_ = Kind::zero;
    Vector c_;
    Vector q_;
    double constant_ = 0.0;
    std::size_t coordinate_ = 0;
    std::int64_t offset_ = 0;
};

struct SolverTrace {
    std::size_t starts = 0;
    std::size_t iterations = 0;
    std::size_t best_start = 0;
    bool stopped_early = false;
    double penalty_weight = 0.0;
    std::size_t escalations = 0;
    bool restored = false;  ///< moved onto the margin-feasible side by bisection
};

struct SolveResult {
    Vector x;
    double gamma = 0.0;
    double worst_value = 0.0;  ///< max_i f(x, theta_i), from the verification pass
    Vector values;             ///< f(x, theta_i), from the verification pass
    Vector slacks;             ///< soft margin only
    std::optional<double> objective;
    std::optional<double> lambda_bar;
    FeasibilityStatus status = FeasibilityStatus::infeasible_candidate;
    RiskReport risk;
    SolverTrace trace;

    /// -worst_value
    [[nodiscard]] double achieved_margin() const { return -worst_value; }
    [[nodiscard]] nlohmann::json to_json() const;
};

/// min_x max_i f(x, theta_i). With stop_when_feasible the search ends at the
/// first point satisfying every margin constraint.
SolveResult solve_hard_margin(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                              const Domain& domain, const SolverConfig& cfg, bool stop_when_feasible = true);

/// min_x sum_i max(0, f(x, theta_i) + gamma)
SolveResult solve_soft_margin(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                              const Domain& domain, const SolverConfig& cfg);

/// gamma_hat = -min_x max_i f(x, theta_i), reported in gamma.
SolveResult solve_max_margin(const ConstraintChain& chain, const ScenarioSet& scenarios, const Domain& domain,
                             const SolverConfig& cfg);

/// Without lambda: min J(x) s.t. f(x, theta_i) <= -gamma (gamma = 0 gives the
/// standard scenario program). With lambda: min J(x) - lambda g over x and
/// g >= gamma s.t. f(x, theta_i) <= -g.
SolveResult solve_with_objective(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                                 const Domain& domain, const Objective& objective, const SolverConfig& cfg,
                                 std::optional<double> lambda = std::nullopt);

/// min max_k ||phi_k(x) - centers_k|| s.t. f(x, theta_i) <= -gamma. lambda_bar is reported.
SolveResult solve_regularized(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                              const Domain& domain, const std::vector<Vector>& centers, const SolverConfig& cfg);

struct FixedBudgetOutcome {
    SolveResult solve;
    Certificate certificate;
    double gamma = 0.0;
    ScenarioSet scenarios;
};

/// Samples n scenarios, sets gamma = margin_complexity(n, epsilon, delta),
/// solves with J and certifies with the worst-case margin bound.
FixedBudgetOutcome fixed_budget_procedure(const ConstraintChain& chain, const ChainConstants& constants, std::size_t n,
                                          double epsilon, double delta, const Domain& domain,
                                          const Objective& objective, const DistributionSpec& dist,
                                          std::uint64_t seed, const SolverConfig& cfg);

}  // namespace scenmargin
