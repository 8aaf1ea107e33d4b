#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/constants.hpp"
#include "scenmargin/margin_risk.hpp"
#include "scenmargin/scenario.hpp"

namespace scenmargin {

/// Which bound a certificate instantiates.
///
///   margin_rademacher     Vhat_gamma + (2/gamma) R + sqrt(log(1/delta)/2N)
///                         (empirical mode: 2 Rhat and 3 sqrt(log(2/delta)/2N))
///   margin_uniform_gamma  min over a gamma grid, with a log log2(2 gamma_bar/gamma) penalty
///   a_posteriori          data-dependent radius Lambda_bar(x), uniform over x
///   fast_rate             covering-number rate 4(M + log(4/delta))/N, zero empirical error
///   fast_rate_general     the same with nonzero empirical error
///   vc                    VC-dimension baseline
///   convex_scenario       binomial-tail epsilon for convex scenario programs
enum class BoundKind {
    margin_rademacher,
    margin_uniform_gamma,
    a_posteriori,
    fast_rate,
    fast_rate_general,
    vc,
    convex_scenario,
};

std::string to_string(BoundKind k);
BoundKind bound_kind_from_string(const std::string& s);

enum class RademacherMode { worst_case, empirical };

std::string to_string(RademacherMode m);
RademacherMode rademacher_mode_from_string(const std::string& s);

struct Term {
    std::string name;
    double value = 0.0;
};

struct Certificate {
    BoundKind kind = BoundKind::margin_rademacher;
    double value = 0.0;      ///< clamped to [0, 1]
    double raw_value = 0.0;  ///< sum of terms before clamping
    std::vector<Term> terms;
    LossKind loss = LossKind::piecewise;
    nlohmann::json inputs = nlohmann::json::object();
    std::optional<ChainConstants> constants;
    bool certified = true;
    std::vector<std::string> warnings;

    /// Value of a named term; throws if absent.
    [[nodiscard]] double term(const std::string& name) const;
    /// Left-to-right sum of the terms, i.e. raw_value.
    [[nodiscard]] double sum_terms() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Recomputes a certificate from the inputs recorded in its JSON form.
Certificate replay_certificate(const nlohmann::json& j);

// ---- complexity terms ------------------------------------------------------

/// sum_k (prod rho) varphi_k tau_k Lambda_k / sqrt(n)
double rademacher_bound(const ChainConstants& constants, std::size_t n);

/// sum_i ||psi_k(theta_i)||^2 for every component k.
Vector psi_square_sums(const ConstraintChain& chain, const ScenarioSet& scenarios);

/// sum_k (prod rho) varphi_k Lambda_k sqrt(psi_square_sums[k]) / n
double empirical_rademacher_bound(const ChainConstants& constants, const Vector& psi_square_sums, std::size_t n);
double empirical_rademacher_bound(const ChainConstants& constants, const ConstraintChain& chain,
                                  const ScenarioSet& scenarios);

// ---- violation certificates ------------------------------------------------

/// Margin bound with the worst-case Rademacher term.
Certificate margin_bound(double vhat_gamma, const ChainConstants& constants, double gamma, double delta,
                         std::size_t n);

/// Margin bound with the empirical Rademacher term computed on the scenarios.
Certificate margin_bound_empirical(double vhat_gamma, const ChainConstants& constants, const ConstraintChain& chain,
                                   const ScenarioSet& scenarios, double gamma, double delta);

/// Same, from precomputed sum_i ||psi_k(theta_i)||^2.
Certificate margin_bound_empirical(double vhat_gamma, const ChainConstants& constants, const Vector& psi_square_sums,
                                   double gamma, double delta, std::size_t n);

/// gamma_bar * 100^(-j/count), j = 0..count-1.
Vector default_gamma_grid(double gamma_bar, std::size_t count = 16);

/// Minimum over the grid of Vhat_gamma + (4/gamma) R + sqrt(log(1/delta)/2N)
/// + sqrt(log log2(2 gamma_bar/gamma)/N). The minimizing gamma is recorded.
Certificate margin_bound_uniform_gamma(const std::function<double(double)>& vhat_gamma_of,
                                       const ChainConstants& constants, double gamma_bar, const Vector& gamma_grid,
                                       double delta, std::size_t n);

/// Bound valid uniformly over x, with the data-dependent radius
/// Lambda_bar(x) = max{1, max_k ||phi_k(x) - centers_k||}.
Certificate a_posteriori_bound(const ConstraintChain& chain, std::span<const double> x, const ScenarioSet& scenarios,
                               double gamma, double delta, const std::vector<Vector>& centers);

/// Scalar core of a_posteriori_bound. coefficients[k] = (prod rho) varphi_k.
Certificate a_posteriori_bound(double vhat_gamma, double lambda_bar, const Vector& coefficients,
                               const Vector& psi_square_sums, double gamma, double delta, std::size_t n);

/// M_k = 2^{p_k} varphi_k tau_k Lambda_k (prod rho)/gamma.
Vector covering_scales(const ChainConstants& constants, double gamma);

/// Covering-number bound. vhat is the indicator-loss empirical risk; vhat = 0
/// gives 4(M + log(4/delta))/N, otherwise
/// vhat + 2 sqrt(vhat (M + log(4/delta))/N) + 4(M + log(4/delta))/N.
/// Throws PreconditionError when some 0 < 60 M_k N <= 1.
Certificate fast_rate_bound(const ChainConstants& constants, double gamma, double delta, std::size_t n,
                            double vhat_indicator);

/// vhat + 2 sqrt(2 d log(e N/d)/N) + sqrt(log(1/delta)/2N)
Certificate vc_bound(std::size_t d_vc, double vhat, double delta, std::size_t n);

/// sum_{j<d} C(n,j) eps^j (1-eps)^(n-j), evaluated in log space.
double convex_scenario_delta(std::size_t n, std::size_t d, double epsilon);

/// Smallest epsilon (to bisection accuracy, rounded up) with
/// convex_scenario_delta(n, d, epsilon) <= delta.
Certificate convex_scenario_certificate(std::size_t n, std::size_t d, double delta);

// ---- complexities ----------------------------------------------------------

enum class ComplexityKind { margin_sample_complexity, convex_sample_complexity, margin_complexity };

std::string to_string(ComplexityKind k);

struct ComplexityEstimate {
    ComplexityKind kind = ComplexityKind::margin_sample_complexity;
    double value = 0.0;
    std::optional<long long> rounded;  ///< ceiling for sample counts
    nlohmann::json inputs = nlohmann::json::object();
    bool certified = true;
    std::vector<std::string> warnings;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// ((2/gamma) S + sqrt(log(1/sqrt(delta))))^2 / eps^2, S = constants.complexity_sum().
ComplexityEstimate margin_sample_complexity(double epsilon, double delta, const ChainConstants& constants,
                                            double gamma);

/// (2d + 2 log(1/delta)) / eps
ComplexityEstimate convex_sample_complexity(double epsilon, double delta, std::size_t d);

/// Smallest integer d with d > ((2/gamma) S + sqrt(log(1/sqrt(delta))))^2 / (2 eps).
long long dimension_crossover(double epsilon, double delta, const ChainConstants& constants, double gamma);

/// gamma = 2 S / (eps sqrt(N) - sqrt(log(1/sqrt(delta)))). Throws
/// PreconditionError "budget too small for target (epsilon, delta)" when the
/// denominator is not positive.
ComplexityEstimate margin_complexity(std::size_t n, double epsilon, double delta, const ChainConstants& constants);

}  // namespace scenmargin
