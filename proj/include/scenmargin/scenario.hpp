#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/chain.hpp"
#include "scenmargin/distribution.hpp"

namespace scenmargin {

/// Draws per RNG substream. Fixed so that results never depend on the
/// number of workers.
inline constexpr std::size_t kSampleBlock = 4096;
inline constexpr std::size_t kMonteCarloBlock = 65536;

/// N parameter vectors stored row-major. Immutable once built.
class ScenarioSet {
public:
    ScenarioSet(std::size_t dim, Vector data, std::optional<DistributionSpec> distribution = std::nullopt,
                std::uint64_t seed = 0);
    static ScenarioSet from_rows(const std::vector<Vector>& rows);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    [[nodiscard]] const Vector& data() const { return data_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] const std::optional<DistributionSpec>& distribution() const { return distribution_; }
    [[nodiscard]] std::vector<Vector> rows() const;
    /// Scenarios first..first+count-1 as a new set.
    [[nodiscard]] ScenarioSet slice(std::size_t first, std::size_t count) const;

    [[nodiscard]] nlohmann::json to_json() const;

private:
    std::size_t dim_;
    std::size_t n_;
    Vector data_;
    std::optional<DistributionSpec> distribution_;
    std::uint64_t seed_;
};

/// N i.i.d. draws; block b of kSampleBlock rows uses substream (seed, scenarios, b).
ScenarioSet sample_scenarios(const DistributionSpec& dist, std::size_t n, std::uint64_t seed, unsigned workers = 1);

/// psi_k(theta_i) and eta_k(theta_i) for every scenario.
std::vector<ParameterFeatures> precompute_features(const ConstraintChain& chain, const ScenarioSet& scenarios);

/// Exact (Clopper-Pearson) two-sided interval for k successes out of m.
struct BinomialInterval {
    double lower = 0.0;
    double upper = 1.0;
};
BinomialInterval clopper_pearson(std::size_t k, std::size_t m, double alpha);

struct ViolationEstimate {
    double estimate = 0.0;
    std::size_t violations = 0;
    std::size_t samples = 0;
    double lower = 0.0;
    double upper = 1.0;
    double alpha = 0.05;
    std::uint64_t seed = 0;

    /// sqrt(p(1-p)/m) at the point estimate.
    [[nodiscard]] double standard_error() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Fraction of m fresh draws with f(x, theta) > 0. Block b of
/// kMonteCarloBlock draws uses substream (seed, monte_carlo, b).
ViolationEstimate monte_carlo_violation(const ConstraintChain& chain, std::span<const double> x,
                                        const DistributionSpec& dist, std::size_t m, std::uint64_t seed,
                                        double alpha = 0.05, unsigned workers = 1);

}  // namespace scenmargin
