#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/chain.hpp"
#include "scenmargin/distribution.hpp"
#include "scenmargin/domain.hpp"

namespace scenmargin {

/// How a constant was obtained. Exact values and valid upper bounds are
/// certified; sampled estimates are not, and every certificate consuming
/// one is marked non-certified.
enum class Certification { exact, upper_bound, sampled_estimate };

std::string to_string(Certification c);
Certification certification_from_string(const std::string& s);
inline bool is_certified(Certification c) { return c != Certification::sampled_estimate; }

struct SupResult {
    double value = 0.0;
    Certification certification = Certification::exact;
    std::optional<Vector> maximizer;
};

/// Constants of one component k (0-based storage, 1-based in the math).
struct ComponentConstants {
    double tau = 0.0;  ///< sup_theta ||psi_k(theta)||
    Certification tau_certification = Certification::exact;
    double lambda = 0.0;  ///< sup_x ||phi_k(x) - center_k||
    Certification lambda_certification = Certification::exact;
    Vector center;
    std::optional<Vector> lambda_maximizer;
    double wrapper_lipschitz = 1.0;  ///< varphi_k
    double stage_lipschitz = 1.0;    ///< rho_k, 1 for the first component
    int additive = 0;                ///< 1 when g_k is plus/minus (always 0 for k = 1)
    double eta_bound = 0.0;          ///< sup_theta |eta_k(theta)|

    // Filled by ChainConstants::finalize().
    double lipschitz_product = 1.0;  ///< prod_{j>=k} rho_j
    int additive_ops = 0;            ///< p_k = sum_{j>=k} a_j
};

struct ChainConstants {
    std::vector<ComponentConstants> components;

    /// Recomputes lipschitz_product and additive_ops from the per-stage fields.
    void finalize();

    [[nodiscard]] bool certified() const;
    /// Names of the constants that are sampled estimates, e.g. "tau_2".
    [[nodiscard]] std::vector<std::string> uncertified_constants() const;
    /// sum_k (prod rho) varphi_k tau_k Lambda_k
    [[nodiscard]] double complexity_sum() const;

    [[nodiscard]] nlohmann::json to_json() const;
    static ChainConstants from_json(const nlohmann::json& j);
    /// FNV-1a of the canonical JSON dump, hex encoded.
    [[nodiscard]] std::string snapshot_hash() const;

    /// Single-component constants with unit Lipschitz factors.
    static ChainConstants single(double tau, double lambda, double wrapper_lipschitz = 1.0);
};

/// Support description for theta. The sample budget is only consulted when
/// no exact route exists for a feature map.
struct ThetaSupport {
    DistributionSpec distribution;
    std::size_t sample_budget = 0;
    std::uint64_t seed = 0;
};

/// Computes tau_k, Lambda_k (about the given centers; zero by default), the
/// Lipschitz products and p_k. Validates shifted-square-root wrappers against
/// an interval enclosure of their arguments.
ChainConstants compute_constants(const ConstraintChain& chain, const Domain& domain, const ThetaSupport& support,
                                 const std::vector<Vector>& centers = {});

/// Attaches chain-derived Lipschitz constants and p_k to given tau/Lambda values.
ChainConstants constants_from_values(const ConstraintChain& chain, const Vector& taus, const Vector& lambdas);

/// sup over the box [lower, upper] of ||map(t) - center||.
SupResult sup_norm_over_box(const FeatureMap& map, std::span<const double> lower, std::span<const double> upper,
                            std::span<const double> center, std::size_t sample_budget = 0, std::uint64_t seed = 0);

/// sup over the support of dist of ||map(theta)||.
SupResult sup_norm_over_support(const FeatureMap& map, const DistributionSpec& dist, std::size_t sample_budget = 0,
                                std::uint64_t seed = 0);

/// Radius r with P{||theta - mean|| <= r} = 1 - tail for an isotropic Gaussian.
double gaussian_quantile_radius(std::size_t dim, double sigma, double tail = 1e-6);

}  // namespace scenmargin
