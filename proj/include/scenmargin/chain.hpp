#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scenmargin/common.hpp"
#include "scenmargin/feature_map.hpp"
#include "scenmargin/wrapper.hpp"

namespace scenmargin {

/// One pseudo-linear component f_k(x, theta) = psi_k(theta)^T phi_k(x) + eta_k(theta),
/// passed through its wrapper.
struct Component {
    FeatureMap psi;
    FeatureMap phi;
    FeatureMap eta;
    ScalarWrapper wrapper;
};

enum class StageOp { max, min, plus, minus };

std::string to_string(StageOp op);
StageOp stage_op_from_string(const std::string& s);
/// 1 for plus/minus, 0 for max/min.
inline int additive_count(StageOp op) { return (op == StageOp::plus || op == StageOp::minus) ? 1 : 0; }

/// Combination step k = 2..C: f^k = wrapper(op(f^{k-1}, wrapped f_k)).
struct Stage {
    StageOp op = StageOp::max;
    ScalarWrapper wrapper;
};

/// psi_k(theta) and eta_k(theta) for one parameter value; computed once per
/// scenario and reused for every candidate x.
struct ParameterFeatures {
    std::vector<Vector> psi;
    Vector eta;
};

/// phi_k(x) for one decision point.
using DecisionFeatures = std::vector<Vector>;

/// Left-deep chain f = f^C with f^1 = varphi_1(f_1) and
/// f^k = rho_k(g_k(f^{k-1}, varphi_k(f_k))). Immutable after construction.
class ConstraintChain {
public:
    /// Throws InvalidArgument on an empty component list, a stage count other
    /// than C-1, or inconsistent feature dimensions.
    ConstraintChain(std::vector<Component> components, std::vector<Stage> stages);

    [[nodiscard]] std::size_t size() const { return components_.size(); }
    [[nodiscard]] std::size_t decision_dim() const { return decision_dim_; }
    [[nodiscard]] std::size_t parameter_dim() const { return parameter_dim_; }
    [[nodiscard]] const Component& component(std::size_t k) const { return components_.at(k); }
    [[nodiscard]] const std::vector<Component>& components() const { return components_; }
    /// Stage combining component k (1-based k >= 2 maps to stages()[k-2]).
    [[nodiscard]] const std::vector<Stage>& stages() const { return stages_; }

    [[nodiscard]] double evaluate(std::span<const double> x, std::span<const double> theta) const;

    [[nodiscard]] DecisionFeatures decision_features(std::span<const double> x) const;
    [[nodiscard]] ParameterFeatures parameter_features(std::span<const double> theta) const;
    /// In-place variant reusing the buffers of out.
    void parameter_features(std::span<const double> theta, ParameterFeatures& out) const;
    [[nodiscard]] double evaluate(const DecisionFeatures& phi, const ParameterFeatures& pf) const;
    /// Value plus a subgradient with respect to x written into grad.
    /// max/min stages follow the first argument on ties.
    double evaluate(std::span<const double> x, const DecisionFeatures& phi, const ParameterFeatures& pf,
                    std::span<double> grad) const;

    /// Raw component value psi_k^T phi_k + eta_k (before its wrapper), 0-based k.
    [[nodiscard]] double component_value(std::size_t k, const DecisionFeatures& phi,
                                         const ParameterFeatures& pf) const;

private:
    std::vector<Component> components_;
    std::vector<Stage> stages_;
    std::size_t decision_dim_ = 0;
    std::size_t parameter_dim_ = 0;
};

/// max{1, max_k ||phi_k(x) - centers_k||}
double lambda_bar(const ConstraintChain& chain, std::span<const double> x, const std::vector<Vector>& centers);

}  // namespace scenmargin
