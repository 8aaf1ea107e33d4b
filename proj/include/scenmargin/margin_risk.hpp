#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/chain.hpp"

namespace scenmargin {

class ScenarioSet;

enum class LossKind { piecewise, indicator };

std::string to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& s);

struct MarginSpec {
    double gamma = 0.0;
    LossKind kind = LossKind::piecewise;

    MarginSpec(double gamma, LossKind kind = LossKind::piecewise);
};

/// piecewise: 1 if value >= 0, 1 + value/gamma on (-gamma, 0), 0 if value <= -gamma.
/// indicator: 1 iff value > -gamma.
double margin_loss(double value, const MarginSpec& spec);

/// 1{value > 0}
inline double violation_loss(double value) { return value > 0.0 ? 1.0 : 0.0; }

struct RiskReport {
    double violation = 0.0;    ///< empirical fraction with f > 0
    double margin_risk = 0.0;  ///< mean margin loss
    double gamma = 0.0;
    LossKind kind = LossKind::piecewise;
    Vector losses;
    std::size_t violations = 0;
    std::size_t margin_violations = 0;  ///< scenarios with positive loss

    [[nodiscard]] std::size_t size() const { return losses.size(); }
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Risks from precomputed constraint values f(x, theta_i).
RiskReport risks_from_values(std::span<const double> values, const MarginSpec& spec);

RiskReport empirical_risks(const ConstraintChain& chain, std::span<const double> x, const ScenarioSet& scenarios,
                           const MarginSpec& spec);

}  // namespace scenmargin
