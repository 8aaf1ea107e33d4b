#include "scenmargin/margin_risk.hpp"

#include <cmath>

#include "scenmargin/scenario.hpp"

namespace scenmargin {

std::string to_string(LossKind k) { return k == LossKind::piecewise ? "piecewise" : "indicator"; }

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "piecewise") return LossKind::piecewise;
    if (s == "indicator") return LossKind::indicator;
    throw InvalidArgument("unknown loss kind '" + s + "'");
}

MarginSpec::MarginSpec(double g, LossKind k) : gamma(g), kind(k) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("margin gamma must be positive and finite");
}

double margin_loss(double value, const MarginSpec& spec) {
    if (spec.kind == LossKind::indicator) return value > -spec.gamma ? 1.0 : 0.0;
    if (value >= 0.0) return 1.0;
    if (value <= -spec.gamma) return 0.0;
    return 1.0 + value / spec.gamma;
}

nlohmann::json RiskReport::to_json() const {
    return {{"violation", violation},
            {"margin_risk", margin_risk},
            {"gamma", gamma},
            {"loss", scenmargin::to_string(kind)},
            {"n", losses.size()},
            {"violations", violations},
            {"margin_violations", margin_violations},
            {"losses", losses}};
}

RiskReport risks_from_values(std::span<const double> values, const MarginSpec& spec) {
    if (values.empty()) throw InvalidArgument("empirical_risks: empty scenario set");
    RiskReport r;
    r.gamma = spec.gamma;
    r.kind = spec.kind;
    r.losses.reserve(values.size());
    CompensatedSum loss_sum;
    for (double v : values) {
        const double l = margin_loss(v, spec);
        r.losses.push_back(l);
        loss_sum.add(l);
        if (v > 0.0) ++r.violations;
        if (l > 0.0) ++r.margin_violations;
    }
    const auto n = static_cast<double>(values.size());
    r.violation = static_cast<double>(r.violations) / n;
    r.margin_risk = loss_sum.value() / n;
    // Absorbs summation rounding only.
    if (r.margin_risk < r.violation) r.margin_risk = r.violation;
    if (r.margin_risk > 1.0) r.margin_risk = 1.0;
    return r;
}

RiskReport empirical_risks(const ConstraintChain& chain, std::span<const double> x, const ScenarioSet& scenarios,
                           const MarginSpec& spec) {
    if (scenarios.size() == 0) throw InvalidArgument("empirical_risks: empty scenario set");
    const auto phi = chain.decision_features(x);
    ParameterFeatures pf;
    Vector values(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        chain.parameter_features(scenarios.row(i), pf);
        values[i] = chain.evaluate(phi, pf);
    }
    return risks_from_values(values, spec);
}

}  // namespace scenmargin
