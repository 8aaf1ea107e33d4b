#include "scenmargin/chain.hpp"

#include <algorithm>

namespace scenmargin {

std::string to_string(StageOp op) {
    switch (op) {
        case StageOp::max: return "max";
        case StageOp::min: return "min";
        case StageOp::plus: return "plus";
        case StageOp::minus: return "minus";
    }
    return "?";
}

StageOp stage_op_from_string(const std::string& s) {
    if (s == "max") return StageOp::max;
    if (s == "min") return StageOp::min;
    if (s == "plus") return StageOp::plus;
    if (s == "minus") return StageOp::minus;
    throw InvalidArgument("unknown stage operator '" + s + "'");
}

ConstraintChain::ConstraintChain(std::vector<Component> components, std::vector<Stage> stages)
    : components_(std::move(components)), stages_(std::move(stages)) {
    if (components_.empty()) throw InvalidArgument("constraint chain: empty component list");
    if (stages_.size() != components_.size() - 1)
        throw InvalidArgument("constraint chain: expected " + std::to_string(components_.size() - 1) +
                              " operators, got " + std::to_string(stages_.size()));
    decision_dim_ = components_.front().phi.input_dim();
    parameter_dim_ = components_.front().psi.input_dim();
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const auto& c = components_[k];
        const auto where = " (component " + std::to_string(k + 1) + ")";
        if (c.psi.output_dim() != c.phi.output_dim())
            throw InvalidArgument("constraint chain: psi/phi output dimension mismatch" + where);
        if (c.eta.output_dim() != 1) throw InvalidArgument("constraint chain: eta must be scalar" + where);
        if (c.phi.input_dim() != decision_dim_)
            throw InvalidArgument("constraint chain: phi input dimension mismatch" + where);
        if (c.psi.input_dim() != parameter_dim_ || c.eta.input_dim() != parameter_dim_)
            throw InvalidArgument("constraint chain: psi/eta input dimension mismatch" + where);
    }
}

DecisionFeatures ConstraintChain::decision_features(std::span<const double> x) const {
    if (x.size() != decision_dim_)
        throw InvalidArgument("evaluate: x has dimension " + std::to_string(x.size()) + ", expected " +
                              std::to_string(decision_dim_));
    DecisionFeatures out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.phi(x));
    return out;
}

ParameterFeatures ConstraintChain::parameter_features(std::span<const double> theta) const {
    ParameterFeatures pf;
    parameter_features(theta, pf);
    return pf;
}

void ConstraintChain::parameter_features(std::span<const double> theta, ParameterFeatures& out) const {
    if (theta.size() != parameter_dim_)
        throw InvalidArgument("evaluate: theta has dimension " + std::to_string(theta.size()) + ", expected " +
                              std::to_string(parameter_dim_));
    out.psi.resize(components_.size());
    out.eta.resize(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const auto& c = components_[k];
        out.psi[k].resize(c.psi.output_dim());
        c.psi.apply(theta, out.psi[k]);
        c.eta.apply(theta, std::span<double>(&out.eta[k], 1));
    }
}

double ConstraintChain::component_value(std::size_t k, const DecisionFeatures& phi,
                                        const ParameterFeatures& pf) const {
    return dot(pf.psi[k], phi[k]) + pf.eta[k];
}

namespace {
double combine(StageOp op, double a, double b) {
    switch (op) {
        case StageOp::max: return std::max(a, b);
        case StageOp::min: return std::min(a, b);
        case StageOp::plus: return a + b;
        case StageOp::minus: return a - b;
    }
    return a;
}
}  // namespace

double ConstraintChain::evaluate(const DecisionFeatures& phi, const ParameterFeatures& pf) const {
    double f = components_[0].wrapper(component_value(0, phi, pf));
    for (std::size_t k = 1; k < components_.size(); ++k) {
        const double v = components_[k].wrapper(component_value(k, phi, pf));
        f = stages_[k - 1].wrapper(combine(stages_[k - 1].op, f, v));
    }
    return f;
}

double ConstraintChain::evaluate(std::span<const double> x, std::span<const double> theta) const {
    return evaluate(decision_features(x), parameter_features(theta));
}

double ConstraintChain::evaluate(std::span<const double> x, const DecisionFeatures& phi,
                                 const ParameterFeatures& pf, std::span<double> grad) const {
    const std::size_t C = components_.size();
    // Forward pass. u: raw component values; g: stage values before rho_k.
    thread_local std::vector<double> u, g, prev;
    u.resize(C);
    g.resize(C);
    prev.resize(C);
    for (std::size_t k = 0; k < C; ++k) u[k] = component_value(k, phi, pf);
    double f = components_[0].wrapper(u[0]);
    for (std::size_t k = 1; k < C; ++k) {
        prev[k] = f;
        const double v = components_[k].wrapper(u[k]);
        g[k] = combine(stages_[k - 1].op, f, v);
        f = stages_[k - 1].wrapper(g[k]);
    }

    // Reverse pass: adjoint of f^k flows back through the stages.
    std::fill(grad.begin(), grad.end(), 0.0);
    thread_local Vector weights;
    double adj = 1.0;
    for (std::size_t k = C; k-- > 1;) {
        const auto& st = stages_[k - 1];
        const double adj_g = adj * st.wrapper.derivative(g[k]);
        const double v = components_[k].wrapper(u[k]);
        double adj_prev = 0.0, adj_v = 0.0;
        switch (st.op) {
            case StageOp::max: (prev[k] >= v ? adj_prev : adj_v) = adj_g; break;
            case StageOp::min: (prev[k] <= v ? adj_prev : adj_v) = adj_g; break;
            case StageOp::plus: adj_prev = adj_v = adj_g; break;
            case StageOp::minus: adj_prev = adj_g; adj_v = -adj_g; break;
        }
        const double m = adj_v * components_[k].wrapper.derivative(u[k]);
        if (m != 0.0) {
            weights.assign(pf.psi[k].begin(), pf.psi[k].end());
            for (auto& w : weights) w *= m;
            components_[k].phi.accumulate_vjp(x, weights, grad);
        }
        adj = adj_prev;
        if (adj == 0.0) break;
    }
    const double m0 = adj * components_[0].wrapper.derivative(u[0]);
    if (m0 != 0.0) {
        weights.assign(pf.psi[0].begin(), pf.psi[0].end());
        for (auto& w : weights) w *= m0;
        components_[0].phi.accumulate_vjp(x, weights, grad);
    }
    return f;
}

double lambda_bar(const ConstraintChain& chain, std::span<const double> x, const std::vector<Vector>& centers) {
    if (centers.size() != chain.size())
        throw InvalidArgument("lambda_bar: expected " + std::to_string(chain.size()) + " centers");
    const auto phi = chain.decision_features(x);
    double best = 1.0;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        if (centers[k].size() != phi[k].size()) throw InvalidArgument("lambda_bar: center dimension mismatch");
        double s = 0.0;
        for (std::size_t r = 0; r < phi[k].size(); ++r) s += (phi[k][r] - centers[k][r]) * (phi[k][r] - centers[k][r]);
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

}  // namespace scenmargin
