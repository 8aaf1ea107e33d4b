#include "scenmargin/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenmargin {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive and finite");
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
}

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
}

void check_n(std::size_t n) {
    if (n == 0) throw InvalidArgument("sample size must be at least 1");
}

void check_probability(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

/// Marks the certificate non-certified when a consumed constant is a sampled estimate.
void attach_constants(Certificate& c, const ChainConstants& constants, bool uses_tau) {
    c.constants = constants;
    for (std::size_t k = 0; k < constants.components.size(); ++k) {
        const auto& cc = constants.components[k];
        const auto idx = std::to_string(k + 1);
        if (uses_tau && !is_certified(cc.tau_certification)) {
            c.certified = false;
            c.warnings.push_back("non-certified constant tau_" + idx + " (sampled_estimate)");
        }
        if (!is_certified(cc.lambda_certification)) {
            c.certified = false;
            c.warnings.push_back("non-certified constant lambda_" + idx + " (sampled_estimate)");
        }
    }
}

Certificate finish(Certificate c, bool probability = true) {
    c.raw_value = c.sum_terms();
    c.value = c.raw_value;
    if (probability) {
        if (c.raw_value > 1.0) {
            c.value = 1.0;
            c.warnings.push_back("vacuous: raw bound exceeds 1 and was clamped");
        }
        if (c.value < 0.0) c.value = 0.0;
    }
    return c;
}

double confidence_term(double delta, std::size_t n) {
    return std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

/// sqrt(log(1/sqrt(delta)))
double half_log_root(double delta) { return std::sqrt(-0.5 * std::log(delta)); }

void certification_warnings(ComplexityEstimate& e, const ChainConstants& constants) {
    for (const auto& name : constants.uncertified_constants()) {
        e.certified = false;
        e.warnings.push_back("non-certified constant " + name + " (sampled_estimate)");
    }
}

}  // namespace

std::string to_string(BoundKind k) {
    switch (k) {
        case BoundKind::margin_rademacher: return "margin_rademacher";
        case BoundKind::margin_uniform_gamma: return "margin_uniform_gamma";
        case BoundKind::a_posteriori: return "a_posteriori";
        case BoundKind::fast_rate: return "fast_rate";
        case BoundKind::fast_rate_general: return "fast_rate_general";
        case BoundKind::vc: return "vc";
        case BoundKind::convex_scenario: return "convex_scenario";
    }
    return "unknown";
}

BoundKind bound_kind_from_string(const std::string& s) {
    for (auto k : {BoundKind::margin_rademacher, BoundKind::margin_uniform_gamma, BoundKind::a_posteriori,
                   BoundKind::fast_rate, BoundKind::fast_rate_general, BoundKind::vc, BoundKind::convex_scenario})
        if (to_string(k) == s) return k;
    throw InvalidArgument("unknown bound kind '" + s + "'");
}

std::string to_string(RademacherMode m) { return m == RademacherMode::worst_case ? "worst_case" : "empirical"; }

RademacherMode rademacher_mode_from_string(const std::string& s) {
    if (s == "worst_case") return RademacherMode::worst_case;
    if (s == "empirical") return RademacherMode::empirical;
    throw InvalidArgument("unknown Rademacher mode '" + s + "'");
}

double Certificate::term(const std::string& name) const {
    for (const auto& t : terms)
        if (t.name == name) return t.value;
    throw InvalidArgument("certificate has no term '" + name + "'");
}

double Certificate::sum_terms() const {
    double s = 0.0;
    for (const auto& t : terms) s += t.value;
    return s;
}

nlohmann::json Certificate::to_json() const {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& term : terms) t.push_back({{"name", term.name}, {"value", term.value}});
    nlohmann::json j{{"kind", scenmargin::to_string(kind)},
                     {"value", value},
                     {"raw_value", raw_value},
                     {"terms", t},
                     {"loss", scenmargin::to_string(loss)},
                     {"inputs", inputs},
                     {"certified", certified},
                     {"warnings", warnings}};
    if (constants) {
        j["constants"] = constants->to_json();
        j["constants_hash"] = constants->snapshot_hash();
    }
    return j;
}

// ---- complexity terms ------------------------------------------------------

double rademacher_bound(const ChainConstants& constants, std::size_t n) {
    check_n(n);
    if (constants.components.empty()) throw InvalidArgument("rademacher_bound: missing constants");
    return constants.complexity_sum() / std::sqrt(static_cast<double>(n));
}

Vector psi_square_sums(const ConstraintChain& chain, const ScenarioSet& scenarios) {
    if (scenarios.dim() != chain.parameter_dim())
        throw InvalidArgument("scenario dimension does not match the chain");
    std::vector<CompensatedSum> sums(chain.size());
    ParameterFeatures pf;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        chain.parameter_features(scenarios.row(i), pf);
        for (std::size_t k = 0; k < chain.size(); ++k) sums[k].add(squared_norm(pf.psi[k]));
    }
    Vector out(chain.size());
    for (std::size_t k = 0; k < chain.size(); ++k) out[k] = sums[k].value();
    return out;
}

double empirical_rademacher_bound(const ChainConstants& constants, const Vector& psi_square_sums, std::size_t n) {
    check_n(n);
    if (psi_square_sums.size() != constants.components.size())
        throw InvalidArgument("empirical_rademacher_bound: one psi sum per component expected");
    double s = 0.0;
    for (std::size_t k = 0; k < psi_square_sums.size(); ++k) {
        const auto& c = constants.components[k];
        s += c.lipschitz_product * c.wrapper_lipschitz * c.lambda * std::sqrt(psi_square_sums[k]);
    }
    return s / static_cast<double>(n);
}

double empirical_rademacher_bound(const ChainConstants& constants, const ConstraintChain& chain,
                                  const ScenarioSet& scenarios) {
    return empirical_rademacher_bound(constants, psi_square_sums(chain, scenarios), scenarios.size());
}

// ---- violation certificates ------------------------------------------------

Certificate margin_bound(double vhat_gamma, const ChainConstants& constants, double gamma, double delta,
                         std::size_t n) {
    check_probability(vhat_gamma, "vhat_gamma");
    check_gamma(gamma);
    check_delta(delta);
    const double rad = rademacher_bound(constants, n);
    Certificate c;
    c.kind = BoundKind::margin_rademacher;
    c.terms = {{"empirical", vhat_gamma}, {"complexity", 2.0 / gamma * rad}, {"confidence", confidence_term(delta, n)}};
    c.inputs = {{"mode", "worst_case"}, {"vhat_gamma", vhat_gamma}, {"gamma", gamma},
                {"delta", delta},       {"n", n},                   {"rademacher", rad}};
    attach_constants(c, constants, true);
    return finish(std::move(c));
}

Certificate margin_bound_empirical(double vhat_gamma, const ChainConstants& constants, const Vector& sums,
                                   double gamma, double delta, std::size_t n) {
    check_probability(vhat_gamma, "vhat_gamma");
    check_gamma(gamma);
    check_delta(delta);
    const double rad = empirical_rademacher_bound(constants, sums, n);
    Certificate c;
    c.kind = BoundKind::margin_rademacher;
    c.terms = {{"empirical", vhat_gamma},
               {"complexity", 2.0 / gamma * rad},
               {"confidence", 3.0 * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)))}};
    c.inputs = {{"mode", "empirical"}, {"vhat_gamma", vhat_gamma}, {"gamma", gamma},         {"delta", delta},
                {"n", n},              {"rademacher", rad},        {"psi_square_sums", sums}};
    attach_constants(c, constants, false);
    return finish(std::move(c));
}

Certificate margin_bound_empirical(double vhat_gamma, const ChainConstants& constants, const ConstraintChain& chain,
                                   const ScenarioSet& scenarios, double gamma, double delta) {
    return margin_bound_empirical(vhat_gamma, constants, psi_square_sums(chain, scenarios), gamma, delta,
                                  scenarios.size());
}

Vector default_gamma_grid(double gamma_bar, std::size_t count) {
    check_gamma(gamma_bar);
    if (count == 0) throw InvalidArgument("gamma grid must be nonempty");
    Vector grid(count);
    for (std::size_t j = 0; j < count; ++j)
        grid[j] = gamma_bar * std::pow(100.0, -static_cast<double>(j) / static_cast<double>(count));
    return grid;
}

Certificate margin_bound_uniform_gamma(const std::function<double(double)>& vhat_gamma_of,
                                       const ChainConstants& constants, double gamma_bar, const Vector& gamma_grid,
                                       double delta, std::size_t n) {
    check_gamma(gamma_bar);
    check_delta(delta);
    if (gamma_grid.empty()) throw InvalidArgument("gamma grid must be nonempty");
    for (double g : gamma_grid) {
        check_gamma(g);
        if (g > gamma_bar) throw InvalidArgument("gamma grid point exceeds gamma_bar");
    }
    const double rad = rademacher_bound(constants, n);
    const double conf = confidence_term(delta, n);
    const auto nd = static_cast<double>(n);

    Vector vhats;
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<Term> best_terms;
    for (std::size_t j = 0; j < gamma_grid.size(); ++j) {
        const double g = gamma_grid[j];
        const double v = vhat_gamma_of(g);
        check_probability(v, "vhat_gamma");
        vhats.push_back(v);
        std::vector<Term> terms{{"empirical", v},
                                {"complexity", 4.0 / g * rad},
                                {"confidence", conf},
                                {"loglog", std::sqrt(std::log(std::log2(2.0 * gamma_bar / g)) / nd)}};
        double s = 0.0;
        for (const auto& t : terms) s += t.value;
        if (s < best_value) {
            best_value = s;
            best = j;
            best_terms = std::move(terms);
        }
    }
    Certificate c;
    c.kind = BoundKind::margin_uniform_gamma;
    c.terms = std::move(best_terms);
    c.inputs = {{"gamma_bar", gamma_bar}, {"gamma_grid", gamma_grid}, {"vhat_gamma", vhats},
                {"delta", delta},         {"n", n},                   {"rademacher", rad},
                {"gamma", gamma_grid[best]}};
    attach_constants(c, constants, true);
    return finish(std::move(c));
}

Certificate a_posteriori_bound(double vhat_gamma, double lambda_bar, const Vector& coefficients,
                               const Vector& sums, double gamma, double delta, std::size_t n) {
    check_probability(vhat_gamma, "vhat_gamma");
    check_gamma(gamma);
    check_delta(delta);
    check_n(n);
    if (!(lambda_bar >= 1.0)) throw InvalidArgument("lambda_bar must be at least 1");
    if (coefficients.size() != sums.size()) throw InvalidArgument("a_posteriori_bound: size mismatch");
    const auto nd = static_cast<double>(n);
    double s = 0.0;
    for (std::size_t k = 0; k < sums.size(); ++k) s += coefficients[k] * std::sqrt(sums[k]);
    Certificate c;
    c.kind = BoundKind::a_posteriori;
    c.terms = {{"empirical", vhat_gamma},
               {"complexity", 2.0 * lambda_bar * s / (gamma * nd)},
               {"confidence", 3.0 * std::sqrt(std::log(6.0 / delta) / (2.0 * nd))},
               {"loglog", 3.0 * std::sqrt(std::log(std::log2(2.0 * lambda_bar)) / nd)}};
    c.inputs = {{"vhat_gamma", vhat_gamma},     {"lambda_bar", lambda_bar}, {"coefficients", coefficients},
                {"psi_square_sums", sums},      {"gamma", gamma},           {"delta", delta},
                {"n", n}};
    return finish(std::move(c));
}

Certificate a_posteriori_bound(const ConstraintChain& chain, std::span<const double> x, const ScenarioSet& scenarios,
                               double gamma, double delta, const std::vector<Vector>& centers) {
    if (centers.size() != chain.size()) throw InvalidArgument("a_posteriori_bound: one center per component expected");
    const MarginSpec spec(gamma);
    const double vhat = empirical_risks(chain, x, scenarios, spec).margin_risk;
    const double lb = lambda_bar(chain, x, centers);
    const auto lip = constants_from_values(chain, Vector(chain.size(), 0.0), Vector(chain.size(), 0.0));
    Vector coefficients;
    for (const auto& c : lip.components) coefficients.push_back(c.lipschitz_product * c.wrapper_lipschitz);
    return a_posteriori_bound(vhat, lb, coefficients, psi_square_sums(chain, scenarios), gamma, delta,
                              scenarios.size());
}

Vector covering_scales(const ChainConstants& constants, double gamma) {
    check_gamma(gamma);
    Vector m;
    for (const auto& c : constants.components)
        m.push_back(std::ldexp(1.0, c.additive_ops) * c.wrapper_lipschitz * c.tau * c.lambda * c.lipschitz_product /
                    gamma);
    return m;
}

Certificate fast_rate_bound(const ChainConstants& constants, double gamma, double delta, std::size_t n,
                            double vhat_indicator) {
    check_probability(vhat_indicator, "vhat");
    check_delta(delta);
    check_n(n);
    if (constants.components.empty()) throw InvalidArgument("fast_rate_bound: missing constants");
    const auto scales = covering_scales(constants, gamma);
    const auto nd = static_cast<double>(n);
    double m = 0.0;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const double mk = scales[k];
        if (mk == 0.0) continue;
        if (60.0 * mk * nd <= 1.0)
            throw PreconditionError("covering-scale precondition violated: 60 M_" + std::to_string(k + 1) +
                                    " N <= 1");
        m += mk * mk * std::log(60.0 * mk * nd);
    }
    m *= 144.0;
    const double mc = m + std::log(4.0 / delta);
    Certificate c;
    c.kind = vhat_indicator == 0.0 ? BoundKind::fast_rate : BoundKind::fast_rate_general;
    c.loss = LossKind::indicator;
    c.terms = {{"empirical", vhat_indicator},
               {"cross", 2.0 * std::sqrt(vhat_indicator * mc / nd)},
               {"complexity_confidence", 4.0 * mc / nd}};
    c.inputs = {{"vhat", vhat_indicator}, {"gamma", gamma}, {"delta", delta}, {"n", n},
                {"covering_scales", scales}, {"M", m}};
    attach_constants(c, constants, true);
    return finish(std::move(c));
}

Certificate vc_bound(std::size_t d_vc, double vhat, double delta, std::size_t n) {
    check_probability(vhat, "vhat");
    check_delta(delta);
    if (d_vc == 0) throw InvalidArgument("VC dimension must be at least 1");
    if (n < d_vc) throw PreconditionError("vc_bound requires n >= d_vc");
    const auto nd = static_cast<double>(n);
    const auto dd = static_cast<double>(d_vc);
    Certificate c;
    c.kind = BoundKind::vc;
    c.loss = LossKind::indicator;
    c.terms = {{"empirical", vhat},
               {"complexity", 2.0 * std::sqrt(2.0 * dd * std::log(std::exp(1.0) * nd / dd) / nd)},
               {"confidence", confidence_term(delta, n)}};
    c.inputs = {{"d_vc", d_vc}, {"vhat", vhat}, {"delta", delta}, {"n", n}};
    return finish(std::move(c));
}

double convex_scenario_delta(std::size_t n, std::size_t d, double epsilon) {
    check_epsilon(epsilon);
    if (d < 1 || d > n) throw InvalidArgument("convex_scenario_delta requires 1 <= d <= n");
    const auto nl = static_cast<long double>(n);
    const long double le = std::log(static_cast<long double>(epsilon));
    const long double l1e = std::log1p(-static_cast<long double>(epsilon));
    const long double lfn = std::lgamma(nl + 1.0L);
    std::vector<long double> logs(d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto jl = static_cast<long double>(j);
        logs[j] = lfn - std::lgamma(jl + 1.0L) - std::lgamma(nl - jl + 1.0L) + jl * le + (nl - jl) * l1e;
    }
    const long double top = *std::max_element(logs.begin(), logs.end());
    std::vector<long double> scaled(d);
    for (std::size_t j = 0; j < d; ++j) scaled[j] = std::exp(logs[j] - top);
    std::sort(scaled.begin(), scaled.end());
    long double sum = 0.0L, comp = 0.0L;
    for (long double v : scaled) {
        const long double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    const long double result = std::exp(top + std::log(sum + comp));
    return static_cast<double>(std::clamp(result, 0.0L, 1.0L));
}

Certificate convex_scenario_certificate(std::size_t n, std::size_t d, double delta) {
    check_delta(delta);
    if (d < 1 || d > n) throw InvalidArgument("convex_scenario_certificate requires 1 <= d <= n");
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (convex_scenario_delta(n, d, mid) <= delta)
            hi = mid;
        else
            lo = mid;
    }
    Certificate c;
    c.kind = BoundKind::convex_scenario;
    c.loss = LossKind::indicator;
    c.terms = {{"epsilon", hi}};
    c.inputs = {{"n", n}, {"d", d}, {"delta", delta}, {"achieved_delta", hi < 1.0 ? convex_scenario_delta(n, d, hi) : 0.0}};
    return finish(std::move(c));
}

Certificate replay_certificate(const nlohmann::json& j) {
    try {
        const auto kind = bound_kind_from_string(j.at("kind").get<std::string>());
        const auto& in = j.at("inputs");
        auto constants = [&] { return ChainConstants::from_json(j.at("constants")); };
        switch (kind) {
            case BoundKind::margin_rademacher:
                if (in.at("mode").get<std::string>() == "empirical")
                    return margin_bound_empirical(in.at("vhat_gamma"), constants(), in.at("psi_square_sums").get<Vector>(),
                                                  in.at("gamma"), in.at("delta"), in.at("n"));
                return margin_bound(in.at("vhat_gamma"), constants(), in.at("gamma"), in.at("delta"), in.at("n"));
            case BoundKind::margin_uniform_gamma: {
                const auto grid = in.at("gamma_grid").get<Vector>();
                const auto vhats = in.at("vhat_gamma").get<Vector>();
                if (grid.size() != vhats.size()) throw InvalidArgument("grid and vhat table differ in length");
                auto lookup = [&](double g) {
                    for (std::size_t i = 0; i < grid.size(); ++i)
                        if (grid[i] == g) return vhats[i];
                    throw InvalidArgument("gamma not in recorded grid");
                };
                return margin_bound_uniform_gamma(lookup, constants(), in.at("gamma_bar"), grid, in.at("delta"),
                                                  in.at("n"));
            }
            case BoundKind::a_posteriori:
                return a_posteriori_bound(in.at("vhat_gamma"), in.at("lambda_bar"), in.at("coefficients").get<Vector>(),
                                          in.at("psi_square_sums").get<Vector>(), in.at("gamma"), in.at("delta"),
                                          in.at("n"));
            case BoundKind::fast_rate:
            case BoundKind::fast_rate_general:
                return fast_rate_bound(constants(), in.at("gamma"), in.at("delta"), in.at("n"), in.at("vhat"));
            case BoundKind::vc:
                return vc_bound(in.at("d_vc"), in.at("vhat"), in.at("delta"), in.at("n"));
            case BoundKind::convex_scenario:
                return convex_scenario_certificate(in.at("n"), in.at("d"), in.at("delta"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("certificate replay: ") + e.what());
    }
    throw InvalidArgument("certificate replay: unknown kind");
}

// ---- complexities ----------------------------------------------------------

std::string to_string(ComplexityKind k) {
    switch (k) {
        case ComplexityKind::margin_sample_complexity: return "margin_sample_complexity";
        case ComplexityKind::convex_sample_complexity: return "convex_sample_complexity";
        case ComplexityKind::margin_complexity: return "margin_complexity";
    }
    return "unknown";
}

nlohmann::json ComplexityEstimate::to_json() const {
    nlohmann::json j{{"kind", scenmargin::to_string(kind)},
                     {"value", value},
                     {"inputs", inputs},
                     {"certified", certified},
                     {"warnings", warnings}};
    if (rounded) j["rounded"] = *rounded;
    return j;
}

ComplexityEstimate margin_sample_complexity(double epsilon, double delta, const ChainConstants& constants,
                                            double gamma) {
    check_epsilon(epsilon);
    check_delta(delta);
    check_gamma(gamma);
    const double s = constants.complexity_sum();
    const double root = 2.0 / gamma * s + half_log_root(delta);
    ComplexityEstimate e;
    e.kind = ComplexityKind::margin_sample_complexity;
    e.value = root * root / (epsilon * epsilon);
    e.rounded = static_cast<long long>(std::ceil(e.value));
    e.inputs = {{"epsilon", epsilon}, {"delta", delta}, {"gamma", gamma}, {"complexity_sum", s},
                {"constants_hash", constants.snapshot_hash()}};
    certification_warnings(e, constants);
    return e;
}

ComplexityEstimate convex_sample_complexity(double epsilon, double delta, std::size_t d) {
    check_epsilon(epsilon);
    check_delta(delta);
    ComplexityEstimate e;
    e.kind = ComplexityKind::convex_sample_complexity;
    e.value = (2.0 * static_cast<double>(d) + 2.0 * std::log(1.0 / delta)) / epsilon;
    e.rounded = static_cast<long long>(std::ceil(e.value));
    e.inputs = {{"epsilon", epsilon}, {"delta", delta}, {"d", d}};
    return e;
}

long long dimension_crossover(double epsilon, double delta, const ChainConstants& constants, double gamma) {
    const auto n = margin_sample_complexity(epsilon, delta, constants, gamma);
    return static_cast<long long>(std::floor(n.value * epsilon / 2.0)) + 1;
}

ComplexityEstimate margin_complexity(std::size_t n, double epsilon, double delta, const ChainConstants& constants) {
    check_n(n);
    check_epsilon(epsilon);
    check_delta(delta);
    const double s = constants.complexity_sum();
    const double denom = epsilon * std::sqrt(static_cast<double>(n)) - half_log_root(delta);
    if (!(denom > 0.0)) throw PreconditionError("budget too small for target (ε, δ)");
    ComplexityEstimate e;
    e.kind = ComplexityKind::margin_complexity;
    e.value = 2.0 * s / denom;
    e.inputs = {{"n", n}, {"epsilon", epsilon}, {"delta", delta}, {"complexity_sum", s},
                {"constants_hash", constants.snapshot_hash()}};
    certification_warnings(e, constants);
    return e;
}

}  // namespace scenmargin
