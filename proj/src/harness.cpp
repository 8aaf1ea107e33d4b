#include "scenmargin/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>

#include "scenmargin/oracles.hpp"
#include "scenmargin/parallel.hpp"

namespace scenmargin {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <class T>
T field(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + "/" + key + ": missing required field");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + "/" + key + ": " + e.what());
    }
}

template <class T>
T field_or(const nlohmann::json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    return field<T>(obj, key, where);
}

ScenarioSet problem_scenarios(const ExperimentConfig& config, std::size_t n, std::uint64_t seed) {
    const auto& p = config.problem;
    if (p.contains("scenarios")) {
        const auto& s = p.at("scenarios");
        if (s.is_string()) return ScenarioSet::from_rows(read_scenario_csv(resolve(config.base_dir, s.get<std::string>())));
        return ScenarioSet::from_rows(s.get<std::vector<Vector>>());
    }
    return sample_scenarios(config.require_distribution(), n, seed, config.workers);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

std::vector<Vector> zero_centers(const ConstraintChain& chain) {
    std::vector<Vector> c;
    for (const auto& comp : chain.components()) c.emplace_back(comp.phi.output_dim(), 0.0);
    return c;
}

}  // namespace

// ---- config ----------------------------------------------------------------

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return from_json(j, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("/: config must be a JSON object");
    ExperimentConfig c;
    c.base_dir = base_dir;
    c.raw = j;
    try {
        if (j.contains("chain")) {
            const auto& ch = j.at("chain");
            c.chain = ch.is_string() ? load_chain_file(resolve(base_dir, ch.get<std::string>())) : build_chain(ch);
        }
    } catch (const Error& e) {
        throw ConfigError(std::string("/chain: ") + e.what());
    }
    try {
        if (j.contains("distribution")) c.distribution = distribution_from_json(j.at("distribution"), base_dir);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("/distribution: ") + e.what());
    }
    try {
        if (j.contains("solver")) c.solver = SolverConfig::from_json(j.at("solver"));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("/solver: ") + e.what());
    }
    c.constants = j.value("constants", nlohmann::json::object());
    c.certificates = j.value("certificates", nlohmann::json::array());
    if (!c.certificates.is_array()) throw ConfigError("/certificates: must be an array");
    c.problem = j.value("problem", nlohmann::json::object());
    c.complexity = j.value("complexity", nlohmann::json::object());
    const auto validation = j.value("validation", nlohmann::json::object());
    c.validation_samples = field_or<std::size_t>(validation, "samples", c.validation_samples, "/validation");
    c.alpha = field_or<double>(validation, "alpha", c.alpha, "/validation");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("/validation/alpha: must lie in (0, 1)");
    if (c.validation_samples == 0) throw ConfigError("/validation/samples: must be positive");
    c.repetitions = field_or<std::size_t>(j, "repetitions", c.repetitions, "");
    if (c.repetitions == 0) throw ConfigError("/repetitions: must be at least 1");
    c.seed = field_or<std::uint64_t>(j, "seed", c.seed, "");
    c.workers = field_or<unsigned>(j, "workers", c.workers, "");
    c.output_dir = resolve(base_dir, field_or<std::string>(j, "output", "out", ""));
    if (c.chain && c.distribution && parameter_dim(*c.distribution) != c.chain->chain.parameter_dim())
        throw ConfigError("/distribution: dimension does not match the chain's parameter dimension");
    return c;
}

const ChainDescription& ExperimentConfig::require_chain() const {
    if (!chain) throw ConfigError("/chain: missing required field");
    return *chain;
}

const DistributionSpec& ExperimentConfig::require_distribution() const {
    if (!distribution) throw ConfigError("/distribution: missing required field");
    return *distribution;
}

ChainConstants resolve_constants(const ExperimentConfig& config) {
    const auto& spec = config.constants;
    const auto& desc = config.require_chain();
    if (spec.contains("taus") || spec.contains("lambdas")) {
        auto out = constants_from_values(desc.chain, field<Vector>(spec, "taus", "/constants"),
                                         field<Vector>(spec, "lambdas", "/constants"));
        if (spec.contains("certification")) {
            const auto cert = certification_from_string(field<std::string>(spec, "certification", "/constants"));
            for (auto& c : out.components) c.tau_certification = c.lambda_certification = cert;
        }
        return out;
    }
    ThetaSupport support{config.require_distribution(), field_or<std::size_t>(spec, "sample_budget", 0, "/constants"),
                         field_or<std::uint64_t>(spec, "seed", config.seed, "/constants")};
    const auto centers = field_or<std::vector<Vector>>(spec, "centers", {}, "/constants");
    return compute_constants(desc.chain, desc.domain, support, centers);
}

std::uint64_t repetition_seed(std::uint64_t master, std::uint64_t r) {
    return CounterRng::substream(master, Purpose::repetition, r).key();
}

// ---- certify ---------------------------------------------------------------

RunReport run_certify(const ExperimentConfig& config) {
    if (config.certificates.empty()) throw ConfigError("/certificates: nothing to do");
    std::optional<ChainConstants> constants;
    auto get_constants = [&]() -> const ChainConstants& {
        if (!constants) constants = resolve_constants(config);
        return *constants;
    };

    RunReport out;
    out.report = {{"certificates", nlohmann::json::array()}, {"certified", true}};
    bool refused = false, uncertified = false;
    for (std::size_t idx = 0; idx < config.certificates.size(); ++idx) {
        const auto& req = config.certificates[idx];
        const std::string where = "/certificates/" + std::to_string(idx);
        nlohmann::json entry{{"request", req}};
        try {
            const auto kind = bound_kind_from_string(field<std::string>(req, "bound", where));
            const std::size_t n = field_or<std::size_t>(req, "n", config.problem.value("n", std::size_t{0}), where);
            std::optional<Vector> x;
            if (req.contains("x")) x = field<Vector>(req, "x", where);
            std::optional<ScenarioSet> scenarios;
            auto get_scenarios = [&]() -> const ScenarioSet& {
                if (!scenarios) scenarios = sample_scenarios(config.require_distribution(), n, config.seed, config.workers);
                return *scenarios;
            };
            auto risk_at = [&](double gamma, LossKind loss) {
                if (!x) return 0.0;
                const auto& chain = config.require_chain().chain;
                return empirical_risks(chain, *x, get_scenarios(), MarginSpec(gamma, loss)).margin_risk;
            };
            Certificate cert;
            switch (kind) {
                case BoundKind::margin_rademacher: {
                    const double gamma = field<double>(req, "gamma", where);
                    const double delta = field<double>(req, "delta", where);
                    const auto mode = rademacher_mode_from_string(field_or<std::string>(req, "mode", "worst_case", where));
                    const double vhat = req.contains("vhat_gamma") ? field<double>(req, "vhat_gamma", where)
                                                                   : risk_at(gamma, LossKind::piecewise);
                    cert = mode == RademacherMode::worst_case
                               ? margin_bound(vhat, get_constants(), gamma, delta, n)
                               : margin_bound_empirical(vhat, get_constants(), config.require_chain().chain,
                                                        get_scenarios(), gamma, delta);
                    break;
                }
                case BoundKind::margin_uniform_gamma: {
                    const double gamma_bar = field<double>(req, "gamma_bar", where);
                    const auto grid = req.contains("grid")
                                          ? field<Vector>(req, "grid", where)
                                          : default_gamma_grid(gamma_bar, field_or<std::size_t>(req, "grid_size", 16, where));
                    std::function<double(double)> vhat_of = [&](double g) { return risk_at(g, LossKind::piecewise); };
                    if (req.contains("vhat_gamma")) {
                        const double v = field<double>(req, "vhat_gamma", where);
                        vhat_of = [v](double) { return v; };
                    }
                    cert = margin_bound_uniform_gamma(vhat_of, get_constants(), gamma_bar, grid,
                                                      field<double>(req, "delta", where), n);
                    break;
                }
                case BoundKind::a_posteriori: {
                    const auto& chain = config.require_chain().chain;
                    if (!x) throw ConfigError(where + "/x: missing required field");
                    const auto centers = field_or<std::vector<Vector>>(req, "centers", zero_centers(chain), where);
                    cert = a_posteriori_bound(chain, *x, get_scenarios(), field<double>(req, "gamma", where),
                                              field<double>(req, "delta", where), centers);
                    break;
                }
                case BoundKind::fast_rate:
                case BoundKind::fast_rate_general: {
                    const double gamma = field<double>(req, "gamma", where);
                    const double vhat = req.contains("vhat") ? field<double>(req, "vhat", where)
                                                             : risk_at(gamma, LossKind::indicator);
                    cert = fast_rate_bound(get_constants(), gamma, field<double>(req, "delta", where), n, vhat);
                    break;
                }
                case BoundKind::vc:
                    cert = vc_bound(field<std::size_t>(req, "d_vc", where), field_or<double>(req, "vhat", 0.0, where),
                                    field<double>(req, "delta", where), n);
                    break;
                case BoundKind::convex_scenario:
                    cert = convex_scenario_certificate(n, field<std::size_t>(req, "d", where),
                                                       field<double>(req, "delta", where));
                    break;
            }
            entry["certificate"] = cert.to_json();
            if (!cert.certified) uncertified = true;
        } catch (const PreconditionError& e) {
            entry["refused"] = e.what();
            refused = true;
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(where + ": " + e.what());
        }
        out.report["certificates"].push_back(entry);
    }
    out.report["certified"] = !uncertified;
    if (refused)
        out.exit_code = exit_precondition;
    else if (uncertified)
        out.exit_code = exit_uncertified;
    return out;
}

// ---- solve / validate / complexity ----------------------------------------

namespace {

struct SolveOutput {
    SolveResult result;
    nlohmann::json extra = nlohmann::json::object();
};

SolveOutput solve_problem(const ExperimentConfig& config) {
    const auto& p = config.problem;
    const std::string where = "/problem";
    const auto& desc = config.require_chain();
    const auto kind = field_or<std::string>(p, "kind", "hard_margin", where);
    SolverConfig cfg = config.solver;
    cfg.workers = config.workers;
    if (!config.solver.seed) cfg.seed = config.seed;

    if (kind == "fixed_budget") {
        const auto constants = resolve_constants(config);
        const auto objective = Objective::from_json(p.value("objective", nlohmann::json{{"kind", "zero"}}));
        auto fb = fixed_budget_procedure(desc.chain, constants, field<std::size_t>(p, "n", where),
                                         field<double>(p, "epsilon", where), field<double>(p, "delta", where),
                                         desc.domain, objective, config.require_distribution(), config.seed, cfg);
        SolveOutput o{std::move(fb.solve)};
        o.extra["certificate"] = fb.certificate.to_json();
        o.extra["gamma"] = fb.gamma;
        return o;
    }
    const std::size_t n = field_or<std::size_t>(p, "n", 0, where);
    if (!p.contains("scenarios") && n == 0) throw ConfigError(where + "/n: missing required field");
    const auto scenarios = problem_scenarios(config, n, config.seed);
    SolveOutput o;
    if (kind == "hard_margin") {
        o.result = solve_hard_margin(desc.chain, scenarios, field<double>(p, "gamma", where), desc.domain, cfg,
                                     field_or<bool>(p, "stop_when_feasible", true, where));
    } else if (kind == "soft_margin") {
        o.result = solve_soft_margin(desc.chain, scenarios, field<double>(p, "gamma", where), desc.domain, cfg);
    } else if (kind == "max_margin") {
        o.result = solve_max_margin(desc.chain, scenarios, desc.domain, cfg);
    } else if (kind == "objective") {
        std::optional<double> lambda;
        if (p.contains("lambda")) lambda = field<double>(p, "lambda", where);
        o.result = solve_with_objective(desc.chain, scenarios, field_or<double>(p, "gamma", 0.0, where), desc.domain,
                                        Objective::from_json(p.value("objective", nlohmann::json{{"kind", "zero"}})),
                                        cfg, lambda);
    } else if (kind == "regularized") {
        const auto centers = field_or<std::vector<Vector>>(p, "centers", zero_centers(desc.chain), where);
        o.result = solve_regularized(desc.chain, scenarios, field<double>(p, "gamma", where), desc.domain, centers, cfg);
    } else {
        throw ConfigError(where + "/kind: unknown problem kind '" + kind + "'");
    }
    o.extra["n"] = scenarios.size();
    return o;
}

}  // namespace

RunReport run_solve(const ExperimentConfig& config) {
    try {
        auto o = solve_problem(config);
        RunReport r;
        r.report = {{"solve", o.result.to_json()}};
        for (auto& [k, v] : o.extra.items()) r.report[k] = v;
        if (o.extra.contains("certificate") && !o.extra["certificate"].value("certified", true))
            r.exit_code = exit_uncertified;
        return r;
    } catch (const ConfigError&) {
        throw;
    } catch (const PreconditionError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("/problem: ") + e.what());
    }
}

RunReport run_validate(const ExperimentConfig& config) {
    const auto& desc = config.require_chain();
    RunReport r;
    Vector x;
    if (config.problem.contains("x")) {
        x = field<Vector>(config.problem, "x", "/problem");
    } else {
        auto o = solve_problem(config);
        r.report["solve"] = o.result.to_json();
        x = o.result.x;
    }
    try {
        const auto est = monte_carlo_violation(desc.chain, x, config.require_distribution(), config.validation_samples,
                                               config.seed, config.alpha, config.workers);
        r.report["x"] = x;
        r.report["violation"] = est.to_json();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("/problem: ") + e.what());
    }
    return r;
}

RunReport run_complexity(const ExperimentConfig& config) {
    const auto& c = config.complexity;
    const std::string where = "/complexity";
    if (c.empty()) throw ConfigError(where + ": nothing to do");
    RunReport r;
    r.report = {{"entries", nlohmann::json::array()}};
    const double epsilon = field<double>(c, "epsilon", where);
    const double delta = field<double>(c, "delta", where);
    try {
        if (c.contains("d"))
            r.report["entries"].push_back(
                convex_sample_complexity(epsilon, delta, field<std::size_t>(c, "d", where)).to_json());
        const bool needs_constants = c.contains("gamma") || c.contains("n");
        if (!needs_constants) return r;
        const auto constants = resolve_constants(config);
        if (!constants.certified()) r.exit_code = exit_uncertified;
        if (c.contains("gamma")) {
            const double gamma = field<double>(c, "gamma", where);
            r.report["entries"].push_back(margin_sample_complexity(epsilon, delta, constants, gamma).to_json());
            r.report["dimension_crossover"] = dimension_crossover(epsilon, delta, constants, gamma);
        }
        if (c.contains("n")) {
            try {
                r.report["entries"].push_back(
                    margin_complexity(field<std::size_t>(c, "n", where), epsilon, delta, constants).to_json());
            } catch (const PreconditionError& e) {
                r.report["entries"].push_back({{"kind", "margin_complexity"}, {"refused", e.what()}});
                r.exit_code = exit_precondition;
            }
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return r;
}

// ---- coverage --------------------------------------------------------------

nlohmann::json CoverageReport::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records)
        recs.push_back({{"repetition", r.repetition},
                        {"seed", r.seed},
                        {"vhat_gamma", r.vhat_gamma},
                        {"bound", r.bound},
                        {"mc_estimate", r.mc_estimate},
                        {"mc_upper", r.mc_upper},
                        {"covered", r.covered},
                        {"status", r.status}});
    return {{"repetitions", repetitions}, {"n", n},         {"gamma", gamma},         {"delta", delta},
            {"target", target},           {"covered", covered}, {"frequency", frequency}, {"p_value", p_value},
            {"certified", certified},     {"warnings", warnings}, {"records", recs}};
}

std::string CoverageReport::to_csv() const {
    std::ostringstream ss;
    ss << "repetition,seed,vhat_gamma,bound,mc_estimate,mc_upper,covered,status\n";
    for (const auto& r : records)
        ss << r.repetition << ',' << r.seed << ',' << fmt(r.vhat_gamma) << ',' << fmt(r.bound) << ','
           << fmt(r.mc_estimate) << ',' << fmt(r.mc_upper) << ',' << (r.covered ? 1 : 0) << ',' << r.status << '\n';
    return ss.str();
}

CoverageReport run_coverage(const ExperimentConfig& config) {
    const auto& p = config.problem;
    const std::string where = "/problem";
    const auto& desc = config.require_chain();
    const auto& dist = config.require_distribution();
    CoverageReport rep;
    rep.repetitions = config.repetitions;
    rep.n = field<std::size_t>(p, "n", where);
    rep.gamma = field<double>(p, "gamma", where);
    rep.delta = field<double>(p, "delta", where);
    if (!(rep.gamma > 0.0)) throw ConfigError(where + "/gamma: must be positive");
    if (!(rep.delta > 0.0 && rep.delta < 1.0)) throw ConfigError(where + "/delta: must lie in (0, 1)");
    rep.target = 1.0 - rep.delta;
    const auto mode = rademacher_mode_from_string(field_or<std::string>(p, "mode", "worst_case", where));
    const auto constants = resolve_constants(config);
    rep.records.resize(rep.repetitions);

    SolverConfig cfg = config.solver;
    cfg.workers = 1;
    parallel_for(rep.repetitions, config.workers, [&](std::size_t r) {
        const auto seed = repetition_seed(config.seed, r);
        const auto scenarios = sample_scenarios(dist, rep.n, seed);
        SolverConfig local = cfg;
        local.seed = seed;
        const auto solve = solve_hard_margin(desc.chain, scenarios, rep.gamma, desc.domain, local);
        const double vhat = solve.risk.margin_risk;
        const auto cert = mode == RademacherMode::worst_case
                              ? margin_bound(vhat, constants, rep.gamma, rep.delta, rep.n)
                              : margin_bound_empirical(vhat, constants, desc.chain, scenarios, rep.gamma, rep.delta);
        const auto mc = monte_carlo_violation(desc.chain, solve.x, dist, config.validation_samples, seed, config.alpha);
        auto& rec = rep.records[r];
        rec.repetition = r;
        rec.seed = seed;
        rec.vhat_gamma = vhat;
        rec.bound = cert.value;
        rec.mc_estimate = mc.estimate;
        rec.mc_upper = mc.upper;
        rec.covered = mc.estimate <= cert.value;
        rec.status = to_string(solve.status);
    });
    for (const auto& r : rep.records) rep.covered += r.covered ? 1 : 0;
    rep.frequency = static_cast<double>(rep.covered) / static_cast<double>(rep.repetitions);
    const boost::math::binomial_distribution<double> h0(static_cast<double>(rep.repetitions), rep.target);
    rep.p_value = boost::math::cdf(h0, static_cast<double>(rep.covered));
    rep.certified = constants.certified();
    if (rep.repetitions < 30) rep.warnings.push_back("fewer than 30 repetitions: coverage frequency is not meaningful");
    for (const auto& name : constants.uncertified_constants())
        rep.warnings.push_back("non-certified constant " + name + " (sampled_estimate)");
    return rep;
}

// ---- figures ---------------------------------------------------------------

std::vector<Vector> circle_figure_scenarios() {
    std::vector<Vector> rows;
    for (double deg : {30.0, 120.0, 170.0, -30.0, -100.0}) {
        const double a = deg * std::numbers::pi / 180.0;
        rows.push_back({std::cos(a), std::sin(a)});
    }
    return rows;
}

std::vector<Vector> ellipse_tangent_scenarios() {
    // Arc length of the drawn curve (0.5 sin t, 2.8 cos t), t in [-pi, pi].
    constexpr std::size_t steps = 200000;
    const double pi = std::numbers::pi;
    Vector ts(steps + 1), length(steps + 1, 0.0);
    for (std::size_t i = 0; i <= steps; ++i) ts[i] = -pi + 2.0 * pi * static_cast<double>(i) / steps;
    for (std::size_t i = 1; i <= steps; ++i) {
        const double dx = 0.5 * (std::sin(ts[i]) - std::sin(ts[i - 1]));
        const double dy = 2.8 * (std::cos(ts[i]) - std::cos(ts[i - 1]));
        length[i] = length[i - 1] + std::hypot(dx, dy);
    }
    std::vector<Vector> rows;
    for (double frac : {0.01, 0.05, 0.1, 0.3, 0.45, 0.52, 0.73, 0.96}) {
        const double target = frac * length.back();
        const auto it = std::lower_bound(length.begin(), length.end(), target);
        const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - length.begin()));
        const double w = (target - length[i - 1]) / (length[i] - length[i - 1]);
        const double t = ts[i - 1] + w * (ts[i] - ts[i - 1]);
        const double a = std::sin(t), b = std::cos(t) / 4.0, len = std::hypot(a, b);
        rows.push_back({a / len, b / len, 1.0 / len});
    }
    return rows;
}

nlohmann::json FigureSummary::to_json() const {
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.string());
    return {{"standard_x", standard_x},
            {"standard_violation", standard_violation},
            {"standard_mc", standard_mc},
            {"margin_x", margin_x},
            {"margin_violation", margin_violation},
            {"hard_gamma", hard_gamma},
            {"soft_gamma", soft_gamma},
            {"soft_slack_sum", soft_slack_sum},
            {"soft_margin_violations", soft_margin_violations},
            {"crossover_sufficient", crossover_sufficient},
            {"crossover_actual", crossover_actual},
            {"files", names}};
}

FigureSummary reproduce_figures(const std::filesystem::path& out_dir, std::uint64_t seed, unsigned workers,
                                std::size_t mc_samples) {
    std::filesystem::create_directories(out_dir);
    FigureSummary s;
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.workers = workers;

    // Circle instance: minimize -u^T x with u pointing at -65 degrees.
    const auto circle = circle_chain(2, 2.0);
    const auto circle_rows = circle_figure_scenarios();
    const auto circle_set = ScenarioSet::from_rows(circle_rows);
    const double a = -65.0 * std::numbers::pi / 180.0;
    const auto objective = Objective::linear({-std::cos(a), -std::sin(a)});
    const auto standard = solve_with_objective(circle.chain, circle_set, 0.0, circle.domain, objective, cfg);
    const auto margin = solve_with_objective(circle.chain, circle_set, 0.3, circle.domain, objective, cfg);
    const auto hard = solve_hard_margin(circle.chain, circle_set, 0.3, circle.domain, cfg);
    const DistributionSpec sphere = UnitSphere{2};
    s.standard_x = standard.x;
    s.standard_violation = exact_violation_circle(standard.x);
    s.standard_mc = monte_carlo_violation(circle.chain, standard.x, sphere, mc_samples, seed, 0.05, workers).estimate;
    s.margin_x = margin.x;
    s.margin_violation = exact_violation_circle(margin.x);
    {
        std::ostringstream ss;
        ss << "panel,solver,gamma,x1,x2,norm,exact_violation,mc_violation,status\n";
        auto row = [&](const char* panel, const char* solver, const SolveResult& r, double mc) {
            ss << panel << ',' << solver << ',' << fmt(r.gamma) << ',' << fmt(r.x[0]) << ',' << fmt(r.x[1]) << ','
               << fmt(norm(r.x)) << ',' << fmt(exact_violation_circle(r.x)) << ',' << fmt(mc) << ','
               << to_string(r.status) << '\n';
        };
        row("left", "standard", standard, s.standard_mc);
        row("right", "margin", margin,
            monte_carlo_violation(circle.chain, margin.x, sphere, mc_samples, seed, 0.05, workers).estimate);
        row("right", "hard_margin", hard,
            monte_carlo_violation(circle.chain, hard.x, sphere, mc_samples, seed, 0.05, workers).estimate);
        write_text(out_dir / "fig1.csv", ss.str());
        write_scenario_csv(out_dir / "fig1_scenarios.csv", circle_rows);
        s.files.push_back(out_dir / "fig1.csv");
        s.files.push_back(out_dir / "fig1_scenarios.csv");
    }

    // Ellipse instance: hard margin versus soft margin with one dropped constraint.
    {
        const auto ellipse = halfplane_chain(2, 5.0);
        const auto rows = ellipse_tangent_scenarios();
        const auto set = ScenarioSet::from_rows(rows);
        const auto hard_ellipse = solve_max_margin(ellipse.chain, set, ellipse.domain, cfg);
        s.hard_gamma = hard_ellipse.gamma;
        std::size_t dropped = 0;
        double loo_gamma = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::vector<Vector> rest;
            for (std::size_t k = 0; k < rows.size(); ++k)
                if (k != i) rest.push_back(rows[k]);
            const auto r = solve_max_margin(ellipse.chain, ScenarioSet::from_rows(rest), ellipse.domain, cfg);
            if (r.gamma > loo_gamma) {
                loo_gamma = r.gamma;
                dropped = i;
            }
        }
        s.soft_gamma = loo_gamma;
        const auto soft = solve_soft_margin(ellipse.chain, set, s.soft_gamma, ellipse.domain, cfg);
        s.soft_slack_sum = *soft.objective;
        s.soft_margin_violations = soft.risk.margin_violations;
        std::ostringstream ss;
        ss << "solver,gamma,x1,x2,slack_sum,margin_violations,margin_risk,dropped_scenario\n";
        ss << "hard_margin," << fmt(s.hard_gamma) << ',' << fmt(hard_ellipse.x[0]) << ',' << fmt(hard_ellipse.x[1])
           << ",0," << hard_ellipse.risk.margin_violations << ',' << fmt(hard_ellipse.risk.margin_risk) << ",\n";
        ss << "soft_margin," << fmt(s.soft_gamma) << ',' << fmt(soft.x[0]) << ',' << fmt(soft.x[1]) << ','
           << fmt(s.soft_slack_sum) << ',' << soft.risk.margin_violations << ',' << fmt(soft.risk.margin_risk) << ','
           << dropped << '\n';
        write_text(out_dir / "fig2.csv", ss.str());
        write_scenario_csv(out_dir / "fig2_scenarios.csv", rows);
        s.files.push_back(out_dir / "fig2.csv");
        s.files.push_back(out_dir / "fig2_scenarios.csv");
    }

    // Sample-complexity crossover: tau Lambda / gamma = 2, epsilon = 0.03, delta = 0.001.
    {
        const auto constants = ChainConstants::single(1.0, 2.0);
        const double eps = 0.03, delta = 0.001, gamma = 1.0;
        const auto nm = margin_sample_complexity(eps, delta, constants, gamma);
        const double rhs = nm.value * eps / 2.0;
        std::ostringstream ss;
        ss << "d,n_margin,n_margin_ceil,n_convex,n_convex_ceil,convex_exceeds_margin,sufficient_condition\n";
        for (std::size_t d = 100; d <= 1000; ++d) {
            const auto nc = convex_sample_complexity(eps, delta, d);
            const bool exceeds = nc.value > nm.value;
            const bool sufficient = static_cast<double>(d) > rhs;
            if (exceeds && s.crossover_actual == 0) s.crossover_actual = static_cast<long long>(d);
            if (sufficient && s.crossover_sufficient == 0) s.crossover_sufficient = static_cast<long long>(d);
            ss << d << ',' << fmt(nm.value) << ',' << *nm.rounded << ',' << fmt(nc.value) << ',' << *nc.rounded << ','
               << (exceeds ? 1 : 0) << ',' << (sufficient ? 1 : 0) << '\n';
        }
        write_text(out_dir / "crossover.csv", ss.str());
        s.files.push_back(out_dir / "crossover.csv");
    }
    return s;
}

}  // namespace scenmargin
