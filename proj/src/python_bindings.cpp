#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scenmargin/certificates.hpp"
#include "scenmargin/chain_io.hpp"
#include "scenmargin/harness.hpp"
#include "scenmargin/oracles.hpp"
#include "scenmargin/scenario.hpp"
#include "scenmargin/solvers.hpp"

namespace py = pybind11;
using namespace scenmargin;

namespace {

using Json = nlohmann::json;

ChainDescription chain_from(const std::string& spec) { return build_chain(Json::parse(spec)); }

ChainConstants constants_from(const std::string& j) { return ChainConstants::from_json(Json::parse(j)); }

DistributionSpec distribution_from(const std::string& j) { return distribution_from_json(Json::parse(j)); }

SolverConfig solver_from(const std::string& j) { return j.empty() ? SolverConfig{} : SolverConfig::from_json(Json::parse(j)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Margin-based scenario optimization core (JSON in, JSON out)";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("circle_chain", [] { return to_json(circle_chain()).dump(); });
    m.def("evaluate", [](const std::string& chain, const Vector& x, const Vector& theta) {
        return chain_from(chain).chain.evaluate(x, theta);
    });
    m.def("compute_constants", [](const std::string& chain, const std::string& dist, std::size_t budget,
                                  std::uint64_t seed) {
        const auto d = chain_from(chain);
        return compute_constants(d.chain, d.domain, {distribution_from(dist), budget, seed}).to_json().dump();
    }, py::arg("chain"), py::arg("distribution"), py::arg("sample_budget") = 0, py::arg("seed") = 0);
    m.def("constants_single", [](double tau, double lambda) { return ChainConstants::single(tau, lambda).to_json().dump(); });

    m.def("margin_bound", [](double vhat, const std::string& k, double gamma, double delta, std::size_t n) {
        return margin_bound(vhat, constants_from(k), gamma, delta, n).to_json().dump();
    });
    m.def("fast_rate_bound", [](const std::string& k, double gamma, double delta, std::size_t n, double vhat) {
        return fast_rate_bound(constants_from(k), gamma, delta, n, vhat).to_json().dump();
    });
    m.def("vc_bound", [](std::size_t d, double vhat, double delta, std::size_t n) {
        return vc_bound(d, vhat, delta, n).to_json().dump();
    });
    m.def("convex_scenario_delta", &convex_scenario_delta);
    m.def("replay_certificate", [](const std::string& j) { return replay_certificate(Json::parse(j)).to_json().dump(); });
    m.def("margin_sample_complexity", [](double eps, double delta, const std::string& k, double gamma) {
        return margin_sample_complexity(eps, delta, constants_from(k), gamma).to_json().dump();
    });
    m.def("convex_sample_complexity", [](double eps, double delta, std::size_t d) {
        return convex_sample_complexity(eps, delta, d).to_json().dump();
    });
    m.def("dimension_crossover", [](double eps, double delta, const std::string& k, double gamma) {
        return dimension_crossover(eps, delta, constants_from(k), gamma);
    });
    m.def("margin_complexity", [](std::size_t n, double eps, double delta, const std::string& k) {
        return margin_complexity(n, eps, delta, constants_from(k)).to_json().dump();
    });

    m.def("sample_scenarios", [](const std::string& dist, std::size_t n, std::uint64_t seed) {
        return sample_scenarios(distribution_from(dist), n, seed).rows();
    });
    m.def("monte_carlo_violation", [](const std::string& chain, const Vector& x, const std::string& dist,
                                      std::size_t samples, std::uint64_t seed, double alpha) {
        return monte_carlo_violation(chain_from(chain).chain, x, distribution_from(dist), samples, seed, alpha)
            .to_json()
            .dump();
    }, py::arg("chain"), py::arg("x"), py::arg("distribution"), py::arg("samples"), py::arg("seed") = 0,
          py::arg("alpha") = 0.05);
    m.def("exact_violation_circle", [](const Vector& x) { return exact_violation_circle(x); });

    m.def("solve", [](const std::string& kind, const std::string& chain, const std::vector<Vector>& scenarios,
                      double gamma, const std::string& cfg) {
        const auto d = chain_from(chain);
        const auto s = ScenarioSet::from_rows(scenarios);
        const auto c = solver_from(cfg);
        if (kind == "hard_margin") return solve_hard_margin(d.chain, s, gamma, d.domain, c).to_json().dump();
        if (kind == "soft_margin") return solve_soft_margin(d.chain, s, gamma, d.domain, c).to_json().dump();
        if (kind == "max_margin") return solve_max_margin(d.chain, s, d.domain, c).to_json().dump();
        throw InvalidArgument("unknown solve kind '" + kind + "'");
    }, py::arg("kind"), py::arg("chain"), py::arg("scenarios"), py::arg("gamma") = 0.0, py::arg("solver") = "");

    m.def("run_config", [](const std::string& command, const std::string& path) {
        const auto config = ExperimentConfig::load(path);
        if (command == "coverage") return run_coverage(config).to_json().dump();
        RunReport r;
        if (command == "certify") r = run_certify(config);
        else if (command == "solve") r = run_solve(config);
        else if (command == "validate") r = run_validate(config);
        else if (command == "complexity") r = run_complexity(config);
        else throw InvalidArgument("unknown command '" + command + "'");
        return Json{{"report", r.report}, {"exit_code", r.exit_code}}.dump();
    });
    m.def("reproduce_figures", [](const std::string& out, std::uint64_t seed, std::size_t mc) {
        return reproduce_figures(out, seed, 1, mc).to_json().dump();
    }, py::arg("out_dir"), py::arg("seed") = 0, py::arg("mc_samples") = 1000000);
}
