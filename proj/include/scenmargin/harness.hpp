#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/certificates.hpp"
#include "scenmargin/chain_io.hpp"
#include "scenmargin/constants.hpp"
#include "scenmargin/distribution.hpp"
#include "scenmargin/solvers.hpp"

namespace scenmargin {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    exit_success = 0,
    exit_config_error = 2,
    exit_precondition = 3,
    exit_uncertified = 4,
};

/// Experiment description loaded from a JSON config file. Relative paths
/// resolve against the config file's directory.
struct ExperimentConfig {
    std::filesystem::path base_dir;
    nlohmann::json raw = nlohmann::json::object();
    std::optional<ChainDescription> chain;
    std::optional<DistributionSpec> distribution;
    SolverConfig solver;
    nlohmann::json constants = nlohmann::json::object();
    nlohmann::json certificates = nlohmann::json::array();
    nlohmann::json problem = nlohmann::json::object();
    nlohmann::json complexity = nlohmann::json::object();
    std::size_t validation_samples = 100000;
    double alpha = 0.05;
    std::size_t repetitions = 1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::filesystem::path output_dir = "out";

    /// Throws ConfigError naming the file and the JSON path of the bad field.
    static ExperimentConfig load(const std::filesystem::path& path);
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

    [[nodiscard]] const ChainDescription& require_chain() const;
    [[nodiscard]] const DistributionSpec& require_distribution() const;
};

/// Constants from the config: explicit {"taus", "lambdas"} or computed from
/// the chain, its domain and the distribution.
ChainConstants resolve_constants(const ExperimentConfig& config);

/// Seed of repetition r derived from the master seed.
std::uint64_t repetition_seed(std::uint64_t master, std::uint64_t r);

struct RunReport {
    nlohmann::json report;
    int exit_code = exit_success;
};

/// One certificate per request. Refusals are recorded verbatim and give
/// exit_precondition; consumed sampled-estimate constants give exit_uncertified.
RunReport run_certify(const ExperimentConfig& config);
RunReport run_solve(const ExperimentConfig& config);
/// Solves (or takes problem.x) and estimates V(x) by Monte Carlo.
RunReport run_validate(const ExperimentConfig& config);
RunReport run_complexity(const ExperimentConfig& config);

struct CoverageRecord {
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    double vhat_gamma = 0.0;
    double bound = 0.0;
    double mc_estimate = 0.0;
    double mc_upper = 0.0;
    bool covered = false;
    std::string status;
};

struct CoverageReport {
    std::size_t repetitions = 0;
    std::size_t n = 0;
    double gamma = 0.0;
    double delta = 0.0;
    double target = 0.0;  ///< 1 - delta
    std::size_t covered = 0;
    double frequency = 0.0;
    /// P{Binomial(R, 1 - delta) <= covered}: small values reject coverage >= 1 - delta.
    double p_value = 1.0;
    bool certified = true;
    std::vector<CoverageRecord> records;
    std::vector<std::string> warnings;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string to_csv() const;
};

/// R repetitions of sample -> hard-margin solve -> margin bound -> Monte-Carlo check.
CoverageReport run_coverage(const ExperimentConfig& config);

/// Tangent half-planes n^T x <= h of the ellipse x1^2 + x2^2/16 = 1 with unit
/// normal n, as rows (n1, n2, h), at the eight fixed arc-length positions of
/// the soft-margin figure.
std::vector<Vector> ellipse_tangent_scenarios();

/// The five circle scenarios at 30, 120, 170, -30 and -100 degrees.
std::vector<Vector> circle_figure_scenarios();

struct FigureSummary {
    Vector standard_x;
    double standard_violation = 0.0;
    double standard_mc = 0.0;
    Vector margin_x;
    double margin_violation = 0.0;
    double hard_gamma = 0.0;
    double soft_gamma = 0.0;
    double soft_slack_sum = 0.0;
    std::size_t soft_margin_violations = 0;
    long long crossover_sufficient = 0;  ///< first d satisfying the sufficient condition
    long long crossover_actual = 0;      ///< first d with N_cvx > N
    std::vector<std::filesystem::path> files;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Writes fig1.csv, fig1_scenarios.csv, fig2.csv, fig2_scenarios.csv and crossover.csv.
FigureSummary reproduce_figures(const std::filesystem::path& out_dir, std::uint64_t seed = 0, unsigned workers = 1,
                                std::size_t mc_samples = 1000000);

}  // namespace scenmargin
