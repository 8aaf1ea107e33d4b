#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scenmargin/harness.hpp"

namespace fs = std::filesystem;
using namespace scenmargin;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    std::string format = "json";
    std::string replay;
    bool allow_uncertified = false;
    std::size_t mc_samples = 1000000;
};

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

ExperimentConfig load_config(const Options& o) {
    if (o.config.empty()) throw ConfigError("--config is required");
    auto c = ExperimentConfig::load(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.workers) c.workers = *o.workers;
    if (o.out) c.output_dir = *o.out;
    return c;
}

std::string certify_csv(const nlohmann::json& report) {
    std::ostringstream ss;
    ss << "index,bound,value,raw_value,certified,refused\n";
    std::size_t i = 0;
    for (const auto& e : report.at("certificates")) {
        if (e.contains("certificate")) {
            const auto& c = e.at("certificate");
            ss << i << ',' << c.at("kind").get<std::string>() << ',' << c.at("value").dump() << ','
               << c.at("raw_value").dump() << ',' << (c.at("certified").get<bool>() ? 1 : 0) << ",\n";
        } else {
            ss << i << ',' << e.at("request").value("bound", "") << ",,,0," << nlohmann::json(e.at("refused")).dump()
               << '\n';
        }
        ++i;
    }
    return ss.str();
}

int finish(const Options& o, int code) {
    if (code == exit_uncertified && o.allow_uncertified) return exit_success;
    return code;
}

int cmd_certify(const Options& o) {
    if (!o.replay.empty()) {
        std::ifstream in(o.replay);
        if (!in) throw ConfigError(o.replay + ": cannot open certificate file");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(o.replay + ": " + e.what());
        }
        const auto replayed = replay_certificate(j);
        const bool identical = replayed.raw_value == j.at("raw_value").get<double>() &&
                               replayed.value == j.at("value").get<double>();
        std::cout << nlohmann::json{{"replayed", replayed.to_json()}, {"identical", identical}}.dump(2) << '\n';
        return identical ? exit_success : 1;
    }
    const auto config = load_config(o);
    const auto run = run_certify(config);
    const auto& certs = run.report.at("certificates");
    for (std::size_t i = 0; i < certs.size(); ++i) {
        const auto& e = certs[i];
        const std::string kind = e.at("request").value("bound", "request");
        write_file(config.output_dir / ("certificate_" + std::to_string(i) + "_" + kind + ".json"),
                   (e.contains("certificate") ? e.at("certificate") : e).dump(2) + "\n");
    }
    write_file(config.output_dir / "certify_report.json", run.report.dump(2) + "\n");
    if (o.format == "csv") {
        const auto csv = certify_csv(run.report);
        write_file(config.output_dir / "certify_report.csv", csv);
        std::cout << csv;
    } else {
        std::cout << run.report.dump(2) << '\n';
    }
    return finish(o, run.exit_code);
}

int cmd_simple(const Options& o, RunReport (*runner)(const ExperimentConfig&), const char* name) {
    const auto config = load_config(o);
    const auto run = runner(config);
    write_file(config.output_dir / (std::string(name) + "_report.json"), run.report.dump(2) + "\n");
    std::cout << run.report.dump(2) << '\n';
    return finish(o, run.exit_code);
}

int cmd_coverage(const Options& o) {
    const auto config = load_config(o);
    const auto report = run_coverage(config);
    write_file(config.output_dir / "coverage_report.json", report.to_json().dump(2) + "\n");
    write_file(config.output_dir / "coverage.csv", report.to_csv());
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (o.format == "csv")
        std::cout << report.to_csv();
    else
        std::cout << report.to_json().dump(2) << '\n';
    return finish(o, report.certified ? exit_success : exit_uncertified);
}

int cmd_figures(const Options& o) {
    const fs::path out = o.out.value_or("figures");
    const auto summary = reproduce_figures(out, o.seed.value_or(0), o.workers.value_or(1), o.mc_samples);
    std::cout << summary.to_json().dump(2) << '\n';
    return exit_success;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Margin-based scenario optimization: solvers, certificates and audits"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", o.config, "experiment config (JSON)");
        if (needs_config) c->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--allow-uncertified", o.allow_uncertified,
                      "exit 0 instead of 4 when sampled-estimate constants were consumed");
    };

    auto* certify = app.add_subcommand("certify", "evaluate the requested violation bounds");
    common(certify, false);
    certify->add_option("--replay", o.replay, "recompute a saved certificate from its recorded inputs")
        ->check(CLI::ExistingFile);
    auto* solve = app.add_subcommand("solve", "solve the configured scenario program");
    common(solve, true);
    auto* validate = app.add_subcommand("validate", "Monte-Carlo violation of a solution");
    common(validate, true);
    auto* complexity = app.add_subcommand("complexity", "sample and margin complexities");
    common(complexity, true);
    auto* coverage = app.add_subcommand("coverage", "repeated sample/solve/certify/validate audit");
    common(coverage, true);
    auto* figures = app.add_subcommand("reproduce-figures", "write the figure and crossover data files");
    common(figures, false);
    figures->add_option("--mc-samples", o.mc_samples, "Monte-Carlo draws for the circle figure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    try {
        if (*certify) return cmd_certify(o);
        if (*solve) return cmd_simple(o, run_solve, "solve");
        if (*validate) return cmd_simple(o, run_validate, "validate");
        if (*complexity) return cmd_simple(o, run_complexity, "complexity");
        if (*coverage) return cmd_coverage(o);
        if (*figures) return cmd_figures(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition refused: " << e.what() << '\n';
        return exit_precondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_success;
}
