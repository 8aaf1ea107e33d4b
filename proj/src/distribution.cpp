#include "scenmargin/distribution.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace scenmargin {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::size_t parameter_dim(const DistributionSpec& dist) {
    return std::visit(overloaded{
                          [](const UnitSphere& s) { return s.dim; },
                          [](const UniformBox& b) { return b.lower.size(); },
                          [](const IsotropicGaussian& g) { return g.mean.size(); },
                          [](const FiniteEmpirical& e) { return e.rows.empty() ? std::size_t{0} : e.rows[0].size(); },
                      },
                      dist);
}

void validate(const DistributionSpec& dist) {
    std::visit(overloaded{
                   [](const UnitSphere& s) {
                       if (s.dim == 0) throw InvalidArgument("unit sphere: dimension must be positive");
                   },
                   [](const UniformBox& b) {
                       if (b.lower.empty() || b.lower.size() != b.upper.size())
                           throw InvalidArgument("uniform box: bounds size mismatch");
                       for (std::size_t i = 0; i < b.lower.size(); ++i)
                           if (!std::isfinite(b.lower[i]) || !std::isfinite(b.upper[i]) || b.lower[i] > b.upper[i])
                               throw InvalidArgument("uniform box: invalid bounds");
                   },
                   [](const IsotropicGaussian& g) {
                       if (g.mean.empty()) throw InvalidArgument("gaussian: empty mean");
                       if (!(g.sigma > 0.0) || !std::isfinite(g.sigma))
                           throw InvalidArgument("gaussian: sigma must be positive");
                   },
                   [](const FiniteEmpirical& e) {
                       if (e.rows.empty()) throw InvalidArgument("finite empirical: no rows");
                       for (const auto& r : e.rows)
                           if (r.size() != e.rows[0].size() || r.empty())
                               throw InvalidArgument("finite empirical: ragged rows");
                   },
               },
               dist);
}

void draw(const DistributionSpec& dist, CounterRng& rng, std::span<double> out) {
    std::visit(overloaded{
                   [&](const UnitSphere&) {
                       // Normalized Gaussian vector; redraw in the measure-zero case of a null vector.
                       std::normal_distribution<double> normal;
                       double n2 = 0.0;
                       do {
                           n2 = 0.0;
                           for (auto& v : out) {
                               v = normal(rng);
                               n2 += v * v;
                           }
                       } while (n2 == 0.0);
                       const double inv = 1.0 / std::sqrt(n2);
                       for (auto& v : out) v *= inv;
                   },
                   [&](const UniformBox& b) {
                       for (std::size_t i = 0; i < out.size(); ++i)
                           out[i] = b.lower[i] + (b.upper[i] - b.lower[i]) * rng.uniform01();
                   },
                   [&](const IsotropicGaussian& g) {
                       std::normal_distribution<double> normal(0.0, g.sigma);
                       for (std::size_t i = 0; i < out.size(); ++i) out[i] = g.mean[i] + normal(rng);
                   },
                   [&](const FiniteEmpirical& e) {
                       std::uniform_int_distribution<std::size_t> pick(0, e.rows.size() - 1);
                       const auto& row = e.rows[pick(rng)];
                       std::copy(row.begin(), row.end(), out.begin());
                   },
               },
               dist);
}

nlohmann::json to_json(const DistributionSpec& dist) {
    return std::visit(overloaded{
                          [](const UnitSphere& s) { return nlohmann::json{{"kind", "unit_sphere"}, {"dim", s.dim}}; },
                          [](const UniformBox& b) {
                              return nlohmann::json{{"kind", "uniform_box"}, {"lower", b.lower}, {"upper", b.upper}};
                          },
                          [](const IsotropicGaussian& g) {
                              return nlohmann::json{{"kind", "gaussian"}, {"mean", g.mean}, {"sigma", g.sigma}};
                          },
                          [](const FiniteEmpirical& e) {
                              nlohmann::json j{{"kind", "finite_empirical"}, {"rows", e.rows}};
                              if (!e.source.empty()) j["source"] = e.source;
                              return j;
                          },
                      },
                      dist);
}

DistributionSpec distribution_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    const auto kind = j.at("kind").get<std::string>();
    DistributionSpec out;
    if (kind == "unit_sphere") {
        out = UnitSphere{j.at("dim").get<std::size_t>()};
    } else if (kind == "uniform_box") {
        out = UniformBox{j.at("lower").get<Vector>(), j.at("upper").get<Vector>()};
    } else if (kind == "gaussian") {
        out = IsotropicGaussian{j.at("mean").get<Vector>(), j.value("sigma", 1.0)};
    } else if (kind == "finite_empirical") {
        if (j.contains("rows")) {
            out = FiniteEmpirical{j.at("rows").get<std::vector<Vector>>(), j.value("source", std::string{})};
        } else {
            const auto file = j.at("file").get<std::string>();
            const auto path = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base_dir / file;
            out = FiniteEmpirical{read_scenario_csv(path), file};
        }
    } else {
        throw InvalidArgument("unknown distribution kind '" + kind + "'");
    }
    validate(out);
    return out;
}

std::vector<Vector> read_scenario_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open scenario file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("scenario file " + path.string() + " is empty");
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1);
    std::vector<Vector> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        Vector row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        if (row.size() != columns)
            throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(columns) + " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidArgument("scenario file " + path.string() + " has no rows");
    return rows;
}

void write_scenario_csv(const std::filesystem::path& path, const std::vector<Vector>& rows) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write scenario file " + path.string());
    const std::size_t dim = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < dim; ++c) out << (c ? "," : "") << "theta" << c;
    out << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
        out << '\n';
    }
}

}  // namespace scenmargin
