#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenmargin/common.hpp"
#include "scenmargin/rng.hpp"

namespace scenmargin {

struct UnitSphere {
    std::size_t dim = 0;
};
struct UniformBox {
    Vector lower;
    Vector upper;
};
struct IsotropicGaussian {
    Vector mean;
    double sigma = 1.0;
};
/// Resampling with replacement from a fixed table of parameter vectors.
struct FiniteEmpirical {
    std::vector<Vector> rows;
    std::string source;
};

using DistributionSpec = std::variant<UnitSphere, UniformBox, IsotropicGaussian, FiniteEmpirical>;

std::size_t parameter_dim(const DistributionSpec& dist);
/// Throws InvalidArgument on inconsistent dimensions, sigma <= 0 or an
/// empty empirical table.
void validate(const DistributionSpec& dist);
/// Writes one draw into out (size parameter_dim).
void draw(const DistributionSpec& dist, CounterRng& rng, std::span<double> out);

nlohmann::json to_json(const DistributionSpec& dist);
/// Accepts {"kind": "unit_sphere"|"uniform_box"|"gaussian"|"finite_empirical", ...}.
/// finite_empirical takes either inline "rows" or a "file" resolved against base_dir.
DistributionSpec distribution_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// CSV with a header row naming the columns (column count = dimension)
/// followed by one parameter vector per row.
std::vector<Vector> read_scenario_csv(const std::filesystem::path& path);
void write_scenario_csv(const std::filesystem::path& path, const std::vector<Vector>& rows);

}  // namespace scenmargin
