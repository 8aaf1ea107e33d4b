#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "scenmargin/chain.hpp"
#include "scenmargin/domain.hpp"

namespace scenmargin {

/// A chain together with its domain, as stored in a chain specification file.
struct ChainDescription {
    Domain domain;
    ConstraintChain chain;
};

nlohmann::json to_json(const FeatureMap& map);
FeatureMap feature_map_from_json(const nlohmann::json& j, std::size_t input_dim);
nlohmann::json to_json(const ScalarWrapper& w);
ScalarWrapper wrapper_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Domain& d);
Domain domain_from_json(const nlohmann::json& j);

/// Builds and validates a chain from its JSON description. Errors carry the
/// JSON path of the offending field.
ChainDescription build_chain(const nlohmann::json& spec);
nlohmann::json to_json(const ChainDescription& desc);

ChainDescription load_chain_file(const std::filesystem::path& path);
void save_chain_file(const std::filesystem::path& path, const ChainDescription& desc);

/// f(x, theta) = theta^T x - 1 on the box [-box_half_width, box_half_width]^dim.
ChainDescription circle_chain(std::size_t dim = 2, double box_half_width = 2.0);

/// f(x, theta) = n^T x - h for theta = (n, h) in R^(dim+1): half-planes with an explicit offset.
ChainDescription halfplane_chain(std::size_t dim = 2, double box_half_width = 5.0);

}  // namespace scenmargin
