#pragma once

#include <cmath>
#include <numbers>

#include "scenmargin/chain_io.hpp"
#include "scenmargin/distribution.hpp"

namespace scenmargin::testing {

inline Vector unit(double degrees) {
    const double a = degrees * std::numbers::pi / 180.0;
    return {std::cos(a), std::sin(a)};
}

/// theta in R^4, f_k = theta_{2k-1..2k}^T x - 1, combined by op with an optional
/// wrapper on the second component.
inline ChainDescription two_component_chain(const std::string& op, const nlohmann::json& second_wrapper = "identity") {
    return build_chain({{"dimension", 2},
                        {"parameter_dimension", 4},
                        {"domain", {{"lower", {-2, -2}}, {"upper", {2, 2}}}},
                        {"components",
                         {{{"psi", {{"kind", "coordinates"}, {"indices", {0, 1}}}},
                           {"phi", {{"kind", "identity"}}},
                           {"eta", {{"kind", "constant"}, {"value", -1}}}},
                          {{"psi", {{"kind", "coordinates"}, {"indices", {2, 3}}}},
                           {"phi", {{"kind", "identity"}}},
                           {"eta", {{"kind", "constant"}, {"value", -1}}},
                           {"wrapper", second_wrapper}}}},
                        {"operators", {op}}});
}

inline DistributionSpec box4() { return UniformBox{{-1, -1, -1, -1}, {1, 1, 1, 1}}; }

inline DistributionSpec circle_distribution() { return UnitSphere{2}; }

}  // namespace scenmargin::testing
