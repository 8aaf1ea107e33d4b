#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scenmargin/common.hpp"

namespace scenmargin {

/// Box domain X with optional integer coordinates. Bounds may be infinite.
struct Domain {
    Vector lower;
    Vector upper;
    std::vector<bool> integer;

    static Domain box(Vector lower, Vector upper);
    static Domain singleton(const Vector& point);

    [[nodiscard]] std::size_t dimension() const { return lower.size(); }
    [[nodiscard]] bool bounded() const;
    [[nodiscard]] bool is_integer(std::size_t i) const { return !integer.empty() && integer[i]; }

    /// Throws InvalidArgument when bounds are inconsistent or an integer
    /// coordinate has no admissible value.
    void validate() const;

    /// Box clamp followed by rounding of integer coordinates; the result
    /// is always a member of X.
    [[nodiscard]] Vector project(std::span<const double> x) const;
    [[nodiscard]] bool contains(std::span<const double> x, double tol = 0.0) const;
    /// Midpoint of finite bounds (0 on infinite sides), projected into X.
    [[nodiscard]] Vector center() const;
};

}  // namespace scenmargin
