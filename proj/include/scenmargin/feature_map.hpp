#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "scenmargin/common.hpp"

namespace scenmargin {

/// Picks coordinates of the input: out[r] = in[indices[r]].
struct CoordinateSelection {
    std::vector<std::size_t> indices;
};

/// out = matrix * in + offset, matrix stored row-major (rows x cols).
struct AffineMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector matrix;
    Vector offset;
};

/// coefficient * prod_j in[j]^exponents[j]
struct Monomial {
    double coefficient = 1.0;
    std::vector<unsigned> exponents;
};

/// One output per monomial. Exponents are fixed nonnegative integers.
struct MonomialList {
    std::vector<Monomial> terms;
};

/// Row lookup keyed by an integer-valued coordinate:
/// out = rows[in[coordinate] - offset].
struct LookupTable {
    std::size_t coordinate = 0;
    std::int64_t offset = 0;
    std::vector<Vector> rows;
};

/// A map R^input_dim -> R^output_dim drawn from a closed catalog. Used for
/// the decision features phi_k(x), the parameter features psi_k(theta) and
/// the scalar offsets eta_k(theta) (output_dim == 1).
class FeatureMap {
public:
    using Kind = std::variant<CoordinateSelection, AffineMap, MonomialList, LookupTable>;

    FeatureMap(Kind kind, std::size_t input_dim);

    static FeatureMap coordinates(std::vector<std::size_t> indices, std::size_t input_dim);
    static FeatureMap identity(std::size_t dim);
    static FeatureMap affine(std::size_t rows, std::size_t cols, Vector matrix, Vector offset);
    /// Constant map in -> value (a 1 x input_dim zero matrix plus offset).
    static FeatureMap constant(double value, std::size_t input_dim);
    static FeatureMap monomials(std::vector<Monomial> terms, std::size_t input_dim);
    static FeatureMap lookup(std::size_t coordinate, std::int64_t offset, std::vector<Vector> rows,
                             std::size_t input_dim);

    [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
    [[nodiscard]] std::size_t output_dim() const { return output_dim_; }
    [[nodiscard]] const Kind& kind() const { return kind_; }

    void apply(std::span<const double> in, std::span<double> out) const;
    [[nodiscard]] Vector operator()(std::span<const double> in) const;

    /// grad += J(in)^T weights, where J is the Jacobian of the map at `in`.
    /// Lookup tables are piecewise constant and contribute nothing.
    void accumulate_vjp(std::span<const double> in, std::span<const double> weights,
                        std::span<double> grad) const;

private:
    Kind kind_;
    std::size_t input_dim_;
    std::size_t output_dim_ = 0;
};

}  // namespace scenmargin
