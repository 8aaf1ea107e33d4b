#include "scenmargin/feature_map.hpp"

#include <cmath>
#include <string>

namespace scenmargin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double int_pow(double base, unsigned e) {
    double r = 1.0;
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

std::size_t lookup_row(const LookupTable& t, std::span<const double> in) {
    const double v = in[t.coordinate];
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
        throw InvalidArgument("lookup table: coordinate " + std::to_string(t.coordinate) +
                              " is not integer-valued");
    const auto idx = static_cast<std::int64_t>(r) - t.offset;
    if (idx < 0 || idx >= static_cast<std::int64_t>(t.rows.size()))
        throw InvalidArgument("lookup table: key " + std::to_string(static_cast<std::int64_t>(r)) +
                              " out of range");
    return static_cast<std::size_t>(idx);
}

}  // namespace

FeatureMap::FeatureMap(Kind kind, std::size_t input_dim) : kind_(std::move(kind)), input_dim_(input_dim) {
    if (input_dim_ == 0) throw InvalidArgument("feature map: input dimension must be positive");
    std::visit(overloaded{
                   [&](const CoordinateSelection& s) {
                       if (s.indices.empty()) throw InvalidArgument("coordinate selection: no indices");
                       for (auto i : s.indices)
                           if (i >= input_dim_)
                               throw InvalidArgument("coordinate selection: index " + std::to_string(i) +
                                                     " >= input dimension " + std::to_string(input_dim_));
                       output_dim_ = s.indices.size();
                   },
                   [&](const AffineMap& a) {
                       if (a.rows == 0) throw InvalidArgument("affine map: zero rows");
                       if (a.cols != input_dim_) throw InvalidArgument("affine map: column count != input dimension");
                       if (a.matrix.size() != a.rows * a.cols)
                           throw InvalidArgument("affine map: matrix size != rows*cols");
                       if (a.offset.size() != a.rows) throw InvalidArgument("affine map: offset size != rows");
                       output_dim_ = a.rows;
                   },
                   [&](const MonomialList& m) {
                       if (m.terms.empty()) throw InvalidArgument("monomial list: no terms");
                       for (const auto& t : m.terms)
                           if (t.exponents.size() != input_dim_)
                               throw InvalidArgument("monomial: exponent vector length != input dimension");
                       output_dim_ = m.terms.size();
                   },
                   [&](const LookupTable& t) {
                       if (t.rows.empty()) throw InvalidArgument("lookup table: no rows");
                       if (t.coordinate >= input_dim_) throw InvalidArgument("lookup table: coordinate out of range");
                       for (const auto& r : t.rows)
                           if (r.size() != t.rows.front().size() || r.empty())
                               throw InvalidArgument("lookup table: ragged or empty rows");
                       output_dim_ = t.rows.front().size();
                   },
               },
               kind_);
}

FeatureMap FeatureMap::coordinates(std::vector<std::size_t> indices, std::size_t input_dim) {
    return FeatureMap(CoordinateSelection{std::move(indices)}, input_dim);
}

FeatureMap FeatureMap::identity(std::size_t dim) {
    std::vector<std::size_t> idx(dim);
    for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
    return coordinates(std::move(idx), dim);
}

FeatureMap FeatureMap::affine(std::size_t rows, std::size_t cols, Vector matrix, Vector offset) {
    return FeatureMap(AffineMap{rows, cols, std::move(matrix), std::move(offset)}, cols);
}

FeatureMap FeatureMap::constant(double value, std::size_t input_dim) {
    return affine(1, input_dim, Vector(input_dim, 0.0), Vector{value});
}

FeatureMap FeatureMap::monomials(std::vector<Monomial> terms, std::size_t input_dim) {
    return FeatureMap(MonomialList{std::move(terms)}, input_dim);
}

FeatureMap FeatureMap::lookup(std::size_t coordinate, std::int64_t offset, std::vector<Vector> rows,
                              std::size_t input_dim) {
    return FeatureMap(LookupTable{coordinate, offset, std::move(rows)}, input_dim);
}

void FeatureMap::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != input_dim_)
        throw InvalidArgument("feature map: input has dimension " + std::to_string(in.size()) + ", expected " +
                              std::to_string(input_dim_));
    std::visit(overloaded{
                   [&](const CoordinateSelection& s) {
                       for (std::size_t r = 0; r < s.indices.size(); ++r) out[r] = in[s.indices[r]];
                   },
                   [&](const AffineMap& a) {
                       for (std::size_t r = 0; r < a.rows; ++r) {
                           double acc = a.offset[r];
                           const double* row = a.matrix.data() + r * a.cols;
                           for (std::size_t c = 0; c < a.cols; ++c) acc += row[c] * in[c];
                           out[r] = acc;
                       }
                   },
                   [&](const MonomialList& m) {
                       for (std::size_t r = 0; r < m.terms.size(); ++r) {
                           double v = m.terms[r].coefficient;
                           for (std::size_t j = 0; j < input_dim_; ++j)
                               if (m.terms[r].exponents[j]) v *= int_pow(in[j], m.terms[r].exponents[j]);
                           out[r] = v;
                       }
                   },
                   [&](const LookupTable& t) {
                       const auto& row = t.rows[lookup_row(t, in)];
                       for (std::size_t r = 0; r < row.size(); ++r) out[r] = row[r];
                   },
               },
               kind_);
}

Vector FeatureMap::operator()(std::span<const double> in) const {
    Vector out(output_dim_);
    apply(in, out);
    return out;
}

void FeatureMap::accumulate_vjp(std::span<const double> in, std::span<const double> weights,
                                std::span<double> grad) const {
    std::visit(overloaded{
                   [&](const CoordinateSelection& s) {
                       for (std::size_t r = 0; r < s.indices.size(); ++r) grad[s.indices[r]] += weights[r];
                   },
                   [&](const AffineMap& a) {
                       for (std::size_t r = 0; r < a.rows; ++r) {
                           const double w = weights[r];
                           if (w == 0.0) continue;
                           const double* row = a.matrix.data() + r * a.cols;
                           for (std::size_t c = 0; c < a.cols; ++c) grad[c] += w * row[c];
                       }
                   },
                   [&](const MonomialList& m) {
                       for (std::size_t r = 0; r < m.terms.size(); ++r) {
                           const double w = weights[r] * m.terms[r].coefficient;
                           if (w == 0.0) continue;
                           const auto& e = m.terms[r].exponents;
                           for (std::size_t j = 0; j < input_dim_; ++j) {
                               if (e[j] == 0) continue;
                               double d = w * e[j] * int_pow(in[j], e[j] - 1);
                               for (std::size_t l = 0; l < input_dim_; ++l)
                                   if (l != j && e[l]) d *= int_pow(in[l], e[l]);
                               grad[j] += d;
                           }
                       }
                   },
                   [](const LookupTable&) {},
               },
               kind_);
}

}  // namespace scenmargin
