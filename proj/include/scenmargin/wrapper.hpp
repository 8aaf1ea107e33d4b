#pragma once

#include <limits>
#include <string>

namespace scenmargin {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

enum class WrapperKind { identity, scale, absolute, clip, sine, cosine, shifted_sqrt, negated_cosine };

/// Univariate Lipschitz function from a closed catalog. The Lipschitz
/// constant is fixed by the kind and never inferred.
///
///   identity        u                      1
///   scale(c)        c*u                    |c|
///   absolute        |u|                    1
///   clip(a,b)       min(b, max(a, u))      1
///   sine, cosine    sin u, cos u           1
///   negated_cosine  -cos u                 1
///   shifted_sqrt(c) sqrt(u + c), c > 0     1/(2 sqrt c), valid for u >= 0
class ScalarWrapper {
public:
    ScalarWrapper() = default;

    static ScalarWrapper identity() { return {}; }
    static ScalarWrapper scale(double factor);
    static ScalarWrapper absolute();
    static ScalarWrapper clip(double lower, double upper);
    static ScalarWrapper sine();
    static ScalarWrapper cosine();
    static ScalarWrapper negated_cosine();
    static ScalarWrapper shifted_sqrt(double shift);

    [[nodiscard]] WrapperKind kind() const { return kind_; }
    [[nodiscard]] double param_a() const { return a_; }
    [[nodiscard]] double param_b() const { return b_; }
    [[nodiscard]] double lipschitz() const;
    [[nodiscard]] std::string name() const;

    /// Argument range on which lipschitz() is certified.
    [[nodiscard]] Interval valid_range() const;

    [[nodiscard]] double operator()(double u) const;
    /// A subgradient at u; at kinks the right derivative is returned
    /// (0 for |u| at u = 0).
    [[nodiscard]] double derivative(double u) const;
    /// Enclosure of the image of an argument interval.
    [[nodiscard]] Interval image(Interval arg) const;

private:
    ScalarWrapper(WrapperKind k, double a, double b) : kind_(k), a_(a), b_(b) {}

    WrapperKind kind_ = WrapperKind::identity;
    double a_ = 0.0;
    double b_ = 0.0;
};

}  // namespace scenmargin
