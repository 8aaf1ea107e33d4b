#include "scenmargin/wrapper.hpp"

#include <algorithm>
#include <cmath>

#include "scenmargin/common.hpp"

namespace scenmargin {

ScalarWrapper ScalarWrapper::scale(double factor) {
    if (!std::isfinite(factor)) throw InvalidArgument("scale wrapper: factor must be finite");
    return {WrapperKind::scale, factor, 0.0};
}
ScalarWrapper ScalarWrapper::absolute() { return {WrapperKind::absolute, 0.0, 0.0}; }
ScalarWrapper ScalarWrapper::clip(double lower, double upper) {
    if (!(lower <= upper)) throw InvalidArgument("clip wrapper: lower must not exceed upper");
    return {WrapperKind::clip, lower, upper};
}
ScalarWrapper ScalarWrapper::sine() { return {WrapperKind::sine, 0.0, 0.0}; }
ScalarWrapper ScalarWrapper::cosine() { return {WrapperKind::cosine, 0.0, 0.0}; }
ScalarWrapper ScalarWrapper::negated_cosine() { return {WrapperKind::negated_cosine, 0.0, 0.0}; }
ScalarWrapper ScalarWrapper::shifted_sqrt(double shift) {
    if (!(shift > 0.0) || !std::isfinite(shift))
        throw InvalidArgument("shifted-square-root wrapper: shift must be positive and finite");
    return {WrapperKind::shifted_sqrt, shift, 0.0};
}

double ScalarWrapper::lipschitz() const {
    switch (kind_) {
        case WrapperKind::scale: return std::abs(a_);
        case WrapperKind::shifted_sqrt: return 1.0 / (2.0 * std::sqrt(a_));
        default: return 1.0;
    }
}

std::string ScalarWrapper::name() const {
    switch (kind_) {
        case WrapperKind::identity: return "identity";
        case WrapperKind::scale: return "scale";
        case WrapperKind::absolute: return "abs";
        case WrapperKind::clip: return "clip";
        case WrapperKind::sine: return "sin";
        case WrapperKind::cosine: return "cos";
        case WrapperKind::shifted_sqrt: return "shifted_sqrt";
        case WrapperKind::negated_cosine: return "neg_cos";
    }
    return "?";
}

Interval ScalarWrapper::valid_range() const {
    if (kind_ == WrapperKind::shifted_sqrt) return {0.0, std::numeric_limits<double>::infinity()};
    return {};
}

double ScalarWrapper::operator()(double u) const {
    switch (kind_) {
        case WrapperKind::identity: return u;
        case WrapperKind::scale: return a_ * u;
        case WrapperKind::absolute: return std::abs(u);
        case WrapperKind::clip: return std::clamp(u, a_, b_);
        case WrapperKind::sine: return std::sin(u);
        case WrapperKind::cosine: return std::cos(u);
        case WrapperKind::negated_cosine: return -std::cos(u);
        case WrapperKind::shifted_sqrt:
            if (u + a_ < 0.0) throw InvalidArgument("shifted-square-root domain violation: argument below -shift");
            return std::sqrt(u + a_);
    }
    return u;
}

double ScalarWrapper::derivative(double u) const {
    switch (kind_) {
        case WrapperKind::identity: return 1.0;
        case WrapperKind::scale: return a_;
        case WrapperKind::absolute: return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
        case WrapperKind::clip: return (u >= a_ && u < b_) ? 1.0 : 0.0;
        case WrapperKind::sine: return std::cos(u);
        case WrapperKind::cosine: return -std::sin(u);
        case WrapperKind::negated_cosine: return std::sin(u);
        case WrapperKind::shifted_sqrt: return u + a_ > 0.0 ? 0.5 / std::sqrt(u + a_) : 0.0;
    }
    return 1.0;
}

Interval ScalarWrapper::image(Interval arg) const {
    switch (kind_) {
        case WrapperKind::identity: return arg;
        case WrapperKind::scale: {
            const double x = a_ * arg.lo, y = a_ * arg.hi;
            if (a_ == 0.0) return {0.0, 0.0};
            return {std::min(x, y), std::max(x, y)};
        }
        case WrapperKind::absolute:
            if (arg.lo >= 0.0) return arg;
            if (arg.hi <= 0.0) return {-arg.hi, -arg.lo};
            return {0.0, std::max(-arg.lo, arg.hi)};
        case WrapperKind::clip: return {std::clamp(arg.lo, a_, b_), std::clamp(arg.hi, a_, b_)};
        case WrapperKind::sine:
        case WrapperKind::cosine:
        case WrapperKind::negated_cosine: return {-1.0, 1.0};
        case WrapperKind::shifted_sqrt:
            return {std::sqrt(std::max(0.0, arg.lo + a_)), std::sqrt(std::max(0.0, arg.hi + a_))};
    }
    return arg;
}

}  // namespace scenmargin
