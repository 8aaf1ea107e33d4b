#include "scenmargin/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scenmargin {

Domain Domain::box(Vector lower, Vector upper) {
    Domain d{std::move(lower), std::move(upper), {}};
    d.integer.assign(d.lower.size(), false);
    d.validate();
    return d;
}

Domain Domain::singleton(const Vector& point) { return box(point, point); }

bool Domain::bounded() const {
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) return false;
    return true;
}

void Domain::validate() const {
    if (lower.empty()) throw InvalidArgument("domain: dimension must be positive");
    if (upper.size() != lower.size()) throw InvalidArgument("domain: lower/upper size mismatch");
    if (!integer.empty() && integer.size() != lower.size())
        throw InvalidArgument("domain: integer flag size mismatch");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i])
            throw InvalidArgument("domain: lower > upper at coordinate " + std::to_string(i));
        if (is_integer(i) && std::ceil(lower[i]) > std::floor(upper[i]))
            throw InvalidArgument("domain: integer coordinate " + std::to_string(i) + " has no admissible value");
    }
}

Vector Domain::project(std::span<const double> x) const {
    if (x.size() != dimension()) throw InvalidArgument("domain: point dimension mismatch");
    Vector out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = std::clamp(out[i], lower[i], upper[i]);
        if (is_integer(i)) v = std::clamp(std::round(v), std::ceil(lower[i]), std::floor(upper[i]));
        out[i] = v;
    }
    return out;
}

bool Domain::contains(std::span<const double> x, double tol) const {
    if (x.size() != dimension()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        if (is_integer(i) && x[i] != std::round(x[i])) return false;
    }
    return true;
}

Vector Domain::center() const {
    Vector c(dimension(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const bool lf = std::isfinite(lower[i]), uf = std::isfinite(upper[i]);
        if (lf && uf) c[i] = 0.5 * (lower[i] + upper[i]);
        else if (lf) c[i] = std::max(lower[i], 0.0);
        else if (uf) c[i] = std::min(upper[i], 0.0);
    }
    return project(c);
}

}  // namespace scenmargin
