#include "scenmargin/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

namespace scenmargin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kMaxEnumeratedVertices = 20;

Certification weakest(Certification a, Certification b) { return std::max(a, b); }

void require_finite(double lo, double hi, std::size_t coord) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidArgument("unbounded domain: feature map depends on coordinate " + std::to_string(coord) +
                              " whose bound is infinite, so its supremum is infinite");
}

double any_point(double lo, double hi) {
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return 0.0;
}

Interval interval_pow(Interval v, unsigned e) {
    if (e == 0) return {1.0, 1.0};
    const double a = std::pow(v.lo, e), b = std::pow(v.hi, e);
    if (e % 2 == 1 || v.lo >= 0.0) return {std::min(a, b), std::max(a, b)};
    if (v.hi <= 0.0) return {std::min(a, b), std::max(a, b)};
    return {0.0, std::max(a, b)};
}

Interval interval_mul(Interval x, Interval y) {
    const double p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

double centered_sq(std::span<const double> v, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - c[i]) * (v[i] - c[i]);
    return s;
}

SupResult vertex_search(const FeatureMap& map, std::span<const double> lower, std::span<const double> upper,
                        std::span<const double> center, const std::vector<std::size_t>& used, std::size_t budget,
                        std::uint64_t seed) {
    Vector point(lower.size());
    for (std::size_t i = 0; i < point.size(); ++i) point[i] = any_point(lower[i], upper[i]);
    Vector out(map.output_dim());
    SupResult best{-1.0, Certification::exact, std::nullopt};
    auto try_point = [&] {
        map.apply(point, out);
        const double v = centered_sq(out, center);
        if (v > best.value) {
            best.value = v;
            best.maximizer = point;
        }
    };
    if (used.size() <= kMaxEnumeratedVertices) {
        const std::uint64_t n = std::uint64_t{1} << used.size();
        for (std::uint64_t mask = 0; mask < n; ++mask) {
            for (std::size_t b = 0; b < used.size(); ++b)
                point[used[b]] = (mask >> b) & 1u ? upper[used[b]] : lower[used[b]];
            try_point();
        }
    } else {
        if (budget == 0)
            throw InvalidArgument("cannot compute supremum exactly over " + std::to_string(used.size()) +
                                  " free coordinates and no sample budget was given");
        auto rng = CounterRng::substream(seed, Purpose::constants, used.size());
        for (std::size_t s = 0; s < budget; ++s) {
            for (auto u : used) point[u] = (rng() >> 63) ? upper[u] : lower[u];
            try_point();
        }
        best.certification = Certification::sampled_estimate;
    }
    best.value = std::sqrt(best.value);
    return best;
}

}  // namespace

std::string to_string(Certification c) {
    switch (c) {
        case Certification::exact: return "exact";
        case Certification::upper_bound: return "upper_bound";
        case Certification::sampled_estimate: return "sampled_estimate";
    }
    return "?";
}

Certification certification_from_string(const std::string& s) {
    if (s == "exact") return Certification::exact;
    if (s == "upper_bound") return Certification::upper_bound;
    if (s == "sampled_estimate") return Certification::sampled_estimate;
    throw InvalidArgument("unknown certification '" + s + "'");
}

SupResult sup_norm_over_box(const FeatureMap& map, std::span<const double> lower, std::span<const double> upper,
                            std::span<const double> center, std::size_t sample_budget, std::uint64_t seed) {
    if (lower.size() != map.input_dim() || upper.size() != map.input_dim())
        throw InvalidArgument("sup over box: bounds dimension mismatch");
    Vector zero;
    if (center.empty()) {
        zero.assign(map.output_dim(), 0.0);
        center = zero;
    }
    if (center.size() != map.output_dim()) throw InvalidArgument("sup over box: center dimension mismatch");

    return std::visit(
        overloaded{
            [&](const CoordinateSelection& s) {
                std::map<std::size_t, std::vector<std::size_t>> rows_of;
                for (std::size_t r = 0; r < s.indices.size(); ++r) rows_of[s.indices[r]].push_back(r);
                Vector arg(lower.size());
                for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = any_point(lower[i], upper[i]);
                double total = 0.0;
                for (const auto& [j, rows] : rows_of) {
                    require_finite(lower[j], upper[j], j);
                    double at_lo = 0.0, at_hi = 0.0;
                    for (auto r : rows) {
                        at_lo += (lower[j] - center[r]) * (lower[j] - center[r]);
                        at_hi += (upper[j] - center[r]) * (upper[j] - center[r]);
                    }
                    arg[j] = at_hi >= at_lo ? upper[j] : lower[j];
                    total += std::max(at_lo, at_hi);
                }
                return SupResult{std::sqrt(total), Certification::exact, arg};
            },
            [&](const AffineMap& a) {
                std::vector<std::size_t> used;
                for (std::size_t c = 0; c < a.cols; ++c)
                    for (std::size_t r = 0; r < a.rows; ++r)
                        if (a.matrix[r * a.cols + c] != 0.0) {
                            require_finite(lower[c], upper[c], c);
                            used.push_back(c);
                            break;
                        }
                return vertex_search(map, lower, upper, center, used, sample_budget, seed);
            },
            [&](const MonomialList& m) {
                const std::size_t d = map.input_dim();
                std::vector<bool> used(d, false);
                for (const auto& t : m.terms)
                    for (std::size_t j = 0; j < d; ++j)
                        if (t.exponents[j]) used[j] = true;
                for (std::size_t j = 0; j < d; ++j)
                    if (used[j]) require_finite(lower[j], upper[j], j);
                bool zero_center = true;
                double total = 0.0;
                for (std::size_t r = 0; r < m.terms.size(); ++r) {
                    Interval v{m.terms[r].coefficient, m.terms[r].coefficient};
                    for (std::size_t j = 0; j < d; ++j)
                        if (m.terms[r].exponents[j])
                            v = interval_mul(v, interval_pow({lower[j], upper[j]}, m.terms[r].exponents[j]));
                    const double far = std::max(std::abs(v.hi - center[r]), std::abs(v.lo - center[r]));
                    total += far * far;
                    if (center[r] != 0.0) zero_center = false;
                }
                SupResult res{std::sqrt(total), Certification::upper_bound, std::nullopt};
                if (zero_center || m.terms.size() == 1) res.certification = Certification::exact;
                if (zero_center) {
                    Vector arg(d);
                    for (std::size_t j = 0; j < d; ++j)
                        arg[j] = used[j] ? (std::abs(upper[j]) >= std::abs(lower[j]) ? upper[j] : lower[j])
                                         : any_point(lower[j], upper[j]);
                    res.maximizer = arg;
                }
                return res;
            },
            [&](const LookupTable& t) {
                const double lo = lower[t.coordinate], hi = upper[t.coordinate];
                SupResult best{-1.0, Certification::exact, std::nullopt};
                for (std::size_t r = 0; r < t.rows.size(); ++r) {
                    const double key = static_cast<double>(t.offset + static_cast<std::int64_t>(r));
                    if (key < lo || key > hi) continue;
                    const double v = centered_sq(t.rows[r], center);
                    if (v > best.value) {
                        best.value = v;
                        Vector arg(lower.size());
                        for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = any_point(lower[i], upper[i]);
                        arg[t.coordinate] = key;
                        best.maximizer = arg;
                    }
                }
                if (best.value < 0.0) throw InvalidArgument("lookup table: no key inside the domain range");
                best.value = std::sqrt(best.value);
                return best;
            },
        },
        map.kind());
}

double gaussian_quantile_radius(std::size_t dim, double sigma, double tail) {
    boost::math::chi_squared chi2(static_cast<double>(dim));
    return sigma * std::sqrt(boost::math::quantile(boost::math::complement(chi2, tail)));
}

SupResult sup_norm_over_support(const FeatureMap& map, const DistributionSpec& dist, std::size_t sample_budget,
                                std::uint64_t seed) {
    validate(dist);
    if (parameter_dim(dist) != map.input_dim()) throw InvalidArgument("parameter dimension mismatch with support");
    const std::size_t p = map.input_dim();
    return std::visit(
        overloaded{
            [&](const UnitSphere&) -> SupResult {
                if (const auto* s = std::get_if<CoordinateSelection>(&map.kind())) {
                    std::map<std::size_t, std::size_t> mult;
                    std::size_t top = 0, arg = 0;
                    for (auto i : s->indices)
                        if (++mult[i] > top) top = mult[i], arg = i;
                    Vector at(p, 0.0);
                    at[arg] = 1.0;
                    return {std::sqrt(static_cast<double>(top)), Certification::exact, at};
                }
                if (const auto* a = std::get_if<AffineMap>(&map.kind())) {
                    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
                        a->matrix.data(), static_cast<Eigen::Index>(a->rows), static_cast<Eigen::Index>(a->cols));
                    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
                    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
                    const double off = norm(a->offset);
                    if (off == 0.0) return {smax, Certification::exact, std::nullopt};
                    return {smax + off, Certification::upper_bound, std::nullopt};
                }
                const Vector lo(p, -1.0), hi(p, 1.0);
                auto r = sup_norm_over_box(map, lo, hi, {}, sample_budget, seed);
                r.certification = weakest(r.certification, Certification::upper_bound);
                r.maximizer.reset();
                return r;
            },
            [&](const UniformBox& b) { return sup_norm_over_box(map, b.lower, b.upper, {}, sample_budget, seed); },
            [&](const IsotropicGaussian& g) {
                const double r = gaussian_quantile_radius(p, g.sigma);
                Vector lo(p), hi(p);
                for (std::size_t i = 0; i < p; ++i) lo[i] = g.mean[i] - r, hi[i] = g.mean[i] + r;
                auto res = sup_norm_over_box(map, lo, hi, {}, sample_budget, seed);
                res.certification = Certification::sampled_estimate;
                return res;
            },
            [&](const FiniteEmpirical& e) {
                SupResult best{-1.0, Certification::exact, std::nullopt};
                for (const auto& row : e.rows) {
                    const double v = norm(map(row));
                    if (v > best.value) best.value = v, best.maximizer = row;
                }
                return best;
            },
        },
        dist);
}

void ChainConstants::finalize() {
    double product = 1.0;
    int ops = 0;
    for (std::size_t k = components.size(); k-- > 0;) {
        auto& c = components[k];
        if (k == 0) {
            c.stage_lipschitz = 1.0;
            c.additive = 0;
        }
        product *= c.stage_lipschitz;
        ops += c.additive;
        c.lipschitz_product = product;
        c.additive_ops = ops;
    }
}

bool ChainConstants::certified() const { return uncertified_constants().empty(); }

std::vector<std::string> ChainConstants::uncertified_constants() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < components.size(); ++k) {
        if (!is_certified(components[k].tau_certification)) out.push_back("tau_" + std::to_string(k + 1));
        if (!is_certified(components[k].lambda_certification)) out.push_back("lambda_" + std::to_string(k + 1));
    }
    return out;
}

double ChainConstants::complexity_sum() const {
    double s = 0.0;
    for (const auto& c : components) s += c.lipschitz_product * c.wrapper_lipschitz * c.tau * c.lambda;
    return s;
}

nlohmann::json ChainConstants::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : components) {
        nlohmann::json j{{"tau", c.tau},
                         {"tau_certification", to_string(c.tau_certification)},
                         {"lambda", c.lambda},
                         {"lambda_certification", to_string(c.lambda_certification)},
                         {"center", c.center},
                         {"wrapper_lipschitz", c.wrapper_lipschitz},
                         {"stage_lipschitz", c.stage_lipschitz},
                         {"additive", c.additive},
                         {"eta_bound", c.eta_bound},
                         {"lipschitz_product", c.lipschitz_product},
                         {"additive_ops", c.additive_ops}};
        if (c.lambda_maximizer) j["lambda_maximizer"] = *c.lambda_maximizer;
        arr.push_back(std::move(j));
    }
    return nlohmann::json{{"components", std::move(arr)}};
}

ChainConstants ChainConstants::from_json(const nlohmann::json& j) {
    ChainConstants out;
    for (const auto& c : j.at("components")) {
        ComponentConstants cc;
        cc.tau = c.at("tau").get<double>();
        cc.tau_certification = certification_from_string(c.value("tau_certification", std::string("exact")));
        cc.lambda = c.at("lambda").get<double>();
        cc.lambda_certification = certification_from_string(c.value("lambda_certification", std::string("exact")));
        cc.center = c.value("center", Vector{});
        cc.wrapper_lipschitz = c.value("wrapper_lipschitz", 1.0);
        cc.stage_lipschitz = c.value("stage_lipschitz", 1.0);
        cc.additive = c.value("additive", 0);
        cc.eta_bound = c.value("eta_bound", 0.0);
        if (c.contains("lambda_maximizer")) cc.lambda_maximizer = c.at("lambda_maximizer").get<Vector>();
        if (cc.tau < 0 || cc.lambda < 0 || cc.wrapper_lipschitz < 0 || cc.stage_lipschitz < 0)
            throw InvalidArgument("constants must be nonnegative");
        out.components.push_back(std::move(cc));
    }
    if (out.components.empty()) throw InvalidArgument("constants: no components");
    out.finalize();
    return out;
}

std::string ChainConstants::snapshot_hash() const {
    const auto text = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ChainConstants ChainConstants::single(double tau, double lambda, double wrapper_lipschitz) {
    ChainConstants out;
    ComponentConstants c;
    c.tau = tau;
    c.lambda = lambda;
    c.wrapper_lipschitz = wrapper_lipschitz;
    out.components.push_back(c);
    out.finalize();
    return out;
}

ChainConstants constants_from_values(const ConstraintChain& chain, const Vector& taus, const Vector& lambdas) {
    if (taus.size() != chain.size() || lambdas.size() != chain.size())
        throw InvalidArgument("constants: expected one tau and one lambda per component");
    ChainConstants out;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        ComponentConstants c;
        c.tau = taus[k];
        c.lambda = lambdas[k];
        c.center.assign(chain.component(k).phi.output_dim(), 0.0);
        c.wrapper_lipschitz = chain.component(k).wrapper.lipschitz();
        if (k > 0) {
            c.stage_lipschitz = chain.stages()[k - 1].wrapper.lipschitz();
            c.additive = additive_count(chain.stages()[k - 1].op);
        }
        out.components.push_back(std::move(c));
    }
    out.finalize();
    return out;
}

namespace {

void check_sqrt_argument(const ScalarWrapper& w, Interval arg, const std::string& where) {
    if (w.kind() != WrapperKind::shifted_sqrt) return;
    if (!(arg.lo >= w.valid_range().lo))
        throw InvalidArgument("shifted-square-root domain violation at " + where + ": argument enclosure [" +
                              std::to_string(arg.lo) + ", " + std::to_string(arg.hi) + "] is not >= 0");
}

Interval combine(StageOp op, Interval a, Interval b) {
    switch (op) {
        case StageOp::max: return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
        case StageOp::min: return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
        case StageOp::plus: return {a.lo + b.lo, a.hi + b.hi};
        case StageOp::minus: return {a.lo - b.hi, a.hi - b.lo};
    }
    return a;
}

}  // namespace

ChainConstants compute_constants(const ConstraintChain& chain, const Domain& domain, const ThetaSupport& support,
                                 const std::vector<Vector>& centers) {
    domain.validate();
    if (domain.dimension() != chain.decision_dim()) throw InvalidArgument("constants: domain dimension mismatch");
    if (parameter_dim(support.distribution) != chain.parameter_dim())
        throw InvalidArgument("constants: support dimension does not match the chain's parameter dimension");
    if (!centers.empty() && centers.size() != chain.size())
        throw InvalidArgument("constants: expected " + std::to_string(chain.size()) + " centers");

    auto out = constants_from_values(chain, Vector(chain.size(), 0.0), Vector(chain.size(), 0.0));
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const auto& comp = chain.component(k);
        auto& c = out.components[k];
        if (!centers.empty()) {
            if (centers[k].size() != comp.phi.output_dim()) throw InvalidArgument("constants: center dimension mismatch");
            c.center = centers[k];
        }
        const auto tau = sup_norm_over_support(comp.psi, support.distribution, support.sample_budget,
                                               support.seed + 2 * k);
        c.tau = tau.value;
        c.tau_certification = tau.certification;
        const auto eta = sup_norm_over_support(comp.eta, support.distribution, support.sample_budget,
                                               support.seed + 2 * k + 1);
        c.eta_bound = eta.value;
        const auto lam = sup_norm_over_box(comp.phi, domain.lower, domain.upper, c.center, support.sample_budget,
                                           support.seed ^ 0x5bd1e995ULL);
        c.lambda = lam.value;
        c.lambda_certification = lam.certification;
        c.lambda_maximizer = lam.maximizer;
    }

    // Interval enclosure of every wrapper argument.
    Interval f;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const auto& c = out.components[k];
        const double bound = c.tau * (c.lambda + norm(c.center)) + c.eta_bound;
        const Interval arg{-bound, bound};
        const auto& w = chain.component(k).wrapper;
        check_sqrt_argument(w, arg, "component " + std::to_string(k + 1));
        const Interval v = w.image(arg);
        if (k == 0) {
            f = v;
        } else {
            const auto& st = chain.stages()[k - 1];
            const Interval g = combine(st.op, f, v);
            check_sqrt_argument(st.wrapper, g, "stage " + std::to_string(k + 1));
            f = st.wrapper.image(g);
        }
    }
    return out;
}

}  // namespace scenmargin
