#include "scenmargin/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "scenmargin/parallel.hpp"

namespace scenmargin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// mu * log(1 + exp(z / mu)), or max(0, z) when mu == 0.
double soft_plus(double z, double mu) {
    if (mu == 0.0) return std::max(0.0, z);
    const double s = z / mu;
    return mu * (std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))));
}

double soft_step(double z, double mu) {
    if (mu == 0.0) return z > 0.0 ? 1.0 : 0.0;
    return 1.0 / (1.0 + std::exp(-z / mu));
}

using BaseTerm = std::function<double(std::span<const double> x, const DecisionFeatures& phi,
                                      std::span<double> grad, double mu)>;

/// Scenario objective. outer_max: a h + b max(0, h - kink) with h = max_i f_i.
/// hinge_sum: b sum_i max(0, f_i + shift). A base term is added to both.
/// mu > 0 replaces every max by its log-sum-exp smoothing.
struct Problem {
    enum class Aggregate { outer_max, hinge_sum };

    const ConstraintChain* chain = nullptr;
    const std::vector<ParameterFeatures>* features = nullptr;
    Aggregate aggregate = Aggregate::outer_max;
    double a = 1.0;
    double b = 0.0;
    double kink = 0.0;
    double shift = 0.0;
    BaseTerm base;

    double value(std::span<const double> x) const { return evaluate(x, {}, 0.0); }

    /// Writes a (sub)gradient into grad when grad is nonempty.
    double evaluate(std::span<const double> x, std::span<double> grad, double mu) const {
        const std::size_t n = features->size();
        const auto phi = chain->decision_features(x);
        thread_local Vector vals, gi;
        vals.resize(n);
        for (std::size_t i = 0; i < n; ++i) vals[i] = chain->evaluate(phi, (*features)[i]);
        const bool want = !grad.empty();
        if (want) {
            std::fill(grad.begin(), grad.end(), 0.0);
            gi.resize(x.size());
        }
        auto add_scenario = [&](std::size_t i, double w) {
            chain->evaluate(x, phi, (*features)[i], gi);
            for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += w * gi[j];
        };

        double total = 0.0;
        if (aggregate == Aggregate::outer_max) {
            std::size_t arg = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (vals[i] > vals[arg]) arg = i;
            const double m = vals[arg];
            double h = m, sum = 1.0;
            if (mu > 0.0) {
                sum = 0.0;
                for (std::size_t i = 0; i < n; ++i) sum += std::exp((vals[i] - m) / mu);
                h = m + mu * std::log(sum);
            }
            total = a * h + b * soft_plus(h - kink, mu);
            const double slope = a + b * soft_step(h - kink, mu);
            if (want && slope != 0.0) {
                if (mu == 0.0) {
                    add_scenario(arg, slope);
                } else {
                    for (std::size_t i = 0; i < n; ++i) {
                        const double w = std::exp((vals[i] - m) / mu) / sum;
                        if (w > 1e-17) add_scenario(i, slope * w);
                    }
                }
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const double z = vals[i] + shift;
                total += b * soft_plus(z, mu);
                const double w = b * soft_step(z, mu);
                if (want && w > 1e-17) add_scenario(i, w);
            }
        }
        if (base) total += base(x, phi, grad, mu);
        return total;
    }
};

Domain relaxed(const Domain& d) {
    Domain r = d;
    r.integer.clear();
    return r;
}

double box_scale(const Domain& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.dimension(); ++i)
        if (std::isfinite(d.upper[i] - d.lower[i])) s = std::max(s, d.upper[i] - d.lower[i]);
    return s > 0.0 ? s : 1.0;
}

struct StartOutcome {
    Vector x;
    double value = kInf;
    std::size_t iterations = 0;
    bool stopped = false;
};

void polish(const Problem& p, const Domain& box, Vector& best, double& fbest, const SolverConfig& cfg, double scale,
            std::optional<double> stop) {
    const std::size_t d = best.size();
    Vector gy(d), gz(d), z(d);
    for (double mu = 1e-2 * std::max(1.0, std::abs(fbest)); mu > 1e-11; mu *= 0.1) {
        Vector y = best;
        double fy = p.evaluate(y, gy, mu);
        double t = 0.1 * scale;
        for (std::size_t k = 0; k < cfg.polish_iterations; ++k) {
            for (std::size_t j = 0; j < d; ++j) z[j] = y[j] - t * gy[j];
            z = box.project(z);
            double dist2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) dist2 += (z[j] - y[j]) * (z[j] - y[j]);
            if (dist2 == 0.0) break;
            const double fz = p.evaluate(z, gz, mu);
            if (fz <= fy - 1e-4 * dist2 / t) {
                y = z;
                gy = gz;
                fy = fz;
                t *= 2.0;
            } else {
                t *= 0.5;
                if (t < 1e-15 * scale) break;
            }
        }
        const double f = p.value(y);
        if (f < fbest) {
            fbest = f;
            best = y;
        }
        if (stop && fbest <= *stop) return;
    }
}

/// Projected normalized subgradient with diminishing steps and restarts from
/// the incumbent, followed by a smoothing polish.
StartOutcome run_start(const Problem& p, const Domain& box, const Vector& x0, const SolverConfig& cfg, double scale,
                       std::optional<double> stop) {
    const std::size_t d = x0.size();
    StartOutcome out;
    Vector x = box.project(x0), g(d), trial(d);
    double fbest = p.evaluate(x, g, 0.0);
    Vector best = x, gbest = g;
    auto reached = [&] { return stop && fbest <= *stop; };
    double step = cfg.initial_step * scale;
    std::size_t t = 0, idle = 0;
    for (std::size_t it = 0; it < cfg.iterations && !reached(); ++it) {
        ++out.iterations;
        const double gn = norm(g);
        if (!(gn > 0.0) || !std::isfinite(gn)) break;
        const double alpha = step / std::sqrt(1.0 + static_cast<double>(t++));
        for (std::size_t j = 0; j < d; ++j) trial[j] = x[j] - alpha * g[j] / gn;
        x = box.project(trial);
        const double f = p.evaluate(x, g, 0.0);
        if (f < fbest) {
            fbest = f;
            best = x;
            gbest = g;
            idle = 0;
        } else if (++idle >= cfg.stall_limit) {
            x = best;
            g = gbest;
            step *= 0.5;
            t = 0;
            idle = 0;
            if (step < 1e-12 * scale) break;
        }
    }
    if (!reached() && cfg.polish_iterations > 0) polish(p, box, best, fbest, cfg, scale, stop);
    out.x = std::move(best);
    out.value = fbest;
    out.stopped = reached();
    return out;
}

struct SearchResult {
    Vector x;
    double value = kInf;
    SolverTrace trace;
};

Vector random_start(const Domain& box, double scale, CounterRng& rng) {
    const Vector c = box.center();
    Vector x(box.dimension());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = std::isfinite(box.lower[i]) ? box.lower[i] : c[i] - scale;
        const double hi = std::isfinite(box.upper[i]) ? box.upper[i] : c[i] + scale;
        x[i] = lo + (hi - lo) * rng.uniform01();
    }
    return x;
}

/// Continuous multistart search over the box relaxation of `domain`. Starts
/// are the warm points, then the box center, then random points. With a stop
/// level the lowest-index start reaching it wins; otherwise the best value,
/// ties to the lowest index.
SearchResult continuous_search(const Problem& p, const Domain& domain, const SolverConfig& cfg,
                               std::optional<double> stop, const std::vector<Vector>& warm) {
    const Domain box = relaxed(domain);
    const double scale = box_scale(box);
    const std::size_t count = std::max(cfg.multistarts, warm.size() + 1);
    auto start_point = [&](std::size_t s) {
        if (s < warm.size()) return warm[s];
        if (s == warm.size()) return box.center();
        auto rng = CounterRng::substream(cfg.seed, Purpose::multistart, s);
        return random_start(box, scale, rng);
    };
    std::vector<StartOutcome> outcomes(count);
    const std::size_t wave = stop ? std::max(1u, cfg.workers) : count;
    SearchResult r;
    std::size_t done = 0;
    std::optional<std::size_t> winner;
    while (done < count && !winner) {
        const std::size_t batch = std::min(wave, count - done);
        parallel_for(batch, cfg.workers,
                     [&](std::size_t i) { outcomes[done + i] = run_start(p, box, start_point(done + i), cfg, scale, stop); });
        for (std::size_t s = done; s < done + batch && !winner; ++s)
            if (outcomes[s].stopped) winner = s;
        done += batch;
    }
    std::size_t best = winner.value_or(0);
    if (!winner)
        for (std::size_t s = 1; s < done; ++s)
            if (outcomes[s].value < outcomes[best].value) best = s;
    for (std::size_t s = 0; s < done; ++s) r.trace.iterations += outcomes[s].iterations;
    r.trace.starts = done;
    r.trace.best_start = best;
    r.trace.stopped_early = winner.has_value();
    r.x = outcomes[best].x;
    r.value = outcomes[best].value;
    return r;
}

/// Best lattice point near x for the integer coordinates: exhaustive within
/// the rounding radius when small, coordinatewise otherwise.
Vector integer_neighborhood(const Problem& p, const Domain& domain, const Vector& x, int radius, double& value) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < domain.dimension(); ++i)
        if (domain.is_integer(i)) idx.push_back(i);
    std::vector<Vector> choices(idx.size());
    double total = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const std::size_t i = idx[k];
        const double r0 = std::round(x[i]);
        for (int r = -radius; r <= radius; ++r) {
            const double v = r0 + r;
            if (v >= std::ceil(domain.lower[i]) && v <= std::floor(domain.upper[i])) choices[k].push_back(v);
        }
        if (choices[k].empty()) choices[k].push_back(domain.project(x)[i]);
        total *= static_cast<double>(choices[k].size());
    }
    Vector best = domain.project(x);
    value = p.value(best);
    if (total <= 4096.0) {
        std::vector<std::size_t> pos(idx.size(), 0);
        Vector y = best;
        while (true) {
            for (std::size_t k = 0; k < idx.size(); ++k) y[idx[k]] = choices[k][pos[k]];
            const double f = p.value(y);
            if (f < value) {
                value = f;
                best = y;
            }
            std::size_t k = 0;
            while (k < idx.size() && ++pos[k] == choices[k].size()) pos[k++] = 0;
            if (k == idx.size()) break;
        }
        return best;
    }
    for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            Vector y = best;
            for (double v : choices[k]) {
                y[idx[k]] = v;
                const double f = p.value(y);
                if (f < value) {
                    value = f;
                    best = y;
                    improved = true;
                }
            }
        }
    }
    return best;
}

SearchResult search(const Problem& p, const Domain& domain, const SolverConfig& cfg, std::optional<double> stop,
                    const std::vector<Vector>& warm = {}) {
    SearchResult r = continuous_search(p, domain, cfg, stop, warm);
    bool has_integer = false;
    for (std::size_t i = 0; i < domain.dimension(); ++i) has_integer = has_integer || domain.is_integer(i);
    if (!has_integer) {
        r.x = domain.project(r.x);
        return r;
    }
    double value = kInf;
    Vector lattice = integer_neighborhood(p, domain, r.x, cfg.rounding_radius, value);
    Domain fixed = relaxed(domain);
    bool has_continuous = false;
    for (std::size_t i = 0; i < domain.dimension(); ++i) {
        if (domain.is_integer(i))
            fixed.lower[i] = fixed.upper[i] = lattice[i];
        else
            has_continuous = true;
    }
    if (has_continuous && !(stop && value <= *stop)) {
        SearchResult again = continuous_search(p, fixed, cfg, stop, {lattice});
        r.trace.iterations += again.trace.iterations;
        if (again.value < value) {
            value = again.value;
            lattice = domain.project(again.x);
        }
    }
    r.x = domain.project(lattice);
    r.value = p.value(r.x);
    r.trace.stopped_early = stop && r.value <= *stop;
    return r;
}

SolveResult verify(const ConstraintChain& chain, const ScenarioSet& scenarios, const Domain& domain, const Vector& x,
                   double gamma, const SolverConfig& cfg, const SolverTrace& trace) {
    SolveResult r;
    r.x = domain.project(x);
    r.gamma = gamma;
    r.trace = trace;
    r.values.resize(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) r.values[i] = chain.evaluate(r.x, scenarios.row(i));
    r.worst_value = *std::max_element(r.values.begin(), r.values.end());
    r.status = classify(r.worst_value, gamma, cfg.tolerance);
    if (gamma > 0.0) {
        r.risk = risks_from_values(r.values, MarginSpec(gamma));
    } else {
        r.risk.losses.resize(r.values.size());
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            r.risk.losses[i] = violation_loss(r.values[i]);
            if (r.values[i] > 0.0) ++r.risk.violations;
        }
        r.risk.margin_violations = r.risk.violations;
        r.risk.violation = static_cast<double>(r.risk.violations) / static_cast<double>(r.values.size());
        r.risk.margin_risk = r.risk.violation;
    }
    return r;
}

void check_inputs(const ConstraintChain& chain, const ScenarioSet& scenarios, const Domain& domain,
                  const SolverConfig& cfg) {
    cfg.validate();
    domain.validate();
    if (domain.dimension() != chain.decision_dim()) throw InvalidArgument("domain dimension does not match the chain");
    if (scenarios.dim() != chain.parameter_dim()) throw InvalidArgument("scenario dimension does not match the chain");
}

Problem max_problem(const ConstraintChain& chain, const std::vector<ParameterFeatures>& features) {
    Problem p;
    p.chain = &chain;
    p.features = &features;
    return p;
}

/// Segment search from an infeasible x towards a point with h <= -gamma;
/// returns the feasible end closest to x.
Vector restore(const Problem& h, const Domain& domain, const Vector& x, const Vector& feasible, double gamma) {
    for (std::size_t i = 0; i < domain.dimension(); ++i)
        if (domain.is_integer(i) && x[i] != feasible[i]) return feasible;
    Vector lo = x, hi = feasible, mid(x.size());
    for (int it = 0; it < 200; ++it) {
        for (std::size_t j = 0; j < x.size(); ++j) mid[j] = 0.5 * (lo[j] + hi[j]);
        mid = domain.project(mid);
        if (mid == lo || mid == hi) break;
        if (h.value(mid) <= -gamma)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

/// Exact-penalty driver: minimizes base(x) + lambda h(x) + w max(0, h(x) + gamma)
/// for w = 1, 10, ... until h(x) <= -gamma.
SolveResult penalized(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma, const Domain& domain,
                      const SolverConfig& cfg, const BaseTerm& base, double lambda) {
    const auto features = precompute_features(chain, scenarios);
    const Problem h = max_problem(chain, features);
    const SearchResult feasible = search(h, domain, cfg, -gamma);
    const bool have_feasible = feasible.value <= -gamma;
    SolverTrace trace = feasible.trace;
    trace.stopped_early = false;

    std::vector<Vector> warm{feasible.x};
    double w = 1.0;
    Vector x = feasible.x;
    bool accepted = false;
    for (std::size_t esc = 0; esc <= cfg.penalty_escalations; ++esc) {
        Problem p = max_problem(chain, features);
        p.a = lambda;
        p.b = w;
        p.kink = -gamma;
        p.base = base;
        const SearchResult r = search(p, domain, cfg, std::nullopt, warm);
        trace.iterations += r.trace.iterations;
        trace.penalty_weight = w;
        trace.escalations = esc;
        x = r.x;
        const double hx = h.value(x);
        if (hx <= -gamma) {
            accepted = true;
            break;
        }
        if (have_feasible && hx + gamma <= 1e-3 * (1.0 + gamma)) {
            x = restore(h, domain, x, feasible.x, gamma);
            trace.restored = true;
            accepted = true;
            break;
        }
        warm = {x, feasible.x};
        w *= 10.0;
    }
    if (!accepted && have_feasible) {
        x = restore(h, domain, x, feasible.x, gamma);
        trace.restored = true;
    }
    return verify(chain, scenarios, domain, x, gamma, cfg, trace);
}

}  // namespace

// ---- config and results ----------------------------------------------------

void SolverConfig::validate() const {
    if (multistarts == 0 || iterations == 0 || stall_limit == 0)
        throw InvalidArgument("solver budgets must be positive");
    if (!(initial_step > 0.0)) throw InvalidArgument("solver initial_step must be positive");
    if (!(tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
    if (rounding_radius < 0) throw InvalidArgument("rounding radius must be nonnegative");
}

nlohmann::json SolverConfig::to_json() const {
    return {{"multistarts", multistarts},   {"iterations", iterations},
            {"initial_step", initial_step}, {"stall_limit", stall_limit},
            {"polish_iterations", polish_iterations}, {"seed", seed},
            {"tolerance", tolerance},       {"rounding_radius", rounding_radius},
            {"workers", workers},           {"penalty_escalations", penalty_escalations}};
}

SolverConfig SolverConfig::from_json(const nlohmann::json& j) {
    SolverConfig c;
    c.multistarts = j.value("multistarts", c.multistarts);
    c.iterations = j.value("iterations", c.iterations);
    c.initial_step = j.value("initial_step", c.initial_step);
    c.stall_limit = j.value("stall_limit", c.stall_limit);
    c.polish_iterations = j.value("polish_iterations", c.polish_iterations);
    c.seed = j.value("seed", c.seed);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.rounding_radius = j.value("rounding_radius", c.rounding_radius);
    c.workers = j.value("workers", c.workers);
    c.penalty_escalations = j.value("penalty_escalations", c.penalty_escalations);
    c.validate();
    return c;
}

std::string to_string(FeasibilityStatus s) {
    switch (s) {
        case FeasibilityStatus::margin_feasible: return "margin-feasible";
        case FeasibilityStatus::feasible_no_margin: return "feasible-no-margin";
        case FeasibilityStatus::infeasible_candidate: return "infeasible-candidate";
    }
    return "unknown";
}

FeasibilityStatus classify(double worst, double gamma, double tolerance) {
    if (gamma >= 0.0 && worst <= -gamma + tolerance) return FeasibilityStatus::margin_feasible;
    if (worst <= 0.0) return FeasibilityStatus::feasible_no_margin;
    return FeasibilityStatus::infeasible_candidate;
}

nlohmann::json SolveResult::to_json() const {
    nlohmann::json j{{"x", x},
                     {"gamma", gamma},
                     {"worst_value", worst_value},
                     {"achieved_margin", achieved_margin()},
                     {"status", scenmargin::to_string(status)},
                     {"risk", risk.to_json()},
                     {"verification", {{"values", values}, {"worst_value", worst_value}}},
                     {"trace",
                      {{"starts", trace.starts},
                       {"iterations", trace.iterations},
                       {"best_start", trace.best_start},
                       {"stopped_early", trace.stopped_early},
                       {"penalty_weight", trace.penalty_weight},
                       {"escalations", trace.escalations},
                       {"restored", trace.restored}}}};
    if (!slacks.empty()) {
        j["slacks"] = slacks;
        CompensatedSum s;
        for (double v : slacks) s.add(v);
        j["slack_sum"] = s.value();
    }
    if (objective) j["objective"] = *objective;
    if (lambda_bar) j["lambda_bar"] = *lambda_bar;
    return j;
}

// ---- objectives ------------------------------------------------------------

Objective Objective::zero() { return {}; }

Objective Objective::linear(Vector c, double constant) {
    Objective o;
    o.kind_ = Kind::linear;
    o.c_ = std::move(c);
    o.constant_ = constant;
    return o;
}

Objective Objective::quadratic(Vector q, Vector c, double constant) {
    Objective o;
    o.kind_ = Kind::quadratic;
    o.q_ = std::move(q);
    o.c_ = std::move(c);
    o.constant_ = constant;
    if (o.q_.size() != o.c_.size() * o.c_.size()) throw InvalidArgument("quadratic objective: Q must be d x d");
    return o;
}

Objective Objective::lookup(std::size_t coordinate, std::int64_t offset, Vector table) {
    if (table.empty()) throw InvalidArgument("lookup objective: empty table");
    Objective o;
    o.kind_ = Kind::lookup;
    o.coordinate_ = coordinate;
    o.offset_ = offset;
    o.c_ = std::move(table);
    return o;
}

double Objective::operator()(std::span<const double> x) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::linear: return dot(c_, x) + constant_;
        case Kind::quadratic: {
            const std::size_t d = c_.size();
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) s += x[i] * q_[i * d + j] * x[j];
            return s + dot(c_, x) + constant_;
        }
        case Kind::lookup: {
            const auto row = static_cast<std::int64_t>(std::llround(x[coordinate_])) - offset_;
            const auto clamped = std::clamp<std::int64_t>(row, 0, static_cast<std::int64_t>(c_.size()) - 1);
            return c_[static_cast<std::size_t>(clamped)];
        }
    }
    return 0.0;
}

void Objective::accumulate_gradient(std::span<const double> x, std::span<double> grad) const {
    if (kind_ == Kind::linear) {
        for (std::size_t i = 0; i < c_.size(); ++i) grad[i] += c_[i];
    } else if (kind_ == Kind::quadratic) {
        const std::size_t d = c_.size();
        for (std::size_t i = 0; i < d; ++i) {
            double s = c_[i];
            for (std::size_t j = 0; j < d; ++j) s += (q_[i * d + j] + q_[j * d + i]) * x[j];
            grad[i] += s;
        }
    }
}

void Objective::check(const Domain& domain) const {
    const std::size_t d = domain.dimension();
    if ((kind_ == Kind::linear || kind_ == Kind::quadratic) && c_.size() != d)
        throw InvalidArgument("objective dimension does not match the domain");
    if (kind_ == Kind::lookup) {
        if (coordinate_ >= d || !domain.is_integer(coordinate_))
            throw InvalidArgument("lookup objective needs an integer coordinate");
        const double lo = std::ceil(domain.lower[coordinate_]), hi = std::floor(domain.upper[coordinate_]);
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo - static_cast<double>(offset_) < 0.0 ||
            hi - static_cast<double>(offset_) >= static_cast<double>(c_.size()))
            throw InvalidArgument("lookup objective table does not cover the coordinate range");
    }
}

nlohmann::json Objective::to_json() const {
    switch (kind_) {
        case Kind::zero: return {{"kind", "zero"}};
        case Kind::linear: return {{"kind", "linear"}, {"c", c_}, {"constant", constant_}};
        case Kind::quadratic: {
            const std::size_t d = c_.size();
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t i = 0; i < d; ++i)
                rows.push_back(Vector(q_.begin() + static_cast<std::ptrdiff_t>(i * d),
                                      q_.begin() + static_cast<std::ptrdiff_t>((i + 1) * d)));
            return {{"kind", "quadratic"}, {"Q", rows}, {"c", c_}, {"constant", constant_}};
        }
        case Kind::lookup:
            return {{"kind", "lookup"}, {"coordinate", coordinate_}, {"offset", offset_}, {"table", c_}};
    }
    return {};
}

Objective Objective::from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "zero") return zero();
    if (kind == "linear") return linear(j.at("c").get<Vector>(), j.value("constant", 0.0));
    if (kind == "quadratic") {
        Vector q;
        for (const auto& row : j.at("Q")) {
            const auto r = row.get<Vector>();
            q.insert(q.end(), r.begin(), r.end());
        }
        return quadratic(std::move(q), j.at("c").get<Vector>(), j.value("constant", 0.0));
    }
    if (kind == "lookup")
        return lookup(j.at("coordinate").get<std::size_t>(), j.value("offset", std::int64_t{0}),
                      j.at("table").get<Vector>());
    throw InvalidArgument("unknown objective kind '" + kind + "'");
}

// ---- solvers ---------------------------------------------------------------

SolveResult solve_hard_margin(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                              const Domain& domain, const SolverConfig& cfg, bool stop_when_feasible) {
    (void)MarginSpec(gamma);
    check_inputs(chain, scenarios, domain, cfg);
    const auto features = precompute_features(chain, scenarios);
    const Problem p = max_problem(chain, features);
    const auto r = search(p, domain, cfg, stop_when_feasible ? std::optional<double>(-gamma) : std::nullopt);
    return verify(chain, scenarios, domain, r.x, gamma, cfg, r.trace);
}

SolveResult solve_soft_margin(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                              const Domain& domain, const SolverConfig& cfg) {
    (void)MarginSpec(gamma);
    check_inputs(chain, scenarios, domain, cfg);
    const auto features = precompute_features(chain, scenarios);
    Problem p = max_problem(chain, features);
    p.aggregate = Problem::Aggregate::hinge_sum;
    p.b = 1.0;
    p.shift = gamma;
    const auto r = search(p, domain, cfg, 0.0);
    auto out = verify(chain, scenarios, domain, r.x, gamma, cfg, r.trace);
    out.slacks.resize(out.values.size());
    CompensatedSum total;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.slacks[i] = std::max(0.0, out.values[i] + gamma);
        total.add(out.slacks[i]);
    }
    out.objective = total.value();
    return out;
}

SolveResult solve_max_margin(const ConstraintChain& chain, const ScenarioSet& scenarios, const Domain& domain,
                             const SolverConfig& cfg) {
    check_inputs(chain, scenarios, domain, cfg);
    const auto features = precompute_features(chain, scenarios);
    const Problem p = max_problem(chain, features);
    const auto r = search(p, domain, cfg, std::nullopt);
    auto probe = verify(chain, scenarios, domain, r.x, 0.0, cfg, r.trace);
    const double gamma_hat = -probe.worst_value;
    if (gamma_hat > 0.0) return verify(chain, scenarios, domain, r.x, gamma_hat, cfg, r.trace);
    probe.gamma = gamma_hat;
    probe.status = probe.worst_value <= 0.0 ? FeasibilityStatus::feasible_no_margin
                                            : FeasibilityStatus::infeasible_candidate;
    return probe;
}

SolveResult solve_with_objective(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                                 const Domain& domain, const Objective& objective, const SolverConfig& cfg,
                                 std::optional<double> lambda) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be nonnegative and finite");
    if (lambda && !(*lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    check_inputs(chain, scenarios, domain, cfg);
    objective.check(domain);
    BaseTerm base;
    if (objective.kind() != Objective::Kind::zero)
        base = [&objective](std::span<const double> x, const DecisionFeatures&, std::span<double> grad, double) {
            if (!grad.empty()) objective.accumulate_gradient(x, grad);
            return objective(x);
        };
    auto out = penalized(chain, scenarios, gamma, domain, cfg, base, lambda.value_or(0.0));
    out.objective = objective(out.x);
    return out;
}

SolveResult solve_regularized(const ConstraintChain& chain, const ScenarioSet& scenarios, double gamma,
                              const Domain& domain, const std::vector<Vector>& centers, const SolverConfig& cfg) {
    (void)MarginSpec(gamma);
    check_inputs(chain, scenarios, domain, cfg);
    if (centers.size() != chain.size()) throw InvalidArgument("solve_regularized: one center per component expected");
    for (std::size_t k = 0; k < chain.size(); ++k)
        if (centers[k].size() != chain.component(k).phi.output_dim())
            throw InvalidArgument("solve_regularized: center dimension mismatch");
    // max_k ||phi_k(x) - c_k||, smoothed as LSE_k sqrt(||.||^2 + mu^2).
    BaseTerm base = [&chain, &centers](std::span<const double> x, const DecisionFeatures& phi, std::span<double> grad,
                                       double mu) {
        const std::size_t C = chain.size();
        Vector r(C);
        for (std::size_t k = 0; k < C; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < phi[k].size(); ++j) s += (phi[k][j] - centers[k][j]) * (phi[k][j] - centers[k][j]);
            r[k] = std::sqrt(s + mu * mu);
        }
        const std::size_t arg = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
        Vector w(C, 0.0);
        double value = r[arg];
        if (mu > 0.0) {
            double sum = 0.0;
            for (std::size_t k = 0; k < C; ++k) sum += std::exp((r[k] - r[arg]) / mu);
            value = r[arg] + mu * std::log(sum);
            for (std::size_t k = 0; k < C; ++k) w[k] = std::exp((r[k] - r[arg]) / mu) / sum;
        } else {
            w[arg] = 1.0;
        }
        if (!grad.empty()) {
            for (std::size_t k = 0; k < C; ++k) {
                if (w[k] <= 1e-17 || r[k] == 0.0) continue;
                Vector v(phi[k].size());
                for (std::size_t j = 0; j < v.size(); ++j) v[j] = w[k] * (phi[k][j] - centers[k][j]) / r[k];
                chain.component(k).phi.accumulate_vjp(x, v, grad);
            }
        }
        return value;
    };
    auto out = penalized(chain, scenarios, gamma, domain, cfg, base, 0.0);
    const auto phi = chain.decision_features(out.x);
    double radius = 0.0;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < phi[k].size(); ++j) s += (phi[k][j] - centers[k][j]) * (phi[k][j] - centers[k][j]);
        radius = std::max(radius, std::sqrt(s));
    }
    out.objective = radius;
    out.lambda_bar = lambda_bar(chain, out.x, centers);
    return out;
}

FixedBudgetOutcome fixed_budget_procedure(const ConstraintChain& chain, const ChainConstants& constants, std::size_t n,
                                          double epsilon, double delta, const Domain& domain,
                                          const Objective& objective, const DistributionSpec& dist,
                                          std::uint64_t seed, const SolverConfig& cfg) {
    const double gamma = margin_complexity(n, epsilon, delta, constants).value;
    auto scenarios = sample_scenarios(dist, n, seed, cfg.workers);
    auto solve = solve_with_objective(chain, scenarios, gamma, domain, objective, cfg);
    auto cert = margin_bound(solve.risk.margin_risk, constants, gamma, delta, n);
    return {std::move(solve), std::move(cert), gamma, std::move(scenarios)};
}

}  // namespace scenmargin
