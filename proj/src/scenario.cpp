#include "scenmargin/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "scenmargin/parallel.hpp"

namespace scenmargin {

ScenarioSet::ScenarioSet(std::size_t dim, Vector data, std::optional<DistributionSpec> distribution,
                         std::uint64_t seed)
    : dim_(dim), n_(0), data_(std::move(data)), distribution_(std::move(distribution)), seed_(seed) {
    if (dim_ == 0) throw InvalidArgument("scenario dimension must be positive");
    if (data_.size() % dim_ != 0) throw InvalidArgument("scenario data is not a whole number of rows");
    n_ = data_.size() / dim_;
    if (n_ == 0) throw InvalidArgument("scenario set must contain at least one scenario");
}

ScenarioSet ScenarioSet::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) throw InvalidArgument("scenario set must contain at least one scenario");
    const std::size_t dim = rows.front().size();
    Vector data;
    data.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        if (r.size() != dim) throw InvalidArgument("scenario rows have inconsistent dimension");
        data.insert(data.end(), r.begin(), r.end());
    }
    return ScenarioSet(dim, std::move(data));
}

std::vector<Vector> ScenarioSet::rows() const {
    std::vector<Vector> out;
    out.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) out.emplace_back(row(i).begin(), row(i).end());
    return out;
}

ScenarioSet ScenarioSet::slice(std::size_t first, std::size_t count) const {
    if (first + count > n_ || count == 0) throw InvalidArgument("scenario slice out of range");
    Vector data(data_.begin() + static_cast<std::ptrdiff_t>(first * dim_),
                data_.begin() + static_cast<std::ptrdiff_t>((first + count) * dim_));
    return ScenarioSet(dim_, std::move(data), distribution_, seed_);
}

nlohmann::json ScenarioSet::to_json() const {
    nlohmann::json j{{"n", n_}, {"dimension", dim_}, {"seed", seed_}, {"rows", rows()}};
    if (distribution_) j["distribution"] = scenmargin::to_json(*distribution_);
    return j;
}

ScenarioSet sample_scenarios(const DistributionSpec& dist, std::size_t n, std::uint64_t seed, unsigned workers) {
    if (n == 0) throw InvalidArgument("sample_scenarios: n must be at least 1");
    validate(dist);
    const std::size_t dim = parameter_dim(dist);
    Vector data(n * dim);
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    parallel_for(blocks, workers, [&](std::size_t b) {
        auto rng = CounterRng::substream(seed, Purpose::scenarios, b);
        const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
        for (std::size_t i = b * kSampleBlock; i < end; ++i) draw(dist, rng, std::span<double>(&data[i * dim], dim));
    });
    return ScenarioSet(dim, std::move(data), dist, seed);
}

std::vector<ParameterFeatures> precompute_features(const ConstraintChain& chain, const ScenarioSet& scenarios) {
    std::vector<ParameterFeatures> out(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) chain.parameter_features(scenarios.row(i), out[i]);
    return out;
}

BinomialInterval clopper_pearson(std::size_t k, std::size_t m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (m == 0 || k > m) throw InvalidArgument("clopper_pearson: need 0 <= k <= m, m >= 1");
    const auto kd = static_cast<double>(k);
    const auto md = static_cast<double>(m);
    BinomialInterval ci;
    ci.lower = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, md - kd + 1.0, alpha / 2.0);
    ci.upper = k == m ? 1.0 : boost::math::ibeta_inv(kd + 1.0, md - kd, 1.0 - alpha / 2.0);
    return ci;
}

double ViolationEstimate::standard_error() const {
    if (samples == 0) return 0.0;
    return std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(samples));
}

nlohmann::json ViolationEstimate::to_json() const {
    return {{"estimate", estimate}, {"violations", violations}, {"samples", samples},
            {"interval", {lower, upper}}, {"alpha", alpha}, {"seed", seed}};
}

ViolationEstimate monte_carlo_violation(const ConstraintChain& chain, std::span<const double> x,
                                        const DistributionSpec& dist, std::size_t m, std::uint64_t seed,
                                        double alpha, unsigned workers) {
    if (m == 0) throw InvalidArgument("monte_carlo_violation: m must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    validate(dist);
    if (parameter_dim(dist) != chain.parameter_dim())
        throw InvalidArgument("monte_carlo_violation: distribution dimension does not match the chain");
    const auto phi = chain.decision_features(x);
    const std::size_t dim = chain.parameter_dim();
    const std::size_t blocks = (m + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<std::size_t> counts(blocks, 0);
    parallel_for(blocks, workers, [&](std::size_t b) {
        auto rng = CounterRng::substream(seed, Purpose::monte_carlo, b);
        Vector theta(dim);
        ParameterFeatures pf;
        std::size_t count = 0;
        const std::size_t end = std::min(m, (b + 1) * kMonteCarloBlock);
        for (std::size_t i = b * kMonteCarloBlock; i < end; ++i) {
            draw(dist, rng, theta);
            chain.parameter_features(theta, pf);
            if (chain.evaluate(phi, pf) > 0.0) ++count;
        }
        counts[b] = count;
    });
    ViolationEstimate est;
    for (auto c : counts) est.violations += c;
    est.samples = m;
    est.estimate = static_cast<double>(est.violations) / static_cast<double>(m);
    const auto ci = clopper_pearson(est.violations, m, alpha);
    est.lower = ci.lower;
    est.upper = ci.upper;
    est.alpha = alpha;
    est.seed = seed;
    return est;
}

}  // namespace scenmargin
