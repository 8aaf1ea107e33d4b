#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "scenmargin/chain.hpp"
#include "scenmargin/chain_io.hpp"
#include "scenmargin/constants.hpp"
#include "scenmargin/wrapper.hpp"

using namespace scenmargin;
using namespace scenmargin::testing;

TEST_CASE("circle spec builds theta^T x - 1") {
    const auto c = circle_chain();
    CHECK(c.chain.size() == 1);
    CHECK(c.chain.evaluate(Vector{0, 0}, unit(37)) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(c.chain.evaluate(Vector{2, 0}, Vector{1, 0}) == 1.0);
    CHECK(c.chain.evaluate(Vector{0.5, -1.5}, Vector{0.6, 0.8}) == doctest::Approx(0.3 - 1.2 - 1.0));
}

TEST_CASE("scale(0) wrapper gives a constant-zero chain with Lipschitz 0") {
    auto spec = to_json(circle_chain());
    spec["components"][0]["wrapper"] = {{"kind", "scale"}, {"factor", 0.0}};
    const auto c = build_chain(spec);
    CHECK(c.chain.component(0).wrapper.lipschitz() == 0.0);
    CHECK(c.chain.evaluate(Vector{1.7, -0.2}, Vector{0.3, 0.4}) == 0.0);
    const auto k = compute_constants(c.chain, c.domain, {UnitSphere{2}});
    CHECK(k.complexity_sum() == 0.0);
}

namespace {

ChainDescription min_max_chain() {
    nlohmann::json comp = {{"psi", {{"kind", "coordinates"}, {"indices", {0, 1}}}},
                           {"phi", {{"kind", "identity"}}},
                           {"eta", {{"kind", "coordinates"}, {"indices", {2}}}}};
    auto c2 = comp, c3 = comp;
    c2["psi"]["indices"] = {1, 0};
    c2["wrapper"] = {{"kind", "clip"}, {"lower", -3}, {"upper", 3}};
    c3["eta"] = {{"kind", "constant"}, {"value", -2}};
    c3["wrapper"] = "sin";
    return build_chain({{"dimension", 2},
                        {"parameter_dimension", 3},
                        {"domain", {{"lower", {-2, -2}}, {"upper", {2, 2}}}},
                        {"components", {comp, c2, c3}},
                        {"operators", {"min", "max"}},
                        {"stage_wrappers", {{{"kind", "scale"}, {"factor", 0.5}}, "identity"}}});
}

}  // namespace

TEST_CASE("three-component chain equals max{min{f1, f2}, f3} with its wrappers") {
    const auto desc = min_max_chain();
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 1000; ++t) {
        const Vector x{u(gen), u(gen)}, th{u(gen), u(gen), u(gen)};
        const double f1 = th[0] * x[0] + th[1] * x[1] + th[2];
        const double f2 = std::clamp(th[1] * x[0] + th[0] * x[1] + th[2], -3.0, 3.0);
        const double f3 = std::sin(th[0] * x[0] + th[1] * x[1] - 2.0);
        const double expected = std::max(0.5 * std::min(f1, f2), f3);
        CHECK(desc.chain.evaluate(x, th) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("operator semantics with f1=-1, f2=3, f3=-2") {
    auto spec = to_json(min_max_chain());
    for (auto& c : spec["components"]) c["wrapper"] = "identity";
    spec["stage_wrappers"] = {"identity", "identity"};
    spec["components"][1]["eta"] = {{"kind", "constant"}, {"value", 3}};
    const auto c = build_chain(spec);
    // At x = 0 every f_k reduces to eta_k.
    CHECK(c.chain.evaluate(Vector{0, 0}, Vector{0.1, 0.2, -1.0}) == -1.0);
}

TEST_CASE("wrapper Lipschitz constants hold on their validated ranges") {
    const std::vector<ScalarWrapper> ws{ScalarWrapper::identity(),       ScalarWrapper::scale(-2.5),
                                        ScalarWrapper::absolute(),       ScalarWrapper::clip(-0.5, 1.5),
                                        ScalarWrapper::sine(),           ScalarWrapper::cosine(),
                                        ScalarWrapper::negated_cosine(), ScalarWrapper::shifted_sqrt(0.25)};
    std::mt19937_64 gen(5);
    for (const auto& w : ws) {
        const auto r = w.valid_range();
        const double lo = std::isfinite(r.lo) ? r.lo : -50.0, hi = std::isfinite(r.hi) ? r.hi : 50.0;
        std::uniform_real_distribution<double> u(lo, hi);
        const double L = w.lipschitz();
        bool ok = true;
        for (int t = 0; t < 100000; ++t) {
            const double a = u(gen), b = u(gen);
            ok = ok && std::abs(w(a) - w(b)) <= L * std::abs(a - b) * (1.0 + 1e-12) + 1e-15;
        }
        CHECK_MESSAGE(ok, w.name());
    }
}

TEST_CASE("wrapper_from_json rejects unknown kinds") {
    CHECK_THROWS_AS(wrapper_from_json("tanh"), InvalidArgument);
    CHECK_THROWS_AS(ScalarWrapper::shifted_sqrt(0.0), InvalidArgument);
}

TEST_CASE("build_chain reports the JSON path of a bad field") {
    auto spec = to_json(circle_chain());
    spec["components"][0]["psi"] = {{"kind", "spline"}};
    try {
        (void)build_chain(spec);
        FAIL("expected an error");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("/components/0/psi") != std::string::npos);
    }
    spec = to_json(circle_chain());
    spec["operators"] = {"max"};
    CHECK_THROWS_AS(build_chain(spec), InvalidArgument);
}

TEST_CASE("chain JSON round trip preserves evaluation") {
    const auto a = min_max_chain();
    const auto b = build_chain(to_json(a));
    CHECK(to_json(a) == to_json(b));
    CHECK(a.chain.evaluate(Vector{0.3, -1.1}, Vector{0.2, 0.9, -0.4}) ==
          b.chain.evaluate(Vector{0.3, -1.1}, Vector{0.2, 0.9, -0.4}));
}

TEST_CASE("subgradient matches finite differences away from kinks") {
    const auto desc = two_component_chain("plus", "sin");
    const Vector x{0.37, -0.81}, th{0.2, -0.7, 0.5, 0.1};
    const auto phi = desc.chain.decision_features(x);
    const auto pf = desc.chain.parameter_features(th);
    Vector g(2);
    desc.chain.evaluate(x, phi, pf, g);
    for (std::size_t i = 0; i < 2; ++i) {
        Vector xp = x, xm = x;
        xp[i] += 1e-6;
        xm[i] -= 1e-6;
        CHECK(g[i] == doctest::Approx((desc.chain.evaluate(xp, th) - desc.chain.evaluate(xm, th)) / 2e-6).epsilon(1e-6));
    }
}

TEST_CASE("circle constants on [-2,2]^2 with the unit circle") {
    const auto c = circle_chain();
    const auto k = compute_constants(c.chain, c.domain, {UnitSphere{2}});
    REQUIRE(k.components.size() == 1);
    CHECK(k.components[0].tau == 1.0);
    CHECK(k.components[0].lambda == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(k.components[0].additive_ops == 0);
    CHECK(k.certified());
}

TEST_CASE("singleton domain centered at phi(x0) gives zero radius") {
    const auto c = two_component_chain("max");
    const Vector x0{0.4, -1.3};
    const auto k = compute_constants(c.chain, Domain::singleton(x0), {box4()}, {x0, x0});
    for (const auto& comp : k.components) CHECK(comp.lambda == 0.0);
}

TEST_CASE("p_k counts additive operations from k onward") {
    const auto plus = compute_constants(two_component_chain("plus").chain, two_component_chain("plus").domain, {box4()});
    CHECK(plus.components[0].additive_ops == 1);
    CHECK(plus.components[1].additive_ops == 1);
    const auto mx = compute_constants(two_component_chain("max").chain, two_component_chain("max").domain, {box4()});
    CHECK(mx.components[0].additive_ops == 0);
    CHECK(mx.components[1].additive_ops == 0);

    for (const std::string appended : {"plus", "minus", "max", "min"}) {
        auto spec = to_json(two_component_chain("max"));
        spec["components"].push_back(spec["components"][0]);
        spec["operators"].push_back(appended);
        spec["stage_wrappers"].push_back("identity");
        const auto d = build_chain(spec);
        const auto k = compute_constants(d.chain, d.domain, {box4()});
        const int inc = (appended == "plus" || appended == "minus") ? 1 : 0;
        CHECK(k.components[0].additive_ops == inc);
        CHECK(k.components[1].additive_ops == inc);
        CHECK(k.components[2].additive_ops == inc);
    }
}

TEST_CASE("Lambda is sound over the box and attained by the maximizer") {
    const auto phi = FeatureMap::affine(3, 2, {1.0, 0.0, 0.0, 2.0, 1.0, -1.0}, {0.5, 0.0, -0.25});
    const Vector lo{-1.0, 0.0}, hi{2.0, 0.5};
    const Vector center{0.3, -0.1, 0.2};
    const auto res = sup_norm_over_box(phi, lo, hi, center);
    REQUIRE(res.maximizer.has_value());
    auto dist = [&](const Vector& x) {
        const auto y = phi(x);
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += (y[i] - center[i]) * (y[i] - center[i]);
        return std::sqrt(s);
    };
    CHECK(std::abs(dist(*res.maximizer) - res.value) <= 1e-9);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u0(lo[0], hi[0]), u1(lo[1], hi[1]);
    double worst = 0.0;
    for (int t = 0; t < 100000; ++t) worst = std::max(worst, dist({u0(gen), u1(gen)}));
    CHECK(worst <= res.value);

    // Coordinate-separable identity map.
    const auto id = sup_norm_over_box(FeatureMap::identity(2), lo, hi, Vector{0.5, 0.25});
    CHECK(id.value == doctest::Approx(std::hypot(1.5, 0.25)).epsilon(1e-15));
    CHECK(id.certification == Certification::exact);
}

TEST_CASE("lambda_bar floors at one") {
    const auto c = circle_chain();
    CHECK(lambda_bar(c.chain, Vector{0, 0}, {Vector{0, 0}}) == 1.0);
    CHECK(lambda_bar(c.chain, Vector{2, 0}, {Vector{0, 0}}) == 2.0);
    CHECK(lambda_bar(c.chain, Vector{2, 0}, {Vector{2, 0}}) == 1.0);
}

TEST_CASE("unbounded domain without an exact route is rejected") {
    const auto c = circle_chain();
    const auto open = Domain::box({-INFINITY, -1}, {1, 1});
    CHECK_THROWS_AS(compute_constants(c.chain, open, {UnitSphere{2}}), InvalidArgument);
}

TEST_CASE("Gaussian support uses a sampled or quantile estimate and is flagged") {
    const auto c = circle_chain();
    const auto k = compute_constants(c.chain, c.domain, {IsotropicGaussian{{0, 0}, 1.0}, 4096, 1});
    CHECK_FALSE(k.certified());
    CHECK(k.uncertified_constants() == std::vector<std::string>{"tau_1"});
}

TEST_CASE("shifted square root is checked against its argument enclosure") {
    auto spec = to_json(circle_chain());
    spec["components"][0]["wrapper"] = {{"kind", "shifted_sqrt"}, {"shift", 0.5}};
    const auto d = build_chain(spec);
    // theta^T x - 1 ranges over [-1 - 2 sqrt 2, -1 + 2 sqrt 2], which includes negatives.
    CHECK_THROWS_AS(compute_constants(d.chain, d.domain, {UnitSphere{2}}), InvalidArgument);
}
