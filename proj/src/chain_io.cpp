#include "scenmargin/chain_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace scenmargin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double bound_from_json(const nlohmann::json& j, double infinite) {
    if (j.is_null()) return infinite;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw InvalidArgument("bad bound '" + s + "'");
    }
    return j.get<double>();
}

nlohmann::json bound_to_json(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

nlohmann::json to_json(const FeatureMap& map) {
    return std::visit(
        overloaded{
            [](const CoordinateSelection& s) { return nlohmann::json{{"kind", "coordinates"}, {"indices", s.indices}}; },
            [](const AffineMap& a) {
                nlohmann::json rows = nlohmann::json::array();
                for (std::size_t r = 0; r < a.rows; ++r)
                    rows.push_back(Vector(a.matrix.begin() + static_cast<std::ptrdiff_t>(r * a.cols),
                                          a.matrix.begin() + static_cast<std::ptrdiff_t>((r + 1) * a.cols)));
                return nlohmann::json{{"kind", "affine"}, {"matrix", rows}, {"offset", a.offset}};
            },
            [](const MonomialList& m) {
                nlohmann::json terms = nlohmann::json::array();
                for (const auto& t : m.terms)
                    terms.push_back({{"coefficient", t.coefficient}, {"exponents", t.exponents}});
                return nlohmann::json{{"kind", "monomials"}, {"terms", terms}};
            },
            [](const LookupTable& t) {
                return nlohmann::json{
                    {"kind", "lookup"}, {"coordinate", t.coordinate}, {"offset", t.offset}, {"rows", t.rows}};
            },
        },
        map.kind());
}

FeatureMap feature_map_from_json(const nlohmann::json& j, std::size_t input_dim) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "coordinates") return FeatureMap::coordinates(j.at("indices").get<std::vector<std::size_t>>(), input_dim);
    if (kind == "identity") return FeatureMap::identity(input_dim);
    if (kind == "constant") return FeatureMap::constant(j.at("value").get<double>(), input_dim);
    if (kind == "affine") {
        Vector offset = j.value("offset", Vector{});
        std::vector<Vector> rows = j.value("matrix", std::vector<Vector>{});
        if (rows.empty()) rows.assign(offset.size(), Vector(input_dim, 0.0));
        if (offset.empty()) offset.assign(rows.size(), 0.0);
        Vector flat;
        for (const auto& r : rows) {
            if (r.size() != input_dim) throw InvalidArgument("affine map: row length != input dimension");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return FeatureMap::affine(rows.size(), input_dim, std::move(flat), std::move(offset));
    }
    if (kind == "monomials") {
        std::vector<Monomial> terms;
        for (const auto& t : j.at("terms")) {
            for (const auto& e : t.at("exponents"))
                if (!e.is_number_unsigned())
                    throw InvalidArgument("monomial exponents must be nonnegative integers");
            terms.push_back({t.value("coefficient", 1.0), t.at("exponents").get<std::vector<unsigned>>()});
        }
        return FeatureMap::monomials(std::move(terms), input_dim);
    }
    if (kind == "lookup")
        return FeatureMap::lookup(j.at("coordinate").get<std::size_t>(), j.value("offset", std::int64_t{0}),
                                  j.at("rows").get<std::vector<Vector>>(), input_dim);
    throw InvalidArgument("unknown feature map kind '" + kind + "'");
}

nlohmann::json to_json(const ScalarWrapper& w) {
    nlohmann::json j{{"kind", w.name()}};
    switch (w.kind()) {
        case WrapperKind::scale: j["factor"] = w.param_a(); break;
        case WrapperKind::clip:
            j["lower"] = w.param_a();
            j["upper"] = w.param_b();
            break;
        case WrapperKind::shifted_sqrt: j["shift"] = w.param_a(); break;
        default: break;
    }
    return j;
}

ScalarWrapper wrapper_from_json(const nlohmann::json& j) {
    const auto kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
    if (kind == "identity") return ScalarWrapper::identity();
    if (kind == "scale") return ScalarWrapper::scale(j.at("factor").get<double>());
    if (kind == "abs") return ScalarWrapper::absolute();
    if (kind == "clip") return ScalarWrapper::clip(j.at("lower").get<double>(), j.at("upper").get<double>());
    if (kind == "sin") return ScalarWrapper::sine();
    if (kind == "cos") return ScalarWrapper::cosine();
    if (kind == "neg_cos") return ScalarWrapper::negated_cosine();
    if (kind == "shifted_sqrt") return ScalarWrapper::shifted_sqrt(j.at("shift").get<double>());
    throw InvalidArgument("unknown wrapper kind '" + kind + "' (the wrapper catalog is closed)");
}

nlohmann::json to_json(const Domain& d) {
    nlohmann::json lo = nlohmann::json::array(), hi = nlohmann::json::array();
    for (std::size_t i = 0; i < d.dimension(); ++i) {
        lo.push_back(bound_to_json(d.lower[i]));
        hi.push_back(bound_to_json(d.upper[i]));
    }
    std::vector<bool> integer = d.integer;
    integer.resize(d.dimension(), false);
    return {{"lower", lo}, {"upper", hi}, {"integer", integer}};
}

Domain domain_from_json(const nlohmann::json& j) {
    Domain d;
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& v : j.at("lower")) d.lower.push_back(bound_from_json(v, -inf));
    for (const auto& v : j.at("upper")) d.upper.push_back(bound_from_json(v, inf));
    d.integer = j.value("integer", std::vector<bool>(d.lower.size(), false));
    d.validate();
    return d;
}

ChainDescription build_chain(const nlohmann::json& spec) {
    std::string path = "/";
    try {
        path = "/dimension";
        const auto d = spec.at("dimension").get<std::size_t>();
        path = "/parameter_dimension";
        const auto p = spec.at("parameter_dimension").get<std::size_t>();
        path = "/domain";
        Domain domain = domain_from_json(spec.at("domain"));
        if (domain.dimension() != d) throw InvalidArgument("domain dimension != dimension");

        path = "/components";
        const auto& comps = spec.at("components");
        if (!comps.is_array() || comps.empty()) throw InvalidArgument("empty component list");
        std::vector<Component> components;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const auto base = "/components/" + std::to_string(k);
            const auto& c = comps[k];
            path = base + "/psi";
            auto psi = feature_map_from_json(c.at("psi"), p);
            path = base + "/phi";
            auto phi = feature_map_from_json(c.at("phi"), d);
            path = base + "/eta";
            auto eta = c.contains("eta") ? feature_map_from_json(c.at("eta"), p) : FeatureMap::constant(0.0, p);
            path = base + "/wrapper";
            auto w = c.contains("wrapper") ? wrapper_from_json(c.at("wrapper")) : ScalarWrapper::identity();
            components.push_back({std::move(psi), std::move(phi), std::move(eta), w});
        }
        path = "/operators";
        const auto ops = spec.value("operators", std::vector<std::string>{});
        const auto stage_wrappers = spec.value("stage_wrappers", nlohmann::json::array());
        std::vector<Stage> stages;
        for (std::size_t k = 0; k < ops.size(); ++k) {
            path = "/operators/" + std::to_string(k);
            Stage st{stage_op_from_string(ops[k]), ScalarWrapper::identity()};
            if (k < stage_wrappers.size()) {
                path = "/stage_wrappers/" + std::to_string(k);
                st.wrapper = wrapper_from_json(stage_wrappers[k]);
            }
            stages.push_back(st);
        }
        path = "/";
        return {std::move(domain), ConstraintChain(std::move(components), std::move(stages))};
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("chain spec " + path + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument("chain spec " + path + ": " + e.what());
    }
}

nlohmann::json to_json(const ChainDescription& desc) {
    const auto& chain = desc.chain;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : chain.components())
        comps.push_back({{"psi", to_json(c.psi)}, {"phi", to_json(c.phi)}, {"eta", to_json(c.eta)},
                         {"wrapper", to_json(c.wrapper)}});
    nlohmann::json ops = nlohmann::json::array(), sw = nlohmann::json::array();
    for (const auto& st : chain.stages()) {
        ops.push_back(to_string(st.op));
        sw.push_back(to_json(st.wrapper));
    }
    return {{"dimension", chain.decision_dim()},
            {"parameter_dimension", chain.parameter_dim()},
            {"domain", to_json(desc.domain)},
            {"components", comps},
            {"operators", ops},
            {"stage_wrappers", sw}};
}

ChainDescription load_chain_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open chain file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
    return build_chain(j);
}

void save_chain_file(const std::filesystem::path& path, const ChainDescription& desc) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write chain file " + path.string());
    out << to_json(desc).dump(2) << '\n';
}

ChainDescription circle_chain(std::size_t dim, double box_half_width) {
    std::vector<Component> comps;
    comps.push_back({FeatureMap::identity(dim), FeatureMap::identity(dim), FeatureMap::constant(-1.0, dim),
                     ScalarWrapper::identity()});
    return {Domain::box(Vector(dim, -box_half_width), Vector(dim, box_half_width)),
            ConstraintChain(std::move(comps), {})};
}

ChainDescription halfplane_chain(std::size_t dim, double box_half_width) {
    std::vector<std::size_t> normal(dim);
    for (std::size_t i = 0; i < dim; ++i) normal[i] = i;
    Vector pick(dim + 1, 0.0);
    pick[dim] = -1.0;
    std::vector<Component> comps;
    comps.push_back({FeatureMap::coordinates(normal, dim + 1), FeatureMap::identity(dim),
                     FeatureMap::affine(1, dim + 1, pick, {0.0}), ScalarWrapper::identity()});
    return {Domain::box(Vector(dim, -box_half_width), Vector(dim, box_half_width)),
            ConstraintChain(std::move(comps), {})};
}

}  // namespace scenmargin
