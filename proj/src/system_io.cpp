#include "lochs/system_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lochs/errors.hpp"

namespace lochs {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

const Json& expect_object(const Json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    return j;
}

const Json& expect_array(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    return j;
}

std::string expect_string(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

double expect_number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

std::size_t expect_dim(const Json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a nonnegative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

Rat parse_weight(const Json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const Error& e) {
            fail(where, e.what());
        }
    }
    if (j.is_number_integer()) return Rat(j.get<long long>(), 1);
    fail(where, "expected a rational string \"p/q\" or an integer");
}

std::vector<std::string> parse_point_list(const Json& j, const std::string& where) {
    std::vector<std::string> out;
    for (const auto& p : expect_array(j, where)) out.push_back(expect_string(p, where + " entry"));
    return out;
}

MeasureChain parse_measure(const Json& j) {
    MeasureChain mc;
    const auto& obj = expect_object(j, "measure_space");
    if (!obj.contains("levels")) fail("measure_space", "missing \"levels\"");
    std::size_t idx = 0;
    for (const auto& lev : expect_array(obj.at("levels"), "measure_space.levels")) {
        ++idx;
        const std::string where = "measure_space.levels[" + std::to_string(idx) + "]";
        const auto& lo = expect_object(lev, where);
        if (!lo.contains("points") || !lo.contains("sigma")) fail(where, "needs \"points\" and \"sigma\"");
        FiniteMeasurableSpace space;
        space.points = parse_point_list(lo.at("points"), where + ".points");
        for (const auto& blk : expect_array(lo.at("sigma"), where + ".sigma"))
            space.blocks.push_back(parse_point_list(blk, where + ".sigma block"));
        mc.chain.levels.push_back(std::move(space));
    }
    if (obj.contains("weights")) {
        for (const auto& [pt, val] : expect_object(obj.at("weights"), "measure_space.weights").items())
            mc.weights[pt] = parse_weight(val, "measure_space.weights." + pt);
    }
    return mc;
}

std::string canonical_bytes(const Json& root) {
    // nlohmann dumps object keys sorted, which is already canonical for our purposes
    return root.dump();
}

} // namespace

cplx json_to_cplx(const Json& j) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    fail("complex scalar", "expected a number or an [re, im] pair");
}

Json cplx_to_json(cplx v) { return Json::array({v.real(), v.imag()}); }

CMatrix json_to_matrix(const Json& j) {
    const auto& rows = expect_array(j, "matrix");
    const std::size_t r = rows.size();
    std::size_t c = 0;
    if (r > 0) c = expect_array(rows[0], "matrix row").size();
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        const auto& row = expect_array(rows[i], "matrix row");
        if (row.size() != c) fail("matrix", "ragged rows");
        for (std::size_t k = 0; k < c; ++k) m(i, k) = json_to_cplx(row[k]);
    }
    return m;
}

Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(cplx_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Tolerances tolerances_from_json(const Json& j, Tolerances base) {
    const auto& obj = expect_object(j, "tolerances");
    const std::map<std::string, double Tolerances::*> fields = {
        {"hermitian_input", &Tolerances::hermitian_input},
        {"eig_residual", &Tolerances::eig_residual},
        {"unitarity", &Tolerances::unitarity},
        {"commuting", &Tolerances::commuting},
        {"normality", &Tolerances::normality},
        {"label_cluster", &Tolerances::label_cluster},
        {"projection_sum", &Tolerances::projection_sum},
        {"recombine", &Tolerances::recombine},
        {"rank_rel", &Tolerances::rank_rel},
        {"local_block", &Tolerances::local_block},
        {"fiber_block", &Tolerances::fiber_block},
        {"scalar_block", &Tolerances::scalar_block},
        {"compress_hom", &Tolerances::compress_hom},
        {"span_contain", &Tolerances::span_contain},
        {"dilation", &Tolerances::dilation},
        {"isometry", &Tolerances::isometry},
        {"prefix_compat", &Tolerances::prefix_compat},
        {"cross_term", &Tolerances::cross_term},
        {"tau_hom", &Tolerances::tau_hom},
        {"label_match", &Tolerances::label_match},
        {"diagram", &Tolerances::diagram},
        {"float_eq", &Tolerances::float_eq},
    };
    for (const auto& [key, val] : obj.items()) {
        auto it = fields.find(key);
        if (it == fields.end()) fail("tolerances", "unknown field \"" + key + "\"");
        base.*(it->second) = expect_number(val, "tolerances." + key);
    }
    return base;
}

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= static_cast<std::uint64_t>(ch);
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

SystemDescription parse_system(const std::string& text) {
    Json root = Json::parse(text, nullptr, false);
    if (root.is_discarded()) throw ParseError("input is not valid JSON");
    expect_object(root, "system");

    static const std::vector<std::string> known = {"measure_space", "hilbert_chains", "fibers",
                                                   "operators",     "presentations",  "tolerances"};
    for (const auto& [key, _] : root.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail("system", "unknown section \"" + key + "\"");
    }

    SystemDescription sys;
    sys.digest = fnv1a_digest(canonical_bytes(root));

    if (root.contains("tolerances")) sys.tol = tolerances_from_json(root.at("tolerances"), sys.tol);

    if (root.contains("measure_space")) {
        sys.measure = parse_measure(root.at("measure_space"));
        sys.has_measure = true;
    }

    if (root.contains("hilbert_chains")) {
        for (const auto& [name, spec] : expect_object(root.at("hilbert_chains"), "hilbert_chains").items()) {
            const auto& o = expect_object(spec, "hilbert_chains." + name);
            if (!o.contains("dims")) fail("hilbert_chains." + name, "missing \"dims\"");
            HilbertChain hc;
            for (const auto& d : expect_array(o.at("dims"), "hilbert_chains." + name + ".dims"))
                hc.dims.push_back(expect_dim(d, "hilbert_chains." + name + ".dims entry"));
            sys.chains[name] = std::move(hc);
        }
    }

    if (root.contains("fibers")) {
        if (!sys.has_measure) fail("fibers", "requires a measure_space section");
        for (const auto& [pt, dims] : expect_object(root.at("fibers"), "fibers").items()) {
            std::vector<std::size_t> v;
            for (const auto& d : expect_array(dims, "fibers." + pt))
                v.push_back(expect_dim(d, "fibers." + pt + " entry"));
            sys.fiber_dims[pt] = std::move(v);
        }
        sys.has_fibers = true;
    }

    if (root.contains("operators")) {
        for (const auto& [name, spec] : expect_object(root.at("operators"), "operators").items()) {
            const std::string where = "operators." + name;
            const auto& o = expect_object(spec, where);
            OperatorSpec op;
            if (!o.contains("kind")) fail(where, "missing \"kind\"");
            op.kind = expect_string(o.at("kind"), where + ".kind");
            if (op.kind == "levels") {
                if (o.contains("space")) {
                    if (!o.at("space").is_boolean() || !o.at("space").get<bool>())
                        fail(where, "\"space\" must be true when present");
                    op.on_space = true;
                } else if (o.contains("chain")) {
                    op.chain = expect_string(o.at("chain"), where + ".chain");
                } else {
                    fail(where, "needs \"chain\" or \"space\": true");
                }
                if (!o.contains("blocks")) fail(where, "missing \"blocks\"");
                for (const auto& b : expect_array(o.at("blocks"), where + ".blocks"))
                    op.blocks.push_back(json_to_matrix(b));
            } else if (op.kind == "fibers") {
                if (!o.contains("families")) fail(where, "missing \"families\"");
                for (const auto& [pt, mats] : expect_object(o.at("families"), where + ".families").items()) {
                    std::vector<CMatrix> v;
                    for (const auto& b : expect_array(mats, where + ".families." + pt))
                        v.push_back(json_to_matrix(b));
                    op.families[pt] = std::move(v);
                }
            } else {
                fail(where, "kind must be \"levels\" or \"fibers\"");
            }
            sys.operators[name] = std::move(op);
        }
    }

    if (root.contains("presentations")) {
        for (const auto& [name, spec] : expect_object(root.at("presentations"), "presentations").items()) {
            const std::string where = "presentations." + name;
            const auto& o = expect_object(spec, where);
            PresentationSpec pr;
            if (!o.contains("chain")) fail(where, "missing \"chain\"");
            pr.chain = expect_string(o.at("chain"), where + ".chain");
            if (!o.contains("generators")) fail(where, "missing \"generators\"");
            for (const auto& g : expect_array(o.at("generators"), where + ".generators"))
                pr.generators.push_back(expect_string(g, where + ".generators entry"));
            sys.presentations[name] = std::move(pr);
        }
    }

    return sys;
}

SystemDescription load_system(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system(buf.str());
}

Tolerances load_tolerances_file(const std::string& path, Tolerances base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open tolerance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    Json root = Json::parse(buf.str(), nullptr, false);
    if (root.is_discarded()) throw ParseError("tolerance file is not valid JSON");
    return tolerances_from_json(root, base);
}

DirectIntegralSpace system_space(const SystemDescription& sys) {
    if (!sys.has_measure) throw ParseError("this command needs a measure_space section");
    if (!sys.has_fibers) throw ParseError("this command needs a fibers section");
    FiberFamily fibers;
    fibers.space = make_locally_standard(sys.measure);
    fibers.fiber_dims = sys.fiber_dims;
    return build_direct_integral(fibers);
}

LocalOperator resolve_level_operator(const SystemDescription& sys, const DirectIntegralSpace* space,
                                     const std::string& name) {
    auto it = sys.operators.find(name);
    if (it == sys.operators.end()) throw UnknownName("no operator named \"" + name + "\"");
    const OperatorSpec& op = it->second;
    if (op.kind == "fibers") {
        if (space == nullptr) throw ParseError("operator \"" + name + "\" is fiber-wise and needs a measure space");
        return induced_decomposable(*space, op.families, sys.tol);
    }
    HilbertChain chain;
    if (op.on_space) {
        if (space == nullptr) throw ParseError("operator \"" + name + "\" lives on the space and needs one");
        chain = space->level_chain();
    } else {
        auto ct = sys.chains.find(op.chain);
        if (ct == sys.chains.end()) throw UnknownName("no hilbert chain named \"" + op.chain + "\"");
        chain = ct->second;
    }
    return make_local_operator(chain, op.blocks, sys.tol);
}

AbelianPresentation resolve_presentation(const SystemDescription& sys, const std::string& name) {
    auto it = sys.presentations.find(name);
    if (it == sys.presentations.end()) throw UnknownName("no presentation named \"" + name + "\"");
    const PresentationSpec& pr = it->second;
    auto ct = sys.chains.find(pr.chain);
    if (ct == sys.chains.end()) throw UnknownName("no hilbert chain named \"" + pr.chain + "\"");
    std::vector<LocalOperator> gens;
    for (const auto& gname : pr.generators) {
        auto ot = sys.operators.find(gname);
        if (ot == sys.operators.end()) throw UnknownName("no operator named \"" + gname + "\"");
        if (ot->second.kind != "levels" || ot->second.on_space || ot->second.chain != pr.chain)
            throw ChainMismatch("generator \"" + gname + "\" does not live on chain \"" + pr.chain + "\"");
        gens.push_back(make_local_operator(ct->second, ot->second.blocks, sys.tol));
    }
    return make_abelian_presentation(ct->second, gens, sys.tol);
}

} // namespace lochs
