#include "lochs/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lochs/errors.hpp"

namespace lochs {

namespace {

SystemDescription load_with_overlay(const std::string& text, const std::optional<Json>& tol_overlay) {
    SystemDescription sys = parse_system(text);
    if (tol_overlay) sys.tol = tolerances_from_json(*tol_overlay, sys.tol);
    return sys;
}

template <class Body>
RunReport wrap(const std::string& command, const std::string& text,
               const std::optional<Json>& tol_overlay, Body&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.command = command;
    try {
        SystemDescription sys = load_with_overlay(text, tol_overlay);
        rep.input_digest = sys.digest;
        body(sys, rep);
        for (const auto& c : rep.checks)
            if (!c.pass) rep.pass = false;
        if (!rep.pass && rep.exit_code == 0) rep.exit_code = 1;
    } catch (const ParseError& e) {
        rep.pass = false;
        rep.exit_code = 2;
        rep.error = std::string(e.code()) + ": " + e.what();
    } catch (const UnknownName& e) {
        rep.pass = false;
        rep.exit_code = 2;
        rep.error = std::string(e.code()) + ": " + e.what();
    } catch (const Error& e) {
        rep.pass = false;
        rep.exit_code = 1;
        rep.error = std::string(e.code()) + ": " + e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    rep.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

Json witness_to_json(const ClassifyWitness& w) {
    Json j = Json::object();
    j["kind"] = w.kind;
    j["message"] = w.message;
    if (w.level > 0) j["level"] = w.level;
    if (w.kind == "off_diagonal") {
        j["row"] = w.row;
        j["col"] = w.col;
        j["magnitude"] = w.magnitude;
    }
    if (!w.point_a.empty()) {
        j["point_a"] = w.point_a;
        j["point_b"] = w.point_b;
        j["value_a"] = cplx_to_json(w.value_a);
        j["value_b"] = cplx_to_json(w.value_b);
    }
    return j;
}

std::size_t expected_commutant_dim(const DirectIntegralSpace& space, std::size_t level) {
    const auto& limit = space.fibers().space.limit;
    std::vector<std::size_t> per_atom(limit.atoms.size(), 0);
    for (const auto& slot : space.layout(level).slots)
        per_atom[limit.atom_index(slot.point)] += slot.dim;
    std::size_t total = 0;
    for (std::size_t s : per_atom) total += s * s;
    return total;
}

} // namespace

void RunReport::add(CheckRecord rec) { checks.push_back(std::move(rec)); }

Json RunReport::to_json() const {
    Json j = Json::object();
    j["command"] = command;
    j["input_digest"] = input_digest;
    j["pass"] = pass;
    j["exit_code"] = exit_code;
    if (!error.empty()) j["error"] = error;
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json cj = Json::object();
        cj["name"] = c.name;
        cj["status"] = c.pass ? "pass" : "fail";
        if (c.residual) cj["residual"] = *c.residual;
        if (!c.witness.empty()) cj["witness"] = c.witness;
        arr.push_back(std::move(cj));
    }
    j["checks"] = std::move(arr);
    j["data"] = data;
    j["wall_time_ms"] = wall_time_ms;
    return j;
}

std::string RunReport::to_text() const { return to_json().dump(2) + "\n"; }

RunReport cmd_validate(const std::string& text, const std::optional<Json>& tol_overlay) {
    return wrap("validate", text, tol_overlay, [](const SystemDescription& sys, RunReport& rep) {
        bool measure_ok = false;
        if (sys.has_measure) {
            ChainReport cr = validate_measure_chain(sys.measure);
            if (cr.pass) {
                rep.add({"measure_chain", true, {}, ""});
                measure_ok = true;
                LimitSigmaAlgebra limit = limit_sigma_algebra(sys.measure.chain);
                Json atoms = Json::array();
                for (const auto& atom : limit.atoms) atoms.push_back(atom);
                rep.data["limit_atoms"] = std::move(atoms);
                rep.data["levels"] = sys.measure.chain.level_count();
            } else {
                for (const auto& v : cr.violations) {
                    std::ostringstream witness;
                    witness << v.message;
                    if (v.n > 0) witness << " (levels " << v.m << ", " << v.n << ")";
                    rep.add({"measure_chain/" + v.kind, false, {}, witness.str()});
                }
            }
        }
        for (const auto& [name, chain] : sys.chains) {
            try {
                validate_hilbert_chain(chain);
                rep.add({"hilbert_chain/" + name, true, {}, ""});
            } catch (const Error& e) {
                rep.add({"hilbert_chain/" + name, false, {}, e.what()});
            }
        }
        std::optional<DirectIntegralSpace> space;
        if (sys.has_fibers) {
            try {
                if (!measure_ok) throw InvalidChain("measure chain did not validate");
                space = system_space(sys);
                Json dims = Json::array();
                for (std::size_t n = 1; n <= space->level_chain().dims.size(); ++n)
                    dims.push_back(space->layout(n).total_dim);
                rep.data["level_dims"] = std::move(dims);
                rep.add({"fibers", true, {}, ""});
            } catch (const Error& e) {
                rep.add({"fibers", false, {}, std::string(e.code()) + ": " + e.what()});
            }
        }
        for (const auto& [name, spec] : sys.operators) {
            (void)spec;
            try {
                (void)resolve_level_operator(sys, space ? &*space : nullptr, name);
                rep.add({"operator/" + name, true, {}, ""});
            } catch (const Error& e) {
                rep.add({"operator/" + name, false, {}, std::string(e.code()) + ": " + e.what()});
            }
        }
        for (const auto& [name, spec] : sys.presentations) {
            (void)spec;
            try {
                (void)resolve_presentation(sys, name);
                rep.add({"presentation/" + name, true, {}, ""});
            } catch (const Error& e) {
                rep.add({"presentation/" + name, false, {}, std::string(e.code()) + ": " + e.what()});
            }
        }
    });
}

RunReport cmd_classify(const std::string& text, const std::string& operator_name,
                       const std::optional<Json>& tol_overlay) {
    return wrap("classify", text, tol_overlay, [&](const SystemDescription& sys, RunReport& rep) {
        DirectIntegralSpace space = system_space(sys);
        LocalOperator t = resolve_level_operator(sys, &space, operator_name);
        if (t.chain().dims != space.level_chain().dims)
            throw ChainMismatch("operator \"" + operator_name + "\" does not act on the level chain of the space");
        ClassifyOutcome out = classify(t, space, sys.tol);
        rep.data["operator"] = operator_name;
        switch (out.kind) {
        case ClassifyOutcome::Kind::Diagonalizable: {
            rep.data["class"] = "diagonalizable";
            Json f = Json::object();
            for (const auto& [pt, val] : out.f) f[pt] = cplx_to_json(val);
            rep.data["f"] = std::move(f);
            break;
        }
        case ClassifyOutcome::Kind::DecomposableOnly:
            rep.data["class"] = "decomposable_only";
            rep.data["witness"] = witness_to_json(out.witness);
            break;
        case ClassifyOutcome::Kind::LocallyBoundedOnly:
            rep.data["class"] = "locally_bounded_only";
            rep.data["witness"] = witness_to_json(out.witness);
            break;
        }
        if (out.kind != ClassifyOutcome::Kind::LocallyBoundedOnly) {
            Json pts = Json::array();
            for (const auto& [pt, mats] : out.family) {
                (void)mats;
                pts.push_back(pt);
            }
            rep.data["family_points"] = std::move(pts);
        }
        rep.add({"classified", true, {}, rep.data["class"].get<std::string>()});
    });
}

RunReport cmd_commutant(const std::string& text, std::size_t level,
                        const std::optional<Json>& tol_overlay) {
    return wrap("commutant", text, tol_overlay, [&](const SystemDescription& sys, RunReport& rep) {
        DirectIntegralSpace space = system_space(sys);
        const std::size_t level_count = space.level_chain().dims.size();
        if (level < 1 || level > level_count)
            throw ParseError("level " + std::to_string(level) + " out of range 1.." + std::to_string(level_count));
        LevelAlgebra comm = diag_commutant(space, level, sys.tol);
        LevelAlgebra dec = dec_level_algebra(space, level);
        const std::size_t expected = expected_commutant_dim(space, level);
        rep.data["level"] = level;
        rep.data["dimension"] = comm.basis.size();
        rep.data["expected_dimension"] = expected;
        rep.data["dec_dimension"] = dec.basis.size();
        Json basis = Json::array();
        for (const auto& b : comm.basis) basis.push_back(matrix_to_json(b));
        rep.data["basis"] = std::move(basis);
        rep.add({"commutant_dimension", comm.basis.size() == expected,
                 std::abs(static_cast<double>(comm.basis.size()) - static_cast<double>(expected)),
                 "solver dimension vs block-structure count"});
        double containment = 0.0;
        if (!dec.basis.empty()) {
            const std::size_t d = space.layout(level).total_dim;
            CMatrix dm(d * d, dec.basis.size());
            CMatrix cm(d * d, comm.basis.size());
            for (std::size_t j = 0; j < dec.basis.size(); ++j)
                for (std::size_t i = 0; i < d * d; ++i) dm(i, j) = dec.basis[j](i / d, i % d);
            for (std::size_t j = 0; j < comm.basis.size(); ++j)
                for (std::size_t i = 0; i < d * d; ++i) cm(i, j) = comm.basis[j](i / d, i % d);
            containment = span_containment_residual(dm, cm);
        }
        rep.add({"dec_in_commutant", containment <= sys.tol.span_contain, containment,
                 "fiberwise level algebra sits inside the commutant"});
    });
}

RunReport cmd_commutant_equality(const std::string& text, const std::optional<Json>& tol_overlay) {
    return wrap("commutant-equality", text, tol_overlay, [](const SystemDescription& sys, RunReport& rep) {
        DirectIntegralSpace space = system_space(sys);
        EqualityReport er = check_dec_equals_diag_commutant(space, sys.tol);
        Json levels = Json::array();
        for (const auto& lv : er.levels) {
            Json j = Json::object();
            j["level"] = lv.level;
            j["dec_dim"] = lv.dec_dim;
            j["commutant_dim"] = lv.commutant_dim;
            j["dec_in_commutant"] = lv.dec_in_commutant;
            j["commutant_in_dec"] = lv.commutant_in_dec;
            j["separated"] = lv.separated;
            j["equal"] = lv.equal;
            levels.push_back(std::move(j));
            const std::string tag = "level_" + std::to_string(lv.level);
            rep.add({tag + "/dec_in_commutant", lv.dec_in_commutant <= sys.tol.span_contain,
                     lv.dec_in_commutant, ""});
            if (lv.separated)
                rep.add({tag + "/equality", lv.equal,
                         std::max(lv.dec_in_commutant, lv.commutant_in_dec),
                         "limit atoms separate the active points here"});
        }
        rep.data["levels"] = std::move(levels);
        rep.data["equality_expected_everywhere"] =
            std::all_of(er.levels.begin(), er.levels.end(),
                        [](const EqualityLevelReport& lv) { return lv.separated; });
        if (!er.pass) rep.exit_code = 1;
    });
}

RunReport cmd_disintegrate(const std::string& text, const std::string& presentation_name,
                           const std::string& out_path, const std::optional<Json>& tol_overlay) {
    return wrap("disintegrate", text, tol_overlay, [&](const SystemDescription& sys, RunReport& rep) {
        AbelianPresentation pres = resolve_presentation(sys, presentation_name);
        SpectrumModel model = build_spectrum(pres, sys.tol);
        FiberModel fibers = build_fiber_model(model, sys.tol);
        Disintegration dis = build_isometry(model, fibers, sys.tol);

        rep.data["presentation"] = presentation_name;
        const std::size_t level_count = model.level_count();
        Json spectrum = Json::array();
        double max_iso = 0.0, max_surj = 0.0, max_prefix = 0.0;
        double max_cross = 0.0;
        for (std::size_t n = 1; n <= level_count; ++n) {
            const SpectrumLevel& lv = model.levels[n - 1];
            Json j = Json::object();
            j["level"] = n;
            j["keys"] = lv.keys;
            Json labels = Json::array();
            for (const auto& lab : lv.labels) {
                Json tuple = Json::array();
                for (cplx v : lab) tuple.push_back(cplx_to_json(v));
                labels.push_back(std::move(tuple));
            }
            j["labels"] = std::move(labels);
            spectrum.push_back(std::move(j));

            const CMatrix& w = dis.w[n - 1];
            const CMatrix wh = adjoint(w);
            max_iso = std::max(max_iso, max_abs(wh * w - CMatrix::identity(w.cols())));
            max_surj = std::max(max_surj, max_abs(w * wh - CMatrix::identity(w.rows())));
            if (n >= 2) {
                const CMatrix& wp = dis.w[n - 2];
                const CMatrix emb = dis.integral.embedding(n - 1, n);
                CMatrix lead(w.rows(), wp.cols());
                for (std::size_t i = 0; i < w.rows(); ++i)
                    for (std::size_t k = 0; k < wp.cols(); ++k) lead(i, k) = w(i, k);
                max_prefix = std::max(max_prefix, max_abs(lead - emb * wp));
            }
            for (std::size_t k = 0; k < pres.chain.dims[n - 1]; ++k) {
                CVec h(pres.chain.dims[n - 1], cplx(0.0));
                h[k] = cplx(1.0);
                // one basis vector plus one spread vector exercising every coordinate
                CrossTerms ct = isometry_cross_terms(model, n, h);
                max_cross = std::max({max_cross, std::abs(ct.i2), std::abs(ct.i3), std::abs(ct.i4)});
            }
            CVec spread(pres.chain.dims[n - 1]);
            for (std::size_t k = 0; k < spread.size(); ++k)
                spread[k] = cplx(1.0 / std::sqrt(double(k + 1)), 0.25 * double(k % 3));
            CrossTerms ct = isometry_cross_terms(model, n, spread);
            max_cross = std::max({max_cross, std::abs(ct.i2), std::abs(ct.i3), std::abs(ct.i4)});
        }
        rep.data["spectrum"] = std::move(spectrum);
        Json fdims = Json::object();
        for (const auto& [pt, dims] : dis.fibers.family.fiber_dims) fdims[pt] = dims;
        rep.data["fiber_dims"] = std::move(fdims);

        rep.add({"isometry", max_iso <= sys.tol.isometry, max_iso, "WᴴW = I at every level"});
        rep.add({"surjectivity", max_surj <= sys.tol.isometry, max_surj, "WWᴴ = I at every level"});
        rep.add({"inclusion_compatibility", max_prefix <= sys.tol.prefix_compat, max_prefix,
                 "W_n restricted to the previous level factors through the embedding"});
        rep.add({"cross_terms", max_cross <= sys.tol.cross_term, max_cross,
                 "telescoping cross terms of the norm identity vanish"});

        ConjugationReport cj = verify_conjugation(dis, sys.tol);
        rep.add({"conjugation", cj.conjugation_residual <= sys.tol.tau_hom && cj.pass,
                 cj.conjugation_residual, "WGWᴴ is multiplication by the label function"});
        double max_label = 0.0;
        for (double r : cj.generator_label_residuals) max_label = std::max(max_label, r);
        rep.add({"generator_labels", max_label <= sys.tol.label_match, max_label,
                 "conjugated generators classify as diagonalizable with spectrum labels"});
        const double tau_res = std::max({cj.tau_unital, cj.tau_mult, cj.tau_adjoint});
        rep.add({"tau_homomorphism", tau_res <= sys.tol.tau_hom, tau_res,
                 "tau is a unital *-homomorphism"});
        rep.add({"section_span", cj.span_defect == 0.0, cj.span_defect,
                 "indicator multiples of W-images span every level"});
        if (!cj.failures.empty()) {
            std::string msg;
            for (const auto& f : cj.failures) {
                if (!msg.empty()) msg += "; ";
                msg += f;
            }
            rep.data["conjugation_failures"] = msg;
        }
        Json label_res = Json::array();
        for (double r : cj.generator_label_residuals) label_res.push_back(r);
        rep.data["generator_label_residuals"] = std::move(label_res);

        if (!out_path.empty()) {
            Json artifact = Json::object();
            artifact["presentation"] = presentation_name;
            artifact["input_digest"] = sys.digest;
            Json levels = Json::array();
            for (std::size_t n = 1; n <= level_count; ++n) {
                Json j = Json::object();
                j["level"] = n;
                j["keys"] = model.levels[n - 1].keys;
                Json labels = Json::array();
                for (const auto& lab : model.levels[n - 1].labels) {
                    Json tuple = Json::array();
                    for (cplx v : lab) tuple.push_back(cplx_to_json(v));
                    labels.push_back(std::move(tuple));
                }
                j["labels"] = std::move(labels);
                j["w"] = matrix_to_json(dis.w[n - 1]);
                levels.push_back(std::move(j));
            }
            artifact["levels"] = std::move(levels);
            artifact["fiber_dims"] = rep.data["fiber_dims"];
            Json residuals = Json::object();
            residuals["isometry"] = max_iso;
            residuals["surjectivity"] = max_surj;
            residuals["inclusion_compatibility"] = max_prefix;
            residuals["cross_terms"] = max_cross;
            residuals["conjugation"] = cj.conjugation_residual;
            residuals["tau_homomorphism"] = tau_res;
            artifact["residuals"] = std::move(residuals);
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw ParseError("cannot open output file: " + out_path);
            out << artifact.dump(2) << "\n";
            rep.data["artifact"] = out_path;
        }
    });
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<Json> read_tol_overlay(const std::string& path) {
    if (path.empty()) return std::nullopt;
    Json j = Json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw ParseError("tolerance file is not valid JSON: " + path);
    return j;
}

RunReport run_command(const std::string& command, const std::string& text, const std::string& name,
                      std::size_t level, const std::string& out_path, const std::string& tol_path) {
    std::optional<Json> overlay;
    try {
        overlay = read_tol_overlay(tol_path);
    } catch (const Error& e) {
        RunReport rep;
        rep.command = command;
        rep.pass = false;
        rep.exit_code = 2;
        rep.error = std::string(e.code()) + ": " + e.what();
        return rep;
    }
    if (command == "validate") return cmd_validate(text, overlay);
    if (command == "classify") return cmd_classify(text, name, overlay);
    if (command == "commutant") return cmd_commutant(text, level, overlay);
    if (command == "commutant-equality") return cmd_commutant_equality(text, overlay);
    if (command == "disintegrate") return cmd_disintegrate(text, name, out_path, overlay);
    RunReport rep;
    rep.command = command;
    rep.pass = false;
    rep.exit_code = 2;
    rep.error = "UnknownName: no command named \"" + command + "\"";
    return rep;
}

} // namespace lochs
