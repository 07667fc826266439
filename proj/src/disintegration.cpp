#include "lochs/disintegration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace lochs {

namespace {

double round7(double x) {
    const double r = std::round(x * 1e7) / 1e7;
    return r == 0.0 ? 0.0 : r; // fold -0
}

std::string format_component(cplx v) {
    const double re = round7(v.real()), im = round7(v.imag());
    char buf[64];
    std::string s;
    std::snprintf(buf, sizeof(buf), "%.9g", re);
    s = buf;
    if (im != 0.0) {
        std::snprintf(buf, sizeof(buf), "%+.9gi", im);
        s += buf;
    }
    return s;
}

std::string format_label(const std::vector<cplx>& lab) {
    std::string s;
    for (std::size_t i = 0; i < lab.size(); ++i) {
        if (i) s += "|";
        s += format_component(lab[i]);
    }
    return s;
}

double label_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i].real() - b[i].real()));
        m = std::max(m, std::abs(a[i].imag() - b[i].imag()));
    }
    return m;
}

} // namespace

AbelianPresentation make_abelian_presentation(const HilbertChain& chain,
                                              std::vector<LocalOperator> generators,
                                              const Tolerances& tol) {
    validate_hilbert_chain(chain);
    if (generators.empty())
        throw InvalidArgument("a presentation needs at least one generator");
    for (const auto& g : generators)
        if (!(g.chain() == chain)) throw ChainMismatch("generator lives on a different chain");
    for (std::size_t n = 1; n <= chain.level_count(); ++n) {
        for (std::size_t i = 0; i < generators.size(); ++i) {
            const CMatrix& a = generators[i].block(n);
            const double f = frobenius_norm(a);
            if (normality_defect(a) > tol.normality * (1.0 + f * f))
                throw NotNormal("generator " + std::to_string(i) + " is not normal at level " +
                                std::to_string(n));
        }
        for (std::size_t i = 0; i < generators.size(); ++i)
            for (std::size_t j = i + 1; j < generators.size(); ++j) {
                const CMatrix& a = generators[i].block(n);
                const CMatrix& b = generators[j].block(n);
                const double cn = commutator_norm(a, b);
                if (cn > tol.commuting * (1.0 + frobenius_norm(a) * frobenius_norm(b)))
                    throw NotAbelian("generators " + std::to_string(i) + " and " + std::to_string(j) +
                                     " do not commute at level " + std::to_string(n) +
                                     " (commutator norm " + std::to_string(cn) + ")");
            }
    }
    AbelianPresentation pres;
    pres.chain = chain;
    pres.generators = std::move(generators);
    return pres;
}

std::size_t SpectrumModel::index_at(std::size_t level, const std::string& key) const {
    if (level == 0 || level > levels.size())
        throw InvalidArgument("spectrum level " + std::to_string(level) + " out of range");
    const auto& ks = levels[level - 1].keys;
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i] == key) return i;
    return npos;
}

const CMatrix& SpectrumModel::projection(std::size_t level, const std::string& key) const {
    const std::size_t i = index_at(level, key);
    if (i == npos)
        throw UnknownName("spectrum point '" + key + "' absent at level " + std::to_string(level));
    return levels[level - 1].projections[i];
}

MeasureChain SpectrumModel::measure() const {
    MeasureChain mc;
    for (const auto& lvl : levels) {
        FiniteMeasurableSpace sp;
        sp.points = lvl.keys;
        for (const auto& k : lvl.keys) sp.blocks.push_back({k});
        mc.chain.levels.push_back(std::move(sp));
    }
    for (const auto& [k, b] : birth) mc.weights[k] = Rat(1);
    return mc;
}

SpectrumModel build_spectrum(const AbelianPresentation& pres, const Tolerances& tol) {
    SpectrumModel model;
    model.presentation = pres;
    const std::size_t levels = pres.chain.level_count();

    for (std::size_t n = 1; n <= levels; ++n) {
        std::vector<CMatrix> mats;
        for (const auto& g : pres.generators) mats.push_back(g.block(n));
        JointDiagResult jd;
        try {
            jd = joint_diagonalize(mats, tol);
        } catch (const NotCommuting& e) {
            throw NotAbelian(std::string("level ") + std::to_string(n) + ": " + e.what());
        }

        SpectrumLevel lvl;
        lvl.labels = jd.labels;
        lvl.projections = jd.projections;
        lvl.keys.assign(jd.labels.size(), "");

        if (n > 1) {
            const SpectrumLevel& prev = model.levels[n - 2];
            std::vector<std::size_t> match(prev.keys.size(), SpectrumModel::npos);
            std::vector<std::size_t> taken(jd.labels.size(), SpectrumModel::npos);
            for (std::size_t i = 0; i < prev.keys.size(); ++i) {
                for (std::size_t k = 0; k < jd.labels.size(); ++k) {
                    if (label_distance(prev.labels[i], jd.labels[k]) > tol.label_match) continue;
                    if (match[i] != SpectrumModel::npos)
                        throw SpectrumMismatch("point '" + prev.keys[i] +
                                               "' matches two level-" + std::to_string(n) + " labels");
                    if (taken[k] != SpectrumModel::npos)
                        throw SpectrumMismatch("two level-" + std::to_string(n - 1) +
                                               " points match one level-" + std::to_string(n) + " label");
                    match[i] = k;
                    taken[k] = i;
                }
                if (match[i] == SpectrumModel::npos)
                    throw SpectrumMismatch("point '" + prev.keys[i] + "' has no matching label at level " +
                                           std::to_string(n));
                lvl.keys[match[i]] = prev.keys[i];
            }
        }
        for (std::size_t k = 0; k < lvl.keys.size(); ++k) {
            if (!lvl.keys[k].empty()) continue;
            std::string key = format_label(jd.labels[k]);
            if (model.birth.count(key))
                throw SpectrumMismatch("label key collision at '" + key + "'");
            lvl.keys[k] = key;
            model.birth[key] = n;
        }
        model.levels.push_back(std::move(lvl));
    }

    // the spectral projections must restrict along the chain: the lower-level
    // corner of E_{n,p} is E_{m,p}, or 0 when p is born after level m
    for (std::size_t mi = 1; mi <= levels; ++mi)
        for (std::size_t ni = mi + 1; ni <= levels; ++ni) {
            const std::size_t dm = pres.chain.dims[mi - 1];
            const SpectrumLevel& ln = model.levels[ni - 1];
            for (std::size_t k = 0; k < ln.keys.size(); ++k) {
                const CMatrix corner = ln.projections[k].block(0, 0, dm, dm);
                const std::size_t at = model.index_at(mi, ln.keys[k]);
                const CMatrix expected =
                    at == SpectrumModel::npos ? CMatrix::zero(dm, dm) : model.levels[mi - 1].projections[at];
                const double resid = frobenius_norm(corner - expected);
                if (resid > tol.diagram)
                    throw SpectrumMismatch("projection of '" + ln.keys[k] + "' does not restrict from level " +
                                           std::to_string(ni) + " to " + std::to_string(mi) +
                                           " (residual " + std::to_string(resid) + ")");
            }
        }
    return model;
}

cplx rn_density(const SpectrumModel& model, std::size_t level, const CVec& xi, const CVec& eta,
                const std::string& key, const Tolerances& tol) {
    (void)tol;
    if (model.birth.find(key) == model.birth.end())
        throw UnknownName("spectrum has no point '" + key + "'");
    const std::size_t i = model.index_at(level, key);
    if (i == SpectrumModel::npos)
        throw ZeroWeightPoint("point '" + key + "' carries no mass at level " + std::to_string(level));
    const CMatrix& e = model.levels[level - 1].projections[i];
    if (xi.size() != e.rows() || eta.size() != e.rows())
        throw InvalidArgument("vector length does not match level dimension");
    return vdot(xi, e * eta); // counting measure: mu_level({key}) = 1
}

FiberModel build_fiber_model(const SpectrumModel& model, const Tolerances& tol) {
    FiberModel out;
    const std::size_t levels = model.level_count();
    if (levels == 0) throw InvalidArgument("empty spectrum model");
    const std::size_t top_dim = model.presentation.chain.dims.back();

    out.family.space = make_locally_standard(model.measure());

    for (const auto& key : model.levels[levels - 1].keys) {
        std::vector<CVec> accepted;
        std::vector<std::size_t> dims(levels, 0);
        for (std::size_t n = model.birth.at(key); n <= levels; ++n) {
            const std::size_t dn = model.presentation.chain.dims[n - 1];
            const CMatrix& e = model.projection(n, key);
            const EigResult eig = hermitian_eig(e, tol);
            const double largest = eig.values.empty() ? 0.0 : eig.values.back();
            std::size_t rank = 0;
            for (const double v : eig.values)
                if (v > tol.rank_rel * largest) ++rank;
            for (std::size_t c = dn - rank; c < dn; ++c) {
                CVec v(top_dim, 0.0);
                for (std::size_t r = 0; r < dn; ++r) v[r] = eig.vectors(r, c);
                for (int pass = 0; pass < 2; ++pass)
                    for (const auto& b : accepted) v = v - vdot(b, v) * b;
                const double nrm = vnorm(v);
                if (nrm > 1e-7) accepted.push_back((1.0 / nrm) * v);
            }
            if (accepted.size() != rank)
                throw DidNotConverge("fiber rank of '" + key + "' at level " + std::to_string(n) +
                                     ": flag basis has " + std::to_string(accepted.size()) +
                                     " columns, spectral rank is " + std::to_string(rank));
            dims[n - 1] = rank;
        }
        out.family.fiber_dims[key] = dims;
        CMatrix basis(top_dim, accepted.size());
        for (std::size_t j = 0; j < accepted.size(); ++j) basis.set_col(j, accepted[j]);
        out.bases[key] = std::move(basis);
    }
    return out;
}

FiberFamily build_fibers(const SpectrumModel& model, const Tolerances& tol) {
    return build_fiber_model(model, tol).family;
}

Disintegration build_isometry(const SpectrumModel& model, const FiberModel& fibers,
                              const Tolerances& tol) {
    Disintegration dis;
    dis.spectrum = model;
    dis.fibers = fibers;
    dis.integral = build_direct_integral(fibers.family);
    const std::size_t levels = model.level_count();

    for (std::size_t n = 1; n <= levels; ++n) {
        const std::size_t dn = model.presentation.chain.dims[n - 1];
        const LevelLayout& lay = dis.integral.layout(n);
        if (lay.total_dim != dn)
            throw SurjectivityDefect("level " + std::to_string(n) + " fibers sum to " +
                                     std::to_string(lay.total_dim) + ", chain dimension is " +
                                     std::to_string(dn));
        CMatrix w(lay.total_dim, dn);
        for (const auto& slot : lay.slots) {
            const CMatrix& basis = fibers.bases.at(slot.point);
            for (std::size_t j = 0; j < slot.dim; ++j)
                for (std::size_t k = 0; k < dn; ++k)
                    w(slot.offset + j, k) = std::conj(basis(k, j));
        }
        const double iso = frobenius_norm(adjoint(w) * w - CMatrix::identity(dn));
        if (iso > tol.isometry)
            throw IsometryDefect("level " + std::to_string(n) + " class map has isometry defect " +
                                 std::to_string(iso));
        const double sur = frobenius_norm(w * adjoint(w) - CMatrix::identity(lay.total_dim));
        if (sur > tol.isometry)
            throw SurjectivityDefect("level " + std::to_string(n) + " class map has surjectivity defect " +
                                     std::to_string(sur));
        dis.w.push_back(std::move(w));
    }

    for (std::size_t n = 2; n <= levels; ++n) {
        const std::size_t dprev = model.presentation.chain.dims[n - 2];
        const CMatrix restricted = dis.w[n - 1].block(0, 0, dis.w[n - 1].rows(), dprev);
        const CMatrix lifted = dis.integral.embedding(n - 1, n) * dis.w[n - 2];
        const double resid = frobenius_norm(restricted - lifted);
        if (resid > tol.prefix_compat)
            throw IsometryDefect("class maps of levels " + std::to_string(n - 1) + " and " +
                                 std::to_string(n) + " are incompatible (residual " +
                                 std::to_string(resid) + ")");
    }
    return dis;
}

LocalOperator tau(const Disintegration& dis, const std::map<std::string, cplx>& f,
                  const Tolerances& tol) {
    const auto& model = dis.spectrum;
    std::vector<CMatrix> blocks;
    for (std::size_t n = 1; n <= model.level_count(); ++n) {
        const std::size_t dn = model.presentation.chain.dims[n - 1];
        CMatrix t(dn, dn);
        const SpectrumLevel& lvl = model.levels[n - 1];
        for (std::size_t k = 0; k < lvl.keys.size(); ++k) {
            const auto it = f.find(lvl.keys[k]);
            if (it == f.end()) continue;
            t = t + it->second * lvl.projections[k];
        }
        blocks.push_back(std::move(t));
    }
    return make_local_operator(model.presentation.chain, std::move(blocks), tol);
}

CrossTerms isometry_cross_terms(const SpectrumModel& model, std::size_t level, const CVec& h) {
    if (level == 0 || level > model.level_count())
        throw InvalidArgument("level " + std::to_string(level) + " out of range");
    if (h.size() != model.presentation.chain.dims[level - 1])
        throw InvalidArgument("vector length does not match level dimension");
    CrossTerms out;
    out.h_norm_sq = vnorm(h) * vnorm(h);
    for (std::size_t i = 1; i <= level; ++i) {
        const std::size_t di = model.presentation.chain.dims[i - 1];
        CVec hi(di, 0.0);
        for (std::size_t k = 0; k < std::min(di, h.size()); ++k) hi[k] = h[k];
        CVec him(di, 0.0);
        if (i > 1) {
            const std::size_t dprev = model.presentation.chain.dims[i - 2];
            for (std::size_t k = 0; k < std::min(dprev, h.size()); ++k) him[k] = h[k];
        }
        const SpectrumLevel& lvl = model.levels[i - 1];
        for (std::size_t k = 0; k < lvl.keys.size(); ++k) {
            if (model.birth.at(lvl.keys[k]) != i) continue;
            const CMatrix& e = lvl.projections[k];
            const CVec ehi = e * hi;
            const CVec ehim = e * him;
            out.i1 += vdot(hi, ehi);
            out.i2 += vdot(hi, ehim);
            out.i3 += vdot(him, ehi);
            out.i4 += vdot(him, ehim);
        }
    }
    return out;
}

ConjugationReport verify_conjugation(const Disintegration& dis, const Tolerances& tol) {
    ConjugationReport rep;
    const auto& model = dis.spectrum;
    const std::size_t levels = model.level_count();
    const auto& gens = model.presentation.generators;

    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
        std::vector<CMatrix> chain_blocks;
        double conj_resid = 0.0;
        std::map<std::string, cplx> label_fn;
        for (const auto& [key, b] : model.birth) {
            const std::size_t at = model.index_at(levels, key);
            label_fn[key] = model.levels[levels - 1].labels[at][gi];
        }
        for (std::size_t n = 1; n <= levels; ++n) {
            const CMatrix m_atom = dis.w[n - 1] * gens[gi].block(n) * adjoint(dis.w[n - 1]);
            const CMatrix& p = dis.integral.to_chain_perm(n);
            chain_blocks.push_back(p * m_atom * adjoint(p));
        }
        LocalOperator conj = make_local_operator(dis.integral.level_chain(), chain_blocks, tol);

        const LocalOperator mult = induced_diagonalizable(dis.integral, label_fn, tol);
        for (std::size_t n = 1; n <= levels; ++n) {
            const double r = frobenius_norm(conj.block(n) - mult.block(n)) /
                             (1.0 + frobenius_norm(gens[gi].block(n)));
            conj_resid = std::max(conj_resid, r);
        }
        rep.conjugation_residual = std::max(rep.conjugation_residual, conj_resid);
        if (conj_resid > tol.tau_hom) {
            rep.pass = false;
            rep.failures.push_back("generator " + std::to_string(gi) +
                                   " does not conjugate to its multiplication operator");
        }

        const ClassifyOutcome oc = classify(conj, dis.integral, tol);
        if (oc.kind != ClassifyOutcome::Kind::Diagonalizable) {
            rep.pass = false;
            rep.generator_label_residuals.push_back(std::numeric_limits<double>::infinity());
            rep.failures.push_back("generator " + std::to_string(gi) +
                                   " is not diagonalizable after conjugation: " + oc.witness.message);
            continue;
        }
        double lr = 0.0;
        for (const auto& [key, value] : oc.f)
            lr = std::max(lr, std::abs(value - label_fn.at(key)));
        rep.generator_label_residuals.push_back(lr);
        if (lr > tol.label_match) {
            rep.pass = false;
            rep.failures.push_back("generator " + std::to_string(gi) + " label residual " +
                                   std::to_string(lr));
        }
    }

    // tau is a unital *-homomorphism
    std::map<std::string, cplx> one, f, g;
    {
        std::size_t idx = 0;
        for (const auto& [key, b] : model.birth) {
            one[key] = 1.0;
            f[key] = cplx(static_cast<double>(idx) + 0.5, 0.25 * static_cast<double>(idx % 3));
            g[key] = cplx(1.0 - 0.5 * static_cast<double>(idx % 4), static_cast<double>(idx) * 0.75);
            ++idx;
        }
    }
    std::map<std::string, cplx> fg, fbar;
    for (const auto& [k, v] : f) {
        fg[k] = v * g.at(k);
        fbar[k] = std::conj(v);
    }
    const LocalOperator t1 = tau(dis, one, tol);
    const LocalOperator tf = tau(dis, f, tol);
    const LocalOperator tg = tau(dis, g, tol);
    const LocalOperator tfg = tau(dis, fg, tol);
    const LocalOperator tfbar = tau(dis, fbar, tol);
    for (std::size_t n = 1; n <= levels; ++n) {
        const std::size_t dn = model.presentation.chain.dims[n - 1];
        rep.tau_unital = std::max(rep.tau_unital, frobenius_norm(t1.block(n) - CMatrix::identity(dn)));
        rep.tau_mult = std::max(rep.tau_mult,
                                frobenius_norm(tfg.block(n) - tf.block(n) * tg.block(n)) /
                                    (1.0 + frobenius_norm(tf.block(n)) * frobenius_norm(tg.block(n))));
        rep.tau_adjoint = std::max(rep.tau_adjoint,
                                   frobenius_norm(tfbar.block(n) - adjoint(tf.block(n))));
    }
    if (rep.tau_unital > tol.tau_hom || rep.tau_mult > tol.tau_hom || rep.tau_adjoint > tol.tau_hom) {
        rep.pass = false;
        rep.failures.push_back("tau fails the unital *-homomorphism checks");
    }

    // indicator multiples of the class-map images span every level
    for (std::size_t n = 1; n <= levels; ++n) {
        const LevelLayout& lay = dis.integral.layout(n);
        std::vector<CVec> vecs;
        for (const auto& slot : lay.slots)
            for (std::size_t j = 0; j < dis.w[n - 1].cols(); ++j) {
                CVec v(lay.total_dim, 0.0);
                for (std::size_t r = 0; r < slot.dim; ++r)
                    v[slot.offset + r] = dis.w[n - 1](slot.offset + r, j);
                vecs.push_back(std::move(v));
            }
        const Subspace s = orthonormalize(vecs, 1e-7);
        const double missing = static_cast<double>(lay.total_dim) - static_cast<double>(s.dim());
        rep.span_defect = std::max(rep.span_defect, missing);
    }
    if (rep.span_defect > 0.0) {
        rep.pass = false;
        rep.failures.push_back("indicator sections fail to span some level");
    }
    return rep;
}

} // namespace lochs
