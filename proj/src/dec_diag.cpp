#include "lochs/dec_diag.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lochs {

namespace {

HilbertChain fiber_chain(const DirectIntegralSpace& s, const std::string& point) {
    HilbertChain c;
    for (std::size_t n = 1; n <= s.level_count(); ++n)
        c.dims.push_back(s.fibers().fiber_dim(point, n));
    return c;
}

CMatrix atom_block(const DirectIntegralSpace& s, const LocalOperator& t, std::size_t level) {
    const CMatrix& p = s.to_chain_perm(level);
    return adjoint(p) * t.block(level) * p;
}

CMatrix chain_block(const DirectIntegralSpace& s, const CMatrix& atom, std::size_t level) {
    const CMatrix& p = s.to_chain_perm(level);
    return p * atom * adjoint(p);
}

CMatrix cols_from(const std::vector<CVec>& vs, std::size_t ambient) {
    CMatrix m(ambient, vs.size());
    for (std::size_t j = 0; j < vs.size(); ++j) m.set_col(j, vs[j]);
    return m;
}

CVec vectorize(const CMatrix& m) {
    CVec v(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
    return v;
}

} // namespace

void validate_fiber_family(const DirectIntegralSpace& s, const FiberOperatorFamily& family,
                           const Tolerances& tol) {
    const std::size_t levels = s.level_count();
    for (const auto& [p, blocks] : family) {
        const HilbertChain fc = fiber_chain(s, p);
        bool known = false;
        for (const auto& q : s.space().limit.points)
            if (q == p) known = true;
        if (!known) throw InvalidFibers("fiber operator on unknown point '" + p + "'");
        if (blocks.size() != levels)
            throw InvalidFibers("fiber operator on '" + p + "' has " + std::to_string(blocks.size()) +
                                " levels, expected " + std::to_string(levels));
        try {
            make_local_operator(fc, blocks, tol);
        } catch (const NotLocallyBounded& e) {
            throw NotLocallyBounded("fiber operator on '" + p + "': " + e.what());
        }
    }
}

LocalOperator induced_decomposable(const DirectIntegralSpace& s, const FiberOperatorFamily& family,
                                   const Tolerances& tol) {
    validate_fiber_family(s, family, tol);
    std::vector<CMatrix> blocks;
    for (std::size_t n = 1; n <= s.level_count(); ++n) {
        const LevelLayout& lay = s.layout(n);
        CMatrix a(lay.total_dim, lay.total_dim);
        for (const auto& slot : lay.slots) {
            const auto it = family.find(slot.point);
            if (it == family.end()) continue;
            a.set_block(slot.offset, slot.offset, it->second[n - 1]);
        }
        blocks.push_back(chain_block(s, a, n));
    }
    return make_local_operator(s.level_chain(), std::move(blocks), tol);
}

void validate_diag_function(const DirectIntegralSpace& s, const std::map<std::string, cplx>& f,
                            const Tolerances& tol) {
    const std::size_t top = s.level_count();
    const LevelLayout& lay = s.layout(top);
    for (const auto& atom : s.space().limit.atoms) {
        bool have = false;
        cplx first{};
        std::string fp;
        for (const auto& p : atom) {
            if (!lay.find(p)) continue;
            const auto it = f.find(p);
            const cplx v = it == f.end() ? cplx{} : it->second;
            if (!have) {
                have = true;
                first = v;
                fp = p;
            } else if (std::abs(v - first) > tol.scalar_block * (1.0 + std::max(std::abs(v), std::abs(first)))) {
                throw NotMeasurable("function splits the atom of '" + fp + "': value " +
                                    std::to_string(first.real()) + " there, different at '" + p + "'");
            }
        }
    }
}

LocalOperator induced_diagonalizable(const DirectIntegralSpace& s,
                                     const std::map<std::string, cplx>& f, const Tolerances& tol) {
    validate_diag_function(s, f, tol);
    FiberOperatorFamily family;
    for (const auto& [p, dims] : s.fibers().fiber_dims) {
        const auto it = f.find(p);
        const cplx v = it == f.end() ? cplx{} : it->second;
        std::vector<CMatrix> blocks;
        for (std::size_t n = 0; n < dims.size(); ++n) blocks.push_back(v * CMatrix::identity(dims[n]));
        family[p] = std::move(blocks);
    }
    return induced_decomposable(s, family, tol);
}

ClassifyOutcome classify(const LocalOperator& t, const DirectIntegralSpace& s,
                         const Tolerances& tol) {
    if (!(t.chain() == s.level_chain()))
        throw ChainMismatch("operator does not live on the direct integral's level chain");
    const std::size_t levels = s.level_count();
    ClassifyOutcome out;

    std::vector<CMatrix> atoms;
    for (std::size_t n = 1; n <= levels; ++n) atoms.push_back(atom_block(s, t, n));

    for (std::size_t n = 1; n <= levels; ++n) {
        const LevelLayout& lay = s.layout(n);
        std::vector<std::size_t> slot_of(lay.total_dim);
        for (std::size_t si = 0; si < lay.slots.size(); ++si)
            for (std::size_t j = 0; j < lay.slots[si].dim; ++j)
                slot_of[lay.slots[si].offset + j] = si;
        for (std::size_t r = 0; r < lay.total_dim; ++r)
            for (std::size_t c = 0; c < lay.total_dim; ++c) {
                if (slot_of[r] == slot_of[c]) continue;
                const double mag = std::abs(atoms[n - 1](r, c));
                if (mag > tol.fiber_block) {
                    out.kind = ClassifyOutcome::Kind::LocallyBoundedOnly;
                    out.witness.kind = "off_diagonal";
                    out.witness.level = n;
                    out.witness.row = r;
                    out.witness.col = c;
                    out.witness.magnitude = mag;
                    out.witness.point_a = lay.slots[slot_of[r]].point;
                    out.witness.point_b = lay.slots[slot_of[c]].point;
                    std::ostringstream os;
                    os << "level " << n << " couples fibers '" << out.witness.point_a << "' and '"
                       << out.witness.point_b << "' with entry magnitude " << mag;
                    out.witness.message = os.str();
                    return out;
                }
            }
    }

    for (const auto& p : s.space().limit.points) {
        std::vector<CMatrix> blocks;
        bool any = false;
        for (std::size_t n = 1; n <= levels; ++n) {
            const auto* slot = s.layout(n).find(p);
            if (!slot) {
                blocks.emplace_back(0, 0);
                continue;
            }
            any = true;
            blocks.push_back(atoms[n - 1].block(slot->offset, slot->offset, slot->dim, slot->dim));
        }
        if (any) out.family[p] = std::move(blocks);
    }

    // fiberwise scalar test against the top-level mean
    std::map<std::string, cplx> scalar;
    for (const auto& p : s.space().limit.points) {
        const auto it = out.family.find(p);
        if (it == out.family.end()) continue;
        const CMatrix* last = nullptr;
        for (const auto& b : it->second)
            if (b.rows() > 0) last = &b;
        if (!last) continue;
        const cplx c = trace(*last) / static_cast<double>(last->rows());
        for (std::size_t n = 0; n < it->second.size(); ++n) {
            const CMatrix& b = it->second[n];
            if (b.rows() == 0) continue;
            const double resid = max_abs(b - c * CMatrix::identity(b.rows()));
            if (resid > tol.scalar_block * (1.0 + std::abs(c))) {
                out.kind = ClassifyOutcome::Kind::DecomposableOnly;
                out.witness.kind = "fiber_nonscalar";
                out.witness.level = n + 1;
                out.witness.point_a = p;
                out.witness.value_a = c;
                out.witness.magnitude = resid;
                std::ostringstream os;
                os << "fiber of '" << p << "' is not scalar at level " << (n + 1)
                   << " (defect " << resid << ")";
                out.witness.message = os.str();
                return out;
            }
        }
        scalar[p] = c;
    }

    // scalars must be constant on limit atoms
    for (const auto& atom : s.space().limit.atoms) {
        bool have = false;
        cplx first{};
        std::string fp;
        for (const auto& p : atom) {
            const auto it = scalar.find(p);
            if (it == scalar.end()) continue;
            if (!have) {
                have = true;
                first = it->second;
                fp = p;
                continue;
            }
            const double gap = std::abs(it->second - first);
            if (gap > tol.scalar_block * (1.0 + std::max(std::abs(first), std::abs(it->second)))) {
                out.kind = ClassifyOutcome::Kind::DecomposableOnly;
                out.witness.kind = "atom_merge";
                out.witness.point_a = fp;
                out.witness.point_b = p;
                out.witness.value_a = first;
                out.witness.value_b = it->second;
                out.witness.magnitude = gap;
                std::ostringstream os;
                os << "points '" << fp << "' and '" << p
                   << "' share a measurable atom but carry different scalars";
                out.witness.message = os.str();
                return out;
            }
        }
    }

    out.kind = ClassifyOutcome::Kind::Diagonalizable;
    for (const auto& atom : s.space().limit.atoms) {
        bool have = false;
        cplx value{};
        for (const auto& p : atom) {
            const auto it = scalar.find(p);
            if (it == scalar.end()) continue;
            if (!have) {
                have = true;
                value = it->second;
            }
        }
        if (!have) continue;
        for (const auto& p : atom)
            if (scalar.count(p)) out.f[p] = value;
    }
    return out;
}

CMatrix compress(const DirectIntegralSpace& s, std::size_t m, std::size_t n, const CMatrix& tn_atom) {
    if (m > n) throw InvalidArgument("compress needs m <= n");
    const LevelLayout& ln = s.layout(n);
    if (tn_atom.rows() != ln.total_dim || tn_atom.cols() != ln.total_dim)
        throw ChainMismatch("block size does not match level " + std::to_string(n));
    const CMatrix j = s.embedding(m, n);
    return adjoint(j) * tn_atom * j;
}

LevelAlgebra diag_level_algebra(const DirectIntegralSpace& s, std::size_t level) {
    const LevelLayout& lay = s.layout(level);
    LevelAlgebra out;
    out.level = level;
    for (std::size_t ai = 0; ai < s.space().limit.atoms.size(); ++ai) {
        CMatrix e(lay.total_dim, lay.total_dim);
        bool hit = false;
        for (const auto& slot : lay.slots) {
            if (s.space().limit.atom_index(slot.point) != ai) continue;
            hit = true;
            for (std::size_t j = 0; j < slot.dim; ++j) e(slot.offset + j, slot.offset + j) = 1.0;
        }
        if (hit) out.basis.push_back(std::move(e));
    }
    return out;
}

LevelAlgebra dec_level_algebra(const DirectIntegralSpace& s, std::size_t level) {
    const LevelLayout& lay = s.layout(level);
    LevelAlgebra out;
    out.level = level;
    for (const auto& slot : lay.slots)
        for (std::size_t i = 0; i < slot.dim; ++i)
            for (std::size_t j = 0; j < slot.dim; ++j) {
                CMatrix e(lay.total_dim, lay.total_dim);
                e(slot.offset + i, slot.offset + j) = 1.0;
                out.basis.push_back(std::move(e));
            }
    return out;
}

LevelAlgebra diag_commutant(const DirectIntegralSpace& s, std::size_t level, const Tolerances& tol) {
    const LevelLayout& lay = s.layout(level);
    LevelAlgebra out;
    out.level = level;
    if (lay.total_dim == 0) return out;
    const LevelAlgebra gens = diag_level_algebra(s, level);
    out.basis = commutant_solve(gens.basis, tol);
    return out;
}

EqualityReport check_dec_equals_diag_commutant(const DirectIntegralSpace& s, const Tolerances& tol) {
    EqualityReport rep;
    for (std::size_t n = 1; n <= s.level_count(); ++n) {
        const LevelLayout& lay = s.layout(n);
        EqualityLevelReport lr;
        lr.level = n;

        std::map<std::size_t, std::size_t> per_atom;
        for (const auto& slot : lay.slots) ++per_atom[s.space().limit.atom_index(slot.point)];
        lr.separated = true;
        for (const auto& [ai, count] : per_atom)
            if (count > 1) lr.separated = false;

        const LevelAlgebra dec = dec_level_algebra(s, n);
        const LevelAlgebra comm = diag_commutant(s, n, tol);
        lr.dec_dim = dec.basis.size();
        lr.commutant_dim = comm.basis.size();

        const std::size_t nn = lay.total_dim * lay.total_dim;
        std::vector<CVec> dv, cv;
        for (const auto& b : dec.basis) dv.push_back(vectorize(b));
        for (const auto& b : comm.basis) cv.push_back(vectorize(b));
        const CMatrix dm = cols_from(dv, nn);
        const CMatrix cm = cols_from(cv, nn);
        lr.dec_in_commutant = span_containment_residual(dm, cm);
        lr.commutant_in_dec = span_containment_residual(cm, dm);
        lr.equal = lr.dec_dim == lr.commutant_dim && lr.dec_in_commutant <= tol.span_contain &&
                   lr.commutant_in_dec <= tol.span_contain;

        if (lr.dec_in_commutant > tol.span_contain) rep.pass = false;
        if (lr.separated && !lr.equal) rep.pass = false;
        rep.levels.push_back(lr);
    }
    return rep;
}

DilationReport check_dilation_identity(const LocalOperator& t, const DirectIntegralSpace& s,
                                       std::size_t m, std::size_t n, std::size_t max_power,
                                       const Tolerances& tol) {
    if (m > n) throw InvalidArgument("dilation check needs m <= n");
    if (!(t.chain() == s.level_chain()))
        throw ChainMismatch("operator does not live on the direct integral's level chain");
    DilationReport rep;
    rep.m = m;
    rep.n = n;
    const CMatrix am = atom_block(s, t, m);
    const CMatrix an = atom_block(s, t, n);
    const CMatrix c = s.embedding(m, n);
    rep.isometry_defect =
        frobenius_norm(adjoint(c) * c - CMatrix::identity(s.layout(m).total_dim));
    const double opn = operator_norm(an, tol);
    CMatrix mp = CMatrix::identity(am.rows());
    CMatrix np = CMatrix::identity(an.rows());
    rep.pass = rep.isometry_defect <= tol.dilation;
    double npow = 1.0;
    for (std::size_t j = 1; j <= max_power; ++j) {
        mp = mp * am;
        np = np * an;
        npow *= opn;
        const double resid = frobenius_norm(mp - adjoint(c) * np * c);
        const double bound = tol.dilation * (1.0 + npow);
        rep.residuals.push_back(resid);
        rep.bounds.push_back(bound);
        if (resid > bound) rep.pass = false;
    }
    return rep;
}

std::map<std::string, cplx> glue_diag_functions(const DirectIntegralSpace& s,
                                                const std::vector<std::map<std::string, cplx>>& fs,
                                                const Tolerances& tol) {
    const auto& chain = s.space().measures.chain;
    if (fs.size() != chain.level_count())
        throw InvalidArgument("expected one function per level, got " + std::to_string(fs.size()));
    for (std::size_t li = 0; li < fs.size(); ++li) {
        const auto& lvl = chain.levels[li];
        for (const auto& p : lvl.points)
            if (!fs[li].count(p))
                throw InvalidArgument("level " + std::to_string(li + 1) + " function misses point '" +
                                      p + "'");
        for (const auto& [p, v] : fs[li])
            if (std::find(lvl.points.begin(), lvl.points.end(), p) == lvl.points.end())
                throw InvalidArgument("level " + std::to_string(li + 1) +
                                      " function names stray point '" + p + "'");
        for (const auto& b : lvl.blocks) {
            const cplx v0 = fs[li].at(b.front());
            for (const auto& p : b)
                if (std::abs(fs[li].at(p) - v0) > tol.float_eq)
                    throw NotMeasurable("level " + std::to_string(li + 1) +
                                        " function is not constant on the block of '" + b.front() +
                                        "'");
        }
    }
    for (std::size_t mi = 0; mi < fs.size(); ++mi)
        for (std::size_t ni = mi + 1; ni < fs.size(); ++ni)
            for (const auto& p : chain.levels[mi].points)
                if (std::abs(fs[ni].at(p) - fs[mi].at(p)) > tol.float_eq)
                    throw IncompatibleFamily("levels " + std::to_string(mi + 1) + " and " +
                                             std::to_string(ni + 1) + " disagree at point '" + p +
                                             "'");
    std::map<std::string, cplx> glued;
    for (std::size_t li = 0; li < fs.size(); ++li)
        for (const auto& p : chain.levels[li].points)
            if (!glued.count(p)) glued[p] = fs[li].at(p);
    return glued;
}

} // namespace lochs
