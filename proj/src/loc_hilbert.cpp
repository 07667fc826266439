#include "lochs/loc_hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lochs {

std::size_t HilbertChain::dim(std::size_t level) const {
    if (level == 0 || level > dims.size())
        throw InvalidArgument("hilbert chain level " + std::to_string(level) + " out of range");
    return dims[level - 1];
}

void validate_hilbert_chain(const HilbertChain& chain) {
    if (chain.dims.empty()) throw InvalidChain("hilbert chain has no levels");
    for (std::size_t i = 1; i < chain.dims.size(); ++i)
        if (chain.dims[i] < chain.dims[i - 1])
            throw InvalidChain("hilbert chain dimensions decrease at level " + std::to_string(i + 1));
}

cplx local_inner(const HilbertChain& chain, const LocalVector& u, const LocalVector& v) {
    if (u.coords.size() != chain.dim(u.level))
        throw ChainMismatch("vector length does not match its level dimension");
    if (v.coords.size() != chain.dim(v.level))
        throw ChainMismatch("vector length does not match its level dimension");
    const std::size_t n = std::max(u.coords.size(), v.coords.size());
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ui = i < u.coords.size() ? u.coords[i] : cplx{};
        const cplx vi = i < v.coords.size() ? v.coords[i] : cplx{};
        s += std::conj(ui) * vi;
    }
    return s;
}

const CMatrix& LocalOperator::block(std::size_t level) const {
    if (level == 0 || level > blocks_.size())
        throw InvalidArgument("operator level " + std::to_string(level) + " out of range");
    return blocks_[level - 1];
}

LocalOperator make_local_operator(const HilbertChain& chain, std::vector<CMatrix> blocks,
                                  const Tolerances& tol) {
    validate_hilbert_chain(chain);
    if (blocks.size() != chain.level_count())
        throw NotLocallyBounded("expected " + std::to_string(chain.level_count()) +
                                " level blocks, got " + std::to_string(blocks.size()));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::size_t d = chain.dims[i];
        if (blocks[i].rows() != d || blocks[i].cols() != d) {
            std::ostringstream os;
            os << "level " << (i + 1) << " block is " << blocks[i].rows() << "x" << blocks[i].cols()
               << ", expected " << d << "x" << d;
            throw NotLocallyBounded(os.str());
        }
    }
    // Two-sided corner condition, every pair of levels: entries coupling the
    // level-m corner to its complement must vanish, and the corner must equal
    // the level-m block.
    for (std::size_t mi = 0; mi < blocks.size(); ++mi)
        for (std::size_t ni = mi + 1; ni < blocks.size(); ++ni) {
            const std::size_t dm = chain.dims[mi], dn = chain.dims[ni];
            const CMatrix& tm = blocks[mi];
            const CMatrix& tn = blocks[ni];
            for (std::size_t r = 0; r < dn; ++r)
                for (std::size_t c = 0; c < dn; ++c) {
                    const bool rin = r < dm, cin = c < dm;
                    double defect = 0.0;
                    if (rin && cin)
                        defect = std::abs(tn(r, c) - tm(r, c));
                    else if (rin != cin)
                        defect = std::abs(tn(r, c));
                    if (defect > tol.local_block) {
                        std::ostringstream os;
                        os << "levels (" << (mi + 1) << "," << (ni + 1) << ") entry (" << r << "," << c
                           << ") breaks the corner condition by " << defect;
                        throw NotLocallyBounded(os.str());
                    }
                }
        }
    // Canonicalize: force the strips to exact zeros and each corner to an
    // exact copy of the level below. The adjustment is below tol.local_block
    // per entry and makes sums and products of valid operators exactly valid.
    for (std::size_t ni = 1; ni < blocks.size(); ++ni) {
        const std::size_t dm = chain.dims[ni - 1], dn = chain.dims[ni];
        CMatrix& tn = blocks[ni];
        for (std::size_t r = 0; r < dn; ++r)
            for (std::size_t c = 0; c < dn; ++c) {
                const bool rin = r < dm, cin = c < dm;
                if (rin && cin)
                    tn(r, c) = blocks[ni - 1](r, c);
                else if (rin != cin)
                    tn(r, c) = 0.0;
            }
    }
    LocalOperator t;
    t.chain_ = chain;
    t.blocks_ = std::move(blocks);
    return t;
}

double seminorm(const LocalOperator& t, std::size_t level, const Tolerances& tol) {
    return operator_norm(t.block(level), tol);
}

double sot_seminorm(const LocalOperator& t, const LocalVector& u, const Tolerances& tol) {
    (void)tol;
    if (u.coords.size() != t.chain().dim(u.level))
        throw ChainMismatch("vector length does not match its level dimension");
    return vnorm(t.block(u.level) * u.coords);
}

double wot_seminorm(const LocalOperator& t, const LocalVector& u, const LocalVector& v,
                    const Tolerances& tol) {
    (void)tol;
    const HilbertChain& chain = t.chain();
    if (u.coords.size() != chain.dim(u.level) || v.coords.size() != chain.dim(v.level))
        throw ChainMismatch("vector length does not match its level dimension");
    const std::size_t lvl = std::max(u.level, v.level);
    auto lift = [&](const LocalVector& w) {
        CVec out(chain.dim(lvl), 0.0);
        std::copy(w.coords.begin(), w.coords.end(), out.begin());
        return out;
    };
    return std::abs(vdot(lift(u), t.block(lvl) * lift(v)));
}

namespace {

void require_same_chain(const LocalOperator& s, const LocalOperator& t) {
    if (!(s.chain() == t.chain()))
        throw ChainMismatch("operators live on different hilbert chains");
}

} // namespace

LocalOperator compose(const LocalOperator& s, const LocalOperator& t, const Tolerances& tol) {
    require_same_chain(s, t);
    std::vector<CMatrix> blocks;
    for (std::size_t i = 1; i <= s.level_count(); ++i) blocks.push_back(s.block(i) * t.block(i));
    return make_local_operator(s.chain(), std::move(blocks), tol);
}

LocalOperator add(const LocalOperator& s, const LocalOperator& t, const Tolerances& tol) {
    require_same_chain(s, t);
    std::vector<CMatrix> blocks;
    for (std::size_t i = 1; i <= s.level_count(); ++i) blocks.push_back(s.block(i) + t.block(i));
    return make_local_operator(s.chain(), std::move(blocks), tol);
}

LocalOperator adjoint_op(const LocalOperator& t, const Tolerances& tol) {
    std::vector<CMatrix> blocks;
    for (std::size_t i = 1; i <= t.level_count(); ++i) blocks.push_back(adjoint(t.block(i)));
    return make_local_operator(t.chain(), std::move(blocks), tol);
}

LocalOperator scale(cplx a, const LocalOperator& t, const Tolerances& tol) {
    std::vector<CMatrix> blocks;
    for (std::size_t i = 1; i <= t.level_count(); ++i) blocks.push_back(a * t.block(i));
    return make_local_operator(t.chain(), std::move(blocks), tol);
}

} // namespace lochs
