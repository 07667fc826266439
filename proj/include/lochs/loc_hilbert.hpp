#pragma once

#include <cstddef>
#include <vector>

#include "lochs/linalg.hpp"

namespace lochs {

// Canonical coordinates for a nested sequence of finite-dimensional Hilbert
// spaces K_1 <= K_2 <= ... <= K_L: level n is the span of the first dims[n-1]
// standard basis vectors of C^{dims[L-1]}, so inclusions are coordinate
// injections and the level-n truncation keeps the first dims[n-1] coordinates.
struct HilbertChain {
    std::vector<std::size_t> dims; // nondecreasing

    std::size_t level_count() const { return dims.size(); }
    std::size_t dim(std::size_t level) const; // 1-based; throws InvalidArgument
    std::size_t top_dim() const { return dims.empty() ? 0 : dims.back(); }
    bool operator==(const HilbertChain& o) const { return dims == o.dims; }
};

void validate_hilbert_chain(const HilbertChain& chain); // throws InvalidChain

// A vector known at some level. Its image at any higher level pads with
// zeros; inner products embed both arguments into the larger level first.
struct LocalVector {
    std::size_t level = 1; // 1-based
    CVec coords;
};

cplx local_inner(const HilbertChain& chain, const LocalVector& u, const LocalVector& v);

// A compatible family {T_n}: T_n acts on level n and every lower-level block
// sits as the upper-left corner of every higher one, in two-sided block form
// (both off-corner strips vanish, so each level also maps lower levels into
// themselves). This is exactly the matrix shape that survives truncation from
// both sides.
class LocalOperator {
public:
    const HilbertChain& chain() const { return chain_; }
    std::size_t level_count() const { return blocks_.size(); }
    const CMatrix& block(std::size_t level) const; // 1-based

    friend LocalOperator make_local_operator(const HilbertChain&, std::vector<CMatrix>,
                                             const Tolerances&);

private:
    HilbertChain chain_;
    std::vector<CMatrix> blocks_;
};

// Validates sizes and the two-sided corner condition for every pair of levels
// within tol.local_block. Throws NotLocallyBounded with the first offending
// (level pair, entry) in the message. Accepted blocks are canonicalized:
// strips become exact zeros and corners exact copies, so algebraic
// combinations of valid operators are again exactly valid.
LocalOperator make_local_operator(const HilbertChain& chain, std::vector<CMatrix> blocks,
                                  const Tolerances& tol = default_tolerances());

// C*-seminorm p_n: operator norm of the level-n block.
double seminorm(const LocalOperator& t, std::size_t level,
                const Tolerances& tol = default_tolerances());

// Strong and weak topology seminorms. The vectors live at their own level;
// any level at or above theirs gives the same value, which is checked by the
// tests rather than assumed here.
double sot_seminorm(const LocalOperator& t, const LocalVector& u,
                    const Tolerances& tol = default_tolerances());
double wot_seminorm(const LocalOperator& t, const LocalVector& u, const LocalVector& v,
                    const Tolerances& tol = default_tolerances());

LocalOperator compose(const LocalOperator& s, const LocalOperator& t,
                      const Tolerances& tol = default_tolerances());
LocalOperator add(const LocalOperator& s, const LocalOperator& t,
                  const Tolerances& tol = default_tolerances());
LocalOperator adjoint_op(const LocalOperator& t, const Tolerances& tol = default_tolerances());
LocalOperator scale(cplx a, const LocalOperator& t, const Tolerances& tol = default_tolerances());

} // namespace lochs
