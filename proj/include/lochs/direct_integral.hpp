#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lochs/linalg.hpp"
#include "lochs/loc_hilbert.hpp"
#include "lochs/measure_limits.hpp"

namespace lochs {

// Fiber dimensions over a locally standard measure space: for each point one
// vector of per-level dimensions (length = level count, nondecreasing, zero
// before the point's first level). Points without an entry carry the zero
// fiber. Zero-weight points may carry fibers but contribute nothing to any
// level space.
struct FiberFamily {
    LocallyStandardMeasureSpace space;
    std::map<std::string, std::vector<std::size_t>> fiber_dims;

    std::size_t fiber_dim(const std::string& point, std::size_t level) const; // 1-based, 0 if absent
};

// A square-integrable section known at some level: one coordinate vector per
// point. Points with zero weight or zero fiber are omitted; omitted points
// mean the zero vector.
struct Section {
    std::size_t level = 1;
    std::map<std::string, CVec> values;
};

// The level-n space H_n = direct sum over active points (positive weight,
// positive fiber dimension) of the fibers, in the order the level lists its
// points. reindex() realizes the unitary V_n from sections with the weighted
// L2 inner product onto standard C^N: the fiber block of p is scaled by
// sqrt(weight(p)).
struct LevelLayout {
    struct Slot {
        std::string point;
        std::size_t offset = 0;
        std::size_t dim = 0;
        double sqrt_weight = 1.0;
    };
    std::vector<Slot> slots;
    std::size_t total_dim = 0;

    const Slot* find(const std::string& point) const;
};

// Direct integral of the fibers. Two coordinate systems per level:
//  - the atom layout of LevelLayout, fibers concatenated in level point
//    order (this is where fiber-block structure is visible), and
//  - the chain layout, coordinates sorted by birth level, which makes the
//    level spaces a nested coordinate chain so LocalOperators apply.
// to_chain_perm(n) is the permutation with x_chain = P * x_atom.
class DirectIntegralSpace {
public:
    const FiberFamily& fibers() const { return fibers_; }
    const LocallyStandardMeasureSpace& space() const { return fibers_.space; }
    std::size_t level_count() const { return layouts_.size(); }
    const LevelLayout& layout(std::size_t level) const; // 1-based
    const HilbertChain& level_chain() const { return chain_; }
    const CMatrix& to_chain_perm(std::size_t level) const;

    std::vector<std::string> active_points(std::size_t level) const;

    CVec reindex(std::size_t level, const Section& u) const;    // V_n u, atom layout
    Section unreindex(std::size_t level, const CVec& x) const;  // V_n^{-1} x

    // isometric inclusion H_m -> H_n in atom layouts, m <= n
    CMatrix embedding(std::size_t m, std::size_t n) const;

    friend DirectIntegralSpace build_direct_integral(const FiberFamily&);

private:
    FiberFamily fibers_;
    std::vector<LevelLayout> layouts_;
    HilbertChain chain_;
    std::vector<CMatrix> perms_;
};

DirectIntegralSpace build_direct_integral(const FiberFamily& fibers); // throws InvalidFibers

// Weighted inner product of two sections, conjugate-linear in the first
// argument. Sections may live at different levels; the lower one embeds.
cplx section_inner(const Section& u, const Section& v, const DirectIntegralSpace& s);

// Pointwise densities. density_function(u, v)(p) = <u(p), v(p)> without the
// weight, so that sum_p weight(p) * density(p) = section_inner(u, v).
std::map<std::string, cplx> density_function(const Section& u, const Section& v,
                                             const DirectIntegralSpace& s);

// Pairing of a section against a measurable family of fiber vectors:
// result(p) = <family(p), u(p)>. Family vectors shorter than the top fiber
// embed by zero padding; anything longer fits no fiber at all.
std::map<std::string, cplx> pairing_function(const Section& u,
                                             const std::map<std::string, CVec>& family,
                                             const DirectIntegralSpace& s);

// Builds the level-`level` section with the given per-point values. Vectors
// shorter than the fiber dimension are zero padded; longer ones, or values on
// points outside the level (or with zero weight), are rejected.
Section assemble_section(const DirectIntegralSpace& s,
                         const std::map<std::string, CVec>& family, std::size_t level);

} // namespace lochs
