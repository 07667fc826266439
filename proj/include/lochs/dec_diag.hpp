#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lochs/direct_integral.hpp"

namespace lochs {

// Per-point operator family: for each point, one matrix per level acting on
// that point's fiber (sized fiber_dim x fiber_dim, 0x0 before the fiber
// appears). Points without an entry act as zero.
using FiberOperatorFamily = std::map<std::string, std::vector<CMatrix>>;

// Validates a fiberwise family: known points, level counts, sizes, and the
// corner condition inside every fiber. Throws InvalidFibers / NotLocallyBounded.
void validate_fiber_family(const DirectIntegralSpace& s, const FiberOperatorFamily& family,
                           const Tolerances& tol = default_tolerances());

// The operator on the level chain induced by a fiberwise family (chain
// layout blocks). Throws what validate_fiber_family throws.
LocalOperator induced_decomposable(const DirectIntegralSpace& s, const FiberOperatorFamily& family,
                                   const Tolerances& tol = default_tolerances());

// Checks that f is constant on the positive-weight, positive-fiber points of
// each limit atom (within tol.scalar_block); missing points act as zero.
void validate_diag_function(const DirectIntegralSpace& s, const std::map<std::string, cplx>& f,
                            const Tolerances& tol = default_tolerances());

LocalOperator induced_diagonalizable(const DirectIntegralSpace& s,
                                     const std::map<std::string, cplx>& f,
                                     const Tolerances& tol = default_tolerances());

struct ClassifyWitness {
    std::string kind; // "off_diagonal", "fiber_nonscalar", "atom_merge", or ""
    std::size_t level = 0;
    std::size_t row = 0, col = 0; // atom-layout entry for off_diagonal
    double magnitude = 0.0;
    std::string point_a, point_b;
    cplx value_a, value_b;
    std::string message;
};

struct ClassifyOutcome {
    enum class Kind { Diagonalizable, DecomposableOnly, LocallyBoundedOnly } kind;
    std::map<std::string, cplx> f;  // set when Diagonalizable
    FiberOperatorFamily family;     // set unless LocallyBoundedOnly
    ClassifyWitness witness;        // set unless Diagonalizable
};

// Decides where a locally bounded operator on the level chain sits:
// diagonalizable (fiberwise scalars constant on limit atoms), merely
// decomposable (fiberwise but not such scalars), or neither (couples
// distinct fibers). Witnesses name the first obstruction found.
ClassifyOutcome classify(const LocalOperator& t, const DirectIntegralSpace& s,
                         const Tolerances& tol = default_tolerances());

// Compression of a level-n operator (atom layout) to level m <= n through the
// inclusion: J^H T J. On blocks induced by compatible fiberwise families this
// is exactly the restriction to the lower level.
CMatrix compress(const DirectIntegralSpace& s, std::size_t m, std::size_t n, const CMatrix& tn_atom);

struct LevelAlgebra {
    std::size_t level = 1;
    std::vector<CMatrix> basis; // atom layout
};

// Spanning set {indicator of atom} of the level-n image of the diagonalizable
// operators: one 0/1 diagonal per limit atom with active points at the level.
LevelAlgebra diag_level_algebra(const DirectIntegralSpace& s, std::size_t level);

// Basis of the level-n image of the decomposable operators: all matrices
// supported on a single fiber block (one unit matrix per in-block entry).
LevelAlgebra dec_level_algebra(const DirectIntegralSpace& s, std::size_t level);

// Commutant of the diagonal level algebra, via commutant_solve.
LevelAlgebra diag_commutant(const DirectIntegralSpace& s, std::size_t level,
                            const Tolerances& tol = default_tolerances());

struct EqualityLevelReport {
    std::size_t level = 1;
    std::size_t dec_dim = 0;
    std::size_t commutant_dim = 0;
    double dec_in_commutant = 0.0; // span containment residuals, vectorized
    double commutant_in_dec = 0.0;
    bool separated = false; // every atom has at most one active point here
    bool equal = false;
};

struct EqualityReport {
    bool pass = true; // equality holds wherever separation predicts it
    std::vector<EqualityLevelReport> levels;
};

// Level-by-level comparison of the decomposable image with the commutant of
// the diagonalizable image. Equality is expected exactly at levels where the
// limit atoms separate the active points; elsewhere the containment
// dec <= commutant still must hold.
EqualityReport check_dec_equals_diag_commutant(const DirectIntegralSpace& s,
                                               const Tolerances& tol = default_tolerances());

struct DilationReport {
    std::size_t m = 1, n = 1;
    double isometry_defect = 0.0;
    std::vector<double> residuals; // power j = 1..max_power
    std::vector<double> bounds;    // tol.dilation * (1 + ||T_n||^j)
    bool pass = false;
};

// Checks T_m^j = C^H T_n^j C for j = 1..max_power, where C is the inclusion
// H_m -> H_n conjugated into the two reindexing unitaries, built explicitly.
DilationReport check_dilation_identity(const LocalOperator& t, const DirectIntegralSpace& s,
                                       std::size_t m, std::size_t n, std::size_t max_power,
                                       const Tolerances& tol = default_tolerances());

// Glues level functions f_n : X_n -> C (each constant on level blocks) into
// one function on all points. Throws NotMeasurable for a non-measurable
// level, IncompatibleFamily when two levels disagree on a shared point.
std::map<std::string, cplx> glue_diag_functions(const DirectIntegralSpace& s,
                                                const std::vector<std::map<std::string, cplx>>& fs,
                                                const Tolerances& tol = default_tolerances());

} // namespace lochs
