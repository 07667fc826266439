#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "lochs/errors.hpp"

namespace lochs {

using Rat = boost::rational<long long>;

// Accepts "p/q", "p", or "-p/q"; q > 0 after normalization.
Rat parse_rational(const std::string& text);
std::string format_rational(const Rat& r); // "p/q", or "p" when q == 1

// A finite set of points together with a finite sigma-algebra, stored as the
// partition into its atoms. Blocks are nonempty, disjoint, and cover points.
struct FiniteMeasurableSpace {
    std::vector<std::string> points;
    std::vector<std::vector<std::string>> blocks;
};

// Increasing system X_1 <= X_2 <= ... where each level's sigma-algebra traces
// to the one below: restricting level n's partition to X_m (and dropping
// empties) must reproduce level m's partition. Equivalently, blocks never
// split as the level grows; they can only persist or absorb new points.
struct MeasurableChain {
    std::vector<FiniteMeasurableSpace> levels;
    std::size_t level_count() const { return levels.size(); }
};

struct ChainViolation {
    std::string kind;    // "space", "nesting", "trace", "weight", "projective"
    std::size_t m = 0;   // 1-based level(s) involved; 0 when not applicable
    std::size_t n = 0;
    std::vector<std::string> block; // offending block or point list
    std::string message;
};

struct ChainReport {
    bool pass = true;
    std::vector<ChainViolation> violations;
};

ChainReport validate_chain(const MeasurableChain& chain);

// The limit sigma-algebra on X = union X_n consists of the sets whose trace on
// every X_n is level-n measurable. It is again atomic; the atoms are the
// connected components of the blocks of all levels glued along shared points.
struct LimitSigmaAlgebra {
    std::vector<std::string> points;                 // in order of first appearance
    std::vector<std::vector<std::string>> atoms;
    bool contains(const std::set<std::string>& e) const;
    std::size_t atom_index(const std::string& point) const; // throws UnknownName
};

LimitSigmaAlgebra limit_sigma_algebra(const MeasurableChain& chain); // throws InvalidChain

// Gluing data for a family of level maps f_n : X_n -> target with
// f_n = f_m on X_m. Each map must be measurable (constant on blocks after
// pulling back target blocks; with atomic targets: block image inside one
// target block is not required, only preimage measurability, which for
// finite atomic spaces means f is constant on each source block).
using PointMap = std::map<std::string, std::string>;
PointMap glue_measurable_maps(const MeasurableChain& chain,
                              const FiniteMeasurableSpace& target,
                              const std::vector<PointMap>& maps);

// A measurable chain plus one exact weight per point. The induced level
// measures mu_n(E) = sum of weights over E are projective precisely when
// every block that later absorbs new points carries total weight zero.
struct MeasureChain {
    MeasurableChain chain;
    std::map<std::string, Rat> weights;
    Rat weight(const std::string& point) const; // throws UnknownName
};

ChainReport validate_measure_chain(const MeasureChain& mc);

Rat level_measure(const MeasureChain& mc, std::size_t level, const std::set<std::string>& e);

// Value of the limit measure. The finite/infinite split is part of the
// interface; with finitely many levels the infinite branch cannot occur.
struct ExtRat {
    bool infinite = false;
    Rat value{0};
};

ExtRat limit_measure(const MeasureChain& mc, const std::set<std::string>& e); // throws NotMeasurable

// Validated bundle: the chain, its per-point weights, and the computed limit
// sigma-algebra, ready to carry fibers.
struct LocallyStandardMeasureSpace {
    MeasureChain measures;
    LimitSigmaAlgebra limit;

    std::size_t level_count() const { return measures.chain.level_count(); }
    const std::vector<std::string>& level_points(std::size_t level) const; // 1-based
    Rat weight(const std::string& point) const { return measures.weight(point); }
};

LocallyStandardMeasureSpace make_locally_standard(const MeasureChain& mc); // throws InvalidChain

} // namespace lochs
