#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lochs/dec_diag.hpp"

namespace lochs {

// A finitely generated abelian *-algebra presented by commuting normal
// locally bounded generators on one coordinate chain.
struct AbelianPresentation {
    HilbertChain chain;
    std::vector<LocalOperator> generators;
};

// Validates chains, normality of every level block (NotNormal), and pairwise
// commutation at every level (NotAbelian).
AbelianPresentation make_abelian_presentation(const HilbertChain& chain,
                                              std::vector<LocalOperator> generators,
                                              const Tolerances& tol = default_tolerances());

// Level-n joint spectrum: one point per joint eigenvalue tuple, carrying its
// label tuple and spectral projection on K_n. Points are ordered by label,
// lexicographically.
struct SpectrumLevel {
    std::vector<std::string> keys;
    std::vector<std::vector<cplx>> labels;
    std::vector<CMatrix> projections;
};

// Joint spectra of all levels, glued: a level-m point is identified with the
// unique level-n point whose labels agree within tol.label_match, so the
// point sets nest and every key is stable from its first level on. Keys are
// printed from the labels at first appearance, rounded to 7 decimals.
struct SpectrumModel {
    AbelianPresentation presentation;
    std::vector<SpectrumLevel> levels;
    std::map<std::string, std::size_t> birth; // key -> first level, 1-based

    std::size_t level_count() const { return levels.size(); }
    // index of key in a level's ordering, or npos when absent there
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_at(std::size_t level, const std::string& key) const;
    const CMatrix& projection(std::size_t level, const std::string& key) const; // UnknownName

    // The spectrum as a measure chain: points are the keys, every block is a
    // singleton, every point has weight one.
    MeasureChain measure() const;
};

SpectrumModel build_spectrum(const AbelianPresentation& pres,
                             const Tolerances& tol = default_tolerances());

// Density of the spectral pairing at one level and point, against the
// counting measure there: <xi, E_{level,point} eta> / mu_level({point}).
// Conjugate-linear in xi. Throws UnknownName for a point the spectrum does
// not contain at all, ZeroWeightPoint for one that exists but carries no
// mass at that level (here: is born later).
cplx rn_density(const SpectrumModel& model, std::size_t level, const CVec& xi, const CVec& eta,
                const std::string& key, const Tolerances& tol = default_tolerances());

// Fibers of the disintegration: for each spectrum point the flag-adapted
// orthonormal basis of the range of its top-level projection, built level by
// level so the first rank(E_{n,p}) columns always span the level-n range.
// Ranks are decided by the spectral threshold tol.rank_rel relative to the
// largest eigenvalue of each projection.
struct FiberModel {
    FiberFamily family;
    std::map<std::string, CMatrix> bases; // top_dim x top_rank per key
};

FiberModel build_fiber_model(const SpectrumModel& model,
                             const Tolerances& tol = default_tolerances());
FiberFamily build_fibers(const SpectrumModel& model, const Tolerances& tol = default_tolerances());

// The assembled unitaries W_n : K_n -> H_n (atom layout rows), sending a
// vector to the section of its fiberwise spectral classes. Checked to be
// isometric, surjective, and compatible with the level inclusions.
struct Disintegration {
    SpectrumModel spectrum;
    FiberModel fibers;
    DirectIntegralSpace integral;
    std::vector<CMatrix> w;
};

Disintegration build_isometry(const SpectrumModel& model, const FiberModel& fibers,
                              const Tolerances& tol = default_tolerances());

// Multiplication operator by a function on the spectrum, realized back on the
// presentation chain: tau(f)_n = sum_p f(p) E_{n,p}. Missing keys act as 0.
LocalOperator tau(const Disintegration& dis, const std::map<std::string, cplx>& f,
                  const Tolerances& tol = default_tolerances());

// The four telescoping terms of the norm identity for the class map at one
// level, evaluated with the birth-level densities: i1 sums the squares of the
// newly appearing classes and i2, i3, i4 are the cross terms, which vanish
// for every compatible family because a projection born at level i kills the
// levels below it.
struct CrossTerms {
    cplx i1{}, i2{}, i3{}, i4{};
    double h_norm_sq = 0.0;
};

CrossTerms isometry_cross_terms(const SpectrumModel& model, std::size_t level, const CVec& h);

struct ConjugationReport {
    bool pass = true;
    std::vector<double> generator_label_residuals; // per generator
    double conjugation_residual = 0.0; // max ||W G W^H - multiplication by labels||
    double tau_unital = 0.0;
    double tau_mult = 0.0;
    double tau_adjoint = 0.0;
    double span_defect = 0.0; // missing rank in the section span check
    std::vector<std::string> failures;
};

// End-to-end check that conjugation by W turns every generator into the
// multiplication operator by its label function (classified Diagonalizable,
// labels matching within tol.label_match), that tau is a unital
// *-homomorphism within tol.tau_hom, and that indicator multiples of the
// W-images span every level.
ConjugationReport verify_conjugation(const Disintegration& dis,
                                     const Tolerances& tol = default_tolerances());

} // namespace lochs
