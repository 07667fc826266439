#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "lochs/errors.hpp"
#include "lochs/tolerances.hpp"

namespace lochs {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Dense complex matrix, row-major. Sizes here are desk scale (<= a few
// hundred rows), so everything is direct dense arithmetic.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zero(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    CVec col(std::size_t j) const;
    void set_col(std::size_t j, const CVec& v);

    // upper-left block copy-out / copy-in
    CMatrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const;
    void set_block(std::size_t i0, std::size_t j0, const CMatrix& b);

    bool operator==(const CMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

CMatrix operator+(const CMatrix& x, const CMatrix& y);
CMatrix operator-(const CMatrix& x, const CMatrix& y);
CMatrix operator*(const CMatrix& x, const CMatrix& y);
CMatrix operator*(cplx s, const CMatrix& x);
CVec operator*(const CMatrix& x, const CVec& v);

CMatrix adjoint(const CMatrix& x);
cplx trace(const CMatrix& x);

double frobenius_norm(const CMatrix& x);
double max_abs(const CMatrix& x);
double hermitian_defect(const CMatrix& x);       // max-abs of x - x^H
double normality_defect(const CMatrix& x);       // ||x^H x - x x^H||_F
double commutator_norm(const CMatrix& x, const CMatrix& y); // ||xy - yx||_F

// vectors
cplx vdot(const CVec& x, const CVec& y);          // conjugates the first argument
double vnorm(const CVec& x);
CVec operator+(const CVec& x, const CVec& y);
CVec operator-(const CVec& x, const CVec& y);
CVec operator*(cplx s, const CVec& x);

struct EigResult {
    std::vector<double> values; // ascending
    CMatrix vectors;            // unitary, columns are eigenvectors
};

// Eigendecomposition of a Hermitian matrix by two-sided Jacobi rotations.
// Eigenvalues ascend; ties are broken by lexicographic comparison of the
// phase-normalized eigenvectors, so the output is deterministic.
// Throws NonHermitian if the input fails the Hermitian check, DidNotConverge
// if the sweep cap is hit or the post residual check fails.
EigResult hermitian_eig(const CMatrix& a, const Tolerances& tol = default_tolerances());

// Largest singular value (operator norm) via hermitian_eig of a^H a.
double operator_norm(const CMatrix& a, const Tolerances& tol = default_tolerances());

struct Subspace {
    std::size_t ambient_dim = 0;
    CMatrix basis; // ambient_dim x dim, orthonormal columns
    std::size_t dim() const { return basis.cols(); }
};

// Modified Gram-Schmidt with a second reorthogonalization pass. Input columns
// whose residual after projection is <= tol are dropped. Columns already
// accepted are never revisited, so a prefix that is orthonormal stays fixed.
Subspace orthonormalize(const std::vector<CVec>& vectors, double tol);

// max over columns v of A of ||v - P_B v|| where P_B projects onto the span
// of B's orthonormal columns. Zero iff span(A) is contained in span(B).
double span_containment_residual(const CMatrix& a, const CMatrix& b);

struct JointDiagResult {
    std::vector<CMatrix> projections;     // orthogonal, pairwise orthogonal, sum = I
    std::vector<std::vector<cplx>> labels; // labels[k][i]: eigenvalue of input i on block k
};

// Simultaneous diagonalization of a family of pairwise commuting normal
// matrices. Blocks are refined generator by generator through the Hermitian
// and anti-Hermitian parts; two blocks are merged when every label agrees
// within tol.label_cluster. Output blocks are ordered lexicographically by
// label tuple (re, then im, coordinate by coordinate).
JointDiagResult joint_diagonalize(const std::vector<CMatrix>& as,
                                  const Tolerances& tol = default_tolerances());

// Trace-orthonormal basis of {T : GT = TG for every generator G}, computed by
// solving the stacked linear system (G ⊗ I - I ⊗ G^T) vec(T) = 0. Singular
// directions with singular value below tol.rank_rel * d are treated as exact.
// At least one generator is required (the size is read off the first).
std::vector<CMatrix> commutant_solve(const std::vector<CMatrix>& generators,
                                     const Tolerances& tol = default_tolerances());

} // namespace lochs
