#include "lochs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

namespace lochs {

namespace {

std::string dim_str(const CMatrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

} // namespace

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.resize(rows_ * cols_);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != cols_) throw InvalidArgument("ragged matrix initializer");
        std::size_t j = 0;
        for (const auto& v : r) (*this)(i, j++) = v;
        ++i;
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CVec CMatrix::col(std::size_t j) const {
    CVec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void CMatrix::set_col(std::size_t j, const CVec& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

CMatrix CMatrix::block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    CMatrix b(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
}

void CMatrix::set_block(std::size_t i0, std::size_t j0, const CMatrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

CMatrix operator+(const CMatrix& x, const CMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw InvalidArgument("matrix sum shape mismatch: " + dim_str(x) + " vs " + dim_str(y));
    CMatrix z(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) z(i, j) = x(i, j) + y(i, j);
    return z;
}

CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw InvalidArgument("matrix difference shape mismatch: " + dim_str(x) + " vs " + dim_str(y));
    CMatrix z(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) z(i, j) = x(i, j) - y(i, j);
    return z;
}

CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    if (x.cols() != y.rows())
        throw InvalidArgument("matrix product shape mismatch: " + dim_str(x) + " vs " + dim_str(y));
    CMatrix z(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx{}) continue;
            for (std::size_t j = 0; j < y.cols(); ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

CMatrix operator*(cplx s, const CMatrix& x) {
    CMatrix z(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) z(i, j) = s * x(i, j);
    return z;
}

CVec operator*(const CMatrix& x, const CVec& v) {
    if (x.cols() != v.size()) throw InvalidArgument("matrix-vector shape mismatch");
    CVec w(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * v[j];
        w[i] = s;
    }
    return w;
}

CMatrix adjoint(const CMatrix& x) {
    CMatrix z(x.cols(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) z(j, i) = std::conj(x(i, j));
    return z;
}

cplx trace(const CMatrix& x) {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(x.rows(), x.cols()); ++i) t += x(i, i);
    return t;
}

double frobenius_norm(const CMatrix& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) s += std::norm(x(i, j));
    return std::sqrt(s);
}

double max_abs(const CMatrix& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) m = std::max(m, std::abs(x(i, j)));
    return m;
}

double hermitian_defect(const CMatrix& x) {
    if (!x.is_square()) throw InvalidArgument("hermitian_defect needs a square matrix");
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            m = std::max(m, std::abs(x(i, j) - std::conj(x(j, i))));
    return m;
}

double normality_defect(const CMatrix& x) {
    return frobenius_norm(adjoint(x) * x - x * adjoint(x));
}

double commutator_norm(const CMatrix& x, const CMatrix& y) {
    return frobenius_norm(x * y - y * x);
}

cplx vdot(const CVec& x, const CVec& y) {
    if (x.size() != y.size()) throw InvalidArgument("vector inner product length mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double vnorm(const CVec& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

CVec operator+(const CVec& x, const CVec& y) {
    if (x.size() != y.size()) throw InvalidArgument("vector sum length mismatch");
    CVec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
}

CVec operator-(const CVec& x, const CVec& y) {
    if (x.size() != y.size()) throw InvalidArgument("vector difference length mismatch");
    CVec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

CVec operator*(cplx s, const CVec& x) {
    CVec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = s * x[i];
    return z;
}

namespace {

// Rotate the (p,q) plane so that b(p,q) becomes zero. b stays Hermitian,
// v accumulates the rotations on the right.
void jacobi_rotate(CMatrix& b, CMatrix& v, std::size_t p, std::size_t q) {
    const std::size_t n = b.rows();
    const cplx apq = b(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;
    const cplx phase = apq / mag;
    const double app = b(p, p).real();
    const double aqq = b(q, q).real();
    const double tau = (aqq - app) / (2.0 * mag);
    // smaller-magnitude root of t^2 - 2 tau t - 1 = 0
    const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cplx up = s * std::conj(phase); // (q,p) entry of the rotation
    const cplx uq = s * phase;            // negated (p,q) entry

    for (std::size_t k = 0; k < n; ++k) { // b <- b U
        const cplx kp = b(k, p), kq = b(k, q);
        b(k, p) = c * kp + up * kq;
        b(k, q) = -uq * kp + c * kq;
    }
    for (std::size_t k = 0; k < n; ++k) { // b <- U^H b
        const cplx pk = b(p, k), qk = b(q, k);
        b(p, k) = c * pk + uq * qk;
        b(q, k) = -up * pk + c * qk;
    }
    for (std::size_t k = 0; k < n; ++k) { // v <- v U
        const cplx kp = v(k, p), kq = v(k, q);
        v(k, p) = c * kp + up * kq;
        v(k, q) = -uq * kp + c * kq;
    }
    b(p, q) = 0.0;
    b(q, p) = 0.0;
    b(p, p) = b(p, p).real();
    b(q, q) = b(q, q).real();
}

double offdiag_norm(const CMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            if (i != j) s += std::norm(b(i, j));
    return std::sqrt(s);
}

// In-place: scale the column so its first entry of significant magnitude is
// real and positive. Keeps eigenvector output deterministic.
void normalize_column_phase(CMatrix& m, std::size_t j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mx = std::max(mx, std::abs(m(i, j)));
    if (mx == 0.0) return;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double a = std::abs(m(i, j));
        if (a >= 1e-8 * mx) {
            const cplx f = std::conj(m(i, j)) / a;
            for (std::size_t k = 0; k < m.rows(); ++k) m(k, j) *= f;
            return;
        }
    }
}

bool column_less(const CMatrix& m, std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const cplx x = m(i, a), y = m(i, b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
}

} // namespace

EigResult hermitian_eig(const CMatrix& a, const Tolerances& tol) {
    if (!a.is_square()) throw InvalidArgument("hermitian_eig needs a square matrix, got " + dim_str(a));
    const std::size_t n = a.rows();
    const double defect = n ? hermitian_defect(a) : 0.0;
    if (defect > tol.hermitian_input) {
        std::ostringstream os;
        os << "hermitian defect " << defect << " exceeds " << tol.hermitian_input;
        throw NonHermitian(os.str());
    }
    EigResult res;
    res.vectors = CMatrix::identity(n);
    if (n == 0) return res;

    CMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

    const double scale = frobenius_norm(b);
    const double conv = 1e-14 * (1.0 + scale);
    const int max_sweeps = 80;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiag_norm(b) <= conv) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(b(p, q)) > 1e-18 * (1.0 + scale)) jacobi_rotate(b, res.vectors, p, q);
    }
    if (!converged && offdiag_norm(b) > conv)
        throw DidNotConverge("jacobi sweeps exhausted at off-diagonal norm " +
                             std::to_string(offdiag_norm(b)));

    for (std::size_t j = 0; j < n; ++j) normalize_column_phase(res.vectors, j);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double vx = b(x, x).real(), vy = b(y, y).real();
        if (vx != vy) return vx < vy;
        return column_less(res.vectors, x, y);
    });

    CMatrix sorted(n, n);
    res.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        res.values[j] = b(order[j], order[j]).real();
        for (std::size_t i = 0; i < n; ++i) sorted(i, j) = res.vectors(i, order[j]);
    }
    res.vectors = sorted;

    CMatrix lam(n, n);
    for (std::size_t i = 0; i < n; ++i) lam(i, i) = res.values[i];
    const double resid = frobenius_norm(a * res.vectors - res.vectors * lam);
    if (resid > tol.eig_residual * (1.0 + frobenius_norm(a)))
        throw DidNotConverge("eigendecomposition residual " + std::to_string(resid));
    const double udef = max_abs(adjoint(res.vectors) * res.vectors - CMatrix::identity(n));
    if (udef > tol.unitarity)
        throw DidNotConverge("eigenvector unitarity defect " + std::to_string(udef));
    return res;
}

double operator_norm(const CMatrix& a, const Tolerances& tol) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const EigResult e = hermitian_eig(adjoint(a) * a, tol);
    const double top = e.values.empty() ? 0.0 : e.values.back();
    return std::sqrt(std::max(0.0, top));
}

Subspace orthonormalize(const std::vector<CVec>& vectors, double tol) {
    Subspace s;
    if (vectors.empty()) return s;
    s.ambient_dim = vectors[0].size();
    std::vector<CVec> basis;
    for (const auto& v0 : vectors) {
        if (v0.size() != s.ambient_dim)
            throw InvalidArgument("orthonormalize: mixed vector lengths");
        CVec v = v0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v = v - vdot(b, v) * b;
        const double nrm = vnorm(v);
        if (nrm > tol) basis.push_back((1.0 / nrm) * v);
    }
    s.basis = CMatrix(s.ambient_dim, basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) s.basis.set_col(j, basis[j]);
    return s;
}

double span_containment_residual(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows()) throw InvalidArgument("span comparison: ambient dimension mismatch");
    double worst = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        CVec v = a.col(j);
        CVec r = v;
        for (std::size_t k = 0; k < b.cols(); ++k) {
            const CVec bk = b.col(k);
            r = r - vdot(bk, v) * bk;
        }
        worst = std::max(worst, vnorm(r));
    }
    return worst;
}

namespace {

bool labels_match(const std::vector<cplx>& x, const std::vector<cplx>& y, double tol) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i].real() - y[i].real()) > tol) return false;
        if (std::abs(x[i].imag() - y[i].imag()) > tol) return false;
    }
    return true;
}

bool labels_lex_less(const std::vector<cplx>& x, const std::vector<cplx>& y, double tol) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].real() < y[i].real() - tol) return true;
        if (x[i].real() > y[i].real() + tol) return false;
        if (x[i].imag() < y[i].imag() - tol) return true;
        if (x[i].imag() > y[i].imag() + tol) return false;
    }
    return false;
}

} // namespace

JointDiagResult joint_diagonalize(const std::vector<CMatrix>& as, const Tolerances& tol) {
    if (as.empty()) throw InvalidArgument("joint_diagonalize needs at least one matrix");
    const std::size_t d = as[0].rows();
    for (const auto& a : as)
        if (!a.is_square() || a.rows() != d)
            throw InvalidArgument("joint_diagonalize: inputs must be square of equal size");
    JointDiagResult out;
    if (d == 0) return out;

    for (std::size_t i = 0; i < as.size(); ++i) {
        const double nd = normality_defect(as[i]);
        const double f = frobenius_norm(as[i]);
        if (nd > tol.normality * (1.0 + f * f))
            throw NotNormal("input " + std::to_string(i) + " has normality defect " + std::to_string(nd));
    }
    for (std::size_t i = 0; i < as.size(); ++i)
        for (std::size_t j = i + 1; j < as.size(); ++j) {
            const double cn = commutator_norm(as[i], as[j]);
            const double bound = tol.commuting * (1.0 + frobenius_norm(as[i]) * frobenius_norm(as[j]));
            if (cn > bound)
                throw NotCommuting("inputs " + std::to_string(i) + " and " + std::to_string(j) +
                                   " have commutator norm " + std::to_string(cn));
        }

    std::vector<CMatrix> parts;
    for (const auto& a : as) {
        const CMatrix ah = adjoint(a);
        parts.push_back(0.5 * (a + ah));
        parts.push_back(cplx(0.0, -0.5) * (a - ah));
    }

    std::vector<CMatrix> blocks = {CMatrix::identity(d)};
    for (const auto& h : parts) {
        std::vector<CMatrix> next;
        for (const auto& bb : blocks) {
            const std::size_t k = bb.cols();
            if (k <= 1) {
                next.push_back(bb);
                continue;
            }
            CMatrix m = adjoint(bb) * h * bb;
            for (std::size_t i = 0; i < k; ++i) // clean rounding noise off the Hermitian form
                for (std::size_t j = i; j < k; ++j) {
                    const cplx avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
                    m(i, j) = avg;
                    m(j, i) = std::conj(avg);
                }
            const EigResult e = hermitian_eig(m, tol);
            std::size_t start = 0;
            for (std::size_t j = 1; j <= k; ++j) {
                if (j == k || e.values[j] - e.values[j - 1] > tol.label_cluster) {
                    CMatrix sub(k, j - start);
                    for (std::size_t c = start; c < j; ++c)
                        for (std::size_t r = 0; r < k; ++r) sub(r, c - start) = e.vectors(r, c);
                    next.push_back(bb * sub);
                    start = j;
                }
            }
        }
        blocks = std::move(next);
    }

    auto block_labels = [&](const CMatrix& bb) {
        std::vector<cplx> lab(as.size());
        const CMatrix bh = adjoint(bb);
        for (std::size_t i = 0; i < as.size(); ++i)
            lab[i] = trace(bh * as[i] * bb) / static_cast<double>(bb.cols());
        return lab;
    };

    std::vector<std::vector<cplx>> labs;
    labs.reserve(blocks.size());
    for (const auto& bb : blocks) labs.push_back(block_labels(bb));

    // merge blocks whose whole label tuples agree
    std::vector<std::size_t> group(blocks.size());
    std::iota(group.begin(), group.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (group[x] != x) x = group[x] = group[group[x]];
        return x;
    };
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (labels_match(labs[i], labs[j], tol.label_cluster)) group[find(i)] = find(j);

    std::vector<CMatrix> merged;
    std::vector<std::vector<cplx>> mlabs;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (find(i) != i) continue;
        std::size_t total = 0;
        for (std::size_t j = 0; j < blocks.size(); ++j)
            if (find(j) == i) total += blocks[j].cols();
        CMatrix basis(d, total);
        std::size_t at = 0;
        for (std::size_t j = 0; j < blocks.size(); ++j)
            if (find(j) == i) {
                for (std::size_t c = 0; c < blocks[j].cols(); ++c)
                    basis.set_col(at++, blocks[j].col(c));
            }
        merged.push_back(basis);
        mlabs.push_back(block_labels(basis));
    }

    std::vector<std::size_t> order(merged.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return labels_lex_less(mlabs[x], mlabs[y], tol.label_cluster);
    });

    for (std::size_t oi : order) {
        out.projections.push_back(merged[oi] * adjoint(merged[oi]));
        out.labels.push_back(mlabs[oi]);
    }

    CMatrix sum(d, d);
    for (const auto& p : out.projections) sum = sum + p;
    const double sum_defect = frobenius_norm(sum - CMatrix::identity(d));
    if (sum_defect > tol.projection_sum)
        throw DidNotConverge("joint projections sum defect " + std::to_string(sum_defect));
    for (std::size_t i = 0; i < as.size(); ++i) {
        CMatrix rec(d, d);
        for (std::size_t k = 0; k < out.projections.size(); ++k)
            rec = rec + out.labels[k][i] * out.projections[k];
        const double rd = frobenius_norm(rec - as[i]);
        if (rd > tol.recombine * (1.0 + frobenius_norm(as[i])))
            throw DidNotConverge("joint recombination residual " + std::to_string(rd) +
                                 " on input " + std::to_string(i));
    }
    return out;
}

namespace {

// Kernel basis of a Hermitian positive semidefinite matrix, by diagonally
// pivoted Cholesky. eig_tol is an eigenvalue threshold: pivots at or below it
// count as zero, so it must sit above the numerical noise floor of the input
// (callers scale it by the largest diagonal entry).
std::vector<CVec> psd_nullspace(const CMatrix& m0, double eig_tol) {
    const std::size_t n = m0.rows();
    CMatrix w = m0;
    CMatrix l(n, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    const double stop = eig_tol;
    std::size_t rank = 0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        double bd = w(k, k).real();
        for (std::size_t j = k + 1; j < n; ++j)
            if (w(j, j).real() > bd) {
                bd = w(j, j).real();
                best = j;
            }
        if (bd <= stop) break;
        if (best != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w(k, j), w(best, j));
            for (std::size_t i = 0; i < n; ++i) std::swap(w(i, k), w(i, best));
            for (std::size_t j = 0; j < k; ++j) std::swap(l(k, j), l(best, j));
            std::swap(perm[k], perm[best]);
        }
        const double piv = std::sqrt(bd);
        l(k, k) = piv;
        for (std::size_t i = k + 1; i < n; ++i) l(i, k) = w(i, k) / piv;
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                w(i, j) -= l(i, k) * std::conj(l(j, k));
        ++rank;
    }

    std::vector<CVec> out;
    for (std::size_t t = rank; t < n; ++t) {
        const std::size_t c = perm[t];
        CVec y(rank);
        for (std::size_t i = 0; i < rank; ++i) {
            cplx s = m0(perm[i], c);
            for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * y[j];
            y[i] = s / l(i, i);
        }
        CVec x(rank);
        for (std::size_t ii = rank; ii-- > 0;) {
            cplx s = y[ii];
            for (std::size_t j = ii + 1; j < rank; ++j) s -= std::conj(l(j, ii)) * x[j];
            x[ii] = s / std::conj(l(ii, ii));
        }
        CVec v(n, 0.0);
        v[c] = 1.0;
        for (std::size_t i = 0; i < rank; ++i) v[perm[i]] = -x[i];
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace

std::vector<CMatrix> commutant_solve(const std::vector<CMatrix>& generators, const Tolerances& tol) {
    if (generators.empty())
        throw InvalidArgument("commutant_solve needs at least one generator");
    const std::size_t d = generators[0].rows();
    for (const auto& g : generators)
        if (!g.is_square() || g.rows() != d)
            throw InvalidArgument("commutant_solve: generators must be square of equal size");
    if (d == 0) return {};

    // Normal matrix of the stacked commutation constraints. Row (a,b) of the
    // constraint for G reads sum_{c,e} T(c,e) * (G(a,c) [e==b] - [c==a] G(e,b)),
    // which has at most 2d nonzeros, so the normal matrix is accumulated from
    // sparse outer products.
    const std::size_t n = d * d;
    CMatrix m(n, n);
    std::vector<std::pair<std::size_t, cplx>> row;
    for (const auto& g : generators) {
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                row.clear();
                for (std::size_t c = 0; c < d; ++c) row.emplace_back(c * d + b, g(a, c));
                for (std::size_t e = 0; e < d; ++e) {
                    if (e == b)
                        row[a].second -= g(b, b);
                    else
                        row.emplace_back(a * d + e, -g(e, b));
                }
                for (const auto& [i1, v1] : row) {
                    if (v1 == cplx{}) continue;
                    for (const auto& [i2, v2] : row) m(i1, i2) += std::conj(v1) * v2;
                }
            }
    }

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, m(i, i).real());
    const double eig_tol = tol.rank_rel * static_cast<double>(d) * std::max(scale, 1.0);
    std::vector<CVec> kernel = psd_nullspace(m, eig_tol);
    const Subspace s = orthonormalize(kernel, 1e-12);

    std::vector<CMatrix> basis;
    basis.reserve(s.dim());
    for (std::size_t j = 0; j < s.dim(); ++j) {
        CMatrix t(d, d);
        for (std::size_t c = 0; c < d; ++c)
            for (std::size_t e = 0; e < d; ++e) t(c, e) = s.basis(c * d + e, j);
        basis.push_back(std::move(t));
    }
    return basis;
}

} // namespace lochs
