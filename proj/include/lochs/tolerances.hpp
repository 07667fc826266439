#pragma once

#include <cstddef>

namespace lochs {

// Every numeric threshold used anywhere in the library, in one record.
// Operations take a `const Tolerances&` (defaulted); nothing reads the
// environment. The CLI can overlay fields from a JSON file.
//
// Unless noted otherwise, residuals on matrices are Frobenius norms and
// element-wise checks are max-abs. "rel" thresholds are scaled by
// (1 + size of the data) at the point of use.
struct Tolerances {
    // hermitian_eig
    double hermitian_input = 1e-10;  // max-abs of A - A^H on input
    double eig_residual = 1e-9;      // ||AV - V diag|| <= eig_residual*(1+||A||_F)
    double unitarity = 1e-10;        // max-abs of V^H V - I

    // joint_diagonalize
    double commuting = 1e-8;         // ||AB-BA||_F <= commuting*(1+||A||_F*||B||_F)
    double normality = 1e-10;        // ||A^H A - A A^H||_F <= normality*(1+||A||_F^2)
    double label_cluster = 1e-7;     // eigenvalue gap that separates joint blocks
    double projection_sum = 1e-9;    // ||sum P - I||_F
    double recombine = 1e-8;         // ||A - sum label*P||_F <= recombine*(1+||A||_F)

    // rank decisions (orthonormalize default, commutant kernel, Gram kernels)
    double rank_rel = 1e-9;

    // locally bounded operators
    double local_block = 1e-10;      // max-abs defect of nested upper-left blocks

    // decomposable / diagonalizable classification
    double fiber_block = 1e-9;       // off-fiber-block entries below this are noise
    double scalar_block = 1e-9;      // ||B - c*I||_max <= scalar_block*(1+|c|)
    double compress_hom = 1e-10;     // compression compatibility residual
    double span_contain = 1e-8;      // mutual span containment residual
    double dilation = 1e-10;         // power dilation identity residual

    // disintegration
    double isometry = 1e-8;          // ||W^H W - I||_F and surjectivity defect
    double prefix_compat = 1e-9;     // level restriction of W agrees with earlier W
    double cross_term = 1e-9;        // telescoping cross terms of the norm identity
    double tau_hom = 1e-9;           // multiplicativity/adjoint defects of tau
    double label_match = 1e-7;       // spectral label matching across levels
    double diagram = 1e-8;           // restriction diagram commutes

    // generic numeric equality in reports
    double float_eq = 1e-12;
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace lochs
