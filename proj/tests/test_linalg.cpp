#include <doctest.h>

#include "lochs/errors.hpp"
#include "lochs/linalg.hpp"

#include "corpus.hpp"
#include "oracles.hpp"

using namespace lochs;

TEST_CASE("hermitian_eig matches the 2x2 closed form") {
    // frozen instances, eigenvalues from the closed form (a+c)/2 +- sqrt(((a-c)/2)^2 + |b|^2)
    struct Case {
        double a, c;
        cplx b;
    };
    const Case cases[] = {
        {2.0, -1.0, cplx(0.5, -0.25)},
        {0.0, 0.0, cplx(0.0, 1.0)},
        {5.0, 5.0, cplx(0.0, 0.0)},
        {-3.0, 4.0, cplx(2.0, 2.0)},
    };
    for (const auto& cs : cases) {
        CMatrix m(2, 2);
        m(0, 0) = cs.a;
        m(0, 1) = cs.b;
        m(1, 0) = std::conj(cs.b);
        m(1, 1) = cs.c;
        const auto [lo, hi] = oracle::eig2(cs.a, cs.b, cs.c);
        const EigResult r = hermitian_eig(m);
        REQUIRE(r.values.size() == 2);
        CHECK(r.values[0] == doctest::Approx(lo).epsilon(1e-12));
        CHECK(r.values[1] == doctest::Approx(hi).epsilon(1e-12));
    }
    corpus::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double a = corpus::uniform(rng), c = corpus::uniform(rng);
        const cplx b = corpus::random_entry(rng);
        CMatrix m(2, 2);
        m(0, 0) = a;
        m(0, 1) = b;
        m(1, 0) = std::conj(b);
        m(1, 1) = c;
        const auto [lo, hi] = oracle::eig2(a, b, c);
        const EigResult r = hermitian_eig(m);
        CHECK(std::abs(r.values[0] - lo) <= 1e-10);
        CHECK(std::abs(r.values[1] - hi) <= 1e-10);
    }
}

TEST_CASE("hermitian_eig residual, unitarity, and ordering on random matrices") {
    corpus::Rng rng(12);
    for (int i = 0; i < 40; ++i) {
        const std::size_t d = corpus::pick(rng, 1, 10);
        const CMatrix a = corpus::random_hermitian(rng, d);
        const EigResult r = hermitian_eig(a);
        for (std::size_t k = 0; k + 1 < d; ++k) CHECK(r.values[k] <= r.values[k + 1] + 1e-14);
        CHECK(max_abs(adjoint(r.vectors) * r.vectors - CMatrix::identity(d)) <= 1e-10);
        CMatrix lam(d, d);
        for (std::size_t k = 0; k < d; ++k) lam(k, k) = r.values[k];
        CHECK(frobenius_norm(a * r.vectors - r.vectors * lam) <= 1e-9 * (1.0 + frobenius_norm(a)));
    }
}

TEST_CASE("hermitian_eig rejects non-hermitian input") {
    CMatrix m(2, 2);
    m(0, 1) = cplx(1.0, 0.0);
    CHECK_THROWS_AS((void)hermitian_eig(m), NonHermitian);
}

TEST_CASE("operator_norm on known matrices") {
    CMatrix a(1, 1);
    a(0, 0) = cplx(-3.0, 4.0);
    CHECK(operator_norm(a) == doctest::Approx(5.0).epsilon(1e-12)); // |-3+4i|

    CMatrix nilpotent(2, 2);
    nilpotent(0, 1) = 2.0;
    CHECK(operator_norm(nilpotent) == doctest::Approx(2.0).epsilon(1e-12));

    // rotation by 30 degrees is unitary: norm one
    CMatrix u(2, 2);
    const double th = 0.5235987755982988;
    u(0, 0) = std::cos(th);
    u(0, 1) = -std::sin(th);
    u(1, 0) = std::sin(th);
    u(1, 1) = std::cos(th);
    CHECK(operator_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orthonormalize keeps accepted prefixes and drops dependent vectors") {
    // e1, e1+e2, e1 -> two orthonormal vectors, first stays along e1
    std::vector<CVec> vs = {
        {cplx(2.0), cplx(0.0), cplx(0.0)},
        {cplx(1.0), cplx(1.0), cplx(0.0)},
        {cplx(3.0), cplx(0.0), cplx(0.0)},
    };
    const Subspace sub = orthonormalize(vs, 1e-10);
    REQUIRE(sub.dim() == 2);
    const CVec b0 = sub.basis.col(0), b1 = sub.basis.col(1);
    CHECK(std::abs(vnorm(b0) - 1.0) <= 1e-12);
    CHECK(std::abs(vdot(b0, b1)) <= 1e-12);
    CHECK(std::abs(std::abs(b0[0]) - 1.0) <= 1e-12);
}

TEST_CASE("span containment residual separates contained from independent") {
    CMatrix big(3, 2);
    big(0, 0) = 1.0;
    big(1, 1) = 1.0;
    CMatrix inside(3, 1);
    inside(0, 0) = 1.0;
    inside(1, 0) = 2.0;
    CHECK(span_containment_residual(inside, big) <= 1e-12);
    CMatrix outside(3, 1);
    outside(2, 0) = 1.0;
    CHECK(span_containment_residual(outside, big) >= 0.9);
}

TEST_CASE("joint_diagonalize of commuting diagonal matrices matches the diagonal oracle") {
    corpus::Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = corpus::pick(rng, 2, 8);
        const std::size_t g = corpus::pick(rng, 1, 3);
        // small integer diagonals so collisions (shared labels) actually occur
        std::vector<CMatrix> gens;
        for (std::size_t k = 0; k < g; ++k) {
            CMatrix m(d, d);
            for (std::size_t i = 0; i < d; ++i)
                m(i, i) = cplx(double(corpus::pick(rng, 0, 2)), double(corpus::pick(rng, 0, 1)));
            gens.push_back(m);
        }
        const auto expected = oracle::diagonal_joint_spectrum(gens);
        const JointDiagResult r = joint_diagonalize(gens);
        REQUIRE(r.projections.size() == expected.size());
        CMatrix sum(d, d);
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(oracle::projection_rank(r.projections[i]) == expected[i].second);
            for (std::size_t k = 0; k < r.labels[i].size(); ++k)
                CHECK(std::abs(r.labels[i][k] - expected[i].first[k]) <= 1e-9);
            sum = sum + r.projections[i];
        }
        CHECK(max_abs(sum - CMatrix::identity(d)) <= 1e-9);
        // recombination: sum of label * projection returns each generator
        for (std::size_t k = 0; k < g; ++k) {
            CMatrix rec(d, d);
            for (std::size_t i = 0; i < r.projections.size(); ++i)
                rec = rec + r.labels[i][k] * r.projections[i];
            CHECK(max_abs(rec - gens[k]) <= 1e-8 * (1.0 + max_abs(gens[k])));
        }
    }
}

TEST_CASE("joint_diagonalize handles dense commuting normal families") {
    corpus::Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = corpus::pick(rng, 2, 10);
        const CMatrix h = corpus::random_hermitian(rng, d);
        // two commuting normal matrices: h and a complex polynomial of h
        const CMatrix p = cplx(0.0, 1.0) * (h * h) + cplx(2.0, 0.0) * h;
        const JointDiagResult r = joint_diagonalize({h, p});
        CMatrix sum(d, d);
        for (std::size_t i = 0; i < r.projections.size(); ++i) {
            const CMatrix& e = r.projections[i];
            CHECK(max_abs(e * e - e) <= 1e-8);
            CHECK(max_abs(e - adjoint(e)) <= 1e-8);
            sum = sum + e;
        }
        CHECK(max_abs(sum - CMatrix::identity(d)) <= 1e-9);
        CMatrix rec(d, d);
        for (std::size_t i = 0; i < r.projections.size(); ++i)
            rec = rec + r.labels[i][0] * r.projections[i];
        CHECK(max_abs(rec - h) <= 1e-8 * (1.0 + max_abs(h)));
    }
}

TEST_CASE("joint_diagonalize rejects non-commuting input") {
    CMatrix x(2, 2), z(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    CHECK_THROWS_AS((void)joint_diagonalize({x, z}), NotCommuting);
}

TEST_CASE("commutant_solve dimension matches the dense Gaussian oracle") {
    corpus::Rng rng(15);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = corpus::pick(rng, 1, 6);
        std::vector<CMatrix> gens;
        const std::size_t g = corpus::pick(rng, 1, 2);
        for (std::size_t k = 0; k < g; ++k) {
            // diagonal with small integer entries: commutant dimension is the
            // sum of squared multiplicities, and the oracle sees it too
            CMatrix m(d, d);
            for (std::size_t i = 0; i < d; ++i) m(i, i) = double(corpus::pick(rng, 0, 2));
            gens.push_back(m);
        }
        const auto basis = commutant_solve(gens);
        CHECK(basis.size() == oracle::commutant_dim_gauss(gens, d));
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (const auto& gmat : gens)
                CHECK(frobenius_norm(gmat * basis[i] - basis[i] * gmat) <= 1e-8);
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const cplx ip = trace(adjoint(basis[i]) * basis[j]);
                CHECK(std::abs(ip - (i == j ? cplx(1.0) : cplx(0.0))) <= 1e-8);
            }
        }
    }
}

TEST_CASE("commutant of a generic hermitian is its polynomial algebra") {
    corpus::Rng rng(16);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = corpus::pick(rng, 2, 6);
        const CMatrix h = corpus::random_hermitian(rng, d);
        // distinct eigenvalues almost surely: commutant dimension d
        const auto basis = commutant_solve({h});
        CHECK(basis.size() == d);
        CHECK(basis.size() == oracle::commutant_dim_gauss({h}, d));
    }
}

TEST_CASE("double commutant of a commutant basis has the same dimension") {
    corpus::Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = corpus::pick(rng, 2, 5);
        CMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = double(corpus::pick(rng, 0, 1));
        const auto first = commutant_solve({m});
        const auto second = commutant_solve(first);
        const auto third = commutant_solve(second);
        CHECK(second.size() <= first.size());
        CHECK(third.size() == first.size());
    }
}

TEST_CASE("vdot conjugates its first argument") {
    const CVec u = {cplx(0.0, 1.0)};
    const CVec v = {cplx(2.0, 0.0)};
    CHECK(std::abs(vdot(u, v) - cplx(0.0, -2.0)) <= 1e-15);
}
