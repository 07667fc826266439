#include <doctest.h>

#include "lochs/errors.hpp"
#include "lochs/loc_hilbert.hpp"

#include "corpus.hpp"

using namespace lochs;

TEST_CASE("hilbert chains must be nonempty and nondecreasing") {
    CHECK_NOTHROW(validate_hilbert_chain(HilbertChain{{1, 2, 2, 5}}));
    CHECK_THROWS_AS(validate_hilbert_chain(HilbertChain{{}}), InvalidChain);
    CHECK_THROWS_AS(validate_hilbert_chain(HilbertChain{{3, 2}}), InvalidChain);
}

TEST_CASE("local_inner pads the shorter vector with zeros") {
    const HilbertChain chain{{1, 3}};
    const LocalVector u{1, {cplx(2.0, 1.0)}};
    const LocalVector v{2, {cplx(1.0, 0.0), cplx(5.0, 0.0), cplx(-1.0, 0.0)}};
    // <u, v> = conj(2 + i) * 1, the tail of v is invisible to u
    CHECK(std::abs(local_inner(chain, u, v) - cplx(2.0, -1.0)) <= 1e-15);
    CHECK(std::abs(local_inner(chain, v, u) - cplx(2.0, 1.0)) <= 1e-15);
}

TEST_CASE("make_local_operator enforces the two-sided corner condition") {
    const HilbertChain chain{{1, 2}};
    CMatrix t1(1, 1);
    t1(0, 0) = 3.0;

    SUBCASE("nested diagonal blocks pass") {
        CMatrix t2(2, 2);
        t2(0, 0) = 3.0;
        t2(1, 1) = 7.0;
        CHECK_NOTHROW((void)make_local_operator(chain, {t1, t2}));
    }
    SUBCASE("corner mismatch fails") {
        CMatrix t2(2, 2);
        t2(0, 0) = 4.0;
        t2(1, 1) = 7.0;
        CHECK_THROWS_AS((void)make_local_operator(chain, {t1, t2}), NotLocallyBounded);
    }
    SUBCASE("an off-corner strip fails even with the corner right") {
        CMatrix t2(2, 2);
        t2(0, 0) = 3.0;
        t2(0, 1) = 1.0; // maps the complement into the level
        t2(1, 1) = 7.0;
        CHECK_THROWS_AS((void)make_local_operator(chain, {t1, t2}), NotLocallyBounded);
        CMatrix t3(2, 2);
        t3(0, 0) = 3.0;
        t3(1, 0) = 1.0; // maps the level out of itself
        t3(1, 1) = 7.0;
        CHECK_THROWS_AS((void)make_local_operator(chain, {t1, t3}), NotLocallyBounded);
    }
    SUBCASE("wrong block size fails") {
        CHECK_THROWS_AS((void)make_local_operator(chain, {t1, t1}), NotLocallyBounded);
    }
}

TEST_CASE("accepted blocks are canonicalized to exact corners and zero strips") {
    const HilbertChain chain{{2, 4}};
    corpus::Rng rng(31);
    CMatrix t1 = corpus::random_matrix(rng, 2, 2);
    CMatrix t2 = CMatrix::zero(4, 4);
    t2.set_block(0, 0, t1);
    t2.set_block(2, 2, corpus::random_matrix(rng, 2, 2));
    // perturb the strips just below the acceptance tolerance
    t2(0, 3) = cplx(5e-11, 0.0);
    t2(3, 0) = cplx(0.0, -5e-11);
    const LocalOperator t = make_local_operator(chain, {t1, t2});
    CHECK(t.block(2)(0, 3) == cplx(0.0, 0.0));
    CHECK(t.block(2)(3, 0) == cplx(0.0, 0.0));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(t.block(2)(i, j) == t.block(1)(i, j));
}

TEST_CASE("diagonal weight operator has level seminorm equal to the level index") {
    // T e_k = k e_k on dims (1, 2, ..., 8): the level-n norm is n, growing
    // without a uniform bound across levels
    std::vector<std::size_t> dims;
    std::vector<CMatrix> blocks;
    for (std::size_t n = 1; n <= 8; ++n) {
        dims.push_back(n);
        CMatrix b(n, n);
        for (std::size_t k = 0; k < n; ++k) b(k, k) = double(k + 1);
        blocks.push_back(b);
    }
    const LocalOperator t = make_local_operator(HilbertChain{dims}, blocks);
    for (std::size_t n = 1; n <= 8; ++n)
        CHECK(seminorm(t, n) == doctest::Approx(double(n)).epsilon(1e-12));
}

TEST_CASE("strong and weak seminorms at hand-computed values") {
    const HilbertChain chain{{1, 2}};
    CMatrix t1(1, 1);
    t1(0, 0) = 2.0;
    CMatrix t2(2, 2);
    t2(0, 0) = 2.0;
    t2(1, 1) = cplx(0.0, 3.0);
    const LocalOperator t = make_local_operator(chain, {t1, t2});

    const LocalVector u{2, {cplx(1.0), cplx(1.0)}};
    // ||T_2 u|| = ||(2, 3i)|| = sqrt(13)
    CHECK(sot_seminorm(t, u) == doctest::Approx(std::sqrt(13.0)).epsilon(1e-12));
    const LocalVector e1{1, {cplx(1.0)}};
    // |<e1, T u>| = |2|
    CHECK(wot_seminorm(t, e1, u) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("algebraic operations stay exactly locally bounded and act blockwise") {
    corpus::Rng rng(32);
    const HilbertChain chain{{2, 3, 6}};
    for (int trial = 0; trial < 20; ++trial) {
        const LocalOperator a = corpus::random_local_operator(rng, chain);
        const LocalOperator b = corpus::random_local_operator(rng, chain);
        const LocalOperator sum = add(a, b);
        const LocalOperator prod = compose(a, b);
        const LocalOperator sc = scale(cplx(0.0, 2.0), a);
        const LocalOperator adj = adjoint_op(a);
        for (std::size_t n = 1; n <= 3; ++n) {
            CHECK(max_abs(sum.block(n) - (a.block(n) + b.block(n))) == 0.0);
            CHECK(max_abs(prod.block(n) - a.block(n) * b.block(n)) <= 1e-14);
            CHECK(max_abs(sc.block(n) - cplx(0.0, 2.0) * a.block(n)) == 0.0);
            CHECK(max_abs(adj.block(n) - adjoint(a.block(n))) == 0.0);
        }
        // products of valid families remain valid: rebuilding never throws
        CHECK_NOTHROW((void)compose(prod, prod));
    }
}

TEST_CASE("operations on different chains are rejected") {
    corpus::Rng rng(33);
    const LocalOperator a = corpus::random_local_operator(rng, HilbertChain{{1, 2}});
    const LocalOperator b = corpus::random_local_operator(rng, HilbertChain{{2, 2}});
    CHECK_THROWS_AS((void)add(a, b), ChainMismatch);
    CHECK_THROWS_AS((void)compose(a, b), ChainMismatch);
}

TEST_CASE("seminorm level bounds are monotone for the corner family") {
    // p_m(T) <= p_n(T) for m <= n: the lower block is a compression of the
    // higher one in two-sided corner form
    corpus::Rng rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        const HilbertChain chain{{1, 3, 4, 7}};
        const LocalOperator t = corpus::random_local_operator(rng, chain);
        for (std::size_t n = 1; n + 1 <= 4; ++n)
            CHECK(seminorm(t, n) <= seminorm(t, n + 1) + 1e-10);
    }
}
