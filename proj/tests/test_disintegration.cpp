#include <doctest.h>

#include "lochs/dec_diag.hpp"
#include "lochs/disintegration.hpp"
#include "lochs/errors.hpp"

#include "corpus.hpp"
#include "oracles.hpp"

using namespace lochs;

namespace {

LocalOperator diag_operator(const HilbertChain& chain, const std::vector<std::vector<cplx>>& diags) {
    std::vector<CMatrix> blocks;
    for (const auto& d : diags) {
        CMatrix b(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) b(i, i) = d[i];
        blocks.push_back(b);
    }
    return make_local_operator(chain, blocks);
}

} // namespace

TEST_CASE("presentations require commuting normal generators on one chain") {
    const HilbertChain chain{{2}};
    CMatrix x(2, 2), z(2, 2), raise(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    raise(0, 1) = 1.0;
    const LocalOperator ox = make_local_operator(chain, {x});
    const LocalOperator oz = make_local_operator(chain, {z});
    CHECK_THROWS_AS((void)make_abelian_presentation(chain, {ox, oz}), NotAbelian);
    const LocalOperator oraise = make_local_operator(chain, {raise});
    CHECK_THROWS_AS((void)make_abelian_presentation(chain, {oraise}), NotNormal);
    CHECK_NOTHROW((void)make_abelian_presentation(chain, {ox}));
}

TEST_CASE("spectrum of a diagonal presentation matches the diagonal oracle") {
    const HilbertChain chain{{2, 3}};
    const LocalOperator t = diag_operator(chain, {{cplx(1.0), cplx(2.0)},
                                                  {cplx(1.0), cplx(2.0), cplx(2.0)}});
    const AbelianPresentation pres = make_abelian_presentation(chain, {t});
    const SpectrumModel model = build_spectrum(pres);
    REQUIRE(model.level_count() == 2);

    const auto oracle1 = oracle::diagonal_joint_spectrum({t.block(1)});
    const auto oracle2 = oracle::diagonal_joint_spectrum({t.block(2)});
    REQUIRE(model.levels[0].keys.size() == oracle1.size());
    REQUIRE(model.levels[1].keys.size() == oracle2.size());
    for (std::size_t i = 0; i < oracle2.size(); ++i) {
        CHECK(std::abs(model.levels[1].labels[i][0] - oracle2[i].first[0]) <= 1e-9);
        CHECK(oracle::projection_rank(model.levels[1].projections[i]) == oracle2[i].second);
    }
    // keys persist across levels: the level-1 points reappear at level 2
    for (const auto& key : model.levels[0].keys)
        CHECK(model.index_at(2, key) != SpectrumModel::npos);
    // birth levels
    for (const auto& [key, born] : model.birth) {
        (void)key;
        CHECK(born == 1); // both eigenvalues already occur at level 1
    }
    // the spectrum is a counting-measure chain of singletons
    const MeasureChain sm = model.measure();
    CHECK(validate_measure_chain(sm).pass);
    for (const auto& [p, w] : sm.weights) {
        (void)p;
        CHECK(w == Rat(1));
    }
}

TEST_CASE("spectral densities against hand values") {
    const HilbertChain chain{{2}};
    const LocalOperator t = diag_operator(chain, {{cplx(1.0), cplx(2.0)}});
    const SpectrumModel model = build_spectrum(make_abelian_presentation(chain, {t}));
    REQUIRE(model.levels[0].keys.size() == 2);
    const std::string key1 = model.levels[0].keys[0]; // eigenvalue 1
    const CVec xi = {cplx(1.0), cplx(1.0)};
    const CVec eta = {cplx(0.0, 2.0), cplx(3.0)};
    // E_1 projects onto the first coordinate: <xi, E eta> = conj(1) * 2i = 2i
    CHECK(std::abs(rn_density(model, 1, xi, eta, key1) - cplx(0.0, 2.0)) <= 1e-12);
    CHECK_THROWS_AS((void)rn_density(model, 1, xi, eta, "no-such-key"), UnknownName);

    // a point born at level 2 carries no mass at level 1
    const HilbertChain grow{{1, 2}};
    const LocalOperator g = diag_operator(grow, {{cplx(1.0)}, {cplx(1.0), cplx(5.0)}});
    const SpectrumModel gm = build_spectrum(make_abelian_presentation(grow, {g}));
    REQUIRE(gm.levels[1].keys.size() == 2);
    std::string late;
    for (const auto& [key, born] : gm.birth)
        if (born == 2) late = key;
    REQUIRE(!late.empty());
    const CVec one = {cplx(1.0)};
    CHECK_THROWS_AS((void)rn_density(gm, 1, one, one, late), ZeroWeightPoint);
}

TEST_CASE("fiber dimensions equal spectral projection ranks") {
    corpus::Rng rng(61);
    for (int trial = 0; trial < 15; ++trial) {
        const AbelianPresentation pres = corpus::random_presentation(rng, 10, 3, 2);
        const SpectrumModel model = build_spectrum(pres);
        const FiberModel fm = build_fiber_model(model);
        for (std::size_t n = 1; n <= model.level_count(); ++n) {
            const SpectrumLevel& lv = model.levels[n - 1];
            for (std::size_t i = 0; i < lv.keys.size(); ++i) {
                const std::size_t rank = oracle::projection_rank(lv.projections[i]);
                CHECK(fm.family.fiber_dims.at(lv.keys[i])[n - 1] == rank);
            }
        }
    }
}

TEST_CASE("fiber bases are flag-adapted to the level filtration") {
    corpus::Rng rng(62);
    for (int trial = 0; trial < 10; ++trial) {
        const AbelianPresentation pres = corpus::random_presentation(rng, 10, 3, 2);
        const SpectrumModel model = build_spectrum(pres);
        const FiberModel fm = build_fiber_model(model);
        const std::size_t top = model.level_count();
        for (const auto& [key, basis] : fm.bases) {
            // the first rank(E_n) columns span range(E_n) for every level n
            for (std::size_t n = model.birth.at(key); n <= top; ++n) {
                const std::size_t idx = model.index_at(n, key);
                if (idx == SpectrumModel::npos) continue;
                const CMatrix& e = model.levels[n - 1].projections[idx];
                const std::size_t rank = oracle::projection_rank(e);
                const std::size_t dn = pres.chain.dims[n - 1];
                CMatrix lead(pres.chain.dims[top - 1], rank);
                for (std::size_t i = 0; i < lead.rows(); ++i)
                    for (std::size_t k = 0; k < rank; ++k) lead(i, k) = basis(i, k);
                // those columns live inside the level and are reproduced by E_n
                for (std::size_t k = 0; k < rank; ++k) {
                    CVec col(dn);
                    for (std::size_t i = 0; i < dn; ++i) col[i] = lead(i, k);
                    for (std::size_t i = dn; i < lead.rows(); ++i)
                        CHECK(std::abs(lead(i, k)) <= 1e-9);
                    const CVec image = e * col;
                    double diff = 0.0;
                    for (std::size_t i = 0; i < dn; ++i) diff = std::max(diff, std::abs(image[i] - col[i]));
                    CHECK(diff <= 1e-8);
                }
            }
        }
    }
}

TEST_CASE("the assembled map is unitary level by level and respects inclusions") {
    corpus::Rng rng(63);
    for (int trial = 0; trial < 10; ++trial) {
        const AbelianPresentation pres = corpus::random_presentation(rng, 12, 3, 3);
        const SpectrumModel model = build_spectrum(pres);
        const Disintegration dis = build_isometry(model, build_fiber_model(model));
        for (std::size_t n = 1; n <= model.level_count(); ++n) {
            const CMatrix& w = dis.w[n - 1];
            CHECK(max_abs(adjoint(w) * w - CMatrix::identity(w.cols())) <= 1e-8);
            CHECK(max_abs(w * adjoint(w) - CMatrix::identity(w.rows())) <= 1e-8);
            if (n >= 2) {
                const CMatrix emb = dis.integral.embedding(n - 1, n);
                const CMatrix& wp = dis.w[n - 2];
                CMatrix lead(w.rows(), wp.cols());
                for (std::size_t i = 0; i < w.rows(); ++i)
                    for (std::size_t k = 0; k < wp.cols(); ++k) lead(i, k) = w(i, k);
                CHECK(max_abs(lead - emb * wp) <= 1e-9);
            }
        }
    }
}

TEST_CASE("cross terms of the norm identity vanish and the new-class sum is the norm") {
    corpus::Rng rng(64);
    for (int trial = 0; trial < 10; ++trial) {
        const AbelianPresentation pres = corpus::random_presentation(rng, 12, 3, 2);
        const SpectrumModel model = build_spectrum(pres);
        for (std::size_t n = 1; n <= model.level_count(); ++n) {
            const CVec h = corpus::random_vector(rng, pres.chain.dims[n - 1]);
            const CrossTerms ct = isometry_cross_terms(model, n, h);
            CHECK(std::abs(ct.i2) <= 1e-9 * (1.0 + ct.h_norm_sq));
            CHECK(std::abs(ct.i3) <= 1e-9 * (1.0 + ct.h_norm_sq));
            CHECK(std::abs(ct.i4) <= 1e-9 * (1.0 + ct.h_norm_sq));
            CHECK(std::abs(ct.i1 - cplx(ct.h_norm_sq)) <= 1e-8 * (1.0 + ct.h_norm_sq));
        }
    }
}

TEST_CASE("multiplication operators form a unital *-homomorphism") {
    const HilbertChain chain{{2, 3}};
    const LocalOperator t = diag_operator(chain, {{cplx(1.0), cplx(2.0)},
                                                  {cplx(1.0), cplx(2.0), cplx(5.0)}});
    const SpectrumModel model = build_spectrum(make_abelian_presentation(chain, {t}));
    const Disintegration dis = build_isometry(model, build_fiber_model(model));

    std::map<std::string, cplx> f, g;
    const auto& top = model.levels[model.level_count() - 1];
    for (std::size_t i = 0; i < top.keys.size(); ++i) {
        f[top.keys[i]] = cplx(double(i) + 1.0, 0.5);
        g[top.keys[i]] = cplx(2.0 - double(i), -1.0);
    }
    const LocalOperator tf = tau(dis, f), tg = tau(dis, g);
    // unital: tau(1) = I
    std::map<std::string, cplx> ones;
    for (const auto& k : top.keys) ones[k] = cplx(1.0);
    const LocalOperator ti = tau(dis, ones);
    for (std::size_t n = 1; n <= 2; ++n)
        CHECK(max_abs(ti.block(n) - CMatrix::identity(chain.dims[n - 1])) <= 1e-10);
    // multiplicative and adjoint-compatible
    std::map<std::string, cplx> fg, fbar;
    for (const auto& k : top.keys) {
        fg[k] = f[k] * g[k];
        fbar[k] = std::conj(f[k]);
    }
    const LocalOperator lhs = compose(tf, tg);
    const LocalOperator rhs = tau(dis, fg);
    for (std::size_t n = 1; n <= 2; ++n) CHECK(max_abs(lhs.block(n) - rhs.block(n)) <= 1e-9);
    const LocalOperator adj = adjoint_op(tf);
    const LocalOperator tfb = tau(dis, fbar);
    for (std::size_t n = 1; n <= 2; ++n) CHECK(max_abs(adj.block(n) - tfb.block(n)) <= 1e-9);
}

TEST_CASE("conjugation by the assembled map diagonalizes every generator") {
    corpus::Rng rng(65);
    for (int trial = 0; trial < 8; ++trial) {
        const AbelianPresentation pres = corpus::random_presentation(rng, 12, 3, 3);
        const SpectrumModel model = build_spectrum(pres);
        const Disintegration dis = build_isometry(model, build_fiber_model(model));
        const ConjugationReport rep = verify_conjugation(dis);
        CHECK(rep.pass);
        CHECK(rep.conjugation_residual <= 1e-9);
        for (double r : rep.generator_label_residuals) CHECK(r <= 1e-7);
        CHECK(rep.tau_unital <= 1e-9);
        CHECK(rep.tau_mult <= 1e-9);
        CHECK(rep.tau_adjoint <= 1e-9);
        CHECK(rep.span_defect == 0.0);
        CHECK(rep.failures.empty());
    }
}

TEST_CASE("scalar presentations produce a one-point spectrum and a unitary line bundle") {
    const HilbertChain chain{{1, 2}};
    std::vector<CMatrix> blocks = {CMatrix::identity(1), CMatrix::identity(2)};
    const LocalOperator id = make_local_operator(chain, {cplx(3.0) * blocks[0], cplx(3.0) * blocks[1]});
    const SpectrumModel model = build_spectrum(make_abelian_presentation(chain, {id}));
    REQUIRE(model.levels[0].keys.size() == 1);
    REQUIRE(model.levels[1].keys.size() == 1);
    const Disintegration dis = build_isometry(model, build_fiber_model(model));
    // one fiber whose dimension is the whole level
    CHECK(dis.integral.layout(2).total_dim == 2);
    CHECK(max_abs(adjoint(dis.w[1]) * dis.w[1] - CMatrix::identity(2)) <= 1e-10);
    const ConjugationReport rep = verify_conjugation(dis);
    CHECK(rep.pass);
}

namespace {

// columns are the vectorized matrices
CMatrix vectorized(const std::vector<CMatrix>& mats) {
    const std::size_t d = mats.empty() ? 0 : mats[0].rows();
    CMatrix out(d * d, mats.size());
    for (std::size_t j = 0; j < mats.size(); ++j)
        for (std::size_t i = 0; i < d * d; ++i) out(i, j) = mats[j](i / d, i % d);
    return out;
}

// independent spanning set of the given matrices, by orthonormalization
std::vector<CMatrix> matrix_span_basis(const std::vector<CMatrix>& mats) {
    const std::size_t d = mats.empty() ? 0 : mats[0].rows();
    std::vector<CVec> vecs;
    for (const auto& m : mats) {
        CVec v(d * d);
        for (std::size_t i = 0; i < d * d; ++i) v[i] = m(i / d, i % d);
        vecs.push_back(std::move(v));
    }
    const Subspace s = orthonormalize(vecs, 1e-10);
    std::vector<CMatrix> basis;
    for (std::size_t j = 0; j < s.dim(); ++j) {
        CMatrix m(d, d);
        for (std::size_t i = 0; i < d * d; ++i) m(i / d, i % d) = s.basis(i, j);
        basis.push_back(std::move(m));
    }
    return basis;
}

// closure of the unital span of the given matrices under multiplication
std::vector<CMatrix> algebra_closure(const std::vector<CMatrix>& gens) {
    const std::size_t d = gens.empty() ? 0 : gens[0].rows();
    std::vector<CMatrix> seed = {CMatrix::identity(d)};
    seed.insert(seed.end(), gens.begin(), gens.end());
    std::vector<CMatrix> basis = matrix_span_basis(seed);
    for (;;) {
        std::vector<CMatrix> grown = basis;
        for (const auto& b : basis)
            for (const auto& g : gens) grown.push_back(b * g);
        std::vector<CMatrix> next = matrix_span_basis(grown);
        if (next.size() == basis.size()) return basis;
        basis = std::move(next);
    }
}

} // namespace

TEST_CASE("round trip: the conjugated algebra fills the diagonal image and its commutant") {
    corpus::Rng rng(77);
    for (int trial = 0; trial < 6; ++trial) {
        const AbelianPresentation pres = corpus::random_presentation(rng, 10, 3, 2);
        const SpectrumModel model = build_spectrum(pres);
        const Disintegration dis = build_isometry(model, build_fiber_model(model));

        // the spectrum chain has singleton atoms, so equality must hold everywhere
        const EqualityReport eq = check_dec_equals_diag_commutant(dis.integral);
        CHECK(eq.pass);
        for (const auto& lv : eq.levels) {
            CHECK(lv.separated);
            CHECK(lv.equal);
        }

        // the algebra generated by the conjugated generators spans the full
        // diagonal image at every level
        for (std::size_t n = 1; n <= model.level_count(); ++n) {
            const CMatrix& w = dis.w[n - 1];
            if (w.rows() == 0) continue;
            std::vector<CMatrix> conj;
            for (const auto& g : pres.generators) conj.push_back(w * g.block(n) * adjoint(w));
            const std::vector<CMatrix> generated = algebra_closure(conj);
            const LevelAlgebra diag = diag_level_algebra(dis.integral, n);
            REQUIRE(generated.size() == diag.basis.size());
            const CMatrix a = vectorized(generated), b = vectorized(diag.basis);
            CHECK(span_containment_residual(a, b) <= 1e-8);
            CHECK(span_containment_residual(b, a) <= 1e-8);
        }
    }
}
