#include <gtest/gtest.h>

#include "hfree/brackets.hpp"
#include "hfree/constructions.hpp"
#include "hfree/error.hpp"
#include "hfree/gallery.hpp"
#include "hfree/sampling.hpp"
#include "support.hpp"

namespace hfree {
namespace {

std::vector<Expr> exprs(std::initializer_list<std::string_view> src) {
    std::vector<Expr> v;
    for (auto s : src) v.push_back(parse(s));
    return v;
}

/// Oracle for ρ(A): ρ(A)·vec(H) = vec(A H Aᵀ) on symmetric H, with vec listing
/// H_cd for c ≤ d.
Eigen::MatrixXd congruence_oracle(const Eigen::MatrixXd& a) {
    const auto k = a.rows();
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index d = c; d < k; ++d) pairs.emplace_back(c, d);
    }
    const auto s = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd rho(s, s);
    for (Eigen::Index col = 0; col < s; ++col) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k, k);
        h(pairs[col].first, pairs[col].second) = 1.0;
        h(pairs[col].second, pairs[col].first) = 1.0;
        const Eigen::MatrixXd image = a * h * a.transpose();
        for (Eigen::Index row = 0; row < s; ++row) rho(row, col) = image(pairs[row].first, pairs[row].second);
    }
    return rho;
}

TEST(MonomialFreeMap, Examples) {
    const SmoothMap f1 = monomial_free_map(1);
    EXPECT_EQ(f1(std::vector<double>{2}), (Point{2, 4}));
    const SmoothMap f2 = monomial_free_map(2);
    EXPECT_EQ(f2(std::vector<double>{1, 2}), (Point{1, 2, 1, 2, 4}));
    EXPECT_EQ(f2(std::vector<double>{0, 0}), (Point{0, 0, 0, 0, 0}));
    const JetMatrix d2 = d2_matrix(standard_frame(f2.chart()), f2, std::vector<double>{0, 0});
    EXPECT_NEAR(*rank_check(d2).det, 32.0, 1e-12);
    EXPECT_EQ(monomial_free_map(3).target_dim(), 9U);
}

TEST(MonomialFreeMap, FreeEverywhere) {
    for (std::size_t m = 1; m <= 3; ++m) {
        const SmoothMap f = monomial_free_map(m);
        const Frame std_frame = standard_frame(f.chart());
        for (const auto& p : sample_points(f.chart(), RandomPlan{200, m})) ASSERT_TRUE(is_free_at(std_frame, f, p));
    }
}

TEST(Compose, Examples) {
    const Chart plane = Chart::euclidean({"x", "y"});
    const SmoothMap g(plane, exprs({"y*exp(x)"}));
    const SmoothMap fg = compose(monomial_free_map(1), g);
    ASSERT_EQ(fg.target_dim(), 2U);
    EXPECT_EQ(fg.chart(), plane);
    test::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto p = rng.point(2);
        const double gv = p[1] * std::exp(p[0]);
        const Point v = fg(p);
        EXPECT_LE(test::rel_diff(v[0], gv), 1e-15);
        EXPECT_LE(test::rel_diff(v[1], p[1] * p[1] * std::exp(2 * p[0])), 1e-14);
    }

    const Chart q3 = Chart::euclidean({"a", "b", "c"});
    const SmoothMap identity(q3, exprs({"a", "b", "c"}));
    const SmoothMap f(plane, exprs({"x*y", "sin(x)", "y^2"}));
    const SmoothMap same = compose(identity, f);
    for (int i = 0; i < 20; ++i) {
        const auto p = rng.point(2);
        EXPECT_EQ(same(p), f(p));
    }

    const SmoothMap contact = compose(monomial_free_map(2), contact_projection(1));
    const std::vector<double> p{0.5, -1.5, 0.25};
    EXPECT_EQ(contact(p), (Point{0.5, -1.5, 0.25, -0.75, 2.25}));

    EXPECT_THROW(compose(identity, g), DimensionError);
}

TEST(SymSquare, Examples) {
    Eigen::MatrixXd three(1, 1);
    three << 3;
    EXPECT_EQ(sym_square(three)(0, 0), 9.0);
    for (int k = 1; k <= 4; ++k) {
        const auto s = static_cast<Eigen::Index>(pair_count(static_cast<std::size_t>(k)));
        EXPECT_EQ(sym_square(Eigen::MatrixXd::Identity(k, k)), Eigen::MatrixXd::Identity(s, s));
    }
    Eigen::MatrixXd d(2, 2);
    d << 2, 0, 0, 3;
    const Eigen::MatrixXd r = sym_square(d);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(3, 3);
    expect(0, 0) = 4;
    expect(1, 1) = 6;
    expect(2, 2) = 9;
    EXPECT_EQ(r, expect);
    EXPECT_NEAR(test::permutation_det(r), 216.0, 1e-12);
}

TEST(SymSquare, MatchesCongruenceOracle) {
    test::Rng rng(17);
    for (int k = 1; k <= 4; ++k) {
        for (int n = 0; n < 50; ++n) {
            const Eigen::MatrixXd a = rng.matrix(k, k);
            const Eigen::MatrixXd diff = sym_square(a) - congruence_oracle(a);
            ASSERT_LE(diff.cwiseAbs().maxCoeff(), 1e-13);
        }
    }
}

TEST(SymSquare, RepresentationLaws) {
    test::Rng rng(19);
    for (int k = 1; k <= 4; ++k) {
        for (int n = 0; n < 100; ++n) {
            const Eigen::MatrixXd a = rng.matrix(k, k);
            const Eigen::MatrixXd b = rng.matrix(k, k);
            const double lhs = test::permutation_det(sym_square(a));
            const double rhs = std::pow(test::permutation_det(a), k + 1);
            ASSERT_LE(test::rel_diff(lhs, rhs), 1e-10) << "k=" << k;
            const Eigen::MatrixXd ab = sym_square(a * b);
            const Eigen::MatrixXd prod = sym_square(a) * sym_square(b);
            for (Eigen::Index i = 0; i < ab.rows(); ++i) {
                for (Eigen::Index j = 0; j < ab.cols(); ++j) ASSERT_LE(test::rel_diff(ab(i, j), prod(i, j)), 1e-10);
            }
        }
    }
}

TEST(BlockDecomposition, PlanarAtOrigin) {
    const Fixture fx = fixture("planar-hamiltonian");
    const std::vector<double> origin{0, 0};
    const BlockDecomposition b = block_decomposition(*fx.frame, *fx.immersion, monomial_free_map(1), origin);
    EXPECT_EQ(b.d1(0, 0), 1.0);
    EXPECT_EQ(b.d(0, 0), 1.0);
    EXPECT_LE(b.block_law_residual(), 1e-12);
    // Independent reproduction: D₂(F∘f) from the composed map directly.
    const JetMatrix direct = d2_matrix(*fx.frame, *fx.free_map, origin);
    EXPECT_LE((direct.entries - b.d2_composite).cwiseAbs().maxCoeff(), 1e-14);

    const IdentityResidual id = verify_det_identity(*fx.frame, *fx.immersion, monomial_free_map(1), origin);
    EXPECT_NEAR(id.lhs, 4.0, 1e-12);
    EXPECT_NEAR(id.rhs, 4.0, 1e-12);
    EXPECT_TRUE(id.passed);
}

TEST(BlockDecomposition, IdentityMapHasZeroC) {
    const Chart c = Chart::euclidean({"x", "y"});
    const SmoothMap id(c, exprs({"x", "y"}));
    const BlockDecomposition b = block_decomposition(standard_frame(c), id, monomial_free_map(2), std::vector<double>{0.3, 0.4});
    EXPECT_EQ(b.c, Eigen::MatrixXd::Zero(3, 2));
    EXPECT_EQ(b.d, Eigen::MatrixXd::Identity(3, 3));
}

TEST(DetIdentity, DegenerateImmersionBothSidesVanish) {
    const Chart c = Chart::euclidean({"x", "y"});
    const SmoothMap f(c, exprs({"x^2", "y"}));
    const IdentityResidual id = verify_det_identity(standard_frame(c), f, monomial_free_map(2), std::vector<double>{0, 0.5});
    EXPECT_EQ(id.rhs, 0.0);
    EXPECT_NEAR(id.lhs, 0.0, 1e-12);
    EXPECT_TRUE(id.passed);
}

TEST(DetIdentity, RejectsNonCriticalShapes) {
    const Chart c = Chart::euclidean({"x", "y"});
    const SmoothMap three(c, exprs({"x", "y", "x*y"}));
    EXPECT_THROW(verify_det_identity(standard_frame(c), three, monomial_free_map(3), std::vector<double>{0, 0}),
                 DimensionError);
}

SmoothMap random_quadratic(test::Rng& rng, const Chart& c) {
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < c.dim(); ++i) {
        Expr e(rng.uniform(-1, 1));
        for (std::size_t a = 0; a < c.dim(); ++a) {
            const Expr xa = Expr::coord(c.coords()[a]);
            e = e + Expr(rng.uniform(-1, 1)) * xa;
            for (std::size_t b = a; b < c.dim(); ++b) e = e + Expr(rng.uniform(-1, 1)) * xa * Expr::coord(c.coords()[b]);
        }
        comps.push_back(simplify(e));
    }
    return SmoothMap(c, std::move(comps));
}

TEST(DetIdentity, RandomQuadraticsAndScaling) {
    test::Rng rng(23);
    for (std::size_t k = 2; k <= 3; ++k) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < k; ++i) names.push_back("u" + std::to_string(i + 1));
        const Chart c = Chart::euclidean(names);
        for (int trial = 0; trial < 5; ++trial) {
            const SmoothMap f = random_quadratic(rng, c);
            std::vector<Expr> scaled;
            for (const auto& e : f.components()) scaled.push_back(simplify(Expr(-1.7) * e));
            const CompositionProbe probe(standard_frame(c), f, monomial_free_map(k));
            const CompositionProbe probe_scaled(standard_frame(c), SmoothMap(c, scaled), monomial_free_map(k));
            for (int i = 0; i < 20; ++i) {
                const auto p = rng.point(k);
                ASSERT_LE(probe.identity(p, 1e-9).rel_residual, 1e-9);
                ASSERT_LE(probe_scaled.identity(p, 1e-9).rel_residual, 1e-9);
                ASSERT_LE(probe.decompose(p).block_law_residual(), 1e-9);
                const BlockDecomposition b = probe.decompose(p);
                ASSERT_LE((b.d - sym_square(b.d1)).cwiseAbs().maxCoeff(), 1e-12);
            }
        }
    }
}

TEST(Composition, FreeWhereverImmersion) {
    for (const auto& name : list_fixtures()) {
        const Fixture fx = fixture(name);
        if (!fx.immersion) continue;
        const SmoothMap composed = compose(monomial_free_map(fx.frame->size()), *fx.immersion);
        for (const auto& p : sample_points(fx.chart, RandomPlan{300, 2})) {
            if (is_immersion_at(*fx.frame, *fx.immersion, p)) {
                ASSERT_TRUE(is_free_at(*fx.frame, composed, p)) << name;
            }
        }
    }
}

}  // namespace
}  // namespace hfree
