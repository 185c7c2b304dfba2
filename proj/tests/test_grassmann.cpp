#include "abj/brs_jacobian.hpp"
#include "abj/grassmann.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace abj;

namespace {

AlgebraPtr small_algebra() { return make_algebra({"eps", "t1", "t2", "t3", "t4"}); }

GrassmannElement gen(const AlgebraPtr& a, std::size_t i) { return GrassmannElement::generator(a, i); }
GrassmannElement scalar(const AlgebraPtr& a, int v) { return GrassmannElement(a, GaussRational(v)); }

GrassmannElement random_element(const AlgebraPtr& a, std::mt19937& rng, int terms) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<Monomial> mono(0, (Monomial(1) << a->size()) - 1);
    GrassmannElement e(a);
    for (int k = 0; k < terms; ++k) e.add_term(mono(rng), GaussRational(Rational(coef(rng)), Rational(coef(rng))));
    return e;
}

// 1 + eps * (random even-in-theta entries) off the diagonal.
GrassmannMatrix random_unit_jacobian(const AlgebraPtr& a, std::size_t dim, std::mt19937& rng) {
    auto M = GrassmannMatrix::identity(a, dim);
    std::uniform_int_distribution<int> coef(-4, 4), pick(1, static_cast<int>(a->size()) - 1);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            if (r != c && coef(rng) > 1)
                M(r, c) = GaussRational(coef(rng)) * g_mul(gen(a, static_cast<std::size_t>(pick(rng))), gen(a, 0));
    return M;
}

ModeLattice lattice(const std::string& spec) {
    ModeLattice l;
    l.extents = parse_extents(spec);
    return l;
}

}  // namespace

TEST(Grassmann, GeneratorsAnticommuteAndSquareToZero) {
    const auto a = small_algebra();
    for (std::size_t i = 0; i < a->size(); ++i) {
        EXPECT_TRUE((gen(a, i) * gen(a, i)).is_zero());
        for (std::size_t j = 0; j < a->size(); ++j) {
            if (i != j) {
                EXPECT_EQ(gen(a, i) * gen(a, j), -(gen(a, j) * gen(a, i)));
            }
        }
    }
}

TEST(Grassmann, ProductIsAssociativeAndDistributive) {
    const auto a = small_algebra();
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_element(a, rng, 4), y = random_element(a, rng, 4), z = random_element(a, rng, 4);
        EXPECT_EQ((x * y) * z, x * (y * z));
        EXPECT_EQ(x * (y + z), x * y + x * z);
        EXPECT_EQ((x + y) * z, x * z + y * z);
    }
}

TEST(Grassmann, ScalarIsUnit) {
    const auto a = small_algebra();
    std::mt19937 rng(8);
    const auto x = random_element(a, rng, 6);
    EXPECT_EQ(scalar(a, 1) * x, x);
    EXPECT_EQ(x * scalar(a, 1), x);
}

TEST(Grassmann, MonomialSign) {
    EXPECT_EQ(monomial_sign(0b01, 0b10), 1);
    EXPECT_EQ(monomial_sign(0b10, 0b01), -1);
    EXPECT_EQ(monomial_sign(0b11, 0b01), 0);
    EXPECT_EQ(monomial_sign(0b110, 0b001), 1);  // t1 t2 t0 -> t0 t1 t2: two swaps
}

TEST(Grassmann, GeneratorBoundIsEnforced) {
    std::vector<std::string> names;
    for (int i = 0; i < 25; ++i) names.push_back("g" + std::to_string(i));
    EXPECT_THROW(make_algebra(names), std::length_error);
    EXPECT_NO_THROW(make_algebra(names, 64));
    EXPECT_THROW(make_algebra(names, 65), std::invalid_argument);
}

TEST(Grassmann, MixingAlgebrasThrows) {
    const auto a = small_algebra(), b = small_algebra();
    EXPECT_THROW(gen(a, 1) * gen(b, 1), std::invalid_argument);
}

TEST(GrassmannDet, IdentityHasUnitDeterminant) {
    const auto a = small_algebra();
    const auto I = GrassmannMatrix::identity(a, 4);
    for (auto m : {DetMethod::Leibniz, DetMethod::MinorExpansion, DetMethod::Structural})
        EXPECT_TRUE(g_det(I, m, 0).is_scalar(GaussRational(1)));
}

TEST(GrassmannDet, ScalarMatrixMatchesOrdinaryDeterminant) {
    const auto a = small_algebra();
    GrassmannMatrix M(a, 3);
    const int v[3][3] = {{2, -1, 0}, {1, 3, 4}, {0, 5, -2}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) M(r, c) = scalar(a, v[r][c]);
    // 2(3*-2 - 20) + 1(1*-2 - 0) = -52 - 2
    EXPECT_TRUE(g_det(M, DetMethod::Leibniz).is_scalar(GaussRational(-54)));
    EXPECT_TRUE(g_det(M, DetMethod::MinorExpansion).is_scalar(GaussRational(-54)));
}

TEST(GrassmannDet, EpsilonOffDiagonalGivesUnitDeterminant) {
    const auto a = small_algebra();
    auto M = GrassmannMatrix::identity(a, 2);
    M(0, 1) = g_mul(gen(a, 1), gen(a, 0));
    M(1, 0) = g_mul(gen(a, 2), gen(a, 0));
    // 1 - (t1 eps)(t2 eps) = 1 since eps^2 = 0
    for (auto m : {DetMethod::Leibniz, DetMethod::MinorExpansion, DetMethod::Structural})
        EXPECT_TRUE(g_det(M, m, 0).is_scalar(GaussRational(1)));
}

TEST(GrassmannDet, StructuralRejectsEntriesWithoutEpsilon) {
    const auto a = small_algebra();
    auto M = GrassmannMatrix::identity(a, 3);
    M(2, 1) = gen(a, 3);
    try {
        g_det(M, DetMethod::Structural, 0);
        FAIL() << "expected a precondition error";
    } catch (const StructuralPreconditionError& e) {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_EQ(e.col(), 1u);
    }
}

TEST(GrassmannDet, ExpansionMethodsRefuseLargeMatrices) {
    const auto a = small_algebra();
    const auto I = GrassmannMatrix::identity(a, 11);
    EXPECT_THROW(g_det(I, DetMethod::Leibniz), std::length_error);
    EXPECT_THROW(g_det(I, DetMethod::MinorExpansion), std::length_error);
    EXPECT_TRUE(g_det(I, DetMethod::Structural, 0).is_scalar(GaussRational(1)));
}

TEST(GrassmannDet, MethodsAgreeOnRandomMatrices) {
    const auto a = small_algebra();
    std::mt19937 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = 2 + static_cast<std::size_t>(trial % 5);
        GrassmannMatrix M(a, dim);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) M(r, c) = random_element(a, rng, 2);
        EXPECT_EQ(g_det(M, DetMethod::Leibniz), g_det(M, DetMethod::MinorExpansion)) << "dim " << dim;
    }
}

TEST(GrassmannDet, UnitJacobiansHaveUnitDeterminantAndInverseTwoMinusJ) {
    const auto a = small_algebra();
    std::mt19937 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = 2 + static_cast<std::size_t>(trial % 6);
        const auto J = random_unit_jacobian(a, dim, rng);
        const auto one = GaussRational(1);
        EXPECT_TRUE(g_det(J, DetMethod::Leibniz).is_scalar(one));
        EXPECT_TRUE(g_det(J, DetMethod::MinorExpansion).is_scalar(one));
        EXPECT_TRUE(g_det(J, DetMethod::Structural, 0).is_scalar(one));
        // J = I + N with N proportional to eps, so N^2 = 0 and J^-1 = I - N
        auto inv = GrassmannMatrix::identity(a, dim);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                if (r != c) inv(r, c) = -J(r, c);
        EXPECT_EQ(J * inv, GrassmannMatrix::identity(a, dim));
        EXPECT_EQ(inv * J, GrassmannMatrix::identity(a, dim));
    }
}

TEST(BRS, ParseExtents) {
    EXPECT_EQ(parse_extents("3x1x1x1"), (std::array<int, 4>{3, 1, 1, 1}));
    EXPECT_EQ(parse_extents("3"), (std::array<int, 4>{3, 1, 1, 1}));
    EXPECT_THROW(parse_extents("3xa"), std::invalid_argument);
    EXPECT_THROW(parse_extents("1x1x1x1x1"), std::invalid_argument);
    ModeLattice l;
    l.extents = {2, 1, 1, 1};
    EXPECT_THROW(l.modes(), std::invalid_argument);
}

TEST(BRS, ModeCutoffRemovesModes) {
    ModeLattice l = lattice("3x3x1x1");
    EXPECT_EQ(l.modes().size(), 9u);
    l.lambda0 = 1;
    EXPECT_EQ(l.modes().size(), 5u);  // |n|^2 <= 1
    EXPECT_EQ(l.sigma({0, 0, 0, 0}), Rational(1));
    EXPECT_EQ(l.sigma({1, 0, 0, 0}), Rational(1, 2));
}

TEST(BRS, ReducedLatticeCertificatePasses) {
    BRSOptions opt;
    opt.fields = {"A0", "c", "cbar"};
    const auto cert = verify_unit_jacobian(lattice("3x1x1x1"), {}, opt);
    EXPECT_EQ(cert.dim, 9u);
    EXPECT_TRUE(cert.expansion_checked);
    EXPECT_TRUE(cert.minor_det_one);
    EXPECT_TRUE(cert.leibniz_det_one);
    EXPECT_TRUE(cert.structural_det_one);
    EXPECT_TRUE(cert.methods_agree);
    EXPECT_GT(cert.nonzero_off_diagonal, 0u);
    EXPECT_TRUE(cert.pass()) << cert.str();
}

TEST(BRS, SpinorGhostReducedLatticePasses) {
    BRSOptions opt;
    opt.fields = {"psi1", "psi3", "c"};
    const auto J = build_brs_jacobian(lattice("3x1x1x1"), {}, opt);
    const auto cert = certify_unit_jacobian(J);
    EXPECT_EQ(cert.dim, 9u);
    EXPECT_GT(cert.nonzero_off_diagonal, 0u);
    EXPECT_TRUE(cert.pass()) << cert.str();
}

TEST(BRS, FullFieldContentStructuralCertificate) {
    const auto J = build_brs_jacobian(lattice("3x1x1x1"), {});
    const auto cert = certify_unit_jacobian(J);
    EXPECT_EQ(cert.dim, 42u);
    EXPECT_EQ(cert.generators, 28u);
    EXPECT_FALSE(cert.expansion_checked);
    EXPECT_TRUE(cert.structural_det_one);
    EXPECT_TRUE(cert.pass()) << cert.str();
}

TEST(BRS, GaugeBlocksHaveExpectedEntries) {
    BRSOptions opt;
    opt.fields = {"A0", "c", "cbar"};
    BRSConstants k;
    k.R1 = Rational(2);
    k.R4 = Rational(3);
    k.alpha = Rational(1, 2);
    ModeLattice l = lattice("3x1x1x1");
    l.lambda0 = 2;
    const auto J = build_brs_jacobian(l, k, opt);
    const auto& M = J.matrix;
    const auto alg = M.algebra();
    const auto eps = gen(alg, 0);
    // mode order (-1,0,0,0), (0,0,0,0), (1,0,0,0); fields A0, c, cbar
    const GaussRational I = GaussRational::i_unit();
    const Rational sigma = Rational(4, 5);
    EXPECT_EQ(M(1 * 3 + 1, 1 * 3 + 0), GrassmannElement(alg));  // k_0 = 0 at the zero mode
    EXPECT_EQ(M(2 * 3 + 1, 2 * 3 + 0), (-I * GaussRational(Rational(2) * sigma)) * eps);
    EXPECT_EQ(M(2 * 3 + 0, 2 * 3 + 2), (-I * GaussRational(Rational(6) * sigma)) * eps);
    EXPECT_EQ(M(0 * 3 + 1, 0 * 3 + 0), (-I * GaussRational(Rational(-2) * sigma)) * eps);
}

TEST(BRS, MutatedDiagonalFailsWithLocatedEntry) {
    BRSOptions opt;
    opt.fields = {"A0", "c", "cbar"};
    auto J = build_brs_jacobian(lattice("3x1x1x1"), {}, opt);
    mutate_diagonal(J, 4);
    const auto cert = certify_unit_jacobian(J);
    EXPECT_FALSE(cert.pass());
    EXPECT_FALSE(cert.diagonal_unit);
    ASSERT_FALSE(cert.counterexamples.empty());
    EXPECT_NE(cert.counterexamples.front().find("c(0,0,0,0)"), std::string::npos) << cert.counterexamples.front();
}

TEST(BRS, RandomConstantsAndLatticesPass) {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> num(1, 9);
    const std::vector<std::vector<std::string>> contents = {
        {"A0", "A1", "c", "cbar"}, {"psi1", "psi3", "c"}, {"psibar2", "psibar4", "c"}, {"A2", "psi2", "psi4", "c"}};
    for (int trial = 0; trial < 12; ++trial) {
        BRSConstants k{Rational(num(rng), num(rng)), Rational(num(rng), num(rng)), Rational(num(rng), num(rng)),
                       Rational(num(rng), num(rng)), Rational(num(rng), num(rng)), Rational(num(rng), num(rng))};
        BRSOptions opt;
        opt.fields = contents[static_cast<std::size_t>(trial) % contents.size()];
        ModeLattice l = lattice(trial % 2 ? "3x1x1x1" : "1x3x1x1");
        l.kappa = Rational(num(rng), 3);
        const auto cert = verify_unit_jacobian(l, k, opt);
        EXPECT_TRUE(cert.pass()) << cert.str();
    }
}

TEST(BRS, UnknownFieldAndZeroAlphaAreRejected) {
    BRSOptions opt;
    opt.fields = {"A0", "phi"};
    EXPECT_THROW(build_brs_jacobian(lattice("3"), {}, opt), std::invalid_argument);
    BRSConstants k;
    k.alpha = 0;
    EXPECT_THROW(build_brs_jacobian(lattice("3"), k), std::invalid_argument);
}
