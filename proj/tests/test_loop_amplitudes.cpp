#include "abj/loop_amplitudes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace abj;
using std::numbers::pi;

namespace {

const Kinematics kGeneric{Vec4{1.0, 0.3, -0.2, 0.5}, Vec4{-0.4, 0.8, 0.3, -0.1}};
const CutoffPair kCut{1.0, 3.0};

std::array<double, 6> point(double a, double b, double c, double d, double e, double f) { return {a, b, c, d, e, f}; }

double max_abs_diff(const Tensor2& a, const Tensor2& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Denominator, EqualCutoffsAtZeroMomentumGiveOne) {
    const auto x = point(0.1, 0.2, 0.3, 0.1, 0.2, 0.1);
    EXPECT_NEAR(denominator_D(x, {1.0, 1.0}, InvariantArgs{0.0, 0.0, 0.0}), 1.0, 1e-15);
}

TEST(Denominator, VertexOfTheSimplexWithZeroInfraredCutoffVanishes) {
    const auto x = point(0, 0, 1, 0, 0, 0);
    EXPECT_EQ(denominator_D(x, {0.0, 5.0}, InvariantArgs{2.0, 3.0, 4.0}), 0.0);
}

TEST(Denominator, SymmetricPointGivesFiveSixths) {
    const double t = 1.0 / 6.0;
    const auto x = point(t, t, t, t, t, t);
    // p2^2 = p3^2 = 1, p2.p3 = -1/2, so p1^2 = 1
    EXPECT_NEAR(denominator_D(x, {0.0, 1.0}, InvariantArgs{1.0, 1.0, 1.0}), 5.0 / 6.0, 1e-15);
}

TEST(Denominator, KinematicsOverloadUsesTheSquares) {
    const auto x = point(0.05, 0.1, 0.2, 0.15, 0.3, 0.2);
    EXPECT_DOUBLE_EQ(denominator_D(x, kCut, kGeneric), denominator_D(x, kCut, InvariantArgs(kGeneric.squares())));
}

TEST(Amplitudes, EqualCutoffsGiveZero) {
    const auto s = scalar_amplitudes(kGeneric, {2.0, 2.0});
    for (int p = 0; p < 6; ++p) {
        EXPECT_EQ(s.A[p], 0.0);
        EXPECT_EQ(s.B[p], 0.0);
    }
    EXPECT_EQ(gamma_AAA_direct(kGeneric, {2.0, 2.0}, 1e-6).value.max_abs(), 0.0);
}

TEST(Amplitudes, ExceptionalMomentaNeedInfraredCutoff) {
    const Kinematics exceptional{Vec4{1.0, 0.0, 0.0, 0.0}, Vec4{-1.0, 0.0, 0.0, 0.0}};
    EXPECT_THROW(scalar_amplitudes(exceptional, {0.0, 3.0}), DegenerateKinematics);
    EXPECT_NO_THROW(scalar_amplitudes(exceptional, {0.5, 3.0}, {1e-4, {}}));
}

TEST(Amplitudes, SingleOrderingsMatchTheBatchedIntegral) {
    const auto s = scalar_amplitudes(kGeneric, kCut, {1e-6, {}});
    for (const Perm& p : all_perms()) {
        const auto q = ordered_args(kGeneric, p);
        const auto a = amplitude_A(q, kCut, {1e-6, {}}), b = amplitude_B(q, kCut, {1e-6, {}});
        EXPECT_NEAR(a.value, at(s.A, p), 10.0 * (a.error_estimate + at(s.A_err, p)));
        EXPECT_NEAR(b.value, at(s.B, p), 10.0 * (b.error_estimate + at(s.B_err, p)));
    }
}

TEST(Amplitudes, ASymmetricUnderReversalAndSumsToZeroOverCycles) {
    const auto s = scalar_amplitudes(kGeneric, kCut, {1e-7, {}});
    const double scale = std::abs(at(s.A, {1, 2, 3}));
    EXPECT_NEAR(at(s.A, {1, 2, 3}), at(s.A, {3, 2, 1}), 1e-5 * scale);
    EXPECT_NEAR(at(s.A, {1, 2, 3}) + at(s.A, {2, 3, 1}) + at(s.A, {3, 1, 2}), 0.0, 1e-5 * scale);
}

TEST(Normalization, FitRecoversUnitMagnitudes) {
    const auto& fit = fitted_normalization();
    EXPECT_NEAR(fit.normalization.n_a, 1.0, 1e-3);
    EXPECT_NEAR(fit.normalization.n_b, -1.0, 1e-3);
    EXPECT_LT(fit.relative_residual, 1e-3);
}

TEST(Triangle, TwoAmplitudeFormMatchesDirectLoopAwayFromCalibration) {
    const auto n = fitted_normalization().normalization;
    const CutoffPair cut{0.7, 4.0};
    const auto amp = gamma_AAA(kGeneric, cut, n, {1e-7, {}});
    const auto direct = gamma_AAA_direct(kGeneric, cut, 1e-5);
    EXPECT_TRUE(direct.converged);
    EXPECT_LT(max_relative_difference(amp.value, direct.value), 5e-3);
}

TEST(Triangle, RotationCovariance) {
    const auto n = fitted_normalization().normalization;
    const auto R = rotation_matrix(0.4, -1.1, 0.7);
    const Kinematics rotated{rotate_vector(R, kGeneric.p1), rotate_vector(R, kGeneric.p2)};
    const auto g = gamma_AAA(kGeneric, kCut, n, {1e-6, {}});
    const auto gr = gamma_AAA(rotated, kCut, n, {1e-6, {}});
    EXPECT_LT((rotate_tensor(R, g.value) - gr.value).max_abs(), 10.0 * (g.error.max_abs() + gr.error.max_abs()));
}

TEST(Triangle, BoseSymmetryWithinErrorEstimates) {
    const auto res = bose_residuals(kGeneric, kCut, fitted_normalization().normalization, {1e-6, {}});
    ASSERT_EQ(res.size(), 6u);
    EXPECT_EQ(res[0].max_residual, 0.0);
    for (const auto& r : res) EXPECT_LT(r.max_ratio, 10.0) << perm_name(r.legs);
}

TEST(Triangle, FiniteAsInfraredCutoffIsRemoved) {
    const auto n = fitted_normalization().normalization;
    const auto g0 = gamma_AAA(kGeneric, {0.0, 3.0}, n, {1e-6, {}});
    const auto g1 = gamma_AAA(kGeneric, {1e-3, 3.0}, n, {1e-6, {}});
    EXPECT_LT((g0.value - g1.value).max_abs(), 1e-4 * g0.value.max_abs());
}

TEST(Ward, ContractedDirectLoopMatchesSingleInsertionAtEqualSquares) {
    const auto kin = equilateral_kinematics();
    const double L0 = 3.0;
    const auto direct = gamma_AAA_direct(kin, {0.0, L0}, 1e-5);
    const auto x = contracted_triangle(kin, L0, 1e-9);
    const Tensor2 lhs = contract_first(kin.p1, direct.value);
    EXPECT_LT(max_abs_diff(lhs, trace_sign() * x.value), 1e-3 * x.value.max_abs());
}

TEST(Ward, SymmetrizedFormMatchesAtUnequalSquares) {
    const double L0 = 3.0;
    const auto direct = gamma_AAA_direct(kGeneric, {0.0, L0}, 1e-5);
    const Tensor2 lhs = contract_first(kGeneric.p1, direct.value);
    const auto sym = contracted_triangle(kGeneric, L0, 1e-9, ContractedForm::Symmetrized);
    EXPECT_LT(max_abs_diff(lhs, trace_sign() * sym.value), 1e-3 * sym.value.max_abs());
    const auto lit = contracted_triangle(kGeneric, L0, 1e-9, ContractedForm::Literal);
    EXPECT_GT(max_abs_diff(lhs, trace_sign() * lit.value), 1e-2 * sym.value.max_abs());
}

TEST(Ward, ParallelMomentaGiveZero) {
    const Kinematics kin{Vec4{-3.0, 0.0, 0.0, 0.0}, Vec4{1.0, 0.0, 0.0, 0.0}};
    EXPECT_EQ(contracted_triangle(kin, 10.0, 1e-6).value.max_abs(), 0.0);
}

TEST(Anomaly, CoefficientApproachesOneOverSixPiSquared) {
    const auto r = contracted_triangle(equilateral_kinematics(), 1e3, 1e-8);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.coefficient, kAnomalyCoefficient, 1e-4 * kAnomalyCoefficient);
    EXPECT_NEAR(r.coefficient, 1.0 / (6.0 * pi * pi), 1e-4 * kAnomalyCoefficient);
}

TEST(Anomaly, RejectsBadArguments) {
    EXPECT_THROW(contracted_triangle(equilateral_kinematics(), 0.0, 1e-6), std::invalid_argument);
    EXPECT_THROW(contracted_triangle(equilateral_kinematics(), 10.0, 0.0), std::invalid_argument);
}

TEST(UV, DeviationFallsAsInverseSquareCutoff) {
    const auto rep = uv_scan(equilateral_kinematics(), {1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5)});
    EXPECT_NEAR(rep.slope, -2.0, 0.2);
    EXPECT_GT(rep.r_squared, 0.99);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_LT(rep.rows[i].deviation, rep.rows[i - 1].deviation);
    // Lambda0^2 times the deviation may drift only logarithmically over a decade and a half
    const auto scaled = [](const UVScanRow& r) { return r.deviation * r.lambda0 * r.lambda0; };
    EXPECT_LT(scaled(rep.rows.back()) / scaled(rep.rows.front()), 2.0);
    EXPECT_GT(scaled(rep.rows.back()) / scaled(rep.rows.front()), 0.5);
}

TEST(UV, RejectsUnsortedCutoffs) {
    EXPECT_THROW(uv_scan(equilateral_kinematics(), {1e3, 1e2}), std::invalid_argument);
    EXPECT_THROW(uv_scan(equilateral_kinematics(), {1e2}, {{2, 0}, {3, 1}, {2, 2}}), std::invalid_argument);
}

TEST(IR, LaplacianMatchesFiniteDifferencesOfTheDirectLoop) {
    const Vec4 p3{0.3, -0.5, 0.8, 0.1};
    const CutoffPair cut{0.8, 5.0};
    auto at_p2 = [&](const Vec4& p2) { return Kinematics{-(p2 + p3), p2}; };
    const auto base = gamma_AAA_direct(at_p2({0.0, 0.0, 0.0, 0.0}), cut, 1e-5);
    const auto g0 = base.value;
    auto lap_h = [&](double h) {
        RankThreeTensor sum;
        for (int a = 0; a < 4; ++a) {
            Vec4 e{0.0, 0.0, 0.0, 0.0};
            e[a] = h;
            const auto gp = gamma_AAA_direct_on_mesh(at_p2(e), cut, base.mesh).value;
            const auto gm = gamma_AAA_direct_on_mesh(at_p2(-e), cut, base.mesh).value;
            sum += (1.0 / (h * h)) * (gp + gm - 2.0 * g0);
        }
        return sum;
    };
    const auto fd = (4.0 / 3.0) * lap_h(0.05) - (1.0 / 3.0) * lap_h(0.1);
    const auto lap = ir_laplacian(p3, cut, 1e-5);
    EXPECT_LT(max_relative_difference(lap.value, fd, 1e-2), 1e-3);
}

TEST(IR, LaplacianIsProportionalToEpsilonContractedWithP3) {
    const Vec4 p3{0.3, -0.5, 0.8, 0.1};
    const auto rep = ir_second_derivative_scan(p3, {0.1, 0.05}, 30.0, 1e-4);
    for (const auto& row : rep.rows) {
        EXPECT_TRUE(row.within_bound) << row.lambda;
        EXPECT_LT(row.orthogonal_residual, 1e-3 * std::abs(row.projection)) << row.lambda;
    }
}

TEST(IR, RejectsBadScans) {
    EXPECT_THROW(ir_second_derivative_scan({0, 0, 0, 0}, {0.1, 0.05}, 30.0), DegenerateKinematics);
    EXPECT_THROW(ir_second_derivative_scan({1, 0, 0, 0}, {0.1}, 30.0), std::invalid_argument);
    EXPECT_THROW(ir_second_derivative_scan({1, 0, 0, 0}, {0.05, 0.1}, 30.0), std::invalid_argument);
    EXPECT_THROW(ir_laplacian({1, 0, 0, 0}, {0.0, 30.0}, 1e-4), std::invalid_argument);
}

TEST(Comparison, MaxRelativeDifferenceUsesFloorForSmallComponents) {
    RankThreeTensor a, b;
    b.c[0] = 1.0;
    b.c[1] = 1e-9;
    a = b;
    EXPECT_EQ(max_relative_difference(a, b), 0.0);
    a.c[0] = 1.01;
    EXPECT_NEAR(max_relative_difference(a, b), 0.01, 1e-12);
    a = b;
    a.c[1] = 1e-5;
    // compared against the floor 1e-3 * max|b| rather than 1e-9
    EXPECT_NEAR(max_relative_difference(a, b), (1e-5 - 1e-9) / 1e-3, 1e-12);
}
