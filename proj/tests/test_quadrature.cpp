#include "abj/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

using namespace abj;
using std::numbers::pi;

namespace {

SimplexIntegrand anomaly_kernel() {
    return SimplexIntegrand::scalar(
        5,
        [](std::span<const double> x) {
            const double s = x[0] + x[1] + x[2];
            return x[2] / (s * s * s);
        },
        {{0, 1, 2}});
}

SimplexIntegrand smooth_poly() {
    return SimplexIntegrand::scalar(4, [](std::span<const double> x) {
        return 1.0 + 3.0 * x[0] * x[1] + x[2] * x[2] - 2.0 * x[3] * x[0] * x[0];
    });
}

std::uint64_t bits(double v) {
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

}  // namespace

TEST(Simplex, VolumeOfFiveParameterMeasure) {
    const auto r = integrate_simplex(SimplexIntegrand::scalar(5, [](std::span<const double>) { return 1.0; }), 1e-12);
    EXPECT_NEAR(r.value, 1.0 / 24.0, 1e-10);
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.error_estimate, 0.0);
}

TEST(Simplex, FirstMomentInTwoParameters) {
    const auto r = integrate_simplex(SimplexIntegrand::scalar(2, [](std::span<const double> x) { return x[0]; }), 1e-12);
    EXPECT_NEAR(r.value, 0.5, 1e-12);
}

TEST(Simplex, FaceSingularKernelGivesOneTwelfth) {
    const auto r = integrate_simplex(anomaly_kernel(), 1e-8);
    EXPECT_NEAR(r.value, 1.0 / 12.0, 1e-5);
    EXPECT_TRUE(r.converged);
}

// With x_123 = s u and the rest (1-s) v, dmu5 = s^2 (1-s) ds dmu3(u) dmu2(v) and the kernel is u3/s^2,
// so the integral factorizes into int (1-s) ds * int dmu3 u3 * int dmu2 1 = 1/2 * 1/6 * 1.
TEST(Simplex, FaceSingularKernelMatchesFactorizedReduction) {
    const auto ds = integrate_simplex(SimplexIntegrand::scalar(2, [](std::span<const double> x) { return x[1]; }), 1e-12);
    const auto du = integrate_simplex(SimplexIntegrand::scalar(3, [](std::span<const double> x) { return x[2]; }), 1e-12);
    EXPECT_NEAR(du.value, 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(integrate_simplex(anomaly_kernel(), 1e-9).value, ds.value * du.value, 1e-8);
}

TEST(Simplex, PermutationSymmetry) {
    const auto base = smooth_poly();
    const auto r0 = integrate_simplex(base, 1e-10);
    std::array<std::size_t, 4> perm{0, 1, 2, 3};
    while (std::next_permutation(perm.begin(), perm.end())) {
        SimplexIntegrand g = SimplexIntegrand::scalar(4, [perm, base](std::span<const double> x) {
            const std::array<double, 4> y{x[perm[0]], x[perm[1]], x[perm[2]], x[perm[3]]};
            double out = 0.0;
            base.eval(y, std::span<double>(&out, 1));
            return out;
        });
        const auto r = integrate_simplex(g, 1e-10);
        EXPECT_LE(std::abs(r.value - r0.value), 2.0 * (r.error_estimate + r0.error_estimate) + 1e-15);
    }
}

TEST(Simplex, PermutedSingularFaceStillConverges) {
    SimplexIntegrand g = SimplexIntegrand::scalar(
        5,
        [](std::span<const double> x) {
            const double s = x[4] + x[3] + x[1];
            return x[1] / (s * s * s);
        },
        {{4, 3, 1}});
    const auto r = integrate_simplex(g, 1e-8);
    EXPECT_NEAR(r.value, 1.0 / 12.0, 1e-5);
}

TEST(Simplex, Linearity) {
    const auto f = smooth_poly();
    const auto g = SimplexIntegrand::scalar(4, [](std::span<const double> x) { return std::exp(x[1] - x[3]); });
    const double a = 2.5, b = -0.75;
    const auto h = SimplexIntegrand::scalar(4, [&](std::span<const double> x) {
        double u = 0, v = 0;
        f.eval(x, std::span<double>(&u, 1));
        g.eval(x, std::span<double>(&v, 1));
        return a * u + b * v;
    });
    const auto rf = integrate_simplex(f, 1e-10), rg = integrate_simplex(g, 1e-10), rh = integrate_simplex(h, 1e-10);
    const double combined = rh.error_estimate + std::abs(a) * rf.error_estimate + std::abs(b) * rg.error_estimate;
    EXPECT_LE(std::abs(rh.value - (a * rf.value + b * rg.value)), combined + 1e-15);
}

TEST(Simplex, RefinementDoesNotWorsenGoldenValues) {
    double prev = 1.0;
    for (double tol : {1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5}) {
        const double dev = std::abs(integrate_simplex(anomaly_kernel(), tol).value - 1.0 / 12.0);
        EXPECT_LE(dev, prev * 1.0000001 + 1e-15) << "tol " << tol;
        prev = dev;
    }
}

TEST(Simplex, DeterministicAcrossWorkerCounts) {
    CubatureOptions one, many;
    one.workers = 1;
    many.workers = 4;
    const auto a = integrate_simplex(anomaly_kernel(), 1e-7, one);
    const auto b = integrate_simplex(anomaly_kernel(), 1e-7, many);
    EXPECT_EQ(bits(a.value), bits(b.value));
    EXPECT_EQ(bits(a.error_estimate), bits(b.error_estimate));
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Simplex, BudgetExceededIsFlagged) {
    CubatureOptions opt;
    opt.max_evaluations = 2000;
    const auto f = SimplexIntegrand::scalar(3, [](std::span<const double> x) { return std::sqrt(x[0]); });
    const auto r = integrate_simplex(f, 1e-14, opt);
    EXPECT_FALSE(r.converged);
    EXPECT_LE(r.evaluations, 2000u + 1000u);
    // int dmu3 sqrt(x1) = int_0^1 sqrt(x) (1-x) dx = 4/15
    EXPECT_NEAR(r.value, 4.0 / 15.0, 1e-3);
}

TEST(Simplex, NonFiniteSampleNamesThePoint) {
    const auto f = SimplexIntegrand::scalar(3, [](std::span<const double> x) { return x[0] > 0.3 ? NAN : 1.0; });
    try {
        integrate_simplex(f, 1e-6);
        FAIL() << "expected NonFiniteSample";
    } catch (const NonFiniteSample& e) {
        ASSERT_EQ(e.point().size(), 3u);
        EXPECT_GT(e.point()[0], 0.3);
    }
}

TEST(Simplex, InvalidArgumentsAreRejected) {
    const auto f = SimplexIntegrand::scalar(3, [](std::span<const double>) { return 1.0; });
    EXPECT_THROW(integrate_simplex(f, 0.0), std::invalid_argument);
    EXPECT_THROW(integrate_simplex(SimplexIntegrand::scalar(1, [](std::span<const double>) { return 1.0; }), 1e-6),
                 std::invalid_argument);
}

TEST(R4, GaussianGivesFujikawaConstant) {
    const auto f = R4Integrand::scalar([](const Vec4& k) { return std::exp(-norm2(k)); }, 8.0);
    const auto r = integrate_r4(f, 1e-9);
    EXPECT_NEAR(r.value, 1.0 / (16.0 * pi * pi), 1e-6);
    EXPECT_NEAR(r.value, 1.0 / (16.0 * pi * pi), 1e-10);
    EXPECT_TRUE(r.converged);
}

TEST(R4, OddIntegrandVanishes) {
    const auto f = R4Integrand::scalar([](const Vec4& k) { return k[0] * std::exp(-norm2(k)); }, 8.0);
    CubatureOptions opt;
    opt.abs_tol = 1e-13;
    const auto r = integrate_r4(f, 1e-8, opt);
    EXPECT_NEAR(r.value, 0.0, 1e-12);
    EXPECT_TRUE(r.converged);
}

TEST(R4, RationalIntegrandMatchesRadialClosedForm) {
    // int d^4k/(2pi)^4 (k^2+1)^-3 = (2 pi^2 / (2 pi)^4) int_0^inf r^3 (r^2+1)^-3 dr = 1/(32 pi^2)
    const auto f = R4Integrand::scalar(
        [](const Vec4& k) {
            const double d = norm2(k) + 1.0;
            return 1.0 / (d * d * d);
        },
        6.0);
    EXPECT_NEAR(integrate_r4(f, 1e-9).value, 1.0 / (32.0 * pi * pi), 1e-11);
}

TEST(R4, ShiftedIntegrandIsTranslationInvariant) {
    const Vec4 q{0.3, -0.2, 0.5, 0.1};
    auto f = R4Integrand::scalar(
        [q](const Vec4& k) {
            const double d = norm2(k - q) + 1.0;
            return 1.0 / (d * d * d);
        },
        6.0);
    const auto r = integrate_r4(f, 1e-6);
    EXPECT_NEAR(r.value, 1.0 / (32.0 * pi * pi), 10.0 * r.error_estimate + 1e-12);
}

TEST(R4, DecayCheckRejectsSlowIntegrands) {
    const auto f = R4Integrand::scalar([](const Vec4& k) { return 1.0 / (norm2(k) + 1.0); }, 5.0);
    EXPECT_THROW(integrate_r4(f, 1e-6), std::invalid_argument);
    const auto g = R4Integrand::scalar([](const Vec4& k) { return std::exp(-norm2(k)); }, 4.0);
    EXPECT_THROW(integrate_r4(g, 1e-6), std::invalid_argument);
}

TEST(R4, DeterministicAcrossWorkerCounts) {
    const auto f = R4Integrand::scalar([](const Vec4& k) { return std::exp(-norm2(k)) * (1.0 + k[1] * k[1]); }, 8.0);
    CubatureOptions one, many;
    many.workers = 3;
    EXPECT_EQ(bits(integrate_r4(f, 1e-8, one).value), bits(integrate_r4(f, 1e-8, many).value));
}

TEST(Cubature, FrozenMeshReproducesTheAdaptiveResult) {
    const auto f = anomaly_kernel();
    CubatureOptions opt;
    opt.rel_tol = 1e-6;
    const auto base = integrate_simplex_vector(f, opt);
    const auto again = integrate_simplex_on_mesh(f, base.mesh);
    EXPECT_EQ(bits(base.value[0]), bits(again.value[0]));
}
