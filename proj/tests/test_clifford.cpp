#include "abj/clifford.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace abj;

namespace {

GammaMatrix scalar_identity(int k) { return GaussRational(k) * GammaMatrix::identity(); }

std::vector<GammaFactor> random_factors(std::mt19937& rng, int length) {
    std::uniform_int_distribution<int> kind(0, 5), idx(0, 3), val(-3, 3);
    std::vector<GammaFactor> f;
    for (int i = 0; i < length; ++i) {
        const int k = kind(rng);
        if (k < 4) f.push_back(Gamma{idx(rng)});
        else if (k == 4) f.push_back(Gamma5{});
        else f.push_back(Slash{{Rational(val(rng)), Rational(val(rng), 2), Rational(val(rng)), Rational(val(rng), 3)}});
    }
    return f;
}

}  // namespace

TEST(Clifford, GammaZeroSquaresToMinusIdentity) { EXPECT_EQ(gamma(0) * gamma(0), scalar_identity(-1)); }

TEST(Clifford, AnticommutatorIsMinusTwoDelta) {
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            EXPECT_EQ(gamma(mu) * gamma(nu) + gamma(nu) * gamma(mu), scalar_identity(mu == nu ? -2 : 0))
                << mu << "," << nu;
}

TEST(Clifford, GammasAreTraceless) {
    for (int mu = 0; mu < 4; ++mu) EXPECT_TRUE(gamma(mu).trace().is_zero());
}

TEST(Clifford, IndexOutOfRangeThrows) {
    EXPECT_THROW(gamma(4), std::out_of_range);
    EXPECT_THROW(gamma(-1), std::out_of_range);
    EXPECT_THROW(epsilon(0, 1, 2, 4), std::out_of_range);
}

TEST(Clifford, Gamma5SquaresToIdentity) { EXPECT_EQ(gamma5() * gamma5(), GammaMatrix::identity()); }

TEST(Clifford, Gamma5IsMinusProductOfFour) {
    EXPECT_EQ(gamma5(), GaussRational(-1) * (gamma(0) * gamma(1) * gamma(2) * gamma(3)));
}

TEST(Clifford, Gamma5AnticommutesAndIsTraceless) {
    for (int mu = 0; mu < 4; ++mu) EXPECT_EQ(gamma5() * gamma(mu), GaussRational(-1) * (gamma(mu) * gamma5()));
    EXPECT_TRUE(gamma5().trace().is_zero());
}

TEST(Clifford, EmptyTraceIsFour) { EXPECT_EQ(trace_product({}), GaussRational(4)); }

TEST(Clifford, TwoGammaTrace) {
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            EXPECT_EQ(trace_product({Gamma{mu}, Gamma{nu}}), GaussRational(mu == nu ? -4 : 0));
}

TEST(Clifford, SingleGammaTraceVanishes) { EXPECT_TRUE(trace_product({Gamma{0}}).is_zero()); }

TEST(Clifford, TraceSignIsMeasuredAndConsistentWithEpsilon) {
    const int s = trace_sign();
    EXPECT_TRUE(s == 1 || s == -1);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d)
                    EXPECT_EQ(trace_product({Gamma5{}, Gamma{a}, Gamma{b}, Gamma{c}, Gamma{d}}),
                              GaussRational(4 * s * epsilon(a, b, c, d)));
}

TEST(Clifford, EpsilonExamples) {
    EXPECT_EQ(epsilon(0, 1, 2, 3), 1);
    EXPECT_EQ(epsilon(1, 0, 2, 3), -1);
    EXPECT_EQ(epsilon(0, 0, 2, 3), 0);
    EXPECT_EQ(epsilon(3, 2, 1, 0), 1);
}

TEST(Clifford, EpsilonTotallyAntisymmetric) {
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    EXPECT_EQ(epsilon(a, b, c, d), -epsilon(b, a, c, d));
                    EXPECT_EQ(epsilon(a, b, c, d), -epsilon(a, c, b, d));
                    EXPECT_EQ(epsilon(a, b, c, d), -epsilon(a, b, d, c));
                }
}

TEST(Clifford, OddNumberOfGammasHasZeroTrace) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> idx(0, 3);
    for (int len : {1, 3, 5, 7, 9})
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<GammaFactor> f;
            for (int i = 0; i < len; ++i) f.push_back(Gamma{idx(rng)});
            EXPECT_TRUE(trace_product(f).is_zero());
        }
}

TEST(Clifford, Gamma5WithFewerThanFourGammasHasZeroTrace) {
    for (int a = 0; a < 4; ++a) {
        EXPECT_TRUE(trace_product({Gamma5{}, Gamma{a}}).is_zero());
        for (int b = 0; b < 4; ++b) {
            EXPECT_TRUE(trace_product({Gamma5{}, Gamma{a}, Gamma{b}}).is_zero());
            for (int c = 0; c < 4; ++c) EXPECT_TRUE(trace_product({Gamma5{}, Gamma{a}, Gamma{b}, Gamma{c}}).is_zero());
        }
    }
}

TEST(Clifford, TraceIsCyclic) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        auto f = random_factors(rng, 2 + trial % 7);
        const auto t = trace_product(f);
        std::rotate(f.begin(), f.begin() + 1, f.end());
        EXPECT_EQ(trace_product(f), t);
    }
}

TEST(Clifford, TraceIsLinearInSlash) {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> val(-4, 4);
    for (int trial = 0; trial < 30; ++trial) {
        std::array<Rational, 4> p, q, mix;
        const Rational a(val(rng), 3), b(val(rng), 5);
        for (int mu = 0; mu < 4; ++mu) {
            p[mu] = Rational(val(rng));
            q[mu] = Rational(val(rng), 7);
            mix[mu] = a * p[mu] + b * q[mu];
        }
        auto rest = random_factors(rng, 1 + trial % 5);
        auto with = [&](const std::array<Rational, 4>& v) {
            std::vector<GammaFactor> f = rest;
            f.insert(f.begin() + static_cast<long>(trial % f.size()), Slash{v});
            return trace_product(f);
        };
        EXPECT_EQ(with(mix), GaussRational(a) * with(p) + GaussRational(b) * with(q));
    }
}

TEST(Clifford, SlashExpandsOverGammas) {
    const std::array<Rational, 4> p{Rational(1), Rational(-2), Rational(1, 2), Rational(3)};
    GammaMatrix m;
    for (int mu = 0; mu < 4; ++mu) m = m + GaussRational(p[mu]) * gamma(mu);
    EXPECT_EQ(slash(p), m);
}

TEST(Clifford, SixGammaTraceTableMatchesDirectTraces) {
    const auto& entries = gamma5_six_trace_entries();
    EXPECT_EQ(entries.size(), 480u);
    for (const auto& e : entries)
        EXPECT_EQ(trace_product({Gamma5{}, Gamma{e.a}, Gamma{e.n}, Gamma{e.b}, Gamma{e.m}, Gamma{e.c}, Gamma{e.r}}),
                  GaussRational(static_cast<int>(e.value)));
}
