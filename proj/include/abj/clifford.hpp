#pragma once

#include "abj/exact.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace abj {

// 4x4 matrix with Gaussian-rational entries, row-major.
struct GammaMatrix {
    std::array<GaussRational, 16> e{};

    static GammaMatrix zero() { return {}; }
    static GammaMatrix identity() {
        GammaMatrix m;
        for (int i = 0; i < 4; ++i) m(i, i) = 1;
        return m;
    }

    GaussRational& operator()(int r, int c) { return e[4 * r + c]; }
    const GaussRational& operator()(int r, int c) const { return e[4 * r + c]; }

    GaussRational trace() const { return e[0] + e[5] + e[10] + e[15]; }

    friend GammaMatrix operator*(const GammaMatrix& a, const GammaMatrix& b) {
        GammaMatrix m;
        for (int r = 0; r < 4; ++r)
            for (int k = 0; k < 4; ++k) {
                if (a(r, k).is_zero()) continue;
                for (int c = 0; c < 4; ++c)
                    if (!b(k, c).is_zero()) m(r, c) += a(r, k) * b(k, c);
            }
        return m;
    }
    friend GammaMatrix operator+(GammaMatrix a, const GammaMatrix& b) {
        for (int i = 0; i < 16; ++i) a.e[i] += b.e[i];
        return a;
    }
    friend GammaMatrix operator-(GammaMatrix a, const GammaMatrix& b) {
        for (int i = 0; i < 16; ++i) a.e[i] -= b.e[i];
        return a;
    }
    friend GammaMatrix operator*(const GaussRational& z, GammaMatrix a) {
        for (auto& x : a.e) x *= z;
        return a;
    }
    friend bool operator==(const GammaMatrix& a, const GammaMatrix& b) { return a.e == b.e; }
};

namespace detail {

inline GammaMatrix build_gamma(int mu) {
    // Euclidean chiral basis gammaE_mu (hermitian, {gE_mu, gE_nu} = 2 delta); gamma_mu = i gE_mu.
    const GaussRational one(1), i = GaussRational::i_unit();
    GammaMatrix g;
    auto put_block = [&](int r0, int c0, const std::array<GaussRational, 4>& b) {
        g(r0, c0) = b[0];
        g(r0, c0 + 1) = b[1];
        g(r0 + 1, c0) = b[2];
        g(r0 + 1, c0 + 1) = b[3];
    };
    std::array<GaussRational, 4> upper, lower;
    switch (mu) {
        case 0: upper = lower = {one, 0, 0, one}; break;
        case 1: upper = {0, -i, -i, 0}; lower = {0, i, i, 0}; break;              // -+ i sigma_x
        case 2: upper = {0, -one, one, 0}; lower = {0, one, -one, 0}; break;       // -+ i sigma_y
        case 3: upper = {-i, 0, 0, i}; lower = {i, 0, 0, -i}; break;              // -+ i sigma_z
        default: throw std::out_of_range("gamma index must be in 0..3");
    }
    put_block(0, 2, upper);
    put_block(2, 0, lower);
    return i * g;
}

}  // namespace detail

inline const GammaMatrix& gamma(int mu) {
    if (mu < 0 || mu > 3) throw std::out_of_range("gamma index must be in 0..3");
    static const std::array<GammaMatrix, 4> table = {detail::build_gamma(0), detail::build_gamma(1),
                                                     detail::build_gamma(2), detail::build_gamma(3)};
    return table[mu];
}

inline const GammaMatrix& gamma5() {
    static const GammaMatrix g5 = GaussRational(-1) * (gamma(0) * gamma(1) * gamma(2) * gamma(3));
    return g5;
}

struct Gamma {
    int mu;
};
struct Gamma5 {};
struct Slash {
    std::array<Rational, 4> p;
};
using GammaFactor = std::variant<Gamma, Gamma5, Slash>;

inline GammaMatrix slash(const std::array<Rational, 4>& p) {
    GammaMatrix m;
    for (int mu = 0; mu < 4; ++mu)
        if (p[mu] != 0) m = m + GaussRational(p[mu]) * gamma(mu);
    return m;
}

inline GammaMatrix to_matrix(const GammaFactor& f) {
    return std::visit(
        [](const auto& x) -> GammaMatrix {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Gamma>) return gamma(x.mu);
            else if constexpr (std::is_same_v<T, Gamma5>) return gamma5();
            else return slash(x.p);
        },
        f);
}

inline GaussRational trace_product(std::span<const GammaFactor> factors) {
    GammaMatrix m = GammaMatrix::identity();
    for (const auto& f : factors) m = m * to_matrix(f);
    return m.trace();
}

inline GaussRational trace_product(std::initializer_list<GammaFactor> factors) {
    return trace_product(std::span<const GammaFactor>(factors.begin(), factors.size()));
}

inline int epsilon(int mu, int nu, int rho, int sigma) {
    const std::array<int, 4> ix{mu, nu, rho, sigma};
    for (int v : ix)
        if (v < 0 || v > 3) throw std::out_of_range("epsilon index must be in 0..3");
    int sign = 1;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            if (ix[a] == ix[b]) return 0;
            if (ix[a] > ix[b]) sign = -sign;
        }
    return sign;
}

// s in tr(gamma5 g0 g1 g2 g3) = 4 s epsilon(0,1,2,3), measured from the matrices.
inline int trace_sign() {
    static const int s = [] {
        GaussRational t = trace_product({Gamma5{}, Gamma{0}, Gamma{1}, Gamma{2}, Gamma{3}});
        if (!t.is_real() || (t.re != 4 && t.re != -4))
            throw std::logic_error("gamma5 trace normalization is not +-4");
        return t.re > 0 ? 1 : -1;
    }();
    return s;
}

// tr(gamma5 g_a g_n g_b g_m g_c g_r) for all index values, stored as integers (the traces are
// real multiples of 4). Index (a,n,b,m,c,r) maps to ((((a*4+n)*4+b)*4+m)*4+c)*4+r.
struct SixTraceEntry {
    std::uint8_t a, n, b, m, c, r;
    double value;
};

inline const std::vector<SixTraceEntry>& gamma5_six_trace_entries() {
    static const std::vector<SixTraceEntry> entries = [] {
        std::vector<SixTraceEntry> out;
        const GammaMatrix& g5 = gamma5();
        for (int a = 0; a < 4; ++a)
            for (int n = 0; n < 4; ++n) {
                GammaMatrix m2 = g5 * gamma(a) * gamma(n);
                for (int b = 0; b < 4; ++b)
                    for (int m = 0; m < 4; ++m) {
                        GammaMatrix m4 = m2 * gamma(b) * gamma(m);
                        for (int c = 0; c < 4; ++c)
                            for (int r = 0; r < 4; ++r) {
                                GaussRational t = (m4 * gamma(c) * gamma(r)).trace();
                                if (!t.is_real()) throw std::logic_error("six-gamma trace is not real");
                                if (t.re != 0)
                                    out.push_back({std::uint8_t(a), std::uint8_t(n), std::uint8_t(b),
                                                   std::uint8_t(m), std::uint8_t(c), std::uint8_t(r),
                                                   to_double(t.re)});
                            }
                    }
            }
        return out;
    }();
    return entries;
}

}  // namespace abj
