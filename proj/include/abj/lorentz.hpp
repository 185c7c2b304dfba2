#pragma once

#include "abj/clifford.hpp"

#include <array>
#include <cmath>

namespace abj {

using Vec4 = std::array<double, 4>;

inline double dot(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }
inline double norm2(const Vec4& a) { return dot(a, a); }
inline double norm(const Vec4& a) { return std::sqrt(norm2(a)); }
inline Vec4 operator+(const Vec4& a, const Vec4& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
inline Vec4 operator-(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }
inline Vec4 operator-(const Vec4& a) { return {-a[0], -a[1], -a[2], -a[3]}; }
inline Vec4 operator*(double s, const Vec4& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

inline const std::array<int, 256>& epsilon_table() {
    static const std::array<int, 256> t = [] {
        std::array<int, 256> e{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int d = 0; d < 4; ++d) e[((a * 4 + b) * 4 + c) * 4 + d] = epsilon(a, b, c, d);
        return e;
    }();
    return t;
}

inline int eps4(int a, int b, int c, int d) { return epsilon_table()[((a * 4 + b) * 4 + c) * 4 + d]; }

template <int Rank>
struct RealTensor {
    static constexpr int size = Rank == 2 ? 16 : (Rank == 3 ? 64 : 256);
    std::array<double, size> c{};

    double& at(int i) { return c[i]; }
    double at(int i) const { return c[i]; }

    double& operator()(int a, int b) requires(Rank == 2) { return c[a * 4 + b]; }
    double operator()(int a, int b) const requires(Rank == 2) { return c[a * 4 + b]; }
    double& operator()(int a, int b, int d) requires(Rank == 3) { return c[(a * 4 + b) * 4 + d]; }
    double operator()(int a, int b, int d) const requires(Rank == 3) { return c[(a * 4 + b) * 4 + d]; }
    double& operator()(int a, int b, int d, int e) requires(Rank == 4) { return c[((a * 4 + b) * 4 + d) * 4 + e]; }
    double operator()(int a, int b, int d, int e) const requires(Rank == 4) {
        return c[((a * 4 + b) * 4 + d) * 4 + e];
    }

    RealTensor& operator+=(const RealTensor& o) {
        for (int i = 0; i < size; ++i) c[i] += o.c[i];
        return *this;
    }
    RealTensor& operator-=(const RealTensor& o) {
        for (int i = 0; i < size; ++i) c[i] -= o.c[i];
        return *this;
    }
    RealTensor& operator*=(double s) {
        for (auto& x : c) x *= s;
        return *this;
    }
    friend RealTensor operator+(RealTensor a, const RealTensor& b) { return a += b; }
    friend RealTensor operator-(RealTensor a, const RealTensor& b) { return a -= b; }
    friend RealTensor operator*(double s, RealTensor a) { return a *= s; }

    double max_abs() const {
        double m = 0;
        for (double x : c) m = std::max(m, std::abs(x));
        return m;
    }
    double frobenius() const {
        double s = 0;
        for (double x : c) s += x * x;
        return std::sqrt(s);
    }
    double inner(const RealTensor& o) const {
        double s = 0;
        for (int i = 0; i < size; ++i) s += c[i] * o.c[i];
        return s;
    }
};

using Tensor2 = RealTensor<2>;
using RankThreeTensor = RealTensor<3>;
using Tensor4 = RealTensor<4>;

// eps_{t mu nu rho} a_t
inline RankThreeTensor eps_contract1(const Vec4& a) {
    RankThreeTensor t;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) {
                double s = 0;
                for (int x = 0; x < 4; ++x) s += eps4(x, m, n, r) * a[x];
                t(m, n, r) = s;
            }
    return t;
}

// eps_{mu nu rho sigma} a_sigma (contraction on the last slot)
inline RankThreeTensor eps_contract_last(const Vec4& a) {
    RankThreeTensor t;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) {
                double s = 0;
                for (int x = 0; x < 4; ++x) s += eps4(m, n, r, x) * a[x];
                t(m, n, r) = s;
            }
    return t;
}

// eps_{a b mu nu} p_a q_b
inline Tensor2 eps_contract2(const Vec4& p, const Vec4& q) {
    Tensor2 t;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            double s = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += eps4(a, b, m, n) * p[a] * q[b];
            t(m, n) = s;
        }
    return t;
}

// eps_{mu nu a b} p_a q_b
inline Tensor2 eps_trailing2(const Vec4& p, const Vec4& q) {
    Tensor2 t;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            double s = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += eps4(m, n, a, b) * p[a] * q[b];
            t(m, n) = s;
        }
    return t;
}

inline Tensor4 epsilon_tensor() {
    Tensor4 t;
    for (int i = 0; i < 256; ++i) t.c[i] = epsilon_table()[i];
    return t;
}

}  // namespace abj
