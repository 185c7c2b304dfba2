#pragma once

#include "abj/exact.hpp"
#include "abj/lorentz.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace abj {

class DegenerateKinematics : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Three incoming Euclidean momenta with p1 + p2 + p3 = 0; p3 is always derived.
struct Kinematics {
    Vec4 p1{};
    Vec4 p2{};

    Kinematics() = default;
    Kinematics(const Vec4& a, const Vec4& b) : p1(a), p2(b) {}

    Vec4 p3() const { return -(p1 + p2); }
    Vec4 momentum(int i) const {
        switch (i) {
            case 1: return p1;
            case 2: return p2;
            case 3: return p3();
            default: throw std::out_of_range("momentum label must be 1, 2 or 3");
        }
    }
    std::array<double, 3> squares() const { return {norm2(p1), norm2(p2), norm2(p3())}; }
    double scale() const {
        const auto q = squares();
        return std::sqrt(std::max({q[0], q[1], q[2]}));
    }

    // No nontrivial subsum vanishes: every single momentum is nonzero.
    bool non_exceptional(double rel_tol = 1e-12) const {
        const double s = scale();
        if (s == 0.0) return false;
        for (int i = 1; i <= 3; ++i)
            if (norm(momentum(i)) <= rel_tol * s) return false;
        return true;
    }

    // Kinematics with legs relabeled: new leg j carries old momentum perm[j] (labels 1..3).
    Kinematics relabeled(const std::array<int, 3>& perm) const { return {momentum(perm[0]), momentum(perm[1])}; }
};

struct CutoffPair {
    double lambda = 0.0;
    double lambda0 = 1.0;

    void validate() const {
        if (!(lambda >= 0.0) || !(lambda0 > 0.0) || !(lambda <= lambda0) || !std::isfinite(lambda0))
            throw std::invalid_argument("cutoffs must satisfy 0 <= lambda <= lambda0 < infinity");
    }
};

// S(k) sigma_{Lambda,Lambda0}(k^2) = kslash f(k^2) with the Pauli-Villars form
// f(u) = (Lambda0^2 - Lambda^2) / ((u + Lambda^2)(u + Lambda0^2)).
struct FermionPropagator {
    CutoffPair cutoffs;

    double scalar(double u) const {
        const double l2 = cutoffs.lambda * cutoffs.lambda, L2 = cutoffs.lambda0 * cutoffs.lambda0;
        return (L2 - l2) / ((u + l2) * (u + L2));
    }
    Vec4 operator()(const Vec4& k) const { return scalar(norm2(k)) * k; }

    // Laplacian in k of kslash f(k^2) is kslash (12 f' + 4 k^2 f''), derivatives in u = k^2.
    double laplacian_scalar(double u) const {
        const double l2 = cutoffs.lambda * cutoffs.lambda, L2 = cutoffs.lambda0 * cutoffs.lambda0;
        const double g = 1.0 / ((u + l2) * (u + L2));
        const double s = 2.0 * u + l2 + L2;
        const double g1 = -s * g * g;
        const double g2 = -2.0 * g * g + 2.0 * s * s * g * g * g;
        return (L2 - l2) * (12.0 * g1 + 4.0 * u * g2);
    }
};

// Equilateral configuration in the (0,1) coordinate plane with |p_i| = scale.
inline Kinematics equilateral_kinematics(double scale = 1.0) {
    const double h = std::sqrt(3.0) / 2.0;
    return {Vec4{scale, 0.0, 0.0, 0.0}, Vec4{-0.5 * scale, h * scale, 0.0, 0.0}};
}

// Regular tetrahedron: rational directions summing to zero, times a rational scale.
struct TetrahedralPoint {
    std::array<std::array<Rational, 4>, 4> p;
};

inline TetrahedralPoint tetrahedral_point(const Rational& scale = Rational(1)) {
    const std::array<std::array<int, 4>, 4> dirs = {
        {{1, 1, 1, 0}, {1, -1, -1, 0}, {-1, 1, -1, 0}, {-1, -1, 1, 0}}};
    TetrahedralPoint t;
    for (int i = 0; i < 4; ++i)
        for (int mu = 0; mu < 4; ++mu) t.p[i][mu] = scale * dirs[i][mu];
    return t;
}

// Proper rotation of R^4 built from two plane rotations.
inline std::array<Vec4, 4> rotation_matrix(double a01, double a23, double a02) {
    auto rot = [](int i, int j, double a) {
        std::array<Vec4, 4> m{};
        for (int k = 0; k < 4; ++k) m[k][k] = 1.0;
        m[i][i] = std::cos(a);
        m[j][j] = std::cos(a);
        m[i][j] = -std::sin(a);
        m[j][i] = std::sin(a);
        return m;
    };
    auto mul = [](const std::array<Vec4, 4>& a, const std::array<Vec4, 4>& b) {
        std::array<Vec4, 4> m{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) m[i][j] += a[i][k] * b[k][j];
        return m;
    };
    return mul(mul(rot(0, 1, a01), rot(2, 3, a23)), rot(0, 2, a02));
}

inline Vec4 rotate_vector(const std::array<Vec4, 4>& R, const Vec4& v) {
    Vec4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i] += R[i][j] * v[j];
    return out;
}

inline RankThreeTensor rotate_tensor(const std::array<Vec4, 4>& R, const RankThreeTensor& t) {
    RankThreeTensor a, b, c;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += R[m][k] * t(k, n, r);
                a(m, n, r) = s;
            }
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += R[n][k] * a(m, k, r);
                b(m, n, r) = s;
            }
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += R[r][k] * b(m, n, k);
                c(m, n, r) = s;
            }
    return c;
}

}  // namespace abj
