#pragma once

#include "abj/exact.hpp"
#include "abj/kinematics.hpp"
#include "abj/loop_amplitudes.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace abj {

// Order-hbar constants entering the relevant part of the violated identities.
struct RenormalizationConstants {
    Rational R1{1}, R2{1}, R3{1};
    Rational sigma_psibar_psi{0}, sigma_trans{0}, sigma_long{0};
    Rational delta_M2{0};
    Rational delta_g{0};
    Rational F_AAAA{0};
    Rational g{1};
    Rational alpha{1};
    Rational M{1};

    void validate() const {
        if (alpha <= 0) throw std::invalid_argument("alpha must be positive");
        if (M <= 0) throw std::invalid_argument("M must be positive");
    }
};

// Coefficients of i M^2 p_mu and i p^2 p_mu / alpha
inline std::array<Rational, 2> residual_r1_r2(const RenormalizationConstants& c) {
    c.validate();
    const Rational M2 = c.M * c.M;
    return {M2 * (1 - c.R1 * (1 + c.delta_M2 / M2)), (1 - c.R1 * (1 + c.sigma_long)) / c.alpha};
}

// Coefficients of i (p1slash g5)_ij and i (p2slash g5)_ij
inline std::array<Rational, 2> residual_r3_r4(const RenormalizationConstants& c) {
    c.validate();
    const Rational lhs = c.R1 * (c.g + c.delta_g);
    return {lhs - c.g * c.R2 * (1 + c.sigma_psibar_psi), lhs - c.g * c.R3 * (1 + c.sigma_psibar_psi)};
}

inline Rational residual_r6(const RenormalizationConstants& c) { return c.g * (c.g + c.delta_g) * (c.R3 - c.R2); }

using ExactVec4 = std::array<Rational, 4>;
using ExactTensor3 = std::array<Rational, 64>;

// Four-point renormalization momenta p1..p3 (p4 = -p1-p2-p3).
struct FourPointKinematics {
    std::array<ExactVec4, 3> p;
    ExactVec4 p4() const {
        ExactVec4 out;
        for (int mu = 0; mu < 4; ++mu) out[mu] = -(p[0][mu] + p[1][mu] + p[2][mu]);
        return out;
    }
};

inline FourPointKinematics default_four_point(const Rational& scale = Rational(1)) {
    const auto t = tetrahedral_point(scale);
    return {{t.p[0], t.p[1], t.p[2]}};
}

// p4_mu Gamma^{AAAA}_{mu m1 m2 m3} with Gamma^{AAAA} = F/3 (dd + dd + dd), or its first derivative
// in component `component` of momentum `momentum` (1..3).
inline ExactTensor3 residual_r7(const RenormalizationConstants& c, const FourPointKinematics& kin,
                                std::optional<std::pair<int, int>> derivative = std::nullopt) {
    ExactVec4 v;
    if (!derivative) {
        v = kin.p4();
    } else {
        const auto [mom, comp] = *derivative;
        if (mom < 1 || mom > 3 || comp < 0 || comp > 3) throw std::out_of_range("derivative index out of range");
        for (int mu = 0; mu < 4; ++mu) v[mu] = mu == comp ? Rational(-1) : Rational(0);
    }
    const Rational f = c.F_AAAA / 3;
    ExactTensor3 out;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int d = 0; d < 4; ++d) {
                Rational s = 0;
                if (b == d) s += v[a];
                if (a == d) s += v[b];
                if (a == b) s += v[d];
                out[(a * 4 + b) * 4 + d] = f * s;
            }
    return out;
}

inline bool is_zero(const ExactTensor3& t) {
    for (const auto& x : t)
        if (x != 0) return false;
    return true;
}

struct AlgebraicResiduals {
    std::array<Rational, 2> r1_r2;
    std::array<Rational, 2> r3_r4;
    Rational r6;
    // r7 at |w| = 0 and the 12 first derivatives
    std::vector<ExactTensor3> r7;

    bool all_zero() const {
        if (r1_r2[0] != 0 || r1_r2[1] != 0 || r3_r4[0] != 0 || r3_r4[1] != 0 || r6 != 0) return false;
        for (const auto& t : r7)
            if (!is_zero(t)) return false;
        return true;
    }
};

inline AlgebraicResiduals algebraic_residuals(const RenormalizationConstants& c,
                                              const FourPointKinematics& kin = default_four_point()) {
    AlgebraicResiduals r;
    r.r1_r2 = residual_r1_r2(c);
    r.r3_r4 = residual_r3_r4(c);
    r.r6 = residual_r6(c);
    r.r7.push_back(residual_r7(c, kin));
    for (int mom = 1; mom <= 3; ++mom)
        for (int comp = 0; comp < 4; ++comp) r.r7.push_back(residual_r7(c, kin, std::make_pair(mom, comp)));
    return r;
}

// All order-hbar quantities set to zero.
inline RenormalizationConstants solve_relations() { return {}; }

struct FamilyParameters {
    Rational sigma_long{0};
    Rational sigma_psibar_psi{0};
    Rational delta_g{0};
    Rational sigma_trans{0};
    Rational g{1};
    Rational alpha{1};
    Rational M{1};
};

// Solves R2 = R3, R1 = 1/(1+S_long), dM^2/M^2 = S_long, R1 = (1+S_psibarpsi) g/(g+dg) R2, F = 0.
inline RenormalizationConstants solve_relations(const FamilyParameters& p) {
    if (1 + p.sigma_long == 0) throw std::domain_error("1 + sigma_long = 0");
    if (p.g + p.delta_g == 0) throw std::domain_error("g + delta_g = 0");
    if (p.g == 0) throw std::domain_error("g = 0");
    if (1 + p.sigma_psibar_psi == 0) throw std::domain_error("1 + sigma_psibar_psi = 0");
    RenormalizationConstants c;
    c.g = p.g;
    c.alpha = p.alpha;
    c.M = p.M;
    c.validate();
    c.sigma_long = p.sigma_long;
    c.sigma_psibar_psi = p.sigma_psibar_psi;
    c.sigma_trans = p.sigma_trans;
    c.delta_g = p.delta_g;
    c.R1 = 1 / (1 + p.sigma_long);
    c.delta_M2 = p.sigma_long * c.M * c.M;
    c.R2 = c.R1 * (p.g + p.delta_g) / (p.g * (1 + p.sigma_psibar_psi));
    c.R3 = c.R2;
    c.F_AAAA = 0;
    return c;
}

// Second mixed derivative of the contracted triangle at a three-point renormalization point.
struct ObstructionReport {
    Kinematics kin;
    double lambda0 = 0.0;
    // T_{nu rho a b} = d^2 X_{nu rho} / d p2_a d p3_b
    Tensor4 second_derivative;
    // T . eps / 24
    double coefficient = 0.0;
    double reference = kAnomalyCoefficient;
    double relative_deviation = 0.0;
    // largest component of T - coefficient * eps, relative to the coefficient
    double non_epsilon_residual = 0.0;
    // |w| = 0 and |w| = 1 values (largest component)
    double value_w0 = 0.0;
    double value_w1 = 0.0;
    // combinatorial factor multiplying the triangle in the inserted vertex; not folded in
    int combinatorial_factor = 6;
    bool converged = false;
};

// The contracted leg is labeled as leg 1; the derivatives are taken in the other two momenta.
inline ObstructionReport anomaly_obstruction(double lambda0, const Kinematics& kin, double tol = 1e-7,
                                             CubatureOptions opt = {}) {
    if (!kin.non_exceptional()) throw DegenerateKinematics("obstruction needs non-exceptional momenta");
    ObstructionReport rep;
    rep.kin = kin;
    rep.lambda0 = lambda0;
    const double h = 1e-2 * kin.scale();
    opt.rel_tol = tol;
    const auto base = contracted_triangle(kin, lambda0, tol, ContractedForm::Literal, opt);
    rep.converged = base.converged;
    auto X = [&](const Kinematics& k) { return contracted_triangle_on_mesh(k, lambda0, base.mesh).value; };
    rep.value_w0 = base.value.max_abs();
    for (int m = 2; m <= 3; ++m)
        for (int a = 0; a < 4; ++a)
            rep.value_w1 = std::max(rep.value_w1, central_derivative(X, kin, {{m, a}}, h).max_abs());
    const Tensor4 eps = epsilon_tensor();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Tensor2 d = central_derivative(X, kin, {{2, a}, {3, b}}, h);
            for (int n = 0; n < 4; ++n)
                for (int r = 0; r < 4; ++r) rep.second_derivative(n, r, a, b) = d(n, r);
        }
    rep.coefficient = rep.second_derivative.inner(eps) / 24.0;
    rep.relative_deviation = std::abs(rep.coefficient - rep.reference) / rep.reference;
    rep.non_epsilon_residual = (rep.second_derivative - rep.coefficient * eps).max_abs() / std::abs(rep.coefficient);
    return rep;
}

// The three-point renormalization point with the contracted momentum moved to leg 1.
inline Kinematics obstruction_point(double scale = 1.0) { return equilateral_kinematics(scale).relabeled({3, 1, 2}); }

}  // namespace abj
