#pragma once

#include "abj/clifford.hpp"
#include "abj/kinematics.hpp"
#include "abj/quadrature.hpp"
#include "abj/tensor_basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace abj {

inline constexpr double kAnomalyCoefficient = 1.0 / (6.0 * std::numbers::pi * std::numbers::pi);

// Squared invariants in a given order (q1, q2, q3); p2.p3 = (q1 - q2 - q3)/2.
using InvariantArgs = std::array<double, 3>;

inline InvariantArgs ordered_args(const Kinematics& kin, const Perm& sigma) {
    const auto q = kin.squares();
    return {q[sigma[0] - 1], q[sigma[1] - 1], q[sigma[2] - 1]};
}

// D = x135 L^2 + x246 L0^2 + x34(1-x34) q2 + x56(1-x56) q3 + x34 x56 (q1 - q2 - q3)
inline double denominator_D(std::span<const double> x, const CutoffPair& cut, const InvariantArgs& q) {
    const double x34 = x[2] + x[3], x56 = x[4] + x[5];
    const double l2 = cut.lambda * cut.lambda, L2 = cut.lambda0 * cut.lambda0;
    return (x[0] + x[2] + x[4]) * l2 + (x[1] + x[3] + x[5]) * L2 + x34 * (1.0 - x34) * q[1] +
           x56 * (1.0 - x56) * q[2] + x34 * x56 * (q[0] - q[1] - q[2]);
}

inline double denominator_D(std::span<const double> x, const CutoffPair& cut, const Kinematics& kin) {
    return denominator_D(x, cut, InvariantArgs(kin.squares()));
}

namespace detail {

// The A and B integrands (without the measure) at one simplex point, in units where the
// prefactor (L0^2 - L^2)^3 is absorbed into D.
inline void ab_integrands(std::span<const double> x, const CutoffPair& cut, const InvariantArgs& q, double& a,
                          double& b) {
    using std::numbers::pi;
    const double alpha = cut.lambda0 * cut.lambda0 - cut.lambda * cut.lambda;
    const double x12 = x[0] + x[1], x34 = x[2] + x[3], x56 = x[4] + x[5], x1234 = x12 + x34;
    const double d = denominator_D(x, cut, q) / alpha;
    const double i3 = 1.0 / (d * d * d), i4 = i3 / d;
    const double P1 = x34 * x34 * (1.0 - x34 - 3.0 * x12) - x56 * x56 * (1.0 - x56) + x34 * (x12 - x56);
    const double P2 = 3.0 * x56 * (x12 * x12 + x34 * x34) + 2.0 * x12 * x34 - x56 * x1234;
    const double P3 = x12 * x12 * (1.0 - x12 - 3.0 * x34) - x56 * x56 * (1.0 - x56) + x12 * (x34 - x56);
    a = ((2.0 * x56 - x1234) * i3 + (q[0] * P1 + q[1] * P2 + q[2] * P3) / alpha * i4) / (pi * pi);
    b = 2.0 * (x34 * (x12 * x12 + x56 * x56) - 3.0 * x12 * x34 - x56 * (x12 * x12 + x34 * x34)) * i4 /
        (alpha * pi * pi);
}

}  // namespace detail

struct AmplitudeOptions {
    double tol = 1e-6;
    CubatureOptions cubature{};
};

inline SimplexIntegrand ab_integrand(const InvariantArgs& q, const CutoffPair& cut, bool want_b) {
    SimplexIntegrand f;
    f.dim = 6;
    f.components = 1;
    f.singular_faces = {{1, 3, 5}};
    f.eval = [q, cut, want_b](std::span<const double> x, std::span<double> out) {
        double a, b;
        detail::ab_integrands(x, cut, q, a, b);
        out[0] = want_b ? b : a;
    };
    return f;
}

inline IntegralResult amplitude_A(const InvariantArgs& q, const CutoffPair& cut, const AmplitudeOptions& opt = {}) {
    cut.validate();
    return integrate_simplex(ab_integrand(q, cut, false), opt.tol, opt.cubature);
}

inline IntegralResult amplitude_B(const InvariantArgs& q, const CutoffPair& cut, const AmplitudeOptions& opt = {}) {
    cut.validate();
    return integrate_simplex(ab_integrand(q, cut, true), opt.tol, opt.cubature);
}

// A and B at all six orderings of the squared invariants, from one 12-component integral.
struct ScalarAmplitudes {
    AmplitudeTable A{}, B{}, A_err{}, B_err{};
    std::size_t evaluations = 0;
    bool converged = false;
};

inline ScalarAmplitudes scalar_amplitudes(const Kinematics& kin, const CutoffPair& cut,
                                          const AmplitudeOptions& opt = {}) {
    cut.validate();
    if (!(cut.lambda > 0.0) && !kin.non_exceptional())
        throw DegenerateKinematics("exceptional momenta require lambda > 0");
    ScalarAmplitudes s;
    if (cut.lambda == cut.lambda0) {
        s.converged = true;
        return s;
    }
    std::array<InvariantArgs, 6> args;
    for (int p = 0; p < 6; ++p) args[p] = ordered_args(kin, all_perms()[p]);
    SimplexIntegrand f;
    f.dim = 6;
    f.components = 12;
    f.singular_faces = {{1, 3, 5}};
    f.eval = [args, cut](std::span<const double> x, std::span<double> out) {
        for (int p = 0; p < 6; ++p) detail::ab_integrands(x, cut, args[p], out[p], out[6 + p]);
    };
    CubatureOptions co = opt.cubature;
    co.rel_tol = opt.tol;
    co.norm = ErrorNorm::Max;
    const auto r = integrate_simplex_vector(f, co);
    for (int p = 0; p < 6; ++p) {
        s.A[p] = r.value[p];
        s.B[p] = r.value[6 + p];
        s.A_err[p] = r.error[p];
        s.B_err[p] = r.error[6 + p];
    }
    s.evaluations = r.evaluations;
    s.converged = r.converged;
    return s;
}

// Overall constants multiplying the A-part and the B-part of the two-amplitude form.
struct Normalization {
    double n_a = 1.0;
    double n_b = 1.0;
};

struct TensorResult {
    RankThreeTensor value;
    RankThreeTensor error;
    std::size_t evaluations = 0;
    bool converged = false;
    CubatureMesh mesh;
};

// Tensor and per-component error bound from scalar amplitudes.
inline TensorResult assemble_gamma(const ScalarAmplitudes& s, const Kinematics& kin, const Normalization& n) {
    TensorResult out;
    AmplitudeTable A, B, zero{};
    for (int p = 0; p < 6; ++p) {
        A[p] = n.n_a * s.A[p];
        B[p] = n.n_b * s.B[p];
    }
    out.value = reconstruct_from_AB(A, B, kin);
    for (int j = 0; j < 12; ++j) {
        AmplitudeTable ua{}, ub{};
        double e;
        if (j < 6) {
            ua[j] = 1.0;
            e = std::abs(n.n_a) * s.A_err[j];
        } else {
            ub[j - 6] = 1.0;
            e = std::abs(n.n_b) * s.B_err[j - 6];
        }
        const auto d = reconstruct_from_AB(j < 6 ? ua : zero, j < 6 ? zero : ub, kin);
        for (int i = 0; i < 64; ++i) out.error.c[i] += e * std::abs(d.c[i]);
    }
    out.evaluations = s.evaluations;
    out.converged = s.converged;
    return out;
}

inline TensorResult gamma_AAA(const Kinematics& kin, const CutoffPair& cut, const Normalization& n,
                              const AmplitudeOptions& opt = {}) {
    return assemble_gamma(scalar_amplitudes(kin, cut, opt), kin, n);
}

namespace detail {

// 2 tr[g5 a g_n b g_m c g_r] for the three slashed vectors, added into out (64 entries).
inline void add_triangle_trace(const Vec4& a, const Vec4& b, const Vec4& c, double w, double* out) {
    for (const auto& e : gamma5_six_trace_entries())
        out[(e.m * 4 + e.n) * 4 + e.r] += w * e.value * a[e.a] * b[e.b] * c[e.c];
}

}  // namespace detail

// 2 int_k tr[g5 S(k) g_n S(k-p2) g_m S(k+p3) g_r] as an R^4 integrand.
inline R4Integrand triangle_integrand(const Kinematics& kin, const CutoffPair& cut) {
    R4Integrand f;
    f.components = 64;
    f.decay_exponent = 9.0;
    f.radial_scale = std::max({kin.scale(), cut.lambda, 1e-3 * cut.lambda0});
    const FermionPropagator S{cut};
    const Vec4 p2 = kin.p2, p3 = kin.p3();
    f.eval = [S, p2, p3](const Vec4& k, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        detail::add_triangle_trace(S(k), S(k - p2), S(k + p3), 2.0, out.data());
    };
    return f;
}

inline TensorResult gamma_AAA_direct(const Kinematics& kin, const CutoffPair& cut, double tol,
                                     CubatureOptions opt = {}) {
    cut.validate();
    if (!(tol > 0)) throw std::invalid_argument("gamma_AAA_direct: tol must be positive");
    TensorResult out;
    if (cut.lambda == cut.lambda0) {
        out.converged = true;
        return out;
    }
    if (!(cut.lambda > 0.0) && !kin.non_exceptional())
        throw DegenerateKinematics("exceptional momenta require lambda > 0");
    opt.rel_tol = tol;
    opt.norm = ErrorNorm::Max;
    const auto f = triangle_integrand(kin, cut);
    auto r = integrate_r4_vector(f, opt);
    for (int i = 0; i < 64; ++i) {
        out.value.c[i] = r.value[i];
        out.error.c[i] = r.error[i];
    }
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.mesh = std::move(r.mesh);
    return out;
}

inline TensorResult gamma_AAA_direct_on_mesh(const Kinematics& kin, const CutoffPair& cut, const CubatureMesh& mesh,
                                             unsigned workers = 1) {
    const auto f = triangle_integrand(kin, cut);
    auto r = integrate_r4_on_mesh(f, mesh, workers);
    TensorResult out;
    for (int i = 0; i < 64; ++i) {
        out.value.c[i] = r.value[i];
        out.error.c[i] = r.error[i];
    }
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.mesh = mesh;
    return out;
}

// p1_mu G_{mu nu rho}
inline Tensor2 contract_first(const Vec4& p, const RankThreeTensor& g) {
    Tensor2 t;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) t(n, r) += p[m] * g(m, n, r);
    return t;
}

struct NormalizationFit {
    Normalization normalization;
    double relative_residual = 0.0;
    Kinematics kin;
    CutoffPair cutoffs;
};

// Least-squares fit of the A-part and B-part constants against the direct loop.
inline NormalizationFit calibrate_normalization(const Kinematics& kin, const CutoffPair& cut, double tol = 1e-5) {
    const auto s = scalar_amplitudes(kin, cut, {tol, {}});
    const auto ga = assemble_gamma(s, kin, {1.0, 0.0}).value;
    const auto gb = assemble_gamma(s, kin, {0.0, 1.0}).value;
    const auto gd = gamma_AAA_direct(kin, cut, tol).value;
    const double aa = ga.inner(ga), ab = ga.inner(gb), bb = gb.inner(gb);
    const double ad = ga.inner(gd), bd = gb.inner(gd);
    const double det = aa * bb - ab * ab;
    if (!(std::abs(det) > 1e-300)) throw DegenerateKinematics("calibration point does not separate the A and B parts");
    NormalizationFit fit;
    fit.normalization = {(bb * ad - ab * bd) / det, (aa * bd - ab * ad) / det};
    fit.relative_residual =
        (fit.normalization.n_a * ga + fit.normalization.n_b * gb - gd).max_abs() / gd.max_abs();
    fit.kin = kin;
    fit.cutoffs = cut;
    return fit;
}

inline Kinematics calibration_kinematics() { return {Vec4{1.0, 0.2, 0.0, 0.1}, Vec4{-0.3, 0.9, 0.2, 0.0}}; }
inline CutoffPair calibration_cutoffs() { return {1.0, 3.0}; }

// Normalization fitted once per process at the calibration point.
inline const NormalizationFit& fitted_normalization() {
    static const NormalizationFit fit = calibrate_normalization(calibration_kinematics(), calibration_cutoffs());
    return fit;
}

// ---------------------------------------------------------------------------------------------
// Contracted triangle

namespace detail {

struct ContractedArgs {
    double p22, p33, p23, lambda0;
};

inline ContractedArgs contracted_args(const Kinematics& kin, double lambda0) {
    const Vec4 p2 = kin.p2, p3 = kin.p3();
    return {norm2(p2), norm2(p3), dot(p2, p3), lambda0};
}

// x25(1-x25) p2^2 + x3(1-x3) p3^2 + 2 x25 x3 p2.p3
inline double contracted_Q(std::span<const double> x, const ContractedArgs& a) {
    const double x25 = x[1] + x[4], x3 = x[2];
    return x25 * (1.0 - x25) * a.p22 + x3 * (1.0 - x3) * a.p33 + 2.0 * x25 * x3 * a.p23;
}

}  // namespace detail

enum class ContractedForm {
    // the single-insertion formula
    Literal,
    // average of the formula and its p2 <-> p3 image, matching p1.Gamma at any p2^2, p3^2
    Symmetrized,
};

inline SimplexIntegrand contracted_integrand(const Kinematics& kin, double lambda0,
                                             ContractedForm form = ContractedForm::Literal) {
    const auto a = detail::contracted_args(kin, lambda0);
    detail::ContractedArgs b = a;
    std::swap(b.p22, b.p33);
    const double L2 = lambda0 * lambda0;
    return SimplexIntegrand::scalar(
        5,
        [a, b, L2, form](std::span<const double> x) {
            const double x123 = x[0] + x[1] + x[2];
            const double d = x123 + detail::contracted_Q(x, a) / L2;
            double v = x[2] / (d * d * d);
            if (form == ContractedForm::Symmetrized) {
                const double e = x123 + detail::contracted_Q(x, b) / L2;
                v = 0.5 * (v + x[2] / (e * e * e));
            }
            return v;
        },
        {{0, 1, 2}});
}

// Integrand of the difference between the finite-cutoff and the infinite-cutoff integrals.
inline SimplexIntegrand contracted_deviation_integrand(const Kinematics& kin, double lambda0) {
    const auto args = detail::contracted_args(kin, lambda0);
    const double L2 = lambda0 * lambda0;
    return SimplexIntegrand::scalar(
        5,
        [args, L2](std::span<const double> x) {
            const double s = x[0] + x[1] + x[2];
            const double a = detail::contracted_Q(x, args) / L2;
            const double t = s + a;
            return -x[2] * (3.0 * a * s * s + 3.0 * a * a * s + a * a * a) / (s * s * s * t * t * t);
        },
        {{0, 1, 2}});
}

struct ContractedResult {
    // X_{nu rho} = c eps_{nu rho a b} p2_a p3_b
    Tensor2 value;
    double coefficient = 0.0;
    double coefficient_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
    CubatureMesh mesh;
};

inline ContractedResult contracted_from_integral(const Kinematics& kin, const VectorIntegralResult& r) {
    using std::numbers::pi;
    ContractedResult out;
    out.coefficient = 2.0 / (pi * pi) * r.value[0];
    out.coefficient_error = 2.0 / (pi * pi) * r.error[0];
    out.value = out.coefficient * eps_trailing2(kin.p2, kin.p3());
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.mesh = r.mesh;
    return out;
}

inline ContractedResult contracted_triangle(const Kinematics& kin, double lambda0, double tol,
                                            ContractedForm form = ContractedForm::Literal, CubatureOptions opt = {}) {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("contracted_triangle: lambda0 must be positive");
    if (!(tol > 0)) throw std::invalid_argument("contracted_triangle: tol must be positive");
    opt.rel_tol = tol;
    return contracted_from_integral(kin, integrate_simplex_vector(contracted_integrand(kin, lambda0, form), opt));
}

inline ContractedResult contracted_triangle_on_mesh(const Kinematics& kin, double lambda0, const CubatureMesh& mesh,
                                                    ContractedForm form = ContractedForm::Literal,
                                                    unsigned workers = 1) {
    return contracted_from_integral(kin,
                                    integrate_simplex_on_mesh(contracted_integrand(kin, lambda0, form), mesh, workers));
}

// Largest componentwise relative difference of a from b; components of b below floor * max|b| are
// compared against that floor.
inline double max_relative_difference(const RankThreeTensor& a, const RankThreeTensor& b, double floor = 1e-3) {
    const double scale = std::max(floor * b.max_abs(), std::numeric_limits<double>::min());
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) worst = std::max(worst, std::abs(a.c[i] - b.c[i]) / std::max(std::abs(b.c[i]), scale));
    return worst;
}

// ---------------------------------------------------------------------------------------------
// Finite differences in the independent momenta p2, p3

// A derivative direction: momentum label (2 or 3) and component.
struct MomentumDirection {
    int momentum = 2;
    int component = 0;
};

inline Kinematics shifted(const Kinematics& kin, const std::vector<std::pair<MomentumDirection, double>>& shifts) {
    Vec4 p2 = kin.p2, p3 = kin.p3();
    for (const auto& [d, h] : shifts) {
        if (d.component < 0 || d.component > 3) throw std::out_of_range("momentum component must be 0..3");
        if (d.momentum == 2) p2[d.component] += h;
        else if (d.momentum == 3) p3[d.component] += h;
        else throw std::invalid_argument("derivatives are taken in p2 or p3");
    }
    return {-(p2 + p3), p2};
}

// Central difference of order |w| <= 2 with step h, one Richardson level (h and h/2).
template <class F>
Tensor2 central_derivative(F&& f, const Kinematics& kin, const std::vector<MomentumDirection>& w, double h) {
    auto diff = [&](double s) {
        if (w.empty()) return f(kin);
        if (w.size() == 1) {
            Tensor2 d = f(shifted(kin, {{w[0], s}})) - f(shifted(kin, {{w[0], -s}}));
            return (1.0 / (2.0 * s)) * d;
        }
        if (w.size() != 2) throw std::invalid_argument("derivative order must be at most 2");
        Tensor2 d = f(shifted(kin, {{w[0], s}, {w[1], s}})) - f(shifted(kin, {{w[0], s}, {w[1], -s}})) -
                    f(shifted(kin, {{w[0], -s}, {w[1], s}})) + f(shifted(kin, {{w[0], -s}, {w[1], -s}}));
        return (1.0 / (4.0 * s * s)) * d;
    };
    if (w.empty()) return diff(h);
    const Tensor2 coarse = diff(h), fine = diff(0.5 * h);
    return (4.0 / 3.0) * fine - (1.0 / 3.0) * coarse;
}

struct UVScanRow {
    double lambda0 = 0.0;
    double deviation = 0.0;
    double error = 0.0;
    bool converged = false;
};

struct UVScanReport {
    std::vector<UVScanRow> rows;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct LinearFit {
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2 || x.size() != y.size()) throw std::invalid_argument("fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double my = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

// |d^w (contracted(L0) - limit)| over a list of cutoffs, with a log-log slope fit.
inline UVScanReport uv_scan(const Kinematics& kin, const std::vector<double>& lambda0_list,
                            const std::vector<MomentumDirection>& w = {}, double tol = 1e-8,
                            CubatureOptions opt = {}) {
    using std::numbers::pi;
    if (w.size() > 2) throw std::invalid_argument("uv_scan: derivative order must be at most 2");
    for (std::size_t i = 1; i < lambda0_list.size(); ++i)
        if (!(lambda0_list[i] > lambda0_list[i - 1])) throw std::invalid_argument("uv_scan: cutoffs must ascend");
    const double h = 1e-2 * kin.scale();
    // the step error enters at O(h^4) after Richardson; the integral must be finer than that
    opt.rel_tol = w.empty() ? tol : std::min(tol, h * h * tol);
    UVScanReport rep;
    std::vector<double> lx, ly;
    for (double L0 : lambda0_list) {
        const auto base = integrate_simplex_vector(contracted_deviation_integrand(kin, L0), opt);
        auto dev = [&](const Kinematics& k) {
            const auto r = integrate_simplex_on_mesh(contracted_deviation_integrand(k, L0), base.mesh, opt.workers);
            return (2.0 / (pi * pi) * r.value[0]) * eps_trailing2(k.p2, k.p3());
        };
        const Tensor2 d = central_derivative(dev, kin, w, h);
        UVScanRow row;
        row.lambda0 = L0;
        row.deviation = d.max_abs();
        row.error = 2.0 / (pi * pi) * base.error[0] * eps_trailing2(kin.p2, kin.p3()).max_abs();
        row.converged = base.converged;
        rep.rows.push_back(row);
        lx.push_back(std::log(L0));
        ly.push_back(std::log(row.deviation));
    }
    if (rep.rows.size() >= 2) {
        const auto f = fit_line(lx, ly);
        rep.slope = f.slope;
        rep.intercept = f.intercept;
        rep.r_squared = f.r_squared;
    }
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Second p2-derivative of the triangle at p2 = 0

// The triangle with the Laplacian in p2 applied to the middle propagator, at p2 = 0.
inline R4Integrand laplacian_triangle_integrand(const Vec4& p3, const CutoffPair& cut) {
    R4Integrand f;
    f.components = 64;
    f.decay_exponent = 9.0;
    f.radial_scale = std::max(cut.lambda, 1e-3 * norm(p3));
    const FermionPropagator S{cut};
    f.eval = [S, p3](const Vec4& k, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        const double u = norm2(k);
        detail::add_triangle_trace(S(k), S.laplacian_scalar(u) * k, S(k + p3), 2.0, out.data());
    };
    return f;
}

struct IRScanRow {
    double lambda = 0.0;
    // coefficient of eps_{mnrs} p3_s in the Laplacian
    double projection = 0.0;
    double projection_error = 0.0;
    double f = 0.0;
    double f_bound = 0.0;
    bool within_bound = false;
    // largest component orthogonal to eps_{mnrs} p3_s
    double orthogonal_residual = 0.0;
    bool converged = false;
};

struct IRScanReport {
    std::vector<IRScanRow> rows;
    double mu = 0.0;
    // fitted c in projection (p3^2 + L^2) = c ln(L^2/mu^2) + d
    double coefficient = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    // s / (2 pi^2)
    double reference = 0.0;
    double relative_deviation = 0.0;
    bool bound_ok = false;
    bool fit_ok = false;
};

inline double ir_f_bound(double p3sq, double lambda) {
    using std::numbers::pi;
    const double l2 = lambda * lambda;
    return 20.0 / (pi * pi) / std::sqrt(p3sq * (p3sq + 4.0 * l2)) * std::log(1.0 + std::sqrt((p3sq + 4.0 * l2) / p3sq));
}

inline TensorResult ir_laplacian(const Vec4& p3, const CutoffPair& cut, double tol, CubatureOptions opt = {}) {
    cut.validate();
    if (!(cut.lambda > 0.0)) throw std::invalid_argument("ir_laplacian: lambda must be positive");
    opt.rel_tol = tol;
    opt.norm = ErrorNorm::Max;
    auto r = integrate_r4_vector(laplacian_triangle_integrand(p3, cut), opt);
    TensorResult out;
    for (int i = 0; i < 64; ++i) {
        out.value.c[i] = r.value[i];
        out.error.c[i] = r.error[i];
    }
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.mesh = std::move(r.mesh);
    return out;
}

inline IRScanReport ir_second_derivative_scan(const Vec4& p3, const std::vector<double>& lambda_list, double lambda0,
                                              double tol = 1e-4, double min_r_squared = 0.99,
                                              CubatureOptions opt = {}) {
    using std::numbers::pi;
    const double p3sq = norm2(p3);
    if (!(p3sq > 0.0)) throw DegenerateKinematics("ir scan needs p3 != 0");
    if (lambda_list.size() < 2) throw std::invalid_argument("ir scan needs at least two lambda values");
    for (std::size_t i = 1; i < lambda_list.size(); ++i)
        if (!(lambda_list[i] < lambda_list[i - 1])) throw std::invalid_argument("ir scan: lambda must decrease");
    IRScanReport rep;
    rep.mu = std::sqrt(p3sq);
    rep.reference = trace_sign() / (2.0 * pi * pi);
    const RankThreeTensor T = eps_contract_last(p3);
    const double tt = T.inner(T);
    std::vector<double> lx, ly;
    for (double L : lambda_list) {
        const auto lap = ir_laplacian(p3, {L, lambda0}, tol, opt);
        IRScanRow row;
        row.lambda = L;
        row.projection = lap.value.inner(T) / tt;
        for (int i = 0; i < 64; ++i) row.projection_error += lap.error.c[i] * std::abs(T.c[i]);
        row.projection_error /= tt;
        row.orthogonal_residual = (lap.value - row.projection * T).max_abs();
        const double log_term = std::log(L * L / p3sq);
        row.f = row.projection - rep.reference * log_term / (p3sq + L * L);
        row.f_bound = ir_f_bound(p3sq, L);
        row.within_bound = std::abs(row.f) <= row.f_bound;
        row.converged = lap.converged;
        rep.rows.push_back(row);
        lx.push_back(log_term);
        ly.push_back(row.projection * (p3sq + L * L));
    }
    const auto fit = fit_line(lx, ly);
    rep.coefficient = fit.slope;
    rep.intercept = fit.intercept;
    rep.r_squared = fit.r_squared;
    rep.relative_deviation = std::abs(rep.coefficient - rep.reference) / std::abs(rep.reference);
    rep.bound_ok = std::all_of(rep.rows.begin(), rep.rows.end(), [](const IRScanRow& r) { return r.within_bound; });
    rep.fit_ok = rep.r_squared >= min_r_squared;
    return rep;
}

struct BoseResidual {
    Perm legs{1, 2, 3};
    double max_residual = 0.0;
    // combined error estimate at the component where the residual is largest
    double combined_error = 0.0;
    // largest ratio residual / combined error over the components
    double max_ratio = 0.0;
};

// Gamma_{mnr}(p1,p2,p3) against Gamma_{I_a I_b I_c}(p_a,p_b,p_c) for each leg permutation (a,b,c).
inline std::vector<BoseResidual> bose_residuals(const Kinematics& kin, const CutoffPair& cut, const Normalization& n,
                                                const AmplitudeOptions& opt = {}) {
    const auto base = gamma_AAA(kin, cut, n, opt);
    std::vector<BoseResidual> out;
    for (const Perm& legs : all_perms()) {
        const auto g = gamma_AAA(kin.relabeled(legs), cut, n, opt);
        BoseResidual r;
        r.legs = legs;
        for (int m = 0; m < 4; ++m)
            for (int nu = 0; nu < 4; ++nu)
                for (int rho = 0; rho < 4; ++rho) {
                    const std::array<int, 3> I{m, nu, rho};
                    const int a = I[legs[0] - 1], b = I[legs[1] - 1], c = I[legs[2] - 1];
                    const double d = std::abs(base.value(m, nu, rho) - g.value(a, b, c));
                    const double e = base.error(m, nu, rho) + g.error(a, b, c);
                    if (d > r.max_residual) {
                        r.max_residual = d;
                        r.combined_error = e;
                    }
                    if (e > 0) r.max_ratio = std::max(r.max_ratio, d / e);
                    else if (d > 0) r.max_ratio = std::numeric_limits<double>::infinity();
                }
        out.push_back(r);
    }
    return out;
}

}  // namespace abj
