#pragma once

#include "abj/kinematics.hpp"

#include <Eigen/Dense>

#include <array>
#include <random>
#include <string>
#include <vector>

namespace abj {

using Perm = std::array<int, 3>;

// Orderings of the squared invariants in a fixed enumeration.
inline const std::array<Perm, 6>& all_perms() {
    static const std::array<Perm, 6> p = {
        {{1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}}};
    return p;
}

inline int perm_index(const Perm& p) {
    const auto& all = all_perms();
    for (int i = 0; i < 6; ++i)
        if (all[i] == p) return i;
    throw std::invalid_argument("not a permutation of (1,2,3)");
}

inline std::string perm_name(const Perm& p) {
    return std::to_string(p[0]) + std::to_string(p[1]) + std::to_string(p[2]);
}

// (sigma o tau) = (sigma_{tau1}, sigma_{tau2}, sigma_{tau3})
inline Perm compose(const Perm& sigma, const Perm& tau) {
    return {sigma[tau[0] - 1], sigma[tau[1] - 1], sigma[tau[2] - 1]};
}

// The eight basis tensors in the order
// p1_t eps_tmnr, p2_t eps_tmnr, p1_n E_mr, p2_n E_mr, p1_m E_nr, p2_m E_nr, p1_r E_mn, p2_r E_mn
// with E_xy = eps_{a b x y} p1_a p2_b.
inline std::array<RankThreeTensor, 8> basis_tensors(const Vec4& p1, const Vec4& p2) {
    std::array<RankThreeTensor, 8> T;
    T[0] = eps_contract1(p1);
    T[1] = eps_contract1(p2);
    const Tensor2 E = eps_contract2(p1, p2);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) {
                T[2](m, n, r) = p1[n] * E(m, r);
                T[3](m, n, r) = p2[n] * E(m, r);
                T[4](m, n, r) = p1[m] * E(n, r);
                T[5](m, n, r) = p2[m] * E(n, r);
                T[6](m, n, r) = p1[r] * E(m, n);
                T[7](m, n, r) = p2[r] * E(m, n);
            }
    return T;
}

inline std::array<RankThreeTensor, 8> basis_tensors(const Kinematics& kin) { return basis_tensors(kin.p1, kin.p2); }

struct InvariantSet {
    std::array<double, 8> a{};
    std::array<double, 3> args{};
    double condition_number = 0.0;
    double residual_norm = 0.0;
    int rank = 0;
    // orthonormal basis of coefficient vectors that reconstruct the zero tensor
    std::vector<std::array<double, 8>> null_space;
};

struct DecomposeOptions {
    double max_condition = 1e8;
    double rank_tolerance = 1e-10;
    int min_rank = 6;
};

// Minimum-norm least-squares coefficients of gamma on the 8 basis tensors.
inline InvariantSet decompose(const RankThreeTensor& gamma, const Kinematics& kin, const DecomposeOptions& opt = {}) {
    const auto T = basis_tensors(kin);
    Eigen::Matrix<double, 64, 8> M;
    Eigen::Matrix<double, 64, 1> g;
    for (int i = 0; i < 64; ++i) {
        for (int k = 0; k < 8; ++k) M(i, k) = T[k].c[i];
        g(i) = gamma.c[i];
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 64, 8>> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    InvariantSet out;
    out.args = kin.squares();
    if (s(0) == 0.0) throw DegenerateKinematics("all basis tensors vanish");
    int rank = 0;
    for (int k = 0; k < 8; ++k)
        if (s(k) > opt.rank_tolerance * s(0)) ++rank;
    out.rank = rank;
    out.condition_number = s(0) / s(rank - 1);
    if (rank < opt.min_rank)
        throw DegenerateKinematics("basis rank " + std::to_string(rank) + " below " + std::to_string(opt.min_rank));
    if (out.condition_number > opt.max_condition)
        throw DegenerateKinematics("basis condition number " + std::to_string(out.condition_number) +
                                   " exceeds threshold");
    Eigen::Matrix<double, 8, 1> a = Eigen::Matrix<double, 8, 1>::Zero();
    const Eigen::Matrix<double, 64, 1> ug = svd.matrixU().transpose() * g;
    for (int k = 0; k < rank; ++k) a += svd.matrixV().col(k) * (ug(k) / s(k));
    for (int k = 0; k < 8; ++k) out.a[k] = a(k);
    out.residual_norm = (M * a - g).norm();
    for (int k = rank; k < 8; ++k) {
        std::array<double, 8> v{};
        for (int j = 0; j < 8; ++j) v[j] = svd.matrixV()(j, k);
        out.null_space.push_back(v);
    }
    return out;
}

inline RankThreeTensor reconstruct(const std::array<double, 8>& a, const Kinematics& kin) {
    const auto T = basis_tensors(kin);
    RankThreeTensor g;
    for (int k = 0; k < 8; ++k) g += a[k] * T[k];
    return g;
}

// Scalar amplitude values at the six orderings, indexed as all_perms().
using AmplitudeTable = std::array<double, 6>;

inline double at(const AmplitudeTable& t, const Perm& p) { return t[perm_index(p)]; }

// Gamma from the two-amplitude form:
// [A(123) p1_t - A(213) p2_t] eps_tmnr
// + [B(123) p3_n + B(321) p1_n] eps_{ab r m} p1_a p2_b
// + [B(312) p2_m + B(213) p3_m] eps_{ab n r} p1_a p2_b
// + [B(231) p1_r + B(132) p2_r] eps_{ab m n} p1_a p2_b
inline RankThreeTensor reconstruct_from_AB(const AmplitudeTable& A, const AmplitudeTable& B, const Kinematics& kin) {
    const Vec4 p1 = kin.p1, p2 = kin.p2, p3 = kin.p3();
    RankThreeTensor g = at(A, {1, 2, 3}) * eps_contract1(p1) - at(A, {2, 1, 3}) * eps_contract1(p2);
    const Tensor2 E = eps_contract2(p1, p2);  // E(x,y) = eps_{ab x y} p1_a p2_b
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int r = 0; r < 4; ++r) {
                g(m, n, r) += (at(B, {1, 2, 3}) * p3[n] + at(B, {3, 2, 1}) * p1[n]) * E(r, m);
                g(m, n, r) += (at(B, {3, 1, 2}) * p2[m] + at(B, {2, 1, 3}) * p3[m]) * E(n, r);
                g(m, n, r) += (at(B, {2, 3, 1}) * p1[r] + at(B, {1, 3, 2}) * p2[r]) * E(m, n);
            }
    return g;
}

// One term c * X(sigma o tau) of the map from (A, B) to the invariants A_i(sigma).
struct InvariantTerm {
    double coefficient;
    bool uses_b;
    Perm tau;
};

inline const std::array<std::vector<InvariantTerm>, 8>& invariant_map() {
    static const std::array<std::vector<InvariantTerm>, 8> m = {{
        {{1.0, false, {1, 2, 3}}},
        {{-1.0, false, {2, 1, 3}}},
        {{1.0, true, {1, 2, 3}}, {-1.0, true, {3, 2, 1}}},
        {{1.0, true, {1, 2, 3}}},
        {{-1.0, true, {2, 1, 3}}},
        {{1.0, true, {3, 1, 2}}, {-1.0, true, {2, 1, 3}}},
        {{1.0, true, {2, 3, 1}}},
        {{1.0, true, {1, 3, 2}}},
    }};
    return m;
}

// Column of A_i(sigma) among the 48 unknowns: perm_index(sigma) * 8 + (i - 1).
inline int invariant_column(int i, const Perm& sigma) { return perm_index(sigma) * 8 + (i - 1); }

struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

// The 48 invariants A_i(sigma) implied by (A, B) through the two-amplitude form.
inline std::array<ValueWithError, 48> invariants_from_AB(const AmplitudeTable& A, const AmplitudeTable& B,
                                                         const AmplitudeTable& A_err, const AmplitudeTable& B_err) {
    std::array<ValueWithError, 48> out{};
    for (const Perm& sigma : all_perms())
        for (int i = 1; i <= 8; ++i) {
            ValueWithError v;
            for (const auto& t : invariant_map()[i - 1]) {
                const Perm p = compose(sigma, t.tau);
                v.value += t.coefficient * at(t.uses_b ? B : A, p);
                v.error += std::abs(t.coefficient) * at(t.uses_b ? B_err : A_err, p);
            }
            out[invariant_column(i, sigma)] = v;
        }
    return out;
}

// A linear relation sum_k c_k A_{i_k}(sigma_k) = 0 over the 48 invariants.
struct Relation {
    std::string label;
    std::vector<std::tuple<double, int, Perm>> terms;

    Eigen::VectorXd row() const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(48);
        for (const auto& [c, i, s] : terms) v(invariant_column(i, s)) += c;
        return v;
    }
};

// The reference list of eight relations among the invariants.
inline std::vector<Relation> printed_relations() {
    return {
        {"A1(123)+A1(231)+A1(312)=0", {{1.0, 1, {1, 2, 3}}, {1.0, 1, {2, 3, 1}}, {1.0, 1, {3, 1, 2}}}},
        {"A1(123)=A1(321)", {{1.0, 1, {1, 2, 3}}, {-1.0, 1, {3, 2, 1}}}},
        {"A2(123)=-A1(213)", {{1.0, 2, {1, 2, 3}}, {1.0, 1, {2, 1, 3}}}},
        {"A5(123)=-A4(213)", {{1.0, 5, {1, 2, 3}}, {1.0, 4, {2, 1, 3}}}},
        {"A6(123)=-A3(213)", {{1.0, 6, {1, 2, 3}}, {1.0, 3, {2, 1, 3}}}},
        {"A6(123)=A8(213)", {{1.0, 6, {1, 2, 3}}, {-1.0, 8, {2, 1, 3}}}},
        {"A7(123)=A4(231)", {{1.0, 7, {1, 2, 3}}, {-1.0, 4, {2, 3, 1}}}},
        {"A3(123)=A4(123)-A4(321)", {{1.0, 3, {1, 2, 3}}, {-1.0, 4, {1, 2, 3}}, {1.0, 4, {3, 2, 1}}}},
    };
}

// The relation between A7 and A8 that the derivation supports, in place of A6(123)=A8(213).
inline Relation corrected_sixth_relation() {
    return {"A7(123)=A8(213)", {{1.0, 7, {1, 2, 3}}, {-1.0, 8, {2, 1, 3}}}};
}

inline ValueWithError relation_residual(const Relation& rel, const std::array<ValueWithError, 48>& inv) {
    ValueWithError r;
    for (const auto& [c, i, s] : rel.terms) {
        const auto& v = inv[invariant_column(i, s)];
        r.value += c * v.value;
        r.error += std::abs(c) * v.error;
    }
    return r;
}

// A momentum configuration with the component identities that Bose symmetry imposes on it.
struct ConfigurationSample {
    int configuration = 1;
    Kinematics kin;
    // tensor index triples (0-based)
    std::vector<std::array<int, 3>> indices;
    // leg permutations (a,b,c): Gamma_{mnr}(p1,p2,p3) = Gamma_{I_a I_b I_c}(p_a,p_b,p_c)
    std::vector<Perm> identities;
};

// Special configurations with 1-based components and indices converted to 0-based:
// (1) p1=(a,0,b,c), p2=(0,0,0,d), indices (0,0,1),(0,1,0), swap of legs 1,2;
// (2) p1=(a,0,0,b), p2=(c,0,0,d), indices (0,1,2), legs (213),(321),(132);
// (3) p1=(0,0,a,b), p2=(0,0,c,d), indices (0,1,2), swap of legs 1,2.
inline ConfigurationSample configuration_sample(int configuration, const std::array<double, 4>& v) {
    ConfigurationSample s;
    s.configuration = configuration;
    switch (configuration) {
        case 1:
            s.kin = {Vec4{v[0], 0.0, v[1], v[2]}, Vec4{0.0, 0.0, 0.0, v[3]}};
            s.indices = {{0, 0, 1}, {0, 1, 0}};
            s.identities = {{2, 1, 3}};
            break;
        case 2:
            s.kin = {Vec4{v[0], 0.0, 0.0, v[1]}, Vec4{v[2], 0.0, 0.0, v[3]}};
            s.indices = {{0, 1, 2}};
            s.identities = {{2, 1, 3}, {3, 2, 1}, {1, 3, 2}};
            break;
        case 3:
            s.kin = {Vec4{0.0, 0.0, v[0], v[1]}, Vec4{0.0, 0.0, v[2], v[3]}};
            s.indices = {{0, 1, 2}};
            s.identities = {{2, 1, 3}};
            break;
        default: throw std::invalid_argument("configuration must be 1, 2 or 3");
    }
    return s;
}

inline std::vector<ConfigurationSample> standard_configuration_samples(int per_configuration = 8,
                                                                       std::uint64_t seed = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::vector<ConfigurationSample> out;
    for (int c = 1; c <= 3; ++c)
        for (int k = 0; k < per_configuration; ++k) out.push_back(configuration_sample(c, {u(rng), u(rng), u(rng), u(rng)}));
    return out;
}

enum class RelationClosure {
    // only the identities and index triples listed for each configuration
    Stated,
    // every leg permutation and every ordering of the listed index triples
    BoseGroup,
};

struct RelationMatrix {
    // orthonormal basis of the derived row space (rank x 48)
    Eigen::MatrixXd basis;
    int rank = 0;
    std::size_t constraint_rows = 0;
    bool rank_deficient = false;
    std::string warning;

    // distance of a relation from the row space, relative to its norm
    double distance(const Eigen::VectorXd& row) const {
        if (rank == 0) return 1.0;
        const Eigen::VectorXd proj = basis.transpose() * (basis * row);
        return (row - proj).norm() / row.norm();
    }
    bool contains(const Eigen::VectorXd& row, double tol = 1e-8) const { return distance(row) < tol; }
};

// Linear constraints on the A_i(sigma) from Bose identities at the sampled configurations, with
// the invariants treated as unknowns shared by all samples.
inline RelationMatrix derive_relations(const std::vector<ConfigurationSample>& samples,
                                       RelationClosure closure = RelationClosure::BoseGroup,
                                       int expected_relations = 7) {
    std::vector<Eigen::VectorXd> rows;
    bool seen[4] = {false, false, false, false};
    for (const auto& smp : samples) {
        if (smp.configuration >= 1 && smp.configuration <= 3) seen[smp.configuration] = true;
        std::vector<std::array<int, 3>> idx = smp.indices;
        std::vector<Perm> targets = smp.identities;
        if (closure == RelationClosure::BoseGroup) {
            std::vector<std::array<int, 3>> all;
            for (auto t : smp.indices) {
                std::sort(t.begin(), t.end());
                do {
                    if (std::find(all.begin(), all.end(), t) == all.end()) all.push_back(t);
                } while (std::next_permutation(t.begin(), t.end()));
            }
            idx = all;
            targets.clear();
            for (const Perm& p : all_perms())
                if (p != Perm{1, 2, 3}) targets.push_back(p);
        }
        const auto T0 = basis_tensors(smp.kin);
        for (const auto& ix : idx) {
            Eigen::VectorXd base = Eigen::VectorXd::Zero(48);
            for (int i = 0; i < 8; ++i) base(invariant_column(i + 1, {1, 2, 3})) += T0[i](ix[0], ix[1], ix[2]);
            for (const Perm& leg : targets) {
                const auto Tp = basis_tensors(smp.kin.momentum(leg[0]), smp.kin.momentum(leg[1]));
                Eigen::VectorXd row = base;
                const int a = ix[leg[0] - 1], b = ix[leg[1] - 1], c = ix[leg[2] - 1];
                for (int i = 0; i < 8; ++i) row(invariant_column(i + 1, leg)) -= Tp[i](a, b, c);
                if (row.cwiseAbs().maxCoeff() > 1e-12) rows.push_back(row);
            }
        }
    }
    RelationMatrix out;
    out.constraint_rows = rows.size();
    if (rows.empty()) {
        out.rank_deficient = true;
        out.warning = "no constraints derived";
        return out;
    }
    Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), 48);
    for (std::size_t k = 0; k < rows.size(); ++k) C.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > 1e-9 * s(0)) ++rank;
    out.rank = rank;
    out.basis = svd.matrixV().leftCols(rank).transpose();
    if (!(seen[1] && seen[2] && seen[3])) {
        out.rank_deficient = true;
        out.warning = "samples do not cover all three configurations";
    } else if (rank < expected_relations) {
        out.rank_deficient = true;
        out.warning = "derived rank " + std::to_string(rank) + " is below " + std::to_string(expected_relations);
    }
    return out;
}

// Checks each relation of a list against the derived space.
inline std::vector<std::pair<std::string, double>> rank_test(const RelationMatrix& m, const std::vector<Relation>& rels) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& r : rels) out.emplace_back(r.label, m.distance(r.row()));
    return out;
}

}  // namespace abj
