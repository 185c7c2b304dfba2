#pragma once

#include "abj/grassmann.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace abj {

// The 14 field components in their canonical order.
inline const std::vector<std::string>& all_fields() {
    static const std::vector<std::string> f = {"A0",      "A1",      "A2",      "A3",      "psi1",
                                               "psi2",    "psi3",    "psi4",    "psibar1", "psibar2",
                                               "psibar3", "psibar4", "c",       "cbar"};
    return f;
}

inline bool is_field(const std::string& name) {
    const auto& f = all_fields();
    return std::find(f.begin(), f.end(), name) != f.end();
}

// Plane-wave modes n in Z^4 with |n_mu| <= (extent_mu - 1)/2 and kappa^2 |n|^2 <= lambda0^2,
// where k_n = kappa n and kappa stands for 2 pi / L.
struct ModeLattice {
    std::array<int, 4> extents{1, 1, 1, 1};
    Rational kappa{1};
    Rational lambda0{100};

    void validate() const {
        for (int e : extents)
            if (e < 1 || e % 2 == 0) throw std::invalid_argument("lattice extents must be odd and positive");
        if (kappa <= 0 || lambda0 <= 0) throw std::invalid_argument("kappa and lambda0 must be positive");
    }

    std::vector<std::array<int, 4>> modes() const {
        validate();
        std::vector<std::array<int, 4>> out;
        std::array<int, 4> h{};
        for (int i = 0; i < 4; ++i) h[i] = (extents[i] - 1) / 2;
        for (int a = -h[0]; a <= h[0]; ++a)
            for (int b = -h[1]; b <= h[1]; ++b)
                for (int c = -h[2]; c <= h[2]; ++c)
                    for (int d = -h[3]; d <= h[3]; ++d) {
                        const std::array<int, 4> n{a, b, c, d};
                        if (kappa * kappa * norm2(n) <= lambda0 * lambda0) out.push_back(n);
                    }
        return out;
    }

    static Rational norm2(const std::array<int, 4>& n) {
        return Rational(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] + n[3] * n[3]);
    }

    // Pauli-Villars weight lambda0^2 / (k_n^2 + lambda0^2)
    Rational sigma(const std::array<int, 4>& n) const {
        return lambda0 * lambda0 / (kappa * kappa * norm2(n) + lambda0 * lambda0);
    }
};

// Parses "3x1x1x1" (missing trailing extents default to 1).
inline std::array<int, 4> parse_extents(const std::string& text) {
    std::array<int, 4> e{1, 1, 1, 1};
    std::stringstream ss(text);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, 'x')) {
        if (i >= 4) throw std::invalid_argument("at most four lattice extents");
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad lattice extent '" + part + "'");
        }
        if (used != part.size()) throw std::invalid_argument("bad lattice extent '" + part + "'");
        e[i++] = v;
    }
    if (i == 0) throw std::invalid_argument("empty lattice spec");
    return e;
}

struct BRSConstants {
    Rational R1{1}, R2{1}, R3{1}, R4{1};
    Rational g{1};
    Rational alpha{1};
};

struct BRSOptions {
    std::vector<std::string> fields = all_fields();
    std::size_t generator_bound = GrassmannAlgebra::kMaxGenerators;
};

struct BRSJacobian {
    GrassmannMatrix matrix;
    std::vector<std::array<int, 4>> modes;
    std::vector<std::string> fields;
    std::size_t epsilon = 0;
};

inline std::string mode_name(const std::string& field, const std::array<int, 4>& n) {
    return MatrixLabel{field, n}.str();
}

// Matrix of d phi'_{i,n} / d phi_{j,n'} with row (n', j) and column (n, i).
inline BRSJacobian build_brs_jacobian(const ModeLattice& lattice, const BRSConstants& k, const BRSOptions& opt = {}) {
    if (k.alpha == 0) throw std::invalid_argument("alpha must be nonzero");
    std::vector<std::string> fields;
    for (const auto& f : all_fields())
        if (std::find(opt.fields.begin(), opt.fields.end(), f) != opt.fields.end()) fields.push_back(f);
    for (const auto& f : opt.fields)
        if (!is_field(f)) throw std::invalid_argument("unknown field '" + f + "'");
    if (fields.empty()) throw std::invalid_argument("empty field content");
    const auto modes = lattice.modes();
    auto has = [&](const std::string& f) { return std::find(fields.begin(), fields.end(), f) != fields.end(); };

    // odd generators that can appear in entries: ghost and spinor modes
    std::vector<std::string> gens = {"eps"};
    std::map<std::string, std::size_t> gen_index;
    for (const auto& n : modes)
        for (const auto& f : fields)
            if (f == "c" || f.rfind("psi", 0) == 0) {
                gen_index[mode_name(f, n)] = gens.size();
                gens.push_back(mode_name(f, n));
            }
    const auto alg = make_algebra(gens, opt.generator_bound);

    const std::size_t nf = fields.size();
    BRSJacobian out;
    out.matrix = GrassmannMatrix::identity(alg, nf * modes.size());
    out.modes = modes;
    out.fields = fields;
    out.epsilon = 0;
    for (const auto& n : modes)
        for (const auto& f : fields) out.matrix.labels.push_back({f, n});

    std::map<std::array<int, 4>, std::size_t> mode_index;
    for (std::size_t m = 0; m < modes.size(); ++m) mode_index[modes[m]] = m;
    auto index = [&](std::size_t mode, const std::string& f) {
        return mode * nf + static_cast<std::size_t>(std::find(fields.begin(), fields.end(), f) - fields.begin());
    };
    const GrassmannElement eps = GrassmannElement::generator(alg, 0);
    auto odd = [&](const std::string& f, const std::array<int, 4>& n) -> std::optional<GrassmannElement> {
        if (!has(f) || !mode_index.count(n)) return std::nullopt;
        return GrassmannElement::generator(alg, gen_index.at(mode_name(f, n)));
    };
    const GaussRational I = GaussRational::i_unit();
    const auto shift = [](const std::string& base, int i) { return base + std::to_string((i + 2) % 4 + 1); };

    for (std::size_t cn = 0; cn < modes.size(); ++cn) {
        const auto& n = modes[cn];
        const Rational sig = lattice.sigma(n);
        std::array<Rational, 4> kn;
        for (int mu = 0; mu < 4; ++mu) kn[mu] = lattice.kappa * n[mu];

        // same-mode entries
        for (int mu = 0; mu < 4; ++mu) {
            const std::string A = "A" + std::to_string(mu);
            if (!has(A)) continue;
            if (has("c") && kn[mu] != 0)
                out.matrix(index(cn, "c"), index(cn, A)) = (-I * GaussRational(k.R1 * sig * kn[mu])) * eps;
            if (has("cbar") && kn[mu] != 0)
                out.matrix(index(cn, A), index(cn, "cbar")) = (-I * GaussRational(k.R4 / k.alpha * sig * kn[mu])) * eps;
        }

        // spinor entries, including n' = n
        for (std::size_t rn = 0; rn < modes.size(); ++rn) {
            const auto& np = modes[rn];
            const std::array<int, 4> diff{n[0] - np[0], n[1] - np[1], n[2] - np[2], n[3] - np[3]};
            for (const auto& [base, R] : {std::pair<std::string, Rational>{"psi", k.R2}, {"psibar", k.R3}}) {
                const GaussRational coef = I * GaussRational(k.g * R * sig);
                for (int i = 0; i < 4; ++i) {
                    const std::string fi = base + std::to_string(i + 1);
                    if (!has(fi)) continue;
                    const std::string fj = shift(base, i);
                    if (has(fj))
                        if (auto c = odd("c", diff)) out.matrix(index(rn, fj), index(cn, fi)) = coef * g_mul(*c, eps);
                    if (has("c"))
                        if (auto p = odd(fj, diff)) out.matrix(index(rn, "c"), index(cn, fi)) = coef * g_mul(*p, eps);
                }
            }
        }
    }
    return out;
}

struct JacobianCertificate {
    std::size_t dim = 0;
    std::size_t generators = 0;
    std::size_t nonzero_off_diagonal = 0;
    bool diagonal_unit = true;
    bool off_diagonal_epsilon = true;
    bool epsilon_trace_zero = true;
    bool structural_det_one = false;
    bool expansion_checked = false;
    bool minor_det_one = false;
    bool leibniz_det_one = false;
    bool methods_agree = false;
    std::string determinant = "";
    std::vector<std::string> counterexamples;

    bool pass() const {
        return diagonal_unit && off_diagonal_epsilon && epsilon_trace_zero && structural_det_one &&
               (!expansion_checked || (minor_det_one && leibniz_det_one && methods_agree));
    }

    std::string str() const {
        std::ostringstream os;
        os << "dim " << dim << ", generators " << generators << ", nonzero off-diagonal " << nonzero_off_diagonal
           << "\n"
           << "  diagonal exactly 1:        " << (diagonal_unit ? "yes" : "no") << "\n"
           << "  off-diagonal carry eps:    " << (off_diagonal_epsilon ? "yes" : "no") << "\n"
           << "  trace of eps-part is 0:    " << (epsilon_trace_zero ? "yes" : "no") << "\n"
           << "  structural det = 1:        " << (structural_det_one ? "yes" : "no") << "\n";
        if (expansion_checked)
            os << "  minor expansion det = 1:   " << (minor_det_one ? "yes" : "no") << "\n"
               << "  Leibniz det = 1:           " << (leibniz_det_one ? "yes" : "no") << "\n";
        os << "  det = " << determinant << "\n";
        for (const auto& c : counterexamples) os << "  counterexample: " << c << "\n";
        os << (pass() ? "PASS" : "FAIL");
        return os.str();
    }
};

inline JacobianCertificate certify_unit_jacobian(const BRSJacobian& J) {
    const auto& M = J.matrix;
    const auto& alg = M.algebra();
    JacobianCertificate cert;
    cert.dim = M.dim();
    cert.generators = alg->size();
    const GrassmannElement one(alg, GaussRational(1));
    GrassmannElement trace(alg);
    for (std::size_t r = 0; r < M.dim(); ++r)
        for (std::size_t c = 0; c < M.dim(); ++c) {
            const auto& e = M(r, c);
            const std::string where = "row " + M.label(r) + ", column " + M.label(c) + ": " + e.str();
            if (r == c) {
                if (!(e == one)) {
                    cert.diagonal_unit = false;
                    cert.counterexamples.push_back("diagonal entry " + where);
                }
                trace += e - one;
            } else if (!e.is_zero()) {
                ++cert.nonzero_off_diagonal;
                if (!e.divisible_by(J.epsilon)) {
                    cert.off_diagonal_epsilon = false;
                    cert.counterexamples.push_back("off-diagonal entry without eps " + where);
                }
            }
        }
    cert.epsilon_trace_zero = trace.is_zero();
    if (!cert.epsilon_trace_zero) cert.counterexamples.push_back("trace of eps-part = " + trace.str());
    GrassmannElement det(alg);
    try {
        det = g_det(M, DetMethod::Structural, J.epsilon);
        cert.structural_det_one = det == one;
        cert.determinant = det.str();
    } catch (const StructuralPreconditionError& e) {
        cert.determinant = "undefined (" + std::string(e.what()) + ")";
    }
    if (M.dim() <= kMaxExpansionDim) {
        cert.expansion_checked = true;
        const auto minor = g_det(M, DetMethod::MinorExpansion);
        const auto leib = g_det(M, DetMethod::Leibniz);
        cert.minor_det_one = minor == one;
        cert.leibniz_det_one = leib == one;
        cert.methods_agree = minor == leib && (!cert.structural_det_one || minor == det);
        if (!cert.minor_det_one) cert.counterexamples.push_back("minor expansion det = " + minor.str());
        if (cert.determinant.rfind("undefined", 0) == 0) cert.determinant = minor.str();
    }
    return cert;
}

inline JacobianCertificate verify_unit_jacobian(const ModeLattice& lattice, const BRSConstants& k,
                                                const BRSOptions& opt = {}) {
    return certify_unit_jacobian(build_brs_jacobian(lattice, k, opt));
}

// Replaces diagonal entry i by 1 + a eps (negative control).
inline void mutate_diagonal(BRSJacobian& J, std::size_t i, const GaussRational& a = GaussRational(1)) {
    const auto& alg = J.matrix.algebra();
    J.matrix(i, i) = GrassmannElement(alg, GaussRational(1)) + a * GrassmannElement::generator(alg, J.epsilon);
}

}  // namespace abj
