#include "abj/brs_jacobian.hpp"
#include "abj/loop_amplitudes.hpp"
#include "abj/report.hpp"
#include "abj/tensor_basis.hpp"
#include "abj/vsti.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace abj;

enum ExitCode { kOk = 0, kNonConvergence = 1, kConfigError = 2, kDegenerate = 3 };

struct GlobalOptions {
    std::string format = "json";
    std::string output;
    unsigned workers = 1;
    // 0 keeps the library default
    std::size_t max_evaluations = 0;
};

// Thrown as is when the result did not reach the requested tolerance; the report is still written.
struct Report {
    ordered_json json;
    std::optional<CsvTable> csv;
    std::string text;
};

Vec4 parse_vec4(const std::string& text) {
    const auto v = parse_double_list(text, 4);
    return {v[0], v[1], v[2], v[3]};
}

Rational parse_exact(const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational number: '" + text + "'");
    }
}

ordered_json vec_json(const Vec4& v) { return ordered_json::array({v[0], v[1], v[2], v[3]}); }

std::string component_key(int i) {
    return std::to_string(i / 16) + "." + std::to_string((i / 4) % 4) + "." + std::to_string(i % 4);
}

// Kinematics from optional p1/p2 strings; both must be given together.
Kinematics kinematics_from(const std::string& p1, const std::string& p2, const Kinematics& fallback) {
    if (p1.empty() != p2.empty()) throw std::invalid_argument("--p1 and --p2 must be given together");
    if (p1.empty()) return fallback;
    return {parse_vec4(p1), parse_vec4(p2)};
}

CubatureOptions cubature(const GlobalOptions& g) {
    CubatureOptions o;
    o.workers = std::max(1u, g.workers);
    if (g.max_evaluations) o.max_evaluations = g.max_evaluations;
    return o;
}

// ---------------------------------------------------------------------------------------------
// anomaly

struct AnomalyArgs {
    std::string p1, p2;
    double lambda0 = 1e3;
    double tol = 1e-6;
    std::string form = "literal";
};

Report cmd_anomaly(const AnomalyArgs& a, const GlobalOptions& g) {
    const Kinematics kin = kinematics_from(a.p1, a.p2, equilateral_kinematics());
    if (!kin.non_exceptional()) throw DegenerateKinematics("anomaly needs non-exceptional momenta");
    const auto form = a.form == "symmetrized" ? ContractedForm::Symmetrized : ContractedForm::Literal;
    const auto r = contracted_triangle(kin, a.lambda0, a.tol, form, cubature(g));
    const double rel = std::abs(r.coefficient - kAnomalyCoefficient) / kAnomalyCoefficient;
    Report rep;
    rep.json = {{"command", "anomaly"},
                {"p1", vec_json(kin.p1)},
                {"p2", vec_json(kin.p2)},
                {"p3", vec_json(kin.p3())},
                {"lambda0", a.lambda0},
                {"form", a.form},
                {"trace_sign", trace_sign()},
                {"coefficient", r.coefficient},
                {"coefficient_error", r.coefficient_error},
                {"reference", kAnomalyCoefficient},
                {"relative_deviation", rel},
                {"evaluations", r.evaluations},
                {"converged", r.converged}};
    CsvTable t({"quantity", "value"});
    t.add({"coefficient", fmt_double(r.coefficient)});
    t.add({"coefficient_error", fmt_double(r.coefficient_error)});
    t.add({"reference", fmt_double(kAnomalyCoefficient)});
    t.add({"relative_deviation", fmt_double(rel)});
    t.add({"evaluations", std::to_string(r.evaluations)});
    t.add({"converged", r.converged ? "true" : "false"});
    rep.csv = std::move(t);
    if (!r.converged) throw rep;
    return rep;
}

// ---------------------------------------------------------------------------------------------
// triangle

struct TriangleArgs {
    std::string p1 = "1,0.3,-0.2,0.5", p2 = "-0.4,0.8,0.3,-0.1";
    double lambda = 0.1;
    double lambda0 = 50.0;
    double tol = 1e-4;
    bool oracle = false;
    bool permute = false;
    std::string normalization = "fitted";
};

Report cmd_triangle(const TriangleArgs& a, const GlobalOptions& g) {
    const Kinematics kin{parse_vec4(a.p1), parse_vec4(a.p2)};
    if (!kin.non_exceptional()) throw DegenerateKinematics("exceptional kinematics: some momentum vanishes");
    const CutoffPair cut{a.lambda, a.lambda0};
    cut.validate();
    const Normalization n = a.normalization == "unit" ? Normalization{} : fitted_normalization().normalization;
    const AmplitudeOptions opt{a.tol, cubature(g)};
    const auto s = scalar_amplitudes(kin, cut, opt);
    const auto gamma = assemble_gamma(s, kin, n);
    bool converged = gamma.converged;

    std::optional<TensorResult> direct;
    if (a.oracle) {
        direct = gamma_AAA_direct(kin, cut, a.tol, cubature(g));
        converged = converged && direct->converged;
    }

    Report rep;
    CsvTable t({"section", "key", "value", "error", "direct", "direct_error"});
    rep.json = {{"command", "triangle"},
                {"p1", vec_json(kin.p1)},
                {"p2", vec_json(kin.p2)},
                {"p3", vec_json(kin.p3())},
                {"lambda", a.lambda},
                {"lambda0", a.lambda0},
                {"trace_sign", trace_sign()},
                {"normalization", {{"n_a", n.n_a}, {"n_b", n.n_b}}}};

    ordered_json amps = ordered_json::object();
    for (const Perm& p : all_perms()) {
        const int k = perm_index(p);
        amps["A(" + perm_name(p) + ")"] = {{"value", s.A[k]}, {"error", s.A_err[k]}};
        amps["B(" + perm_name(p) + ")"] = {{"value", s.B[k]}, {"error", s.B_err[k]}};
        t.add({"amplitude", "A(" + perm_name(p) + ")", fmt_double(s.A[k]), fmt_double(s.A_err[k]), "", ""});
        t.add({"amplitude", "B(" + perm_name(p) + ")", fmt_double(s.B[k]), fmt_double(s.B_err[k]), "", ""});
    }
    rep.json["amplitudes"] = amps;

    ordered_json comps = ordered_json::array();
    for (int i = 0; i < 64; ++i) {
        ordered_json c = {{"index", component_key(i)}, {"value", gamma.value.c[i]}, {"error", gamma.error.c[i]}};
        std::string dv, de;
        if (direct) {
            c["direct"] = direct->value.c[i];
            c["direct_error"] = direct->error.c[i];
            dv = fmt_double(direct->value.c[i]);
            de = fmt_double(direct->error.c[i]);
        }
        comps.push_back(c);
        t.add({"component", component_key(i), fmt_double(gamma.value.c[i]), fmt_double(gamma.error.c[i]), dv, de});
    }
    rep.json["components"] = comps;

    const auto inv = decompose(gamma.value, kin);
    ordered_json invj = ordered_json::object();
    for (int i = 0; i < 8; ++i) {
        const std::string key = "A" + std::to_string(i + 1);
        invj[key] = inv.a[i];
        t.add({"invariant", key, fmt_double(inv.a[i]), "", "", ""});
    }
    rep.json["invariants"] = {{"values", invj},
                              {"rank", inv.rank},
                              {"condition_number", inv.condition_number},
                              {"residual_norm", inv.residual_norm}};
    t.add({"invariant", "rank", std::to_string(inv.rank), "", "", ""});
    t.add({"invariant", "condition_number", fmt_double(inv.condition_number), "", "", ""});

    if (direct) {
        const double diff = max_relative_difference(gamma.value, direct->value);
        rep.json["oracle"] = {{"max_relative_difference", diff}, {"evaluations", direct->evaluations}};
        t.add({"oracle", "max_relative_difference", fmt_double(diff), "", "", ""});
    }
    if (a.permute) {
        const auto res = bose_residuals(kin, cut, n, opt);
        ordered_json bj = ordered_json::array();
        double worst = 0.0;
        for (const auto& r : res) {
            bj.push_back({{"legs", perm_name(r.legs)},
                          {"max_residual", r.max_residual},
                          {"combined_error", r.combined_error},
                          {"max_ratio", r.max_ratio}});
            t.add({"bose", perm_name(r.legs), fmt_double(r.max_residual), fmt_double(r.combined_error), "", ""});
            worst = std::max(worst, r.max_ratio);
        }
        rep.json["bose"] = {{"permutations", bj}, {"max_ratio", worst}};
        t.add({"bose", "max_ratio", fmt_double(worst), "", "", ""});
    }
    rep.json["evaluations"] = s.evaluations;
    rep.json["converged"] = converged;
    rep.csv = std::move(t);
    if (!converged) throw rep;
    return rep;
}

// ---------------------------------------------------------------------------------------------
// relations

struct RelationsArgs {
    std::string solution = "zero";
    std::vector<std::string> family;
    double lambda0 = 1e3;
    double scale = 1.0;
    double tol = 1e-7;
};

FamilyParameters parse_family(const std::vector<std::string>& items) {
    FamilyParameters p;
    const std::map<std::string, Rational FamilyParameters::*> fields = {
        {"sigma_long", &FamilyParameters::sigma_long}, {"sigma_psibar_psi", &FamilyParameters::sigma_psibar_psi},
        {"delta_g", &FamilyParameters::delta_g},       {"sigma_trans", &FamilyParameters::sigma_trans},
        {"g", &FamilyParameters::g},                   {"alpha", &FamilyParameters::alpha},
        {"M", &FamilyParameters::M}};
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--family expects key=value, got '" + item + "'");
        const auto it = fields.find(item.substr(0, eq));
        if (it == fields.end()) throw std::invalid_argument("unknown family parameter '" + item.substr(0, eq) + "'");
        p.*(it->second) = parse_exact(item.substr(eq + 1));
    }
    return p;
}

ordered_json constants_json(const RenormalizationConstants& c) {
    return {{"R1", c.R1.str()},
            {"R2", c.R2.str()},
            {"R3", c.R3.str()},
            {"sigma_psibar_psi", c.sigma_psibar_psi.str()},
            {"sigma_trans", c.sigma_trans.str()},
            {"sigma_long", c.sigma_long.str()},
            {"delta_M2", c.delta_M2.str()},
            {"delta_g", c.delta_g.str()},
            {"F_AAAA", c.F_AAAA.str()},
            {"g", c.g.str()},
            {"alpha", c.alpha.str()},
            {"M", c.M.str()}};
}

Report cmd_relations(const RelationsArgs& a, const GlobalOptions& g) {
    const bool family = a.solution == "family" || !a.family.empty();
    if (a.solution == "zero" && !a.family.empty())
        throw std::invalid_argument("--family parameters need --solution family");
    if (!(a.scale > 0)) throw std::invalid_argument("--scale must be positive");
    const RenormalizationConstants c = family ? solve_relations(parse_family(a.family)) : solve_relations();
    const auto res = algebraic_residuals(c);
    const auto ob = anomaly_obstruction(a.lambda0, obstruction_point(a.scale), a.tol, cubature(g));

    std::size_t r7_nonzero = 0;
    for (const auto& t : res.r7)
        for (const auto& x : t)
            if (x != 0) ++r7_nonzero;
    // the contracted relation holds only if the epsilon coefficient of the obstruction vanishes
    const bool obstruction_nonzero = std::abs(ob.coefficient) > 1e-3 * kAnomalyCoefficient;
    std::string verdict;
    if (!res.all_zero()) verdict = "unsolved";
    else if (obstruction_nonzero) verdict = "anomalous";
    else verdict = "consistent";

    Report rep;
    rep.json = {{"command", "relations"},
                {"solution", family ? "family" : "zero"},
                {"constants", constants_json(c)},
                {"residuals",
                 {{"r1", res.r1_r2[0].str()},
                  {"r2", res.r1_r2[1].str()},
                  {"r3", res.r3_r4[0].str()},
                  {"r4", res.r3_r4[1].str()},
                  {"r6", res.r6.str()},
                  {"r7_tensors", res.r7.size()},
                  {"r7_nonzero_components", r7_nonzero},
                  {"all_zero", res.all_zero()}}},
                {"obstruction",
                 {{"lambda0", a.lambda0},
                  {"p1", vec_json(ob.kin.p1)},
                  {"p2", vec_json(ob.kin.p2)},
                  {"p3", vec_json(ob.kin.p3())},
                  {"coefficient", ob.coefficient},
                  {"reference", ob.reference},
                  {"relative_deviation", ob.relative_deviation},
                  {"non_epsilon_residual", ob.non_epsilon_residual},
                  {"value_w0", ob.value_w0},
                  {"value_w1", ob.value_w1},
                  {"combinatorial_factor", ob.combinatorial_factor},
                  {"converged", ob.converged}}},
                {"verdict", verdict}};
    CsvTable t({"quantity", "value"});
    for (const auto& [k, v] : rep.json["constants"].items()) t.add({"constant." + k, v.get<std::string>()});
    t.add({"r1", res.r1_r2[0].str()});
    t.add({"r2", res.r1_r2[1].str()});
    t.add({"r3", res.r3_r4[0].str()});
    t.add({"r4", res.r3_r4[1].str()});
    t.add({"r6", res.r6.str()});
    t.add({"r7_nonzero_components", std::to_string(r7_nonzero)});
    t.add({"obstruction_coefficient", fmt_double(ob.coefficient)});
    t.add({"obstruction_reference", fmt_double(ob.reference)});
    t.add({"obstruction_relative_deviation", fmt_double(ob.relative_deviation)});
    t.add({"obstruction_non_epsilon_residual", fmt_double(ob.non_epsilon_residual)});
    t.add({"verdict", verdict});
    rep.csv = std::move(t);
    if (!ob.converged) throw rep;
    return rep;
}

// ---------------------------------------------------------------------------------------------
// jacobian

struct JacobianArgs {
    std::string modes = "3x1x1x1";
    std::string fields = "reduced";
    std::string kappa = "1", cutoff = "100";
    std::string R1 = "1", R2 = "1", R3 = "1", R4 = "1", g = "1", alpha = "1";
    std::string mutate = "none";
    std::size_t mutate_index = 0;
};

std::vector<std::string> parse_fields(const std::string& text) {
    if (text == "reduced") return {"A0", "c", "cbar"};
    if (text == "full") return all_fields();
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string f;
    while (std::getline(ss, f, ',')) {
        if (!is_field(f)) throw std::invalid_argument("unknown field '" + f + "'");
        out.push_back(f);
    }
    if (out.empty()) throw std::invalid_argument("empty field list");
    return out;
}

Report cmd_jacobian(const JacobianArgs& a, const GlobalOptions&) {
    ModeLattice lattice;
    lattice.extents = parse_extents(a.modes);
    lattice.kappa = parse_exact(a.kappa);
    lattice.lambda0 = parse_exact(a.cutoff);
    lattice.validate();
    BRSConstants k{parse_exact(a.R1), parse_exact(a.R2), parse_exact(a.R3),
                   parse_exact(a.R4), parse_exact(a.g),  parse_exact(a.alpha)};
    if (k.alpha == 0) throw std::invalid_argument("alpha must be nonzero");
    BRSOptions opt;
    opt.fields = parse_fields(a.fields);
    auto J = build_brs_jacobian(lattice, k, opt);
    if (a.mutate == "diag") {
        if (a.mutate_index >= J.matrix.dim()) throw std::invalid_argument("--mutate-index beyond matrix dimension");
        mutate_diagonal(J, a.mutate_index);
    }
    const auto cert = certify_unit_jacobian(J);

    Report rep;
    rep.json = {{"command", "jacobian"},
                {"modes", a.modes},
                {"mode_count", J.modes.size()},
                {"fields", J.fields},
                {"mutate", a.mutate},
                {"dim", cert.dim},
                {"generators", cert.generators},
                {"nonzero_off_diagonal", cert.nonzero_off_diagonal},
                {"checks",
                 {{"diagonal_unit", cert.diagonal_unit},
                  {"off_diagonal_epsilon", cert.off_diagonal_epsilon},
                  {"epsilon_trace_zero", cert.epsilon_trace_zero},
                  {"structural_det_one", cert.structural_det_one},
                  {"expansion_checked", cert.expansion_checked},
                  {"minor_det_one", cert.minor_det_one},
                  {"leibniz_det_one", cert.leibniz_det_one},
                  {"methods_agree", cert.methods_agree}}},
                {"determinant", cert.determinant},
                {"counterexamples", cert.counterexamples},
                {"verdict", cert.pass() ? "PASS" : "FAIL"}};
    CsvTable t({"quantity", "value"});
    t.add({"dim", std::to_string(cert.dim)});
    t.add({"generators", std::to_string(cert.generators)});
    t.add({"nonzero_off_diagonal", std::to_string(cert.nonzero_off_diagonal)});
    for (const auto& [key, v] : rep.json["checks"].items()) t.add({key, v.get<bool>() ? "true" : "false"});
    t.add({"determinant", cert.determinant});
    for (const auto& c : cert.counterexamples) t.add({"counterexample", c});
    t.add({"verdict", cert.pass() ? "PASS" : "FAIL"});
    rep.csv = std::move(t);
    rep.text = cert.str();
    return rep;
}

// ---------------------------------------------------------------------------------------------
// scan

struct ScanArgs {
    std::string kind = "uv";
    std::string p1, p2;
    std::string lambda0_list;
    std::string derivative;
    std::string p3 = "0.3,-0.5,0.8,0.1";
    std::string lambda_factors;
    double lambda0 = 30.0;
    double tol = 0.0;
};

std::vector<MomentumDirection> parse_directions(const std::string& text) {
    std::vector<MomentumDirection> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto dot = part.find('.');
        if (dot == std::string::npos || dot + 2 != part.size() || dot != 1)
            throw std::invalid_argument("derivative direction must look like 2.0 (momentum.component)");
        const int m = part[0] - '0', c = part[2] - '0';
        if ((m != 2 && m != 3) || c < 0 || c > 3)
            throw std::invalid_argument("derivative direction '" + part + "' out of range");
        out.push_back({m, c});
    }
    if (out.size() > 2) throw std::invalid_argument("at most two derivative directions");
    return out;
}

Report scan_uv(const ScanArgs& a, const GlobalOptions& g) {
    const Kinematics kin = kinematics_from(a.p1, a.p2, equilateral_kinematics());
    if (!kin.non_exceptional()) throw DegenerateKinematics("uv scan needs non-exceptional momenta");
    const std::vector<double> list = a.lambda0_list.empty()
                                         ? std::vector<double>{1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5)}
                                         : parse_double_list(a.lambda0_list);
    const auto w = parse_directions(a.derivative);
    const double tol = a.tol > 0 ? a.tol : (w.empty() ? 1e-8 : 1e-6);
    const auto r = uv_scan(kin, list, w, tol, cubature(g));
    Report rep;
    CsvTable t({"lambda0", "deviation", "error", "fitted_slope"});
    ordered_json rows = ordered_json::array();
    bool converged = true;
    for (const auto& row : r.rows) {
        rows.push_back({{"lambda0", row.lambda0},
                        {"deviation", row.deviation},
                        {"error", row.error},
                        {"converged", row.converged}});
        t.add({fmt_double(row.lambda0), fmt_double(row.deviation), fmt_double(row.error), fmt_double(r.slope)});
        converged = converged && row.converged;
    }
    rep.json = {{"command", "scan"},
                {"kind", "uv"},
                {"p1", vec_json(kin.p1)},
                {"p2", vec_json(kin.p2)},
                {"derivative", a.derivative},
                {"rows", rows},
                {"fitted_slope", r.slope},
                {"intercept", r.intercept},
                {"r_squared", r.r_squared},
                {"converged", converged}};
    rep.csv = std::move(t);
    if (!converged) throw rep;
    return rep;
}

Report scan_ir(const ScanArgs& a, const GlobalOptions& g) {
    const Vec4 p3 = parse_vec4(a.p3);
    const double mu = norm(p3);
    if (!(mu > 0)) throw DegenerateKinematics("ir scan needs p3 != 0");
    const std::vector<double> factors = a.lambda_factors.empty()
                                            ? std::vector<double>{1e-1, std::pow(10.0, -1.5), 1e-2}
                                            : parse_double_list(a.lambda_factors);
    std::vector<double> lambdas;
    for (double f : factors) lambdas.push_back(f * mu);
    const double tol = a.tol > 0 ? a.tol : 1e-4;
    const auto r = ir_second_derivative_scan(p3, lambdas, a.lambda0, tol, 0.99, cubature(g));
    Report rep;
    CsvTable t({"lambda", "projection", "projection_error", "f", "f_bound", "within_bound", "fitted_coefficient",
                "reference", "r_squared"});
    ordered_json rows = ordered_json::array();
    bool converged = true;
    for (const auto& row : r.rows) {
        rows.push_back({{"lambda", row.lambda},
                        {"projection", row.projection},
                        {"projection_error", row.projection_error},
                        {"f", row.f},
                        {"f_bound", row.f_bound},
                        {"within_bound", row.within_bound},
                        {"orthogonal_residual", row.orthogonal_residual},
                        {"converged", row.converged}});
        t.add({fmt_double(row.lambda), fmt_double(row.projection), fmt_double(row.projection_error),
               fmt_double(row.f), fmt_double(row.f_bound), row.within_bound ? "true" : "false",
               fmt_double(r.coefficient), fmt_double(r.reference), fmt_double(r.r_squared)});
        converged = converged && row.converged;
    }
    rep.json = {{"command", "scan"},
                {"kind", "ir"},
                {"p3", vec_json(p3)},
                {"lambda0", a.lambda0},
                {"rows", rows},
                {"fitted_coefficient", r.coefficient},
                {"reference", r.reference},
                {"relative_deviation", r.relative_deviation},
                {"r_squared", r.r_squared},
                {"bound_ok", r.bound_ok},
                {"fit_ok", r.fit_ok},
                {"converged", converged}};
    rep.csv = std::move(t);
    if (!converged || !r.fit_ok) throw rep;
    return rep;
}

Report scan_fujikawa(const ScanArgs& a, const GlobalOptions& g) {
    using std::numbers::pi;
    const double tol = a.tol > 0 ? a.tol : 1e-9;
    const auto f = R4Integrand::scalar([](const Vec4& k) { return std::exp(-norm2(k)); }, 8.0);
    const auto r = integrate_r4(f, tol, cubature(g));
    const double ref = 1.0 / (16.0 * pi * pi);
    const double dev = std::abs(r.value - ref);
    Report rep;
    rep.json = {{"command", "scan"},        {"kind", "fujikawa"},    {"integral", r.value},
                {"error", r.error_estimate}, {"reference", ref},      {"deviation", dev},
                {"evaluations", r.evaluations}, {"converged", r.converged}};
    CsvTable t({"integral", "error", "reference", "deviation"});
    t.add({fmt_double(r.value), fmt_double(r.error_estimate), fmt_double(ref), fmt_double(dev)});
    rep.csv = std::move(t);
    if (!r.converged) throw rep;
    return rep;
}

Report cmd_scan(const ScanArgs& a, const GlobalOptions& g) {
    if (a.kind == "uv") return scan_uv(a, g);
    if (a.kind == "ir") return scan_ir(a, g);
    return scan_fujikawa(a, g);
}

// ---------------------------------------------------------------------------------------------

void emit(const Report& rep, const GlobalOptions& g, const std::string& config_hash) {
    std::string body;
    if (g.format == "csv") {
        body = rep.csv->str(config_hash);
    } else {
        ordered_json j = {{"version", kVersion}, {"config_hash", config_hash}};
        j.update(rep.json);
        body = j.dump(2) + "\n";
    }
    if (g.output.empty()) {
        std::cout << body;
        if (!rep.text.empty()) std::cerr << rep.text << "\n";
        return;
    }
    std::ofstream out(g.output, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + g.output + "'");
    out << body;
    if (!rep.text.empty()) std::cout << rep.text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized three-photon amplitude, anomaly and BRS Jacobian checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI file with [subcommand] sections; command-line flags take precedence");
    GlobalOptions g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag_callback("--json", [&g] { g.format = "json"; }, "Shorthand for --format json");
    app.add_option("--output,-o", g.output, "Write the report to this file instead of stdout");
    app.add_option("--workers", g.workers, "Quadrature worker threads")->envname("ABJ_WORKERS")->check(CLI::Range(1u, 1024u));
    app.add_option("--max-evaluations", g.max_evaluations, "Integrand evaluation budget per integral");

    AnomalyArgs anomaly;
    auto* an = app.add_subcommand("anomaly", "Epsilon coefficient of the contracted triangle");
    an->add_option("--p1", anomaly.p1, "First momentum a,b,c,d (default: equilateral point)");
    an->add_option("--p2", anomaly.p2, "Second momentum a,b,c,d");
    an->add_option("--lambda0", anomaly.lambda0, "UV cutoff")->check(CLI::PositiveNumber)->capture_default_str();
    an->add_option("--tol", anomaly.tol, "Relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    an->add_option("--form", anomaly.form, "Integrand form")
        ->check(CLI::IsMember({"literal", "symmetrized"}))
        ->capture_default_str();

    TriangleArgs triangle;
    auto* tr = app.add_subcommand("triangle", "Three-photon tensor from the two scalar amplitudes");
    tr->add_option("--p1", triangle.p1, "First momentum a,b,c,d")->capture_default_str();
    tr->add_option("--p2", triangle.p2, "Second momentum a,b,c,d")->capture_default_str();
    tr->add_option("--lambda", triangle.lambda, "IR flow parameter")->capture_default_str();
    tr->add_option("--lambda0", triangle.lambda0, "UV cutoff")->capture_default_str();
    tr->add_option("--tol", triangle.tol, "Relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    tr->add_flag("--oracle", triangle.oracle, "Also evaluate the direct loop-momentum integral");
    tr->add_flag("--permute", triangle.permute, "Evaluate all six leg permutations and report Bose residuals");
    tr->add_option("--normalization", triangle.normalization, "Constants multiplying the A and B parts")
        ->check(CLI::IsMember({"fitted", "unit"}))
        ->capture_default_str();

    RelationsArgs relations;
    auto* re = app.add_subcommand("relations", "Violated identity residuals and the anomaly obstruction");
    re->add_option("--solution", relations.solution, "Order-hbar constants")
        ->check(CLI::IsMember({"zero", "family"}))
        ->capture_default_str();
    re->add_option("--family", relations.family, "Family parameter key=value (exact rational), repeatable");
    re->add_option("--lambda0", relations.lambda0, "UV cutoff for the obstruction")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    re->add_option("--scale", relations.scale, "Momentum scale of the renormalization point")->capture_default_str();
    re->add_option("--tol", relations.tol, "Relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();

    JacobianArgs jac;
    auto* ja = app.add_subcommand("jacobian", "Certificate that the regularized BRS Jacobian equals 1");
    ja->add_option("--modes", jac.modes, "Lattice extents, e.g. 3x1x1x1")->capture_default_str();
    ja->add_option("--fields", jac.fields, "reduced, full or a comma list of fields")->capture_default_str();
    ja->add_option("--kappa", jac.kappa, "Mode spacing (rational)")->capture_default_str();
    ja->add_option("--cutoff", jac.cutoff, "UV cutoff (rational)")->capture_default_str();
    ja->add_option("--R1", jac.R1)->capture_default_str();
    ja->add_option("--R2", jac.R2)->capture_default_str();
    ja->add_option("--R3", jac.R3)->capture_default_str();
    ja->add_option("--R4", jac.R4)->capture_default_str();
    ja->add_option("--g", jac.g)->capture_default_str();
    ja->add_option("--alpha", jac.alpha)->capture_default_str();
    ja->add_option("--mutate", jac.mutate, "Negative control")
        ->check(CLI::IsMember({"none", "diag"}))
        ->capture_default_str();
    ja->add_option("--mutate-index", jac.mutate_index, "Diagonal entry to mutate")->capture_default_str();

    ScanArgs scan;
    auto* sc = app.add_subcommand("scan", "UV and IR scans and the Gaussian constant");
    sc->add_option("--kind", scan.kind, "Scan kind")
        ->check(CLI::IsMember({"uv", "ir", "fujikawa"}))
        ->capture_default_str();
    sc->add_option("--p1", scan.p1, "uv: first momentum (default: equilateral point)");
    sc->add_option("--p2", scan.p2, "uv: second momentum");
    sc->add_option("--lambda0-list", scan.lambda0_list, "uv: ascending cutoffs (default 1e2,10^2.5,1e3,10^3.5)");
    sc->add_option("--derivative", scan.derivative, "uv: up to two directions like 2.0,3.1 (momentum.component)");
    sc->add_option("--p3", scan.p3, "ir: momentum p3")->capture_default_str();
    sc->add_option("--lambda-factors", scan.lambda_factors, "ir: decreasing lambda/|p3| (default 1e-1,10^-1.5,1e-2)");
    sc->add_option("--lambda0", scan.lambda0, "ir: UV cutoff")->check(CLI::PositiveNumber)->capture_default_str();
    sc->add_option("--tol", scan.tol, "Relative tolerance (0 selects the per-kind default)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    // the hash covers the chosen subcommand's effective settings; worker count and output target do not
    // change results
    const CLI::App* chosen = app.get_subcommands().front();
    std::string hashed = chosen->get_name() + "\n" + chosen->config_to_str(true, false);
    if (g.max_evaluations) hashed += "max_evaluations=" + std::to_string(g.max_evaluations) + "\n";
    const std::string config_hash = fnv1a_hex(hashed);
    try {
        Report rep;
        try {
            if (*an) rep = cmd_anomaly(anomaly, g);
            else if (*tr) rep = cmd_triangle(triangle, g);
            else if (*re) rep = cmd_relations(relations, g);
            else if (*ja) rep = cmd_jacobian(jac, g);
            else rep = cmd_scan(scan, g);
        } catch (const Report& partial) {
            emit(partial, g, config_hash);
            std::cerr << "error: result did not reach the requested tolerance\n";
            return kNonConvergence;
        }
        emit(rep, g, config_hash);
        return kOk;
    } catch (const DegenerateKinematics& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kDegenerate;
    } catch (const NonFiniteSample& e) {
        std::cerr << "non-finite integrand: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}
