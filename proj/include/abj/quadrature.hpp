#pragma once

#include "abj/cubature.hpp"
#include "abj/lorentz.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace abj {

// Integrand on the standard simplex {x_i >= 0, sum x_i = 1} with n = dim Feynman parameters.
struct SimplexIntegrand {
    std::size_t dim = 2;
    std::size_t components = 1;
    std::function<void(std::span<const double> x, std::span<double> out)> eval;
    // Index subsets (0-based) on which the integrand is unbounded but integrable. The first face
    // orients the radial map.
    std::vector<std::vector<std::size_t>> singular_faces;

    static SimplexIntegrand scalar(std::size_t n, std::function<double(std::span<const double>)> g,
                                   std::vector<std::vector<std::size_t>> faces = {}) {
        SimplexIntegrand f;
        f.dim = n;
        f.components = 1;
        f.eval = [g = std::move(g)](std::span<const double> x, std::span<double> out) { out[0] = g(x); };
        f.singular_faces = std::move(faces);
        return f;
    }
};

struct R4Integrand {
    std::size_t components = 1;
    std::function<void(const Vec4& k, std::span<double> out)> eval;
    double decay_exponent = 5.0;
    // radius mapped to the midpoint of the compactified radial coordinate
    double radial_scale = 1.0;

    static R4Integrand scalar(std::function<double(const Vec4&)> g, double decay) {
        R4Integrand f;
        f.eval = [g = std::move(g)](const Vec4& k, std::span<double> out) { out[0] = g(k); };
        f.decay_exponent = decay;
        return f;
    }
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct VectorIntegralResult {
    std::vector<double> value;
    std::vector<double> error;
    std::size_t evaluations = 0;
    bool converged = false;
    CubatureMesh mesh;

    IntegralResult component(std::size_t c) const { return {value.at(c), error.at(c), evaluations, converged}; }
};

inline constexpr std::size_t kMaxSimplexDim = 16;

namespace detail {

// Stick-breaking map from the unit (k-1)-cube to the k-simplex. Returns the Jacobian.
inline double stick_breaking(const double* t, std::size_t k, double* x) {
    double rem = 1.0, jac = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        x[i] = rem * t[i];
        jac *= rem;
        rem *= 1.0 - t[i];
    }
    x[k - 1] = rem;
    return jac;
}

// Maps the unit (n-1)-cube onto the n-simplex, optionally with a radial split around a face.
class SimplexMap {
public:
    SimplexMap(std::size_t n, const std::vector<std::vector<std::size_t>>& faces) : n_(n) {
        if (n < 2) throw std::invalid_argument("simplex dimension must be at least 2");
        if (!faces.empty()) {
            std::vector<bool> in(n, false);
            for (std::size_t i : faces.front()) {
                if (i >= n) throw std::invalid_argument("singular face index out of range");
                in[i] = true;
            }
            for (std::size_t i = 0; i < n; ++i) (in[i] ? face_ : rest_).push_back(i);
            if (face_.empty() || rest_.empty()) {
                face_.clear();
                rest_.clear();
            }
        }
        if (n > kMaxSimplexDim) throw std::invalid_argument("simplex dimension too large");
    }

    std::size_t cube_dim() const { return n_ - 1; }

    double map(const double* t, double* x) const {
        if (face_.empty()) return stick_breaking(t, n_, x);
        const std::size_t m = face_.size(), r = rest_.size();
        const double s = t[0];
        double jac = std::pow(s, static_cast<double>(m - 1)) * std::pow(1.0 - s, static_cast<double>(r - 1));
        std::array<double, kMaxSimplexDim> u{}, v{};
        jac *= stick_breaking(t + 1, m, u.data());
        jac *= stick_breaking(t + m, r, v.data());
        for (std::size_t i = 0; i < m; ++i) x[face_[i]] = s * u[i];
        for (std::size_t j = 0; j < r; ++j) x[rest_[j]] = (1.0 - s) * v[j];
        return jac;
    }

private:
    std::size_t n_;
    std::vector<std::size_t> face_, rest_;
};

inline void check_finite(std::span<const double> out, std::span<const double> point, const char* where) {
    for (double v : out)
        if (!std::isfinite(v)) throw NonFiniteSample(std::vector<double>(point.begin(), point.end()), where);
}

}  // namespace detail

// Integrand adapter on the unit cube, reusable for frozen-mesh re-evaluation.
inline auto simplex_cube_integrand(const SimplexIntegrand& f) {
    struct Adapter {
        const SimplexIntegrand* f;
        detail::SimplexMap map;
        void operator()(const double* t, double* out) const {
            std::array<double, kMaxSimplexDim> x{};
            const std::span<const double> xs(x.data(), f->dim);
            const double jac = map.map(t, x.data());
            f->eval(xs, std::span<double>(out, f->components));
            detail::check_finite(std::span<const double>(out, f->components), xs, "simplex");
            for (std::size_t c = 0; c < f->components; ++c) out[c] *= jac;
        }
    };
    return Adapter{&f, detail::SimplexMap(f.dim, f.singular_faces)};
}

inline VectorIntegralResult integrate_simplex_vector(const SimplexIntegrand& f, const CubatureOptions& opt) {
    if (f.dim < 2) throw std::invalid_argument("integrate_simplex: dim must be >= 2");
    if (!f.eval) throw std::invalid_argument("integrate_simplex: empty integrand");
    const std::size_t d = f.dim - 1;
    const auto a = simplex_cube_integrand(f);
    CubatureResult r = cubature(a, std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), f.components, opt);
    return {std::move(r.value), std::move(r.error), r.evaluations, r.converged, std::move(r.mesh)};
}

inline VectorIntegralResult integrate_simplex_on_mesh(const SimplexIntegrand& f, const CubatureMesh& mesh,
                                                      unsigned workers = 1) {
    if (mesh.dim + 1 != f.dim) throw std::invalid_argument("mesh does not match the simplex dimension");
    const auto a = simplex_cube_integrand(f);
    CubatureResult r = cubature_on_mesh(a, mesh, f.components, workers);
    return {std::move(r.value), std::move(r.error), r.evaluations, r.converged, std::move(r.mesh)};
}

inline IntegralResult integrate_simplex(const SimplexIntegrand& f, double tol, CubatureOptions opt = {}) {
    if (!(tol > 0)) throw std::invalid_argument("integrate_simplex: tol must be positive");
    if (f.components != 1) throw std::invalid_argument("integrate_simplex: scalar integrand expected");
    opt.rel_tol = tol;
    return integrate_simplex_vector(f, opt).component(0);
}

namespace detail {

class R4Map {
public:
    explicit R4Map(double scale) : a_(scale) {}
    // t in [0,1]^4 -> k, returns the Jacobian including the (2 pi)^-4 measure.
    double map(const double* t, Vec4& k) const {
        using std::numbers::pi;
        const double u = t[0];
        const double om = 1.0 - u;
        const double r = a_ * u / om;
        const double dr = a_ / (om * om);
        const double th1 = pi * t[1], th2 = pi * t[2], ph = 2.0 * pi * t[3];
        const double s1 = std::sin(th1), s2 = std::sin(th2);
        k = {r * std::cos(th1), r * s1 * std::cos(th2), r * s1 * s2 * std::cos(ph), r * s1 * s2 * std::sin(ph)};
        constexpr double angular = pi * pi * 2.0 * pi / (16.0 * pi * pi * pi * pi);
        return angular * dr * r * r * r * s1 * s1 * s2;
    }

private:
    double a_;
};

inline void check_decay(const R4Integrand& f) {
    // |f(k)| |k|^p must not grow between successive large radii (sampled on a few directions)
    const std::array<Vec4, 3> dirs = {Vec4{0.5, 0.5, 0.5, 0.5}, Vec4{0.8, -0.36, 0.48, 0.0},
                                      Vec4{-0.1, 0.7, 0.1, -0.7}};
    std::vector<double> out(f.components);
    for (const auto& d : dirs) {
        double prev = -1.0;
        for (double r : {1e3, 1e4, 1e5}) {
            const double R = r * std::max(1.0, f.radial_scale);
            f.eval(R * d, out);
            double m = 0.0;
            for (double v : out) m = std::max(m, std::abs(v));
            const double scaled = m * std::pow(R, f.decay_exponent);
            if (std::isfinite(scaled) && prev >= 0.0 && scaled > 10.0 * prev + 1e-300)
                throw std::invalid_argument("integrate_r4: integrand decays slower than the declared exponent");
            prev = scaled;
        }
    }
}

}  // namespace detail

inline auto r4_cube_integrand(const R4Integrand& f) {
    struct Adapter {
        const R4Integrand* f;
        detail::R4Map map;
        void operator()(const double* t, double* out) const {
            Vec4 k;
            const double jac = map.map(t, k);
            f->eval(k, std::span<double>(out, f->components));
            detail::check_finite(std::span<const double>(out, f->components), std::span<const double>(k), "R4");
            for (std::size_t c = 0; c < f->components; ++c) out[c] *= jac;
        }
    };
    return Adapter{&f, detail::R4Map(f.radial_scale)};
}

inline VectorIntegralResult integrate_r4_vector(const R4Integrand& f, const CubatureOptions& opt) {
    if (!f.eval) throw std::invalid_argument("integrate_r4: empty integrand");
    if (!(f.decay_exponent >= 5.0)) throw std::invalid_argument("integrate_r4: decay exponent must be >= 5");
    if (!(f.radial_scale > 0.0)) throw std::invalid_argument("integrate_r4: radial scale must be positive");
    detail::check_decay(f);
    const auto a = r4_cube_integrand(f);
    CubatureResult r = cubature(a, std::vector<double>(4, 0.0), std::vector<double>(4, 1.0), f.components, opt);
    return {std::move(r.value), std::move(r.error), r.evaluations, r.converged, std::move(r.mesh)};
}

inline VectorIntegralResult integrate_r4_on_mesh(const R4Integrand& f, const CubatureMesh& mesh, unsigned workers = 1) {
    const auto a = r4_cube_integrand(f);
    CubatureResult r = cubature_on_mesh(a, mesh, f.components, workers);
    return {std::move(r.value), std::move(r.error), r.evaluations, r.converged, std::move(r.mesh)};
}

inline IntegralResult integrate_r4(const R4Integrand& f, double tol, CubatureOptions opt = {}) {
    if (!(tol > 0)) throw std::invalid_argument("integrate_r4: tol must be positive");
    if (f.components != 1) throw std::invalid_argument("integrate_r4: scalar integrand expected");
    opt.rel_tol = tol;
    return integrate_r4_vector(f, opt).component(0);
}

}  // namespace abj
