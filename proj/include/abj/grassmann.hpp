#pragma once

#include "abj/exact.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace abj {

class GrassmannAlgebra {
public:
    static constexpr std::size_t kDefaultBound = 24;
    static constexpr std::size_t kMaxGenerators = 64;

    explicit GrassmannAlgebra(std::vector<std::string> names, std::size_t bound = kDefaultBound)
        : names_(std::move(names)) {
        if (bound > kMaxGenerators) throw std::invalid_argument("generator bound exceeds 64");
        if (names_.size() > bound)
            throw std::length_error("generator count " + std::to_string(names_.size()) + " exceeds bound " +
                                    std::to_string(bound));
    }

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    std::optional<std::size_t> find(const std::string& n) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == n) return i;
        return std::nullopt;
    }

private:
    std::vector<std::string> names_;
};

using AlgebraPtr = std::shared_ptr<const GrassmannAlgebra>;

inline AlgebraPtr make_algebra(std::vector<std::string> names, std::size_t bound = GrassmannAlgebra::kDefaultBound) {
    return std::make_shared<const GrassmannAlgebra>(std::move(names), bound);
}

// Monomials are bitmasks over generator indices, read in ascending index order.
using Monomial = std::uint64_t;

// Sign of reordering the concatenation a.b into ascending order; 0 when they share a generator.
inline int monomial_sign(Monomial a, Monomial b) {
    if (a & b) return 0;
    int swaps = 0;
    Monomial rest = b;
    while (rest) {
        const int j = std::countr_zero(rest);
        rest &= rest - 1;
        // generators of a above j must move past b_j
        const Monomial above = j == 63 ? 0 : (a >> (j + 1));
        swaps += std::popcount(above);
    }
    return (swaps & 1) ? -1 : 1;
}

class GrassmannElement {
public:
    GrassmannElement() = default;
    explicit GrassmannElement(AlgebraPtr alg) : alg_(std::move(alg)) {}
    GrassmannElement(AlgebraPtr alg, const GaussRational& scalar) : alg_(std::move(alg)) {
        if (!scalar.is_zero()) terms_.emplace(0, scalar);
    }

    static GrassmannElement generator(const AlgebraPtr& alg, std::size_t i) {
        if (i >= alg->size()) throw std::out_of_range("generator index out of range");
        GrassmannElement e(alg);
        e.terms_.emplace(Monomial(1) << i, GaussRational(1));
        return e;
    }

    const AlgebraPtr& algebra() const { return alg_; }
    const std::map<Monomial, GaussRational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    GaussRational scalar_part() const {
        auto it = terms_.find(0);
        return it == terms_.end() ? GaussRational(0) : it->second;
    }
    bool is_scalar(const GaussRational& v) const {
        if (v.is_zero()) return terms_.empty();
        return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second == v;
    }
    // every term contains generator g
    bool divisible_by(std::size_t g) const {
        for (const auto& [m, c] : terms_)
            if (!((m >> g) & 1)) return false;
        return true;
    }
    // the terms that contain generator g
    GrassmannElement part_with(std::size_t g) const {
        GrassmannElement e(alg_);
        for (const auto& [m, c] : terms_)
            if ((m >> g) & 1) e.terms_.emplace(m, c);
        return e;
    }

    GrassmannElement& operator+=(const GrassmannElement& o) {
        adopt(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    GrassmannElement& operator-=(const GrassmannElement& o) {
        adopt(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
    friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }
    friend GrassmannElement operator-(const GrassmannElement& a) {
        GrassmannElement e(a.alg_);
        for (const auto& [m, c] : a.terms_) e.terms_.emplace(m, -c);
        return e;
    }
    friend GrassmannElement operator*(const GaussRational& s, const GrassmannElement& a) {
        GrassmannElement e(a.alg_);
        if (s.is_zero()) return e;
        for (const auto& [m, c] : a.terms_) e.terms_.emplace(m, s * c);
        return e;
    }
    friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) { return a.terms_ == b.terms_; }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.str() << ")";
            for (Monomial r = m; r; r &= r - 1) {
                const int i = std::countr_zero(r);
                os << "*" << (alg_ ? alg_->name(static_cast<std::size_t>(i)) : "g" + std::to_string(i));
            }
        }
        return os.str();
    }

    void add_term(Monomial m, const GaussRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

private:
    void adopt(const GrassmannElement& o) {
        if (!alg_) alg_ = o.alg_;
        else if (o.alg_ && o.alg_ != alg_) throw std::invalid_argument("Grassmann elements from different algebras");
    }

    AlgebraPtr alg_;
    std::map<Monomial, GaussRational> terms_;
};

inline GrassmannElement g_mul(const GrassmannElement& a, const GrassmannElement& b) {
    if (a.algebra() && b.algebra() && a.algebra() != b.algebra())
        throw std::invalid_argument("Grassmann elements from different algebras");
    GrassmannElement out(a.algebra() ? a.algebra() : b.algebra());
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            const int s = monomial_sign(ma, mb);
            if (s == 0) continue;
            GaussRational c = ca * cb;
            if (s < 0) c = -c;
            out.add_term(ma | mb, c);
        }
    return out;
}

inline GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) { return g_mul(a, b); }

// Row/column label of a Grassmann matrix: field name and mode.
struct MatrixLabel {
    std::string field;
    std::array<int, 4> mode{};
    std::string str() const {
        std::ostringstream os;
        os << field << "(" << mode[0] << "," << mode[1] << "," << mode[2] << "," << mode[3] << ")";
        return os.str();
    }
};

class GrassmannMatrix {
public:
    GrassmannMatrix() = default;
    GrassmannMatrix(AlgebraPtr alg, std::size_t dim) : alg_(std::move(alg)), dim_(dim), e_(dim * dim, GrassmannElement(alg_)) {}

    static GrassmannMatrix identity(const AlgebraPtr& alg, std::size_t dim) {
        GrassmannMatrix m(alg, dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = GrassmannElement(alg, GaussRational(1));
        return m;
    }

    std::size_t dim() const { return dim_; }
    const AlgebraPtr& algebra() const { return alg_; }
    GrassmannElement& operator()(std::size_t r, std::size_t c) { return e_.at(r * dim_ + c); }
    const GrassmannElement& operator()(std::size_t r, std::size_t c) const { return e_.at(r * dim_ + c); }

    std::vector<MatrixLabel> labels;

    std::string label(std::size_t i) const { return i < labels.size() ? labels[i].str() : std::to_string(i); }

    friend GrassmannMatrix operator*(const GrassmannMatrix& a, const GrassmannMatrix& b) {
        if (a.dim_ != b.dim_) throw std::invalid_argument("matrix dimension mismatch");
        GrassmannMatrix m(a.alg_, a.dim_);
        for (std::size_t i = 0; i < a.dim_; ++i)
            for (std::size_t k = 0; k < a.dim_; ++k) {
                const auto& x = a(i, k);
                if (x.is_zero()) continue;
                for (std::size_t j = 0; j < a.dim_; ++j) {
                    const auto& y = b(k, j);
                    if (!y.is_zero()) m(i, j) += g_mul(x, y);
                }
            }
        return m;
    }
    friend bool operator==(const GrassmannMatrix& a, const GrassmannMatrix& b) {
        return a.dim_ == b.dim_ && a.e_ == b.e_;
    }

private:
    AlgebraPtr alg_;
    std::size_t dim_ = 0;
    std::vector<GrassmannElement> e_;
};

enum class DetMethod { Leibniz, MinorExpansion, Structural };

inline constexpr std::size_t kMaxExpansionDim = 10;

class StructuralPreconditionError : public std::runtime_error {
public:
    StructuralPreconditionError(const std::string& what, std::size_t row, std::size_t col)
        : std::runtime_error(what), row_(row), col_(col) {}
    std::size_t row() const { return row_; }
    std::size_t col() const { return col_; }

private:
    std::size_t row_, col_;
};

namespace detail {

inline void leibniz_dfs(const GrassmannMatrix& M, std::size_t row, std::uint32_t used, int sign,
                        const GrassmannElement& acc, GrassmannElement& out) {
    const std::size_t n = M.dim();
    if (row == n) {
        out += sign > 0 ? acc : -acc;
        return;
    }
    // sign of sigma accumulated as the parity of inversions: columns already used to the right
    for (std::size_t c = 0; c < n; ++c) {
        if ((used >> c) & 1) continue;
        const auto& e = M(row, c);
        if (e.is_zero()) continue;
        const int inv = std::popcount(used >> c);
        GrassmannElement next = g_mul(acc, e);
        if (next.is_zero()) continue;
        leibniz_dfs(M, row + 1, used | (1u << c), (inv & 1) ? -sign : sign, next, out);
    }
}

}  // namespace detail

// Determinant with the Grassmann products taken in row order.
inline GrassmannElement g_det(const GrassmannMatrix& M, DetMethod method, std::size_t epsilon_generator = 0) {
    const std::size_t n = M.dim();
    const auto& alg = M.algebra();
    if (n == 0) return GrassmannElement(alg, GaussRational(1));
    switch (method) {
        case DetMethod::Leibniz: {
            if (n > kMaxExpansionDim) throw std::length_error("Leibniz determinant limited to dim <= 10");
            GrassmannElement out(alg);
            detail::leibniz_dfs(M, 0, 0u, 1, GrassmannElement(alg, GaussRational(1)), out);
            return out;
        }
        case DetMethod::MinorExpansion: {
            if (n > kMaxExpansionDim) throw std::length_error("minor expansion limited to dim <= 10");
            // Laplace expansion along successive rows, memoized on the set of remaining columns
            std::unordered_map<std::uint32_t, GrassmannElement> memo;
            const std::uint32_t full = (1u << n) - 1;
            auto rec = [&](auto&& self, std::uint32_t cols) -> GrassmannElement {
                const std::size_t row = n - static_cast<std::size_t>(std::popcount(cols));
                if (cols == 0) return GrassmannElement(alg, GaussRational(1));
                if (auto it = memo.find(cols); it != memo.end()) return it->second;
                GrassmannElement out(alg);
                int pos = 0;
                for (std::size_t c = 0; c < n; ++c) {
                    if (!((cols >> c) & 1)) continue;
                    const auto& e = M(row, c);
                    if (!e.is_zero()) {
                        GrassmannElement term = g_mul(e, self(self, cols & ~(1u << c)));
                        out += (pos & 1) ? -term : term;
                    }
                    ++pos;
                }
                memo.emplace(cols, out);
                return out;
            };
            return rec(rec, full);
        }
        case DetMethod::Structural: {
            if (!alg || epsilon_generator >= alg->size())
                throw std::invalid_argument("structural determinant needs the epsilon generator");
            GrassmannElement out(alg, GaussRational(1));
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) {
                    const auto& e = M(r, c);
                    if (r == c) {
                        GrassmannElement rest = e - GrassmannElement(alg, GaussRational(1));
                        if (!rest.divisible_by(epsilon_generator))
                            throw StructuralPreconditionError("diagonal entry is not 1 plus an epsilon multiple", r, c);
                        out += rest;
                    } else if (!e.divisible_by(epsilon_generator)) {
                        throw StructuralPreconditionError("off-diagonal entry without a factor epsilon", r, c);
                    }
                }
            return out;
        }
    }
    throw std::invalid_argument("unknown determinant method");
}

}  // namespace abj
