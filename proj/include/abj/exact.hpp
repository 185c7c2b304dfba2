#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <ostream>
#include <string>

namespace abj {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) { return q.str(); }

// Exact complex number with rational real and imaginary parts.
struct GaussRational {
    Rational re{0};
    Rational im{0};

    GaussRational() = default;
    GaussRational(Rational r) : re(std::move(r)) {}
    GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    GaussRational(int r) : re(r) {}

    static GaussRational i_unit() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    GaussRational conj() const { return {re, -im}; }

    GaussRational& operator+=(const GaussRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussRational& operator-=(const GaussRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussRational& operator*=(const GaussRational& o) {
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    GaussRational& operator/=(const GaussRational& o) {
        Rational n = o.re * o.re + o.im * o.im;
        if (n == 0) throw std::domain_error("GaussRational: division by zero");
        *this *= o.conj();
        re /= n;
        im /= n;
        return *this;
    }

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

    std::string str() const {
        if (im == 0) return re.str();
        if (re == 0) return im.str() + "i";
        std::string s = re.str();
        s += (im < 0) ? "-" : "+";
        Rational a = im < 0 ? Rational(-im) : im;
        return s + a.str() + "i";
    }

    friend std::ostream& operator<<(std::ostream& os, const GaussRational& z) { return os << z.str(); }
};

// Parses "p", "p/q" or a finite decimal such as "0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    std::string t = text;
    if (t.empty()) throw std::invalid_argument("empty rational");
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        return Rational(boost::multiprecision::cpp_int(t.substr(0, slash)),
                        boost::multiprecision::cpp_int(t.substr(slash + 1)));
    }
    auto dot = t.find('.');
    if (dot == std::string::npos) return Rational(boost::multiprecision::cpp_int(t));
    std::string digits = t.substr(0, dot) + t.substr(dot + 1);
    if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument("bad rational: " + text);
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t k = dot + 1; k < t.size(); ++k) den *= 10;
    return Rational(boost::multiprecision::cpp_int(digits), den);
}

}  // namespace abj
