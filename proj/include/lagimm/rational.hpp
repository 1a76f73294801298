#pragma once

// Exact scalars: GMP rationals and Gaussian rationals (Q(i)).

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lagimm
{

using Rational = mpq_class;

/// Parses "p/q", "p" or a finite decimal such as "-0.125".
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.erase(s.begin());
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.pop_back();
    }
    if (s.empty()) {
        throw std::invalid_argument("empty rational literal");
    }
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos || s.find_first_of("eE") != std::string::npos) {
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        }
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const auto frac_len = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+") {
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        }
        if (digits.front() == '+') {
            digits.erase(digits.begin());
        }
        mpz_class num;
        if (num.set_str(digits, 10) != 0) {
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        }
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    if (s.front() == '+') {
        s.erase(s.begin());
    }
    Rational r;
    if (r.set_str(s, 10) != 0 || r.get_den() == 0) {
        throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
    }
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational &r)
{
    return r.get_str();
}

inline std::string to_string(double x)
{
    return std::to_string(x);
}

inline double to_double(const Rational &r)
{
    return r.get_d();
}

/// Exact rational approximation of a finite double (no rounding).
inline Rational from_double(double x)
{
    if (!std::isfinite(x)) {
        throw std::invalid_argument("non-finite value cannot be made rational");
    }
    return Rational(x);
}

/// Element of Q(i).
struct GaussRational {
    Rational re;
    Rational im;

    GaussRational() = default;
    GaussRational(Rational r) : re(std::move(r)) {}
    GaussRational(int r) : re(r) {}
    GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    [[nodiscard]] bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    [[nodiscard]] GaussRational conj() const { return {re, -im}; }
    [[nodiscard]] Rational norm2() const { return re * re + im * im; }

    GaussRational &operator+=(const GaussRational &o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussRational &operator-=(const GaussRational &o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussRational &operator*=(const GaussRational &o)
    {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    GaussRational &operator/=(const GaussRational &o)
    {
        const Rational d = o.norm2();
        if (sgn(d) == 0) {
            throw std::domain_error("division by zero in Q(i)");
        }
        Rational r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }
    friend GaussRational operator+(GaussRational a, const GaussRational &b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational &b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational &b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational &b) { return a /= b; }
    friend GaussRational operator-(const GaussRational &a) { return {-a.re, -a.im}; }
    friend bool operator==(const GaussRational &a, const GaussRational &b)
    {
        return a.re == b.re && a.im == b.im;
    }
};

inline std::complex<double> to_complex(const GaussRational &z)
{
    return {z.re.get_d(), z.im.get_d()};
}

inline std::string to_string(const GaussRational &z)
{
    if (sgn(z.im) == 0) {
        return z.re.get_str();
    }
    return z.re.get_str() + (sgn(z.im) < 0 ? "-" : "+") + Rational(abs(z.im)).get_str() + "i";
}

// Uniform zero tests used by the exact elimination routines.
inline bool is_zero(const Rational &r) { return sgn(r) == 0; }
inline bool is_zero(const GaussRational &z) { return z.is_zero(); }

} // namespace lagimm
