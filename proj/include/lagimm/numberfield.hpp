#pragma once

// Arithmetic in Q[x]/(m) for a squarefree modulus m, used when a real Jordan
// frame has irrational entries. Elements without a modulus are plain rationals
// and adopt the modulus of whatever they are combined with.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "upoly.hpp"

namespace lagimm
{

class ZeroDivisorError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Extended Euclid: returns (g, u) with u*a = g mod b, g monic.
inline std::pair<UPoly, UPoly> extended_gcd(const UPoly &a, const UPoly &b)
{
    UPoly r0 = a, r1 = b;
    UPoly s0(Rational(1)), s1;
    while (!r1.is_zero()) {
        auto qr = divmod(r0, r1);
        r0 = std::move(r1);
        r1 = std::move(qr.remainder);
        UPoly s2 = s0 - qr.quotient * s1;
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    const Rational l = r0.lead();
    if (sgn(l) == 0) {
        return {UPoly(), UPoly()};
    }
    return {r0.monic(), s0 * UPoly(Rational(1) / l)};
}

class FieldElement
{
public:
    FieldElement() = default;
    FieldElement(int c) : m_v(Rational(c)) {}
    FieldElement(const Rational &c) : m_v(c) {}
    FieldElement(UPoly v, std::shared_ptr<const UPoly> modulus) : m_mod(std::move(modulus)), m_v(std::move(v))
    {
        reduce();
    }

    /// The class of x in Q[x]/(m).
    static FieldElement generator(std::shared_ptr<const UPoly> modulus)
    {
        return {UPoly::monomial(1), std::move(modulus)};
    }

    [[nodiscard]] const UPoly &value() const { return m_v; }
    [[nodiscard]] const std::shared_ptr<const UPoly> &modulus() const { return m_mod; }
    [[nodiscard]] bool is_zero() const { return m_v.is_zero(); }
    [[nodiscard]] bool is_rational() const { return m_v.degree() <= 0; }
    [[nodiscard]] Rational rational_value() const
    {
        if (!is_rational()) {
            throw std::domain_error("field element is not rational");
        }
        return m_v.coeff(0);
    }

    FieldElement &operator+=(const FieldElement &o)
    {
        adopt(o);
        m_v += o.m_v;
        return *this;
    }
    FieldElement &operator-=(const FieldElement &o)
    {
        adopt(o);
        m_v -= o.m_v;
        return *this;
    }
    FieldElement &operator*=(const FieldElement &o)
    {
        adopt(o);
        m_v = m_v * o.m_v;
        reduce();
        return *this;
    }
    FieldElement &operator/=(const FieldElement &o)
    {
        adopt(o);
        return *this *= o.inverse_in(m_mod);
    }
    friend FieldElement operator+(FieldElement a, const FieldElement &b) { return a += b; }
    friend FieldElement operator-(FieldElement a, const FieldElement &b) { return a -= b; }
    friend FieldElement operator*(FieldElement a, const FieldElement &b) { return a *= b; }
    friend FieldElement operator/(FieldElement a, const FieldElement &b) { return a /= b; }
    friend FieldElement operator-(FieldElement a)
    {
        a.m_v = -a.m_v;
        return a;
    }
    friend bool operator==(const FieldElement &a, const FieldElement &b) { return (a - b).is_zero(); }

    /// Value at a numeric approximation of the generator.
    [[nodiscard]] double approx(double root) const { return m_v.eval_as<double>(root); }

    [[nodiscard]] std::string str(const std::string &var = "a") const { return m_v.str(var); }

private:
    [[nodiscard]] FieldElement inverse_in(const std::shared_ptr<const UPoly> &mod) const
    {
        if (is_zero()) {
            throw ZeroDivisorError("division by zero in number field");
        }
        if (!mod || m_v.degree() == 0) {
            return FieldElement(Rational(1) / m_v.coeff(0));
        }
        auto [g, u] = extended_gcd(m_v, *mod);
        if (g.degree() != 0) {
            throw ZeroDivisorError("element is a zero divisor modulo " + mod->str("x"));
        }
        return {u, mod};
    }

    void adopt(const FieldElement &o)
    {
        if (!m_mod) {
            m_mod = o.m_mod;
        } else if (o.m_mod && o.m_mod != m_mod && !(*o.m_mod == *m_mod)) {
            throw std::invalid_argument("field elements from different number fields");
        }
    }

    void reduce()
    {
        if (m_mod && m_v.degree() >= m_mod->degree()) {
            m_v = divmod(m_v, *m_mod).remainder;
        }
    }

    std::shared_ptr<const UPoly> m_mod;
    UPoly m_v;
};

inline bool is_zero(const FieldElement &x) { return x.is_zero(); }
inline std::string to_string(const FieldElement &x) { return x.str(); }

/// Rational interval (lo, hi] containing exactly one real root of the
/// squarefree polynomial p, namely the one closest to approx.
struct RootInterval {
    Rational lo;
    Rational hi;
};

inline RootInterval isolate_real_root(const UPoly &p, double approx)
{
    const auto chain = sturm_chain(p);
    Rational w = Rational(1, 1 << 10);
    const Rational c = rational_approximation(approx, 1L << 20);
    for (int it = 0; it < 200; ++it) {
        Rational lo = c - w, hi = c + w;
        const int k = sturm_count(chain, lo, hi);
        if (k == 1) {
            return {lo, hi};
        }
        w = k == 0 ? Rational(w * 2) : Rational(w / 2);
    }
    throw std::runtime_error("could not isolate real root of " + p.str("x"));
}

/// Exact sign of x at the real root of its modulus isolated by iv.
inline int sign_at_root(const FieldElement &x, RootInterval iv)
{
    if (x.is_rational()) {
        return sgn(x.value().coeff(0));
    }
    if (!x.modulus()) {
        throw std::logic_error("sign_at_root: element has no modulus");
    }
    const UPoly &m = *x.modulus();
    const UPoly &v = x.value();
    // v(root) != 0 exactly when gcd(v, m) does not vanish at the root; refine
    // the interval until v has no root inside, then read the sign at an end.
    const auto mchain = sturm_chain(m);
    const UPoly common = gcd(v, m);
    if (common.degree() > 0 && sturm_count(sturm_chain(common), iv.lo, iv.hi) > 0) {
        return 0;
    }
    const auto vchain = sturm_chain(squarefree_part(v));
    for (int it = 0; it < 400; ++it) {
        if (sturm_count(vchain, iv.lo, iv.hi) == 0) {
            return sgn(v.eval(iv.hi));
        }
        const Rational mid = (iv.lo + iv.hi) / 2;
        if (sturm_count(mchain, iv.lo, mid) == 1) {
            iv.hi = mid;
        } else {
            iv.lo = mid;
        }
    }
    throw std::runtime_error("sign_at_root: refinement did not separate roots");
}

} // namespace lagimm
