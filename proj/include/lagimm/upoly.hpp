#pragma once

// Dense univariate polynomials over Q: Euclid, Yun squarefree decomposition,
// Sturm real-root counting and numeric root approximation.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rational.hpp"

namespace lagimm
{

class UPoly
{
public:
    UPoly() = default;
    /// Coefficients in increasing degree order.
    explicit UPoly(std::vector<Rational> coeffs) : m_c(std::move(coeffs)) { trim(); }
    UPoly(const Rational &c) : m_c{c} { trim(); }

    static UPoly monomial(std::size_t deg, const Rational &c = 1)
    {
        std::vector<Rational> v(deg + 1);
        v[deg] = c;
        return UPoly(std::move(v));
    }
    /// x - r
    static UPoly linear_root(const Rational &r) { return UPoly({-r, Rational(1)}); }

    [[nodiscard]] bool is_zero() const { return m_c.empty(); }
    /// Degree; -1 for the zero polynomial.
    [[nodiscard]] long degree() const { return static_cast<long>(m_c.size()) - 1; }
    [[nodiscard]] const std::vector<Rational> &coeffs() const { return m_c; }
    [[nodiscard]] Rational coeff(std::size_t k) const { return k < m_c.size() ? m_c[k] : Rational(0); }
    [[nodiscard]] Rational lead() const { return m_c.empty() ? Rational(0) : m_c.back(); }

    [[nodiscard]] UPoly monic() const
    {
        if (is_zero()) {
            return *this;
        }
        UPoly p = *this;
        const Rational l = lead();
        for (auto &c : p.m_c) {
            c /= l;
        }
        return p;
    }

    [[nodiscard]] UPoly derivative() const
    {
        if (m_c.size() <= 1) {
            return {};
        }
        std::vector<Rational> d(m_c.size() - 1);
        for (std::size_t k = 1; k < m_c.size(); ++k) {
            d[k - 1] = m_c[k] * static_cast<long>(k);
        }
        return UPoly(std::move(d));
    }

    [[nodiscard]] Rational eval(const Rational &x) const
    {
        Rational acc = 0;
        for (auto it = m_c.rbegin(); it != m_c.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }

    template <typename S>
    [[nodiscard]] S eval_as(const S &x) const
    {
        S acc(0);
        for (auto it = m_c.rbegin(); it != m_c.rend(); ++it) {
            acc = acc * x + S(it->get_d());
        }
        return acc;
    }

    /// Sign of p at +infinity (dir > 0) or -infinity (dir < 0).
    [[nodiscard]] int sign_at_infinity(int dir) const
    {
        if (is_zero()) {
            return 0;
        }
        int s = sgn(lead());
        if (dir < 0 && degree() % 2 == 1) {
            s = -s;
        }
        return s;
    }

    UPoly &operator+=(const UPoly &o)
    {
        if (o.m_c.size() > m_c.size()) {
            m_c.resize(o.m_c.size());
        }
        for (std::size_t k = 0; k < o.m_c.size(); ++k) {
            m_c[k] += o.m_c[k];
        }
        trim();
        return *this;
    }
    UPoly &operator-=(const UPoly &o)
    {
        if (o.m_c.size() > m_c.size()) {
            m_c.resize(o.m_c.size());
        }
        for (std::size_t k = 0; k < o.m_c.size(); ++k) {
            m_c[k] -= o.m_c[k];
        }
        trim();
        return *this;
    }
    friend UPoly operator+(UPoly a, const UPoly &b) { return a += b; }
    friend UPoly operator-(UPoly a, const UPoly &b) { return a -= b; }
    friend UPoly operator-(UPoly a)
    {
        for (auto &c : a.m_c) {
            c = -c;
        }
        return a;
    }
    friend UPoly operator*(const UPoly &a, const UPoly &b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<Rational> c(a.m_c.size() + b.m_c.size() - 1);
        for (std::size_t i = 0; i < a.m_c.size(); ++i) {
            for (std::size_t j = 0; j < b.m_c.size(); ++j) {
                c[i + j] += a.m_c[i] * b.m_c[j];
            }
        }
        return UPoly(std::move(c));
    }
    friend bool operator==(const UPoly &a, const UPoly &b) { return a.m_c == b.m_c; }

    std::string str(const std::string &var = "s") const
    {
        if (is_zero()) {
            return "0";
        }
        std::string out;
        for (long k = degree(); k >= 0; --k) {
            const Rational &c = m_c[static_cast<std::size_t>(k)];
            if (sgn(c) == 0) {
                continue;
            }
            std::string term = Rational(abs(c)).get_str();
            if (k > 0) {
                term = (abs(c) == 1 ? "" : term + "*") + var + (k > 1 ? "^" + std::to_string(k) : "");
            }
            if (out.empty()) {
                out = (sgn(c) < 0 ? "-" : "") + term;
            } else {
                out += (sgn(c) < 0 ? " - " : " + ") + term;
            }
        }
        return out;
    }

private:
    void trim()
    {
        while (!m_c.empty() && sgn(m_c.back()) == 0) {
            m_c.pop_back();
        }
    }

    std::vector<Rational> m_c;
};

struct DivMod {
    UPoly quotient;
    UPoly remainder;
};

inline DivMod divmod(const UPoly &a, const UPoly &b)
{
    if (b.is_zero()) {
        throw std::domain_error("polynomial division by zero");
    }
    std::vector<Rational> r = a.coeffs();
    const auto db = static_cast<std::size_t>(b.degree());
    if (a.degree() < b.degree()) {
        return {UPoly(), a};
    }
    std::vector<Rational> q(r.size() - db);
    const Rational lb = b.lead();
    for (std::size_t k = r.size(); k-- > db;) {
        const Rational f = r[k] / lb;
        q[k - db] = f;
        if (sgn(f) == 0) {
            continue;
        }
        for (std::size_t j = 0; j <= db; ++j) {
            r[k - db + j] -= f * b.coeffs()[j];
        }
    }
    r.resize(db);
    return {UPoly(std::move(q)), UPoly(std::move(r))};
}

/// Monic gcd; gcd(0, 0) = 0.
inline UPoly gcd(UPoly a, UPoly b)
{
    while (!b.is_zero()) {
        UPoly r = divmod(a, b).remainder;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

inline UPoly exact_div(const UPoly &a, const UPoly &b)
{
    auto qr = divmod(a, b);
    if (!qr.remainder.is_zero()) {
        throw std::logic_error("polynomial division is not exact");
    }
    return qr.quotient;
}

/// Yun decomposition: p = lead * prod_k factors[k-1]^k with factors squarefree
/// and pairwise coprime. Empty factors are returned as the constant 1.
inline std::vector<UPoly> squarefree_decomposition(const UPoly &p)
{
    std::vector<UPoly> out;
    if (p.degree() <= 0) {
        return out;
    }
    const UPoly f = p.monic();
    UPoly a = gcd(f, f.derivative());
    UPoly b = exact_div(f, a);
    UPoly c = exact_div(f.derivative(), a);
    UPoly d = c - b.derivative();
    while (b.degree() > 0) {
        UPoly g = gcd(b, d);
        out.push_back(g);
        b = exact_div(b, g);
        c = exact_div(d, g);
        d = c - b.derivative();
    }
    while (!out.empty() && out.back().degree() == 0) {
        out.pop_back();
    }
    return out;
}

inline UPoly squarefree_part(const UPoly &p)
{
    if (p.degree() <= 0) {
        return UPoly(Rational(1));
    }
    return exact_div(p.monic(), gcd(p, p.derivative()));
}

/// Sturm chain p0 = p, p1 = p', p_{k+1} = -rem(p_{k-1}, p_k).
inline std::vector<UPoly> sturm_chain(const UPoly &p)
{
    std::vector<UPoly> chain;
    if (p.is_zero()) {
        return chain;
    }
    chain.push_back(p);
    chain.push_back(p.derivative());
    while (!chain.back().is_zero()) {
        UPoly r = -divmod(chain[chain.size() - 2], chain.back()).remainder;
        chain.push_back(std::move(r));
    }
    chain.pop_back();
    return chain;
}

namespace detail
{
inline int sign_variations(const std::vector<int> &signs)
{
    int count = 0;
    int last = 0;
    for (int s : signs) {
        if (s == 0) {
            continue;
        }
        if (last != 0 && s != last) {
            ++count;
        }
        last = s;
    }
    return count;
}
} // namespace detail

/// Number of distinct real roots of a squarefree p in the half-open interval
/// (lo, hi]; std::nullopt stands for -infinity / +infinity.
inline int sturm_count(const std::vector<UPoly> &chain, const std::optional<Rational> &lo,
                       const std::optional<Rational> &hi)
{
    auto variations = [&](const std::optional<Rational> &x, int inf_dir) {
        std::vector<int> s;
        s.reserve(chain.size());
        for (const auto &q : chain) {
            s.push_back(x ? sgn(q.eval(*x)) : q.sign_at_infinity(inf_dir));
        }
        return detail::sign_variations(s);
    };
    return variations(lo, -1) - variations(hi, +1);
}

/// Number of distinct real roots of p on the whole line.
inline int count_real_roots(const UPoly &p)
{
    if (p.degree() <= 0) {
        return 0;
    }
    return sturm_count(sturm_chain(squarefree_part(p)), std::nullopt, std::nullopt);
}

/// Numeric roots of a squarefree polynomial via the companion matrix, polished
/// by Newton steps in long double.
inline std::vector<std::complex<double>> numeric_roots(const UPoly &p)
{
    const long d = p.degree();
    if (d <= 0) {
        return {};
    }
    const UPoly m = p.monic();
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (long i = 1; i < d; ++i) {
        comp(i, i - 1) = 1.0;
    }
    for (long i = 0; i < d; ++i) {
        comp(i, d - 1) = -m.coeff(static_cast<std::size_t>(i)).get_d();
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("companion eigenvalue iteration failed");
    }
    const UPoly dm = m.derivative();
    std::vector<std::complex<double>> roots;
    for (long i = 0; i < d; ++i) {
        std::complex<long double> z(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
        for (int it = 0; it < 8; ++it) {
            const auto f = m.eval_as<std::complex<long double>>(z);
            const auto df = dm.eval_as<std::complex<long double>>(z);
            if (std::abs(df) == 0.0L) {
                break;
            }
            const auto step = f / df;
            z -= step;
            if (std::abs(step) <= 1e-30L * (1.0L + std::abs(z))) {
                break;
            }
        }
        roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
    return roots;
}

/// Best rational approximation with denominator <= max_den (continued fractions).
inline Rational rational_approximation(double x, long max_den = 1'000'000)
{
    if (!std::isfinite(x)) {
        throw std::invalid_argument("non-finite value");
    }
    long double v = x;
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        const long double a_ld = std::floor(v);
        const mpz_class a(static_cast<double>(a_ld));
        const mpz_class p2 = a * p1 + p0;
        const mpz_class q2 = a * q1 + q0;
        if (q2 > max_den) {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const long double frac = v - a_ld;
        if (frac < 1e-15L) {
            break;
        }
        v = 1.0L / frac;
    }
    Rational r(p1, q1);
    r.canonicalize();
    return r;
}

} // namespace lagimm
