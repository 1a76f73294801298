#pragma once

// Sparse multivariate polynomials with exact rational coefficients.

#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace lagimm
{

using Exponent = std::vector<int>;

class VariableMismatch : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

inline int total_degree(const Exponent &e)
{
    return std::accumulate(e.begin(), e.end(), 0);
}

class Poly
{
public:
    using TermMap = std::map<Exponent, Rational>;

    explicit Poly(std::size_t nvars = 0) : m_nvars(nvars) {}

    static Poly constant(std::size_t nvars, const Rational &c)
    {
        Poly p(nvars);
        if (sgn(c) != 0) {
            p.m_terms.emplace(Exponent(nvars, 0), c);
        }
        return p;
    }

    static Poly variable(std::size_t nvars, std::size_t i, const Rational &c = 1)
    {
        if (i >= nvars) {
            throw std::out_of_range("variable index out of range");
        }
        Poly p(nvars);
        Exponent e(nvars, 0);
        e[i] = 1;
        p.add_term(e, c);
        return p;
    }

    static Poly monomial(const Exponent &e, const Rational &c = 1)
    {
        Poly p(e.size());
        p.add_term(e, c);
        return p;
    }

    [[nodiscard]] std::size_t nvars() const { return m_nvars; }
    [[nodiscard]] const TermMap &terms() const { return m_terms; }
    [[nodiscard]] bool is_zero() const { return m_terms.empty(); }
    [[nodiscard]] std::size_t size() const { return m_terms.size(); }

    /// Largest total degree; -1 for zero.
    [[nodiscard]] int degree() const
    {
        int d = -1;
        for (const auto &[e, c] : m_terms) {
            d = std::max(d, total_degree(e));
        }
        return d;
    }

    /// Smallest total degree of a nonzero term; -1 for zero.
    [[nodiscard]] int valuation() const
    {
        int d = -1;
        for (const auto &[e, c] : m_terms) {
            const int t = total_degree(e);
            d = d < 0 ? t : std::min(d, t);
        }
        return d;
    }

    [[nodiscard]] Rational coefficient(const Exponent &e) const
    {
        auto it = m_terms.find(e);
        return it == m_terms.end() ? Rational(0) : it->second;
    }

    [[nodiscard]] Rational constant_term() const { return coefficient(Exponent(m_nvars, 0)); }

    void add_term(const Exponent &e, const Rational &c)
    {
        if (e.size() != m_nvars) {
            throw VariableMismatch("monomial has wrong number of variables");
        }
        if (sgn(c) == 0) {
            return;
        }
        auto [it, inserted] = m_terms.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (sgn(it->second) == 0) {
                m_terms.erase(it);
            }
        }
    }

    Poly &operator+=(const Poly &o)
    {
        check_ring(o);
        for (const auto &[e, c] : o.m_terms) {
            add_term(e, c);
        }
        return *this;
    }
    Poly &operator-=(const Poly &o)
    {
        check_ring(o);
        for (const auto &[e, c] : o.m_terms) {
            add_term(e, -c);
        }
        return *this;
    }
    Poly &operator*=(const Rational &s)
    {
        if (sgn(s) == 0) {
            m_terms.clear();
            return *this;
        }
        for (auto &[e, c] : m_terms) {
            c *= s;
        }
        return *this;
    }

    friend Poly operator+(Poly a, const Poly &b) { return a += b; }
    friend Poly operator-(Poly a, const Poly &b) { return a -= b; }
    friend Poly operator*(Poly a, const Rational &s) { return a *= s; }
    friend Poly operator*(const Rational &s, Poly a) { return a *= s; }
    friend Poly operator-(Poly a) { return a *= Rational(-1); }
    friend Poly operator*(const Poly &a, const Poly &b) { return multiply(a, b, std::nullopt); }
    friend bool operator==(const Poly &a, const Poly &b)
    {
        return a.m_nvars == b.m_nvars && a.m_terms == b.m_terms;
    }

    /// Product with all terms of total degree above max_degree dropped.
    static Poly multiply(const Poly &a, const Poly &b, std::optional<int> max_degree)
    {
        a.check_ring(b);
        Poly out(a.m_nvars);
        Exponent e(a.m_nvars);
        for (const auto &[ea, ca] : a.m_terms) {
            const int da = total_degree(ea);
            for (const auto &[eb, cb] : b.m_terms) {
                if (max_degree && da + total_degree(eb) > *max_degree) {
                    continue;
                }
                for (std::size_t i = 0; i < e.size(); ++i) {
                    e[i] = ea[i] + eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }

    [[nodiscard]] Poly derivative(std::size_t i) const
    {
        if (i >= m_nvars) {
            throw std::out_of_range("derivative variable out of range");
        }
        Poly out(m_nvars);
        for (const auto &[e, c] : m_terms) {
            if (e[i] == 0) {
                continue;
            }
            Exponent d = e;
            d[i] -= 1;
            out.add_term(d, c * e[i]);
        }
        return out;
    }

    [[nodiscard]] Poly truncated(int max_degree) const
    {
        Poly out(m_nvars);
        for (const auto &[e, c] : m_terms) {
            if (total_degree(e) <= max_degree) {
                out.m_terms.emplace(e, c);
            }
        }
        return out;
    }

    /// Terms of total degree exactly d.
    [[nodiscard]] Poly homogeneous_part(int d) const
    {
        Poly out(m_nvars);
        for (const auto &[e, c] : m_terms) {
            if (total_degree(e) == d) {
                out.m_terms.emplace(e, c);
            }
        }
        return out;
    }

    template <typename T>
    [[nodiscard]] T eval(std::span<const T> x) const
    {
        if (x.size() != m_nvars) {
            throw VariableMismatch("evaluation point has wrong dimension");
        }
        T acc(0);
        for (const auto &[e, c] : m_terms) {
            T term;
            if constexpr (std::is_same_v<T, Rational>) {
                term = c;
            } else {
                term = T(c.get_d());
            }
            for (std::size_t i = 0; i < m_nvars; ++i) {
                for (int k = 0; k < e[i]; ++k) {
                    term *= x[i];
                }
            }
            acc += term;
        }
        return acc;
    }

    template <typename T>
    [[nodiscard]] T eval(const std::vector<T> &x) const
    {
        return eval(std::span<const T>(x.data(), x.size()));
    }

    /// Substitutes variable i by g[i]; all g share one ring. Truncates at
    /// max_degree when given.
    [[nodiscard]] Poly substitute(const std::vector<Poly> &g, std::optional<int> max_degree = std::nullopt) const
    {
        if (g.size() != m_nvars) {
            throw VariableMismatch("substitution needs one polynomial per variable");
        }
        const std::size_t target = g.empty() ? 0 : g.front().nvars();
        for (const auto &gi : g) {
            if (gi.nvars() != target) {
                throw VariableMismatch("substituted polynomials live in different rings");
            }
        }
        // powers[i][k] = g[i]^k
        std::vector<std::vector<Poly>> powers(m_nvars);
        for (std::size_t i = 0; i < m_nvars; ++i) {
            powers[i].push_back(constant(target, 1));
        }
        Poly out(target);
        for (const auto &[e, c] : m_terms) {
            Poly term = constant(target, c);
            for (std::size_t i = 0; i < m_nvars; ++i) {
                while (static_cast<int>(powers[i].size()) <= e[i]) {
                    powers[i].push_back(multiply(powers[i].back(), g[i], max_degree));
                }
                if (e[i] > 0) {
                    term = multiply(term, powers[i][static_cast<std::size_t>(e[i])], max_degree);
                }
            }
            out += term;
        }
        return out;
    }

    /// Re-embeds into a ring with nvars_new variables; variable i goes to index map[i].
    [[nodiscard]] Poly embed(std::size_t nvars_new, const std::vector<std::size_t> &map) const
    {
        if (map.size() != m_nvars) {
            throw VariableMismatch("embedding map has wrong size");
        }
        Poly out(nvars_new);
        for (const auto &[e, c] : m_terms) {
            Exponent f(nvars_new, 0);
            for (std::size_t i = 0; i < m_nvars; ++i) {
                f[map[i]] += e[i];
            }
            out.add_term(f, c);
        }
        return out;
    }

    [[nodiscard]] std::string str(const std::vector<std::string> &names = {}) const
    {
        if (is_zero()) {
            return "0";
        }
        std::string out;
        for (auto it = m_terms.rbegin(); it != m_terms.rend(); ++it) {
            const auto &[e, c] = *it;
            std::string mono;
            for (std::size_t i = 0; i < m_nvars; ++i) {
                if (e[i] == 0) {
                    continue;
                }
                const std::string v = i < names.size() ? names[i] : "v" + std::to_string(i + 1);
                mono += (mono.empty() ? "" : "*") + v + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
            }
            const Rational a = abs(c);
            std::string term = mono.empty() ? a.get_str() : (a == 1 ? mono : a.get_str() + "*" + mono);
            if (out.empty()) {
                out = (sgn(c) < 0 ? "-" : "") + term;
            } else {
                out += (sgn(c) < 0 ? " - " : " + ") + term;
            }
        }
        return out;
    }

private:
    void check_ring(const Poly &o) const
    {
        if (o.m_nvars != m_nvars) {
            throw VariableMismatch("polynomials live in rings with " + std::to_string(m_nvars) + " and "
                                   + std::to_string(o.m_nvars) + " variables");
        }
    }

    std::size_t m_nvars = 0;
    TermMap m_terms;
};

/// Names x1..xn, y1..yn for the real coordinates of C^n.
inline std::vector<std::string> complex_coordinate_names(std::size_t n)
{
    std::vector<std::string> v;
    for (std::size_t j = 1; j <= n; ++j) {
        v.push_back("x" + std::to_string(j));
    }
    for (std::size_t j = 1; j <= n; ++j) {
        v.push_back("y" + std::to_string(j));
    }
    return v;
}

inline std::vector<std::string> indexed_names(const std::string &base, std::size_t n)
{
    std::vector<std::string> v;
    for (std::size_t j = 1; j <= n; ++j) {
        v.push_back(base + std::to_string(j));
    }
    return v;
}

} // namespace lagimm
