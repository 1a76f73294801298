#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's polynomial, Jordan or forms machinery; only the Rational type,
// Matrix containers and Poly are shared.

#include <cstddef>
#include <utility>
#include <vector>

#include "lagimm/matrix.hpp"
#include "lagimm/poly.hpp"

namespace oracle
{

using lagimm::Rational;
using Dense = std::vector<Rational>; // coefficients, low degree first

inline void trim(Dense &p)
{
    while (!p.empty() && sgn(p.back()) == 0) {
        p.pop_back();
    }
}

inline int deg(const Dense &p) { return static_cast<int>(p.size()) - 1; }

inline Dense mul(const Dense &a, const Dense &b)
{
    if (a.empty() || b.empty()) {
        return {};
    }
    Dense c(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            c[i + j] += a[i] * b[j];
        }
    }
    trim(c);
    return c;
}

inline std::pair<Dense, Dense> divmod(Dense a, const Dense &b)
{
    Dense q(std::max<int>(deg(a) - deg(b) + 1, 0), Rational(0));
    trim(a);
    while (!a.empty() && deg(a) >= deg(b)) {
        const Rational c = a.back() / b.back();
        const int s = deg(a) - deg(b);
        q[static_cast<std::size_t>(s)] = c;
        for (std::size_t i = 0; i < b.size(); ++i) {
            a[i + static_cast<std::size_t>(s)] -= c * b[i];
        }
        trim(a);
    }
    trim(q);
    return {q, a};
}

inline Dense monic(Dense p)
{
    trim(p);
    if (!p.empty()) {
        const Rational l = p.back();
        for (auto &c : p) {
            c /= l;
        }
    }
    return p;
}

inline Dense gcd(Dense a, Dense b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        Dense r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

inline Dense derivative(const Dense &p)
{
    Dense d;
    for (std::size_t i = 1; i < p.size(); ++i) {
        d.push_back(p[i] * static_cast<long>(i));
    }
    trim(d);
    return d;
}

/// Minimal polynomial via Krylov sequences of the unit vectors, combined by lcm.
inline Dense krylov_minpoly(const lagimm::QMatrix &a)
{
    const std::size_t n = a.rows();
    Dense m{Rational(1)};
    for (std::size_t i = 0; i < n; ++i) {
        // Columns v, Av, A^2 v, ... until dependent; solve for the relation.
        std::vector<std::vector<Rational>> ks;
        std::vector<Rational> v(n, Rational(0));
        v[i] = 1;
        Dense rel;
        while (true) {
            ks.push_back(v);
            // Try to write the newest vector as a combination of the previous ones.
            const std::size_t k = ks.size() - 1;
            // augmented system [ks_0 .. ks_{k-1} | ks_k], Gaussian elimination
            std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(k + 1));
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c <= k; ++c) {
                    aug[r][c] = ks[c][r];
                }
            }
            std::vector<int> pivot_col;
            std::size_t row = 0;
            for (std::size_t c = 0; c < k && row < n; ++c) {
                std::size_t p = row;
                while (p < n && sgn(aug[p][c]) == 0) {
                    ++p;
                }
                if (p == n) {
                    continue;
                }
                std::swap(aug[p], aug[row]);
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != row && sgn(aug[r][c]) != 0) {
                        const Rational f = aug[r][c] / aug[row][c];
                        for (std::size_t cc = 0; cc <= k; ++cc) {
                            aug[r][cc] -= f * aug[row][cc];
                        }
                    }
                }
                pivot_col.push_back(static_cast<int>(c));
                ++row;
            }
            bool consistent = true;
            for (std::size_t r = row; r < n; ++r) {
                if (sgn(aug[r][k]) != 0) {
                    consistent = false;
                }
            }
            if (consistent) {
                // previous vectors are independent, so pivots are 0..k-1
                rel.assign(k + 1, Rational(0));
                rel[k] = 1;
                for (std::size_t r = 0; r < row; ++r) {
                    rel[static_cast<std::size_t>(pivot_col[r])] = -aug[r][k] / aug[r][static_cast<std::size_t>(pivot_col[r])];
                }
                break;
            }
            v = a * v;
        }
        const Dense g = gcd(m, rel);
        m = monic(divmod(mul(m, rel), g).first);
    }
    return m;
}

inline int sign_at_infinity(const Dense &p, bool negative)
{
    const int s = sgn(p.back());
    return negative && deg(p) % 2 == 1 ? -s : s;
}

/// Number of distinct real roots of p (Sturm sequence signs at -inf and +inf).
inline int distinct_real_roots(Dense p)
{
    trim(p);
    if (deg(p) <= 0) {
        return 0;
    }
    std::vector<Dense> chain{p, derivative(p)};
    while (deg(chain.back()) > 0) {
        Dense r = divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.empty()) {
            break;
        }
        for (auto &c : r) {
            c = -c;
        }
        chain.push_back(std::move(r));
    }
    auto variations = [&](bool negative) {
        int v = 0, last = 0;
        for (const auto &q : chain) {
            const int s = sign_at_infinity(q, negative);
            if (s != 0 && last != 0 && s != last) {
                ++v;
            }
            if (s != 0) {
                last = s;
            }
        }
        return v;
    };
    return variations(true) - variations(false);
}

/// A diagonalizable over R iff its minimal polynomial is squarefree with only real roots.
inline bool diagonalizable_over_r(const lagimm::QMatrix &a)
{
    const Dense m = krylov_minpoly(a);
    const bool squarefree = deg(gcd(m, derivative(m))) == 0;
    return squarefree && distinct_real_roots(m) == deg(m);
}

/// Gaussian rationals as (re, im) pairs.
struct C {
    Rational re, im;
};
inline C cmul(const C &a, const C &b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

/// omega_H(u, v) = -2 Im(sum_jk u_j H_jk conj(v_k)).
inline Rational omega(const std::vector<std::vector<C>> &h, const std::vector<C> &u, const std::vector<C> &v)
{
    C acc{0, 0};
    for (std::size_t j = 0; j < u.size(); ++j) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            const C t = cmul(cmul(u[j], h[j][k]), C{v[k].re, -v[k].im});
            acc.re += t.re;
            acc.im += t.im;
        }
    }
    return -2 * acc.im;
}

/// Levi matrix 2 f_{z_j zbar_k} at a rational point, from second partials:
/// (f_{x_j x_k} + f_{y_j y_k} + i (f_{x_j y_k} - f_{y_j x_k})) / 2.
inline std::vector<std::vector<C>> levi(const lagimm::Poly &f, std::size_t n, const std::vector<Rational> &z)
{
    std::vector<std::vector<C>> h(n, std::vector<C>(n));
    auto d2 = [&](std::size_t a, std::size_t b) { return f.derivative(a).derivative(b).eval(z); };
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            h[j][k].re = (d2(j, k) + d2(n + j, n + k)) / 2;
            h[j][k].im = (d2(j, n + k) - d2(n + j, k)) / 2;
        }
    }
    return h;
}

} // namespace oracle
