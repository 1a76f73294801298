#pragma once

// Truncated Taylor expansions at the origin. A Jet carries the degree through
// which its coefficients are known exactly; arithmetic propagates that degree
// using the valuation of the operands, so that e.g. (order K-1, val 1) times
// (order K, val 1) is still known through degree K.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "poly.hpp"

namespace lagimm
{

constexpr int default_jet_order = 4;

class CompositionError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class Jet
{
public:
    Jet() = default;
    Jet(std::size_t nvars, int order) : m_p(nvars), m_order(order) {}
    Jet(const Poly &p, int order) : m_p(p.truncated(order)), m_order(order) {}

    static Jet constant(std::size_t nvars, int order, const Rational &c)
    {
        return {Poly::constant(nvars, c), order};
    }
    static Jet variable(std::size_t nvars, int order, std::size_t i)
    {
        return {Poly::variable(nvars, i), order};
    }

    [[nodiscard]] std::size_t nvars() const { return m_p.nvars(); }
    [[nodiscard]] int order() const { return m_order; }
    [[nodiscard]] const Poly &poly() const { return m_p; }
    [[nodiscard]] Rational constant_term() const { return m_p.constant_term(); }

    /// Lowest degree with a nonzero coefficient; order + 1 for a jet that is
    /// zero through its order.
    [[nodiscard]] int valuation() const { return m_p.is_zero() ? m_order + 1 : m_p.valuation(); }

    /// True when all coefficients of degree <= d vanish (requires d <= order).
    [[nodiscard]] bool vanishes_through(int d) const
    {
        if (d > m_order) {
            throw std::out_of_range("jet of order " + std::to_string(m_order) + " says nothing about degree "
                                    + std::to_string(d));
        }
        return valuation() > d;
    }

    [[nodiscard]] Jet truncated(int order) const { return {m_p, std::min(order, m_order)}; }

    Jet &operator+=(const Jet &o)
    {
        m_order = std::min(m_order, o.m_order);
        m_p = (m_p + o.m_p).truncated(m_order);
        return *this;
    }
    Jet &operator-=(const Jet &o)
    {
        m_order = std::min(m_order, o.m_order);
        m_p = (m_p - o.m_p).truncated(m_order);
        return *this;
    }
    friend Jet operator+(Jet a, const Jet &b) { return a += b; }
    friend Jet operator-(Jet a, const Jet &b) { return a -= b; }
    friend Jet operator-(Jet a)
    {
        a.m_p = -a.m_p;
        return a;
    }
    friend Jet operator*(const Rational &s, Jet a)
    {
        a.m_p *= s;
        return a;
    }
    friend Jet operator*(const Jet &a, const Jet &b)
    {
        const int order = std::min({a.m_order + b.valuation(), b.m_order + a.valuation(),
                                    std::max(a.m_order, b.m_order)});
        return {Poly::multiply(a.m_p, b.m_p, order), order};
    }
    friend bool operator==(const Jet &a, const Jet &b) { return a.m_order == b.m_order && a.m_p == b.m_p; }

    [[nodiscard]] Jet derivative(std::size_t i) const { return {m_p.derivative(i), m_order - 1}; }

    /// f o g for g with g(0) = 0.
    [[nodiscard]] Jet compose(const std::vector<Jet> &g) const
    {
        if (g.size() != nvars()) {
            throw VariableMismatch("composition needs " + std::to_string(nvars()) + " inner components, got "
                                   + std::to_string(g.size()));
        }
        int inner_order = m_order;
        std::vector<Poly> polys;
        polys.reserve(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i].constant_term() != 0) {
                throw CompositionError("inner jet component " + std::to_string(i + 1)
                                       + " does not vanish at the origin");
            }
            inner_order = std::min(inner_order, g[i].m_order);
            polys.push_back(g[i].m_p);
        }
        // An error of degree > K_g in g moves f o g only in degrees > K_g + val(f) - 1.
        const int order = std::min(m_order, inner_order + std::max(0, valuation() - 1));
        if (g.empty()) {
            return {Poly::constant(0, m_p.constant_term()), m_order};
        }
        return {m_p.substitute(polys, order), order};
    }

    /// Re-embeds into a larger ring (variable i goes to map[i]).
    [[nodiscard]] Jet embed(std::size_t nvars_new, const std::vector<std::size_t> &map) const
    {
        return {m_p.embed(nvars_new, map), m_order};
    }

    [[nodiscard]] std::string str(const std::vector<std::string> &names = {}) const
    {
        return m_p.str(names) + " + O(" + std::to_string(m_order + 1) + ")";
    }

private:
    Poly m_p;
    int m_order = 0;
};

/// A map R^m -> R^N given by N jets in m variables.
class JetMap
{
public:
    JetMap() = default;
    explicit JetMap(std::vector<Jet> comps) : m_c(std::move(comps))
    {
        for (const auto &c : m_c) {
            if (c.nvars() != m_c.front().nvars()) {
                throw VariableMismatch("jet map components live in different rings");
            }
        }
    }

    static JetMap identity(std::size_t m, int order)
    {
        std::vector<Jet> c;
        for (std::size_t i = 0; i < m; ++i) {
            c.push_back(Jet::variable(m, order, i));
        }
        return JetMap(std::move(c));
    }

    static JetMap linear(const QMatrix &l, int order)
    {
        std::vector<Jet> c;
        for (std::size_t i = 0; i < l.rows(); ++i) {
            Poly p(l.cols());
            for (std::size_t j = 0; j < l.cols(); ++j) {
                p += Poly::variable(l.cols(), j, l(i, j));
            }
            c.emplace_back(p, order);
        }
        return JetMap(std::move(c));
    }

    [[nodiscard]] std::size_t size() const { return m_c.size(); }
    [[nodiscard]] std::size_t source_dim() const { return m_c.empty() ? 0 : m_c.front().nvars(); }
    [[nodiscard]] const std::vector<Jet> &components() const { return m_c; }
    const Jet &operator[](std::size_t i) const { return m_c.at(i); }
    Jet &operator[](std::size_t i) { return m_c.at(i); }

    [[nodiscard]] int order() const
    {
        int k = m_c.empty() ? 0 : m_c.front().order();
        for (const auto &c : m_c) {
            k = std::min(k, c.order());
        }
        return k;
    }

    [[nodiscard]] JetMap truncated(int order) const
    {
        std::vector<Jet> c;
        for (const auto &x : m_c) {
            c.push_back(x.truncated(order));
        }
        return JetMap(std::move(c));
    }

    /// this o g
    [[nodiscard]] JetMap compose(const JetMap &g) const
    {
        std::vector<Jet> c;
        for (const auto &x : m_c) {
            c.push_back(x.compose(g.m_c));
        }
        return JetMap(std::move(c));
    }

    [[nodiscard]] QMatrix linear_part() const
    {
        QMatrix l(size(), source_dim());
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = 0; j < source_dim(); ++j) {
                Exponent e(source_dim(), 0);
                e[j] = 1;
                l(i, j) = m_c[i].poly().coefficient(e);
            }
        }
        return l;
    }

    friend JetMap operator+(const JetMap &a, const JetMap &b)
    {
        check_sizes(a, b);
        std::vector<Jet> c;
        for (std::size_t i = 0; i < a.size(); ++i) {
            c.push_back(a.m_c[i] + b.m_c[i]);
        }
        return JetMap(std::move(c));
    }
    friend JetMap operator-(const JetMap &a, const JetMap &b)
    {
        check_sizes(a, b);
        std::vector<Jet> c;
        for (std::size_t i = 0; i < a.size(); ++i) {
            c.push_back(a.m_c[i] - b.m_c[i]);
        }
        return JetMap(std::move(c));
    }

    [[nodiscard]] bool vanishes_through(int d) const
    {
        return std::all_of(m_c.begin(), m_c.end(), [d](const Jet &j) { return j.vanishes_through(d); });
    }

private:
    static void check_sizes(const JetMap &a, const JetMap &b)
    {
        if (a.size() != b.size()) {
            throw VariableMismatch("jet maps have different target dimensions");
        }
    }

    std::vector<Jet> m_c;
};

/// Matrix of jets over a common ring.
class JetMatrix
{
public:
    JetMatrix() = default;
    JetMatrix(std::size_t rows, std::size_t cols, std::size_t nvars, int order)
        : m_rows(rows), m_cols(cols), m_nvars(nvars), m_data(rows * cols, Jet(nvars, order))
    {
    }

    static JetMatrix from_constant(const QMatrix &m, std::size_t nvars, int order)
    {
        JetMatrix out(m.rows(), m.cols(), nvars, order);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                out(i, j) = Jet::constant(nvars, order, m(i, j));
            }
        }
        return out;
    }

    static JetMatrix column(const JetMap &f)
    {
        JetMatrix out(f.size(), 1, f.source_dim(), f.order());
        for (std::size_t i = 0; i < f.size(); ++i) {
            out(i, 0) = f[i];
        }
        return out;
    }

    static JetMatrix row(const JetMap &f)
    {
        return column(f).transpose();
    }

    [[nodiscard]] std::size_t rows() const { return m_rows; }
    [[nodiscard]] std::size_t cols() const { return m_cols; }
    [[nodiscard]] std::size_t nvars() const { return m_nvars; }
    Jet &operator()(std::size_t i, std::size_t j) { return m_data.at(i * m_cols + j); }
    const Jet &operator()(std::size_t i, std::size_t j) const { return m_data.at(i * m_cols + j); }

    [[nodiscard]] int order() const
    {
        int k = m_data.empty() ? 0 : m_data.front().order();
        for (const auto &x : m_data) {
            k = std::min(k, x.order());
        }
        return k;
    }

    [[nodiscard]] JetMatrix transpose() const
    {
        JetMatrix t(m_cols, m_rows, m_nvars, 0);
        for (std::size_t i = 0; i < m_rows; ++i) {
            for (std::size_t j = 0; j < m_cols; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    [[nodiscard]] QMatrix constant_part() const
    {
        QMatrix c(m_rows, m_cols);
        for (std::size_t k = 0; k < m_data.size(); ++k) {
            c(k / m_cols, k % m_cols) = m_data[k].constant_term();
        }
        return c;
    }

    [[nodiscard]] JetMatrix truncated(int order) const
    {
        JetMatrix out = *this;
        for (auto &x : out.m_data) {
            x = x.truncated(order);
        }
        return out;
    }

    [[nodiscard]] JetMatrix compose(const JetMap &g) const
    {
        JetMatrix out(m_rows, m_cols, g.source_dim(), 0);
        for (std::size_t k = 0; k < m_data.size(); ++k) {
            out.m_data[k] = m_data[k].compose(g.components());
        }
        return out;
    }

    /// The column (or row) vector as a JetMap.
    [[nodiscard]] JetMap as_map() const
    {
        if (m_cols != 1 && m_rows != 1) {
            throw VariableMismatch("only vectors convert to jet maps");
        }
        return JetMap(m_data);
    }

    /// True when every entry vanishes through degree d.
    [[nodiscard]] bool vanishes_through(int d) const
    {
        return std::all_of(m_data.begin(), m_data.end(), [d](const Jet &j) { return j.vanishes_through(d); });
    }

    friend JetMatrix operator+(JetMatrix a, const JetMatrix &b)
    {
        check_same(a, b);
        for (std::size_t k = 0; k < a.m_data.size(); ++k) {
            a.m_data[k] += b.m_data[k];
        }
        return a;
    }
    friend JetMatrix operator-(JetMatrix a, const JetMatrix &b)
    {
        check_same(a, b);
        for (std::size_t k = 0; k < a.m_data.size(); ++k) {
            a.m_data[k] -= b.m_data[k];
        }
        return a;
    }
    friend JetMatrix operator-(JetMatrix a)
    {
        for (auto &x : a.m_data) {
            x = -x;
        }
        return a;
    }
    friend JetMatrix operator*(const Rational &s, JetMatrix a)
    {
        for (auto &x : a.m_data) {
            x = s * x;
        }
        return a;
    }
    friend JetMatrix operator*(const JetMatrix &a, const JetMatrix &b)
    {
        if (a.m_cols != b.m_rows) {
            throw DimensionMismatch("jet matrix product " + std::to_string(a.m_rows) + "x" + std::to_string(a.m_cols)
                                    + " * " + std::to_string(b.m_rows) + "x" + std::to_string(b.m_cols));
        }
        if (a.m_nvars != b.m_nvars) {
            throw VariableMismatch("jet matrices live in different rings");
        }
        JetMatrix out(a.m_rows, b.m_cols, a.m_nvars, 0);
        for (std::size_t i = 0; i < a.m_rows; ++i) {
            for (std::size_t j = 0; j < b.m_cols; ++j) {
                Jet acc;
                bool first = true;
                for (std::size_t k = 0; k < a.m_cols; ++k) {
                    Jet t = a(i, k) * b(k, j);
                    acc = first ? t : acc + t;
                    first = false;
                }
                out(i, j) = first ? Jet(a.m_nvars, std::min(a.order(), b.order())) : acc;
            }
        }
        return out;
    }
    friend bool operator==(const JetMatrix &a, const JetMatrix &b)
    {
        return a.m_rows == b.m_rows && a.m_cols == b.m_cols && a.m_data == b.m_data;
    }

private:
    static void check_same(const JetMatrix &a, const JetMatrix &b)
    {
        if (a.m_rows != b.m_rows || a.m_cols != b.m_cols) {
            throw DimensionMismatch("jet matrix shapes differ");
        }
        if (a.m_nvars != b.m_nvars) {
            throw VariableMismatch("jet matrices live in different rings");
        }
    }

    std::size_t m_rows = 0, m_cols = 0, m_nvars = 0;
    std::vector<Jet> m_data;
};

/// Jacobian (N x m) of a jet map.
inline JetMatrix jacobian(const JetMap &f)
{
    JetMatrix d(f.size(), f.source_dim(), f.source_dim(), 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < f.source_dim(); ++j) {
            d(i, j) = f[i].derivative(j);
        }
    }
    return d;
}

/// Jacobian restricted to the variables [first, first + count).
inline JetMatrix partial_jacobian(const JetMap &f, std::size_t first, std::size_t count)
{
    JetMatrix d(f.size(), count, f.source_dim(), 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            d(i, j) = f[i].derivative(first + j);
        }
    }
    return d;
}

/// Gradient of a scalar jet as a row vector.
inline JetMatrix gradient(const Jet &f)
{
    return jacobian(JetMap({f}));
}

/// Block of second derivatives d^2 f / (d v_{r0+i} d v_{c0+j}).
inline JetMatrix hessian_block(const Jet &f, std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc)
{
    JetMatrix h(nr, nc, f.nvars(), 0);
    for (std::size_t i = 0; i < nr; ++i) {
        const Jet fi = f.derivative(r0 + i);
        for (std::size_t j = 0; j < nc; ++j) {
            h(i, j) = fi.derivative(c0 + j);
        }
    }
    return h;
}

inline JetMatrix hessian(const Jet &f)
{
    return hessian_block(f, 0, f.nvars(), 0, f.nvars());
}

/// Column-major vectorisation.
inline JetMatrix vec(const JetMatrix &m)
{
    JetMatrix v(m.rows() * m.cols(), 1, m.nvars(), 0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            v(j * m.rows() + i, 0) = m(i, j);
        }
    }
    return v;
}

/// D(vec M): a (rows*cols) x nvars matrix.
inline JetMatrix vec_derivative(const JetMatrix &m)
{
    return jacobian(vec(m).as_map());
}

inline JetMatrix kron(const JetMatrix &a, const JetMatrix &b)
{
    if (a.nvars() != b.nvars()) {
        throw VariableMismatch("jet matrices live in different rings");
    }
    JetMatrix out(a.rows() * b.rows(), a.cols() * b.cols(), a.nvars(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

struct ProductRule {
    JetMatrix product;     ///< A B
    JetMatrix derivative;  ///< (B^T (x) I_m) DA + (I_p (x) A) DB
};

/// Product of matrix jets together with D vec(AB) assembled from DA and DB.
inline ProductRule product_rule_mul(const JetMatrix &a, const JetMatrix &b)
{
    const int k = std::min(a.order(), b.order());
    const JetMatrix im = JetMatrix::from_constant(QMatrix::identity(a.rows()), a.nvars(), k);
    const JetMatrix ip = JetMatrix::from_constant(QMatrix::identity(b.cols()), a.nvars(), k);
    return {a * b, kron(b.transpose(), im) * vec_derivative(a) + kron(ip, a) * vec_derivative(b)};
}

/// Inverse of a square matrix jet with invertible constant term.
inline JetMatrix matrix_jet_inverse(const JetMatrix &m)
{
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("cannot invert a non-square jet matrix");
    }
    const QMatrix m0 = m.constant_part();
    const QMatrix m0inv = inverse(m0); // throws SingularMatrixError
    const int order = m.order();
    const JetMatrix m0inv_j = JetMatrix::from_constant(m0inv, m.nvars(), order);
    // M = M0 (I + N), N = M0^{-1}(M - M0) has valuation >= 1.
    const JetMatrix n = m0inv_j * (m - JetMatrix::from_constant(m0, m.nvars(), order));
    const JetMatrix id = JetMatrix::from_constant(QMatrix::identity(m.rows()), m.nvars(), order);
    JetMatrix sum = id;
    JetMatrix power = id;
    for (int k = 1; k <= order; ++k) {
        power = -(power * n);
        sum = sum + power;
    }
    return (sum * m0inv_j).truncated(order);
}

namespace detail
{
// Newton iterates are plain polynomials; their accuracy is established by the
// residual check, not by order bookkeeping.
inline JetMap with_order(const JetMap &g, int k)
{
    std::vector<Jet> c;
    for (const auto &x : g.components()) {
        c.emplace_back(x.poly(), k);
    }
    return JetMap(std::move(c));
}
} // namespace detail

/// Compositional inverse of f: R^m -> R^m with f(0) = 0 and invertible linear
/// part, through degree `order` (defaults to the order of f).
inline JetMap invert_map(const JetMap &f, std::optional<int> order = std::nullopt)
{
    const std::size_t m = f.size();
    if (f.source_dim() != m) {
        throw DimensionMismatch("only maps R^m -> R^m can be inverted");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (f[i].constant_term() != 0) {
            throw CompositionError("map does not fix the origin");
        }
    }
    const int k = std::min(order.value_or(f.order()), f.order());
    const QMatrix l = f.linear_part();
    JetMap g = JetMap::linear(inverse(l), k);
    const JetMap id = JetMap::identity(m, k);
    const JetMatrix df = jacobian(f);
    for (int it = 0; it < 2 * k + 4; ++it) {
        const JetMap residual = f.compose(g) - id;
        if (residual.vanishes_through(k)) {
            return g.truncated(k);
        }
        // Newton: g <- g - (Df o g)^{-1} (f o g - id)
        const JetMatrix step = matrix_jet_inverse(df.compose(g)) * JetMatrix::column(residual);
        g = detail::with_order((JetMatrix::column(g) - step).as_map(), k);
    }
    throw ConvergenceError("jet inversion did not converge");
}

/// Solves F(u, sigma(u)) = 0 with sigma(0) = 0, where F: R^{p+q} -> R^q has
/// variables (u_1..u_p, v_1..v_q) and D_vF(0) invertible.
inline JetMap implicit_solve(const JetMap &f, std::size_t p, std::optional<int> order = std::nullopt)
{
    const std::size_t q = f.size();
    if (f.source_dim() != p + q) {
        throw DimensionMismatch("implicit_solve: F must have " + std::to_string(p) + "+" + std::to_string(q)
                                + " variables");
    }
    for (std::size_t i = 0; i < q; ++i) {
        if (f[i].constant_term() != 0) {
            throw CompositionError("implicit_solve: F(0, 0) != 0");
        }
    }
    const int k = std::min(order.value_or(f.order()), f.order());
    const QMatrix lin = f.linear_part();
    const QMatrix du = lin.block(0, 0, q, p);
    const QMatrix dv = lin.block(0, p, q, q);
    const QMatrix sigma1 = -(inverse(dv) * du);
    JetMap sigma = JetMap::linear(sigma1, k);
    const JetMatrix dvf = partial_jacobian(f, p, q);
    auto graph = [&](const JetMap &s) {
        std::vector<Jet> c;
        for (std::size_t i = 0; i < p; ++i) {
            c.push_back(Jet::variable(p, k, i));
        }
        for (const auto &x : s.components()) {
            c.push_back(x);
        }
        return JetMap(std::move(c));
    };
    for (int it = 0; it < 2 * k + 4; ++it) {
        const JetMap gr = graph(sigma);
        const JetMap residual = f.compose(gr);
        if (residual.vanishes_through(k)) {
            return sigma.truncated(k);
        }
        const JetMatrix step = matrix_jet_inverse(dvf.compose(gr)) * JetMatrix::column(residual);
        sigma = detail::with_order((JetMatrix::column(sigma) - step).as_map(), k);
    }
    throw ConvergenceError("implicit solve did not converge");
}

} // namespace lagimm
