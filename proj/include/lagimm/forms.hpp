#pragma once

// Exterior calculus of degree <= 2 with polynomial coefficients on R^N.
// On C^n = R^{2n} the coordinates are ordered (x1..xn, y1..yn) and real
// (1,1)-forms are identified with Hermitian matrices through
//     omega = i * sum_{j,k} H_jk dz_j ^ dz̄_k,
// which in real coordinates reads
//     coeff(dx_j ^ dy_k) = 2 Re H_jk,
//     coeff(dx_j ^ dx_k) = coeff(dy_j ^ dy_k) = -2 Im H_jk      (j < k).

#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "matrix.hpp"
#include "poly.hpp"

namespace lagimm
{

class UnsupportedDegree : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class FormTypeError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

class DiffForm
{
public:
    DiffForm() = default;

    static DiffForm zero(std::size_t dim, int degree)
    {
        if (degree < 0 || degree > 2) {
            throw UnsupportedDegree("forms of degree " + std::to_string(degree) + " are not supported");
        }
        DiffForm f;
        f.m_dim = dim;
        f.m_degree = degree;
        f.m_coef.assign(basis_size(dim, degree), Poly(dim));
        return f;
    }

    static DiffForm function(const Poly &p)
    {
        DiffForm f = zero(p.nvars(), 0);
        f.m_coef[0] = p;
        return f;
    }

    /// The 1-form de_a.
    static DiffForm differential(std::size_t dim, std::size_t a)
    {
        DiffForm f = zero(dim, 1);
        f.m_coef.at(a) = Poly::constant(dim, 1);
        return f;
    }

    static std::size_t basis_size(std::size_t dim, int degree)
    {
        switch (degree) {
        case 0:
            return 1;
        case 1:
            return dim;
        case 2:
            return dim * (dim - (dim ? 1 : 0)) / 2;
        default:
            throw UnsupportedDegree("forms of degree " + std::to_string(degree) + " are not supported");
        }
    }

    /// Position of de_a ^ de_b (a < b) in the ordered degree-2 basis.
    static std::size_t pair_index(std::size_t dim, std::size_t a, std::size_t b)
    {
        if (a >= b || b >= dim) {
            throw std::out_of_range("pair index requires a < b < dim");
        }
        return a * dim - a * (a + 1) / 2 + (b - a - 1);
    }

    [[nodiscard]] std::size_t dim() const { return m_dim; }
    [[nodiscard]] int degree() const { return m_degree; }
    [[nodiscard]] const std::vector<Poly> &coefficients() const { return m_coef; }

    [[nodiscard]] const Poly &scalar() const
    {
        require_degree(0);
        return m_coef[0];
    }
    [[nodiscard]] const Poly &coeff(std::size_t a) const
    {
        require_degree(1);
        return m_coef.at(a);
    }
    Poly &coeff(std::size_t a)
    {
        require_degree(1);
        return m_coef.at(a);
    }
    /// Coefficient of de_a ^ de_b with antisymmetry applied for a > b.
    [[nodiscard]] Poly coeff(std::size_t a, std::size_t b) const
    {
        require_degree(2);
        if (a == b) {
            return Poly(m_dim);
        }
        return a < b ? m_coef[pair_index(m_dim, a, b)] : -m_coef[pair_index(m_dim, b, a)];
    }
    /// Adds c * de_a ^ de_b, normalising to a < b.
    void add(std::size_t a, std::size_t b, const Poly &c)
    {
        require_degree(2);
        if (a == b) {
            return;
        }
        if (a < b) {
            m_coef[pair_index(m_dim, a, b)] += c;
        } else {
            m_coef[pair_index(m_dim, b, a)] -= c;
        }
    }

    [[nodiscard]] bool is_zero() const
    {
        for (const auto &c : m_coef) {
            if (!c.is_zero()) {
                return false;
            }
        }
        return true;
    }

    /// True when every coefficient vanishes in total degree <= d.
    [[nodiscard]] bool vanishes_through(int d) const
    {
        for (const auto &c : m_coef) {
            if (!c.is_zero() && c.valuation() <= d) {
                return false;
            }
        }
        return true;
    }

    DiffForm &operator+=(const DiffForm &o)
    {
        check_compatible(o);
        for (std::size_t k = 0; k < m_coef.size(); ++k) {
            m_coef[k] += o.m_coef[k];
        }
        return *this;
    }
    DiffForm &operator-=(const DiffForm &o)
    {
        check_compatible(o);
        for (std::size_t k = 0; k < m_coef.size(); ++k) {
            m_coef[k] -= o.m_coef[k];
        }
        return *this;
    }
    friend DiffForm operator+(DiffForm a, const DiffForm &b) { return a += b; }
    friend DiffForm operator-(DiffForm a, const DiffForm &b) { return a -= b; }
    friend DiffForm operator*(const Rational &s, DiffForm a)
    {
        for (auto &c : a.m_coef) {
            c *= s;
        }
        return a;
    }
    /// Multiplication by a function.
    friend DiffForm operator*(const Poly &g, DiffForm a)
    {
        for (auto &c : a.m_coef) {
            c = g * c;
        }
        return a;
    }
    friend bool operator==(const DiffForm &a, const DiffForm &b)
    {
        return a.m_dim == b.m_dim && a.m_degree == b.m_degree && a.m_coef == b.m_coef;
    }

    /// Applies fn to every coefficient.
    template <typename F>
    [[nodiscard]] DiffForm map_coefficients(F &&fn) const
    {
        DiffForm out = *this;
        for (auto &c : out.m_coef) {
            c = fn(c);
        }
        return out;
    }

    [[nodiscard]] std::string str(const std::vector<std::string> &names = {}) const
    {
        auto name = [&](std::size_t a) { return a < names.size() ? names[a] : "e" + std::to_string(a + 1); };
        if (m_degree == 0) {
            return m_coef[0].str(names);
        }
        std::ostringstream os;
        bool first = true;
        for (std::size_t k = 0; k < m_coef.size(); ++k) {
            if (m_coef[k].is_zero()) {
                continue;
            }
            os << (first ? "" : " + ") << "(" << m_coef[k].str(names) << ")";
            if (m_degree == 1) {
                os << " d" << name(k);
            } else {
                const auto [a, b] = pair_of(k);
                os << " d" << name(a) << "^d" << name(b);
            }
            first = false;
        }
        return first ? "0" : os.str();
    }

    /// Inverse of pair_index.
    [[nodiscard]] std::pair<std::size_t, std::size_t> pair_of(std::size_t k) const
    {
        for (std::size_t a = 0; a < m_dim; ++a) {
            for (std::size_t b = a + 1; b < m_dim; ++b) {
                if (pair_index(m_dim, a, b) == k) {
                    return {a, b};
                }
            }
        }
        throw std::out_of_range("pair index out of range");
    }

private:
    void require_degree(int d) const
    {
        if (m_degree != d) {
            throw UnsupportedDegree("expected a form of degree " + std::to_string(d) + ", got "
                                    + std::to_string(m_degree));
        }
    }
    void check_compatible(const DiffForm &o) const
    {
        if (o.m_dim != m_dim) {
            throw VariableMismatch("forms live on spaces of different dimension");
        }
        if (o.m_degree != m_degree) {
            throw UnsupportedDegree("cannot add forms of different degree");
        }
    }

    std::size_t m_dim = 0;
    int m_degree = 0;
    std::vector<Poly> m_coef;
};

inline DiffForm exterior_d(const DiffForm &f)
{
    const std::size_t dim = f.dim();
    if (f.degree() == 0) {
        DiffForm out = DiffForm::zero(dim, 1);
        for (std::size_t a = 0; a < dim; ++a) {
            out.coeff(a) = f.scalar().derivative(a);
        }
        return out;
    }
    if (f.degree() == 1) {
        DiffForm out = DiffForm::zero(dim, 2);
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = 0; b < dim; ++b) {
                if (a != b) {
                    // d(alpha_a de_a) contains d_b alpha_a de_b ^ de_a
                    out.add(b, a, f.coeff(a).derivative(b));
                }
            }
        }
        return out;
    }
    throw UnsupportedDegree("exterior derivative of a 2-form would have degree 3");
}

/// d^c f = sum_j (df/dx_j dy_j - df/dy_j dx_j) for a function on R^{2n}.
inline DiffForm dc(const DiffForm &f)
{
    if (f.degree() != 0) {
        throw UnsupportedDegree("d^c is only defined on functions");
    }
    if (f.dim() % 2 != 0) {
        throw VariableMismatch("d^c needs an even-dimensional space (x, y)");
    }
    const std::size_t n = f.dim() / 2;
    DiffForm out = DiffForm::zero(f.dim(), 1);
    for (std::size_t j = 0; j < n; ++j) {
        out.coeff(n + j) = f.scalar().derivative(j);
        out.coeff(j) = -f.scalar().derivative(n + j);
    }
    return out;
}

inline DiffForm ddc(const DiffForm &f)
{
    return exterior_d(dc(f));
}

inline DiffForm wedge(const DiffForm &a, const DiffForm &b)
{
    if (a.dim() != b.dim()) {
        throw VariableMismatch("wedge of forms on different spaces");
    }
    const int deg = a.degree() + b.degree();
    if (deg > 2) {
        throw UnsupportedDegree("wedge product would have degree " + std::to_string(deg));
    }
    if (a.degree() == 0) {
        return a.scalar() * b;
    }
    if (b.degree() == 0) {
        return b.scalar() * a;
    }
    DiffForm out = DiffForm::zero(a.dim(), 2);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a.coeff(i).is_zero()) {
            continue;
        }
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j && !b.coeff(j).is_zero()) {
                out.add(i, j, a.coeff(i) * b.coeff(j));
            }
        }
    }
    return out;
}

/// Pullback under a polynomial map R^m -> R^N given by N polynomials in m variables.
inline DiffForm pullback(const DiffForm &w, const std::vector<Poly> &map)
{
    if (map.size() != w.dim()) {
        throw VariableMismatch("pullback map has " + std::to_string(map.size()) + " components, form lives on R^"
                               + std::to_string(w.dim()));
    }
    const std::size_t m = map.empty() ? 0 : map.front().nvars();
    for (const auto &c : map) {
        if (c.nvars() != m) {
            throw VariableMismatch("pullback map components live in different rings");
        }
    }
    auto pulled = [&](const Poly &c) { return c.substitute(map); };
    if (w.degree() == 0) {
        return DiffForm::function(pulled(w.scalar()));
    }
    std::vector<DiffForm> dmap;
    dmap.reserve(map.size());
    for (const auto &c : map) {
        dmap.push_back(exterior_d(DiffForm::function(c)));
    }
    if (w.degree() == 1) {
        DiffForm out = DiffForm::zero(m, 1);
        for (std::size_t a = 0; a < w.dim(); ++a) {
            if (!w.coeff(a).is_zero()) {
                out += pulled(w.coeff(a)) * dmap[a];
            }
        }
        return out;
    }
    DiffForm out = DiffForm::zero(m, 2);
    for (std::size_t a = 0; a < w.dim(); ++a) {
        for (std::size_t b = a + 1; b < w.dim(); ++b) {
            const Poly c = w.coeff(a, b);
            if (!c.is_zero()) {
                out += pulled(c) * wedge(dmap[a], dmap[b]);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hermitian matrices of (1,1)-forms

struct HermitianForm {
    GMatrix H;
    [[nodiscard]] std::size_t n() const { return H.rows(); }
};

struct HermitianFormD {
    Matrix<std::complex<double>> H;
    /// Largest |coefficient| of the (2,0)+(0,2) part at the evaluation point.
    double non_11_residual = 0.0;
    [[nodiscard]] std::size_t n() const { return H.rows(); }
};

/// Constant-coefficient 2-form i * sum H_jk dz_j ^ dz̄_k on R^{2n}.
inline DiffForm kahler_form(const GMatrix &h)
{
    if (!h.is_square() || !(h == conj_transpose(h))) {
        throw ContractViolation("kahler_form: matrix is not Hermitian");
    }
    const std::size_t n = h.rows();
    const std::size_t dim = 2 * n;
    DiffForm w = DiffForm::zero(dim, 2);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            w.add(j, n + k, Poly::constant(dim, 2 * h(j, k).re));
            if (j < k) {
                w.add(j, k, Poly::constant(dim, -2 * h(j, k).im));
                w.add(n + j, n + k, Poly::constant(dim, -2 * h(j, k).im));
            }
        }
    }
    return w;
}

namespace detail
{
template <typename S>
struct TwoFormValues {
    std::size_t n;
    std::vector<S> w; // dense antisymmetric 2n x 2n
    S &operator()(std::size_t a, std::size_t b) { return w[a * 2 * n + b]; }
    const S &operator()(std::size_t a, std::size_t b) const { return w[a * 2 * n + b]; }
};

template <typename S>
TwoFormValues<S> evaluate_two_form(const DiffForm &w, const std::vector<S> &point)
{
    if (w.degree() != 2) {
        throw UnsupportedDegree("hermitian_at expects a 2-form");
    }
    if (w.dim() % 2 != 0) {
        throw VariableMismatch("hermitian_at needs an even-dimensional space");
    }
    const std::size_t n = w.dim() / 2;
    TwoFormValues<S> v{n, std::vector<S>(4 * n * n, S(0))};
    for (std::size_t a = 0; a < 2 * n; ++a) {
        for (std::size_t b = a + 1; b < 2 * n; ++b) {
            const S val = w.coefficients()[DiffForm::pair_index(2 * n, a, b)].eval(point);
            v(a, b) = val;
            v(b, a) = -val;
        }
    }
    return v;
}
} // namespace detail

namespace detail
{
template <typename Values>
HermitianFormD hermitian_from_values(const Values &v, double tol, bool allow_non_11)
{
    const std::size_t n = v.n;
    HermitianFormD out{Matrix<std::complex<double>>(n, n), 0.0};
    double scale = 1.0;
    for (double x : v.w) {
        scale = std::max(scale, std::abs(x));
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            out.non_11_residual = std::max(out.non_11_residual, std::abs(v(j, n + k) - v(k, n + j)) / 2);
            out.non_11_residual = std::max(out.non_11_residual, std::abs(v(j, k) - v(n + j, n + k)) / 2);
        }
    }
    if (!allow_non_11 && out.non_11_residual > tol * scale) {
        std::ostringstream os;
        os << "form is not of type (1,1): (2,0)+(0,2) part of size " << out.non_11_residual;
        throw FormTypeError(os.str());
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const double re = (v(j, n + k) + v(k, n + j)) / 4;
            double im = 0;
            if (j != k) {
                const std::size_t a = std::min(j, k), b = std::max(j, k);
                const double bjk = -(v(a, b) + v(n + a, n + b)) / 4; // Im H_ab for a < b
                im = j < k ? bjk : -bjk;
            }
            out.H(j, k) = {re, im};
        }
    }
    return out;
}
} // namespace detail

/// Hermitian matrix of a real 2-form at a rational point; throws FormTypeError
/// when the form has a (2,0)+(0,2) component there.
inline HermitianForm hermitian_at(const DiffForm &w, const std::vector<Rational> &point)
{
    const auto v = detail::evaluate_two_form(w, point);
    const std::size_t n = v.n;
    std::ostringstream bad;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            if (v(j, n + k) != v(k, n + j)) {
                bad << " dx" << j + 1 << "^dy" << k + 1 << "=" << v(j, n + k) << " vs dx" << k + 1 << "^dy" << j + 1
                    << "=" << v(k, n + j) << ";";
            }
            if (v(j, k) != v(n + j, n + k)) {
                bad << " dx" << j + 1 << "^dx" << k + 1 << "=" << v(j, k) << " vs dy" << j + 1 << "^dy" << k + 1
                    << "=" << v(n + j, n + k) << ";";
            }
        }
    }
    if (!bad.str().empty()) {
        throw FormTypeError("form is not of type (1,1):" + bad.str());
    }
    HermitianForm out{GMatrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            Rational re = v(j, n + k) / 2;
            Rational im = 0;
            if (j < k) {
                im = -v(j, k) / 2;
            } else if (j > k) {
                im = v(k, j) / 2;
            }
            out.H(j, k) = GaussRational(re, im);
        }
    }
    return out;
}

/// Float evaluation. The (1,1) part is returned together with the size of the
/// remaining (2,0)+(0,2) part; throws FormTypeError when that exceeds tol.
inline HermitianFormD hermitian_at(const DiffForm &w, const std::vector<double> &point, double tol,
                                   bool allow_non_11 = false)
{
    const auto v = detail::evaluate_two_form(w, point);
    return detail::hermitian_from_values(v, tol, allow_non_11);
}

inline bool is_positive(const DiffForm &w, const std::vector<Rational> &point)
{
    return is_spd(hermitian_at(w, point).H);
}

inline bool is_positive(const DiffForm &w, const std::vector<double> &point, double tol = default_tolerance)
{
    return is_spd(hermitian_at(w, point, tol).H, tol);
}

/// The map t -> (t, 0) parametrising R^n inside C^n.
inline std::vector<Poly> real_plane_parametrization(std::size_t n)
{
    std::vector<Poly> map;
    for (std::size_t j = 0; j < n; ++j) {
        map.push_back(Poly::variable(n, j));
    }
    for (std::size_t j = 0; j < n; ++j) {
        map.push_back(Poly(n));
    }
    return map;
}

/// The map t -> (A t, t) parametrising S(A) = (A + i) R^n.
inline std::vector<Poly> graph_plane_parametrization(const QMatrix &a)
{
    const std::size_t n = a.rows();
    std::vector<Poly> map;
    for (std::size_t j = 0; j < n; ++j) {
        Poly x(n);
        for (std::size_t k = 0; k < n; ++k) {
            x += Poly::variable(n, k, a(j, k));
        }
        map.push_back(std::move(x));
    }
    for (std::size_t j = 0; j < n; ++j) {
        map.push_back(Poly::variable(n, j));
    }
    return map;
}

} // namespace lagimm
