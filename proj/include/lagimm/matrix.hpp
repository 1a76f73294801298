#pragma once

// Small dense matrices over an arbitrary field-like scalar. Exact elimination
// routines (rank, nullspace, inverse) assume exact scalars; float work is done
// through Eigen in linalg.hpp.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace lagimm
{

class DimensionMismatch : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

template <typename T>
class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T &fill = T(0))
        : m_rows(rows), m_cols(cols), m_data(rows * cols, fill)
    {
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows)
    {
        m_rows = rows.size();
        m_cols = m_rows ? rows.begin()->size() : 0;
        m_data.reserve(m_rows * m_cols);
        for (const auto &row : rows) {
            if (row.size() != m_cols) {
                throw std::invalid_argument("ragged matrix initializer");
            }
            m_data.insert(m_data.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T(1);
        }
        return m;
    }

    static Matrix diagonal(const std::vector<T> &d)
    {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(i, i) = d[i];
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const { return m_rows; }
    [[nodiscard]] std::size_t cols() const { return m_cols; }
    [[nodiscard]] bool is_square() const { return m_rows == m_cols; }

    T &operator()(std::size_t i, std::size_t j) { return m_data[i * m_cols + j]; }
    const T &operator()(std::size_t i, std::size_t j) const { return m_data[i * m_cols + j]; }

    [[nodiscard]] Matrix transpose() const
    {
        Matrix t(m_cols, m_rows);
        for (std::size_t i = 0; i < m_rows; ++i) {
            for (std::size_t j = 0; j < m_cols; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    [[nodiscard]] std::vector<T> column(std::size_t j) const
    {
        std::vector<T> c(m_rows);
        for (std::size_t i = 0; i < m_rows; ++i) {
            c[i] = (*this)(i, j);
        }
        return c;
    }

    void set_column(std::size_t j, const std::vector<T> &c)
    {
        for (std::size_t i = 0; i < m_rows; ++i) {
            (*this)(i, j) = c[i];
        }
    }

    [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        Matrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i) {
            for (std::size_t j = 0; j < nc; ++j) {
                b(i, j) = (*this)(r0 + i, c0 + j);
            }
        }
        return b;
    }

    void set_block(std::size_t r0, std::size_t c0, const Matrix &b)
    {
        for (std::size_t i = 0; i < b.rows(); ++i) {
            for (std::size_t j = 0; j < b.cols(); ++j) {
                (*this)(r0 + i, c0 + j) = b(i, j);
            }
        }
    }

    Matrix &operator+=(const Matrix &o)
    {
        check_same_shape(o);
        for (std::size_t k = 0; k < m_data.size(); ++k) {
            m_data[k] += o.m_data[k];
        }
        return *this;
    }
    Matrix &operator-=(const Matrix &o)
    {
        check_same_shape(o);
        for (std::size_t k = 0; k < m_data.size(); ++k) {
            m_data[k] -= o.m_data[k];
        }
        return *this;
    }
    Matrix &operator*=(const T &s)
    {
        for (auto &x : m_data) {
            x *= s;
        }
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix &b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix &b) { return a -= b; }
    friend Matrix operator*(Matrix a, const T &s) { return a *= s; }
    friend Matrix operator*(const T &s, Matrix a) { return a *= s; }
    friend Matrix operator-(Matrix a)
    {
        for (auto &x : a.m_data) {
            x = -x;
        }
        return a;
    }

    friend Matrix operator*(const Matrix &a, const Matrix &b)
    {
        if (a.m_cols != b.m_rows) {
            throw DimensionMismatch("matrix product shape mismatch: " + a.shape_str() + " * "
                                        + b.shape_str());
        }
        Matrix c(a.m_rows, b.m_cols);
        for (std::size_t i = 0; i < a.m_rows; ++i) {
            for (std::size_t k = 0; k < a.m_cols; ++k) {
                const T &aik = a(i, k);
                if (is_zero_value(aik)) {
                    continue;
                }
                for (std::size_t j = 0; j < b.m_cols; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }

    friend std::vector<T> operator*(const Matrix &a, const std::vector<T> &x)
    {
        if (a.m_cols != x.size()) {
            throw DimensionMismatch("matrix-vector shape mismatch");
        }
        std::vector<T> y(a.m_rows, T(0));
        for (std::size_t i = 0; i < a.m_rows; ++i) {
            for (std::size_t j = 0; j < a.m_cols; ++j) {
                y[i] += a(i, j) * x[j];
            }
        }
        return y;
    }

    friend bool operator==(const Matrix &a, const Matrix &b)
    {
        return a.m_rows == b.m_rows && a.m_cols == b.m_cols && a.m_data == b.m_data;
    }

    template <typename F>
    [[nodiscard]] auto map(F &&f) const -> Matrix<decltype(f(std::declval<const T &>()))>
    {
        Matrix<decltype(f(std::declval<const T &>()))> out(m_rows, m_cols);
        for (std::size_t i = 0; i < m_rows; ++i) {
            for (std::size_t j = 0; j < m_cols; ++j) {
                out(i, j) = f((*this)(i, j));
            }
        }
        return out;
    }

    [[nodiscard]] bool is_zero() const
    {
        return std::all_of(m_data.begin(), m_data.end(), [](const T &x) { return is_zero_value(x); });
    }

    [[nodiscard]] std::string shape_str() const
    {
        return std::to_string(m_rows) + "x" + std::to_string(m_cols);
    }

    [[nodiscard]] const std::vector<T> &data() const { return m_data; }

private:
    static bool is_zero_value(const T &x)
    {
        if constexpr (requires { lagimm::is_zero(x); }) {
            return lagimm::is_zero(x);
        } else {
            return x == T(0);
        }
    }

    void check_same_shape(const Matrix &o) const
    {
        if (m_rows != o.m_rows || m_cols != o.m_cols) {
            throw DimensionMismatch("matrix shape mismatch: " + shape_str() + " vs "
                                        + o.shape_str());
        }
    }

    std::size_t m_rows = 0;
    std::size_t m_cols = 0;
    std::vector<T> m_data;
};

using QMatrix = Matrix<Rational>;
using GMatrix = Matrix<GaussRational>;

/// Kronecker product, block (i,j) = a(i,j) * b.
template <typename T>
Matrix<T> kron(const Matrix<T> &a, const Matrix<T> &b)
{
    Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            for (std::size_t r = 0; r < b.rows(); ++r) {
                for (std::size_t s = 0; s < b.cols(); ++s) {
                    k(i * b.rows() + r, j * b.cols() + s) = a(i, j) * b(r, s);
                }
            }
        }
    }
    return k;
}

inline GMatrix to_gauss(const QMatrix &m)
{
    return m.map([](const Rational &x) { return GaussRational(x); });
}

inline GMatrix conj_transpose(const GMatrix &m)
{
    return m.transpose().map([](const GaussRational &z) { return z.conj(); });
}

inline GMatrix conj(const GMatrix &m)
{
    return m.map([](const GaussRational &z) { return z.conj(); });
}

inline QMatrix real_part(const GMatrix &m)
{
    return m.map([](const GaussRational &z) { return z.re; });
}

inline QMatrix imag_part(const GMatrix &m)
{
    return m.map([](const GaussRational &z) { return z.im; });
}

/// X + iY
inline GMatrix make_complex(const QMatrix &x, const QMatrix &y)
{
    GMatrix z(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            z(i, j) = GaussRational(x(i, j), y(i, j));
        }
    }
    return z;
}

inline Matrix<double> to_double(const QMatrix &m)
{
    return m.map([](const Rational &x) { return x.get_d(); });
}

// ---------------------------------------------------------------------------
// Exact Gauss-Jordan elimination.

template <typename T>
struct RowEchelon {
    Matrix<T> reduced;
    std::vector<std::size_t> pivots;
};

template <typename T>
RowEchelon<T> rref(Matrix<T> m)
{
    RowEchelon<T> out;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        while (piv < m.rows() && is_zero(m(piv, col))) {
            ++piv;
        }
        if (piv == m.rows()) {
            continue;
        }
        if (piv != row) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(piv, j), m(row, j));
            }
        }
        const T inv = T(1) / m(row, col);
        for (std::size_t j = col; j < m.cols(); ++j) {
            m(row, j) *= inv;
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || is_zero(m(i, col))) {
                continue;
            }
            const T f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) {
                m(i, j) -= f * m(row, j);
            }
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.reduced = std::move(m);
    return out;
}

template <typename T>
std::size_t rank(const Matrix<T> &m)
{
    return rref(m).pivots.size();
}

/// Basis of the right nullspace; each basis vector has a 1 in one free column.
template <typename T>
std::vector<std::vector<T>> nullspace(const Matrix<T> &m)
{
    const auto e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) {
        is_pivot[p] = true;
    }
    std::vector<std::vector<T>> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) {
            continue;
        }
        std::vector<T> v(m.cols(), T(0));
        v[free] = T(1);
        for (std::size_t r = 0; r < e.pivots.size(); ++r) {
            v[e.pivots[r]] = -e.reduced(r, free);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

template <typename T>
T determinant(Matrix<T> m)
{
    if (!m.is_square()) {
        throw DimensionMismatch("determinant of non-square matrix");
    }
    T det(1);
    const std::size_t n = m.rows();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && is_zero(m(piv, c))) {
            ++piv;
        }
        if (piv == n) {
            return T(0);
        }
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(c, j));
            }
            det = -det;
        }
        det *= m(c, c);
        const T inv = T(1) / m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (is_zero(m(i, c))) {
                continue;
            }
            const T f = m(i, c) * inv;
            for (std::size_t j = c; j < n; ++j) {
                m(i, j) -= f * m(c, j);
            }
        }
    }
    return det;
}

class SingularMatrixError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

template <typename T>
Matrix<T> inverse(const Matrix<T> &m)
{
    if (!m.is_square()) {
        throw DimensionMismatch("inverse of non-square matrix");
    }
    const std::size_t n = m.rows();
    Matrix<T> aug(n, 2 * n);
    aug.set_block(0, 0, m);
    aug.set_block(0, n, Matrix<T>::identity(n));
    auto e = rref(std::move(aug));
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) {
        throw SingularMatrixError("matrix is singular");
    }
    return e.reduced.block(0, n, n, n);
}

/// Solves m * x = b; throws when m is singular.
template <typename T>
std::vector<T> solve(const Matrix<T> &m, const std::vector<T> &b)
{
    return inverse(m) * b;
}

template <typename T>
std::ostream &operator<<(std::ostream &os, const Matrix<T> &m)
{
    os << "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < m.cols(); ++j) {
            os << (j ? ", " : "") << to_string(m(i, j));
        }
        os << "]";
    }
    return os << "]";
}

} // namespace lagimm
