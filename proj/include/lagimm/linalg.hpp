#pragma once

// Eigenstructure services for real n x n matrices in two scalar modes:
// exact rationals (Sturm sequences, invariant factors, exact Jordan chains)
// and float64 (Eigen, tolerance gated).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "matrix.hpp"
#include "upoly.hpp"

namespace lagimm
{

inline constexpr double default_tolerance = 1e-9;

using DMatrix = Matrix<double>;

/// A real square matrix in exactly one scalar mode.
struct RealMatrix {
    std::variant<QMatrix, DMatrix> value;

    RealMatrix() = default;
    RealMatrix(QMatrix m) : value(std::move(m)) {}
    RealMatrix(DMatrix m) : value(std::move(m)) {}

    [[nodiscard]] bool exact() const { return std::holds_alternative<QMatrix>(value); }
    [[nodiscard]] const QMatrix &q() const { return std::get<QMatrix>(value); }
    [[nodiscard]] const DMatrix &d() const { return std::get<DMatrix>(value); }
    [[nodiscard]] std::size_t n() const
    {
        return std::visit([](const auto &m) { return m.rows(); }, value);
    }
    [[nodiscard]] DMatrix as_double() const { return exact() ? to_double(q()) : d(); }
};

inline Eigen::MatrixXd to_eigen(const DMatrix &m)
{
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            e(i, j) = m(i, j);
        }
    }
    return e;
}

inline DMatrix from_eigen(const Eigen::MatrixXd &e)
{
    DMatrix m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
        for (Eigen::Index j = 0; j < e.cols(); ++j) {
            m(i, j) = e(i, j);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial and invariant factors.

/// det(sI - A) by Faddeev-LeVerrier.
inline UPoly charpoly(const QMatrix &a)
{
    if (!a.is_square()) {
        throw DimensionMismatch("charpoly: matrix must be square");
    }
    const std::size_t n = a.rows();
    std::vector<Rational> c(n + 1);
    c[n] = 1;
    QMatrix m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m;
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) += c[n - k + 1];
        }
        const QMatrix am = a * m;
        Rational tr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            tr += am(i, i);
        }
        c[n - k] = -tr / static_cast<long>(k);
    }
    return UPoly(std::move(c));
}

/// Nonconstant invariant factors d_1 | d_2 | ... of sI - A (Smith form over Q[s]).
/// The last one is the minimal polynomial; their product is the characteristic polynomial.
inline std::vector<UPoly> invariant_factors(const QMatrix &a)
{
    const std::size_t n = a.rows();
    std::vector<UPoly> m(n * n);
    auto at = [&](std::size_t i, std::size_t j) -> UPoly & { return m[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            at(i, j) = UPoly(-a(i, j));
        }
        at(i, i) = at(i, i) + UPoly::monomial(1);
    }
    for (std::size_t t = 0; t < n; ++t) {
        for (;;) {
            long best = -1;
            std::size_t bi = t, bj = t;
            for (std::size_t i = t; i < n; ++i) {
                for (std::size_t j = t; j < n; ++j) {
                    if (!at(i, j).is_zero() && (best < 0 || at(i, j).degree() < best)) {
                        best = at(i, j).degree();
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (best < 0) {
                break;
            }
            if (bi != t) {
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(at(bi, j), at(t, j));
                }
            }
            if (bj != t) {
                for (std::size_t i = 0; i < n; ++i) {
                    std::swap(at(i, bj), at(i, t));
                }
            }
            bool clean = true;
            const UPoly pivot = at(t, t);
            for (std::size_t i = t + 1; i < n; ++i) {
                if (at(i, t).is_zero()) {
                    continue;
                }
                const auto qr = divmod(at(i, t), pivot);
                for (std::size_t j = t; j < n; ++j) {
                    at(i, j) -= qr.quotient * at(t, j);
                }
                clean = clean && qr.remainder.is_zero();
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (at(t, j).is_zero()) {
                    continue;
                }
                const auto qr = divmod(at(t, j), pivot);
                for (std::size_t i = t; i < n; ++i) {
                    at(i, j) -= qr.quotient * at(i, t);
                }
                clean = clean && qr.remainder.is_zero();
            }
            if (!clean) {
                continue;
            }
            bool divides = true;
            for (std::size_t i = t + 1; i < n && divides; ++i) {
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (!divmod(at(i, j), pivot).remainder.is_zero()) {
                        for (std::size_t k = t; k < n; ++k) {
                            at(t, k) += at(i, k);
                        }
                        divides = false;
                        break;
                    }
                }
            }
            if (divides) {
                break;
            }
        }
    }
    std::vector<UPoly> out;
    for (std::size_t t = 0; t < n; ++t) {
        if (at(t, t).degree() > 0) {
            out.push_back(at(t, t).monic());
        }
    }
    std::sort(out.begin(), out.end(), [](const UPoly &x, const UPoly &y) { return x.degree() < y.degree(); });
    return out;
}

inline UPoly minimal_polynomial(const QMatrix &a)
{
    auto f = invariant_factors(a);
    return f.empty() ? UPoly(Rational(1)) : f.back();
}

// ---------------------------------------------------------------------------
// Spectrum

struct Eigenvalue {
    std::complex<double> value;
    /// Set when the eigenvalue lies in Q or Q(i) and was verified exactly.
    std::optional<GaussRational> exact;
    bool is_real = false;
    int algebraic = 0;
    int geometric = 0;
    /// Sizes of the Jordan blocks for this eigenvalue, largest first.
    std::vector<int> block_sizes;
};

struct Spectrum {
    std::vector<Eigenvalue> eigenvalues;
    double tolerance = 0.0;
    bool exact_mode = true;

    [[nodiscard]] int total_multiplicity() const
    {
        int s = 0;
        for (const auto &e : eigenvalues) {
            s += e.algebraic;
        }
        return s;
    }
};

namespace detail
{

/// Squarefree polynomial with the exponent it carries in each invariant factor.
struct SpectralPiece {
    UPoly poly;
    std::vector<int> exponents;
    enum class Kind { Rational, GaussPair, Other } kind = Kind::Other;
    Rational root;
    Rational s, t; // pair s +- i t, t > 0
};

inline std::vector<UPoly> coprime_base(const std::vector<UPoly> &inputs)
{
    std::vector<UPoly> base;
    for (UPoly g : inputs) {
        std::vector<UPoly> next;
        for (const auto &h : base) {
            const UPoly c = gcd(g, h);
            if (c.degree() > 0) {
                next.push_back(c);
                const UPoly rest = exact_div(h, c);
                if (rest.degree() > 0) {
                    next.push_back(rest.monic());
                }
                g = exact_div(g, c);
            } else {
                next.push_back(h);
            }
        }
        if (g.degree() > 0) {
            next.push_back(g.monic());
        }
        base = std::move(next);
    }
    return base;
}

inline int multiplicity_in(UPoly p, const UPoly &factor)
{
    int e = 0;
    for (;;) {
        auto qr = divmod(p, factor);
        if (!qr.remainder.is_zero()) {
            return e;
        }
        ++e;
        p = std::move(qr.quotient);
    }
}

/// Splits each piece into rational linear factors, Q(i) quadratic factors and a remainder.
inline std::vector<SpectralPiece> split_exact_roots(const std::vector<SpectralPiece> &pieces)
{
    std::vector<SpectralPiece> out;
    for (const auto &piece : pieces) {
        UPoly rest = piece.poly;
        for (const auto &z : numeric_roots(piece.poly)) {
            if (rest.degree() <= 0) {
                break;
            }
            const double scale = 1.0 + std::abs(z);
            if (std::abs(z.imag()) <= 1e-7 * scale) {
                const Rational r = rational_approximation(z.real());
                if (sgn(rest.eval(r)) == 0) {
                    SpectralPiece lin{UPoly::linear_root(r), piece.exponents, SpectralPiece::Kind::Rational, r, 0, 0};
                    rest = exact_div(rest, lin.poly);
                    out.push_back(std::move(lin));
                }
            } else if (z.imag() > 0) {
                const Rational s = rational_approximation(z.real());
                const Rational t = rational_approximation(z.imag());
                if (sgn(t) > 0) {
                    // (x - s)^2 + t^2
                    const UPoly quad({s * s + t * t, -2 * s, Rational(1)});
                    if (rest.degree() >= 2 && divmod(rest, quad).remainder.is_zero()) {
                        rest = exact_div(rest, quad);
                        out.push_back({quad, piece.exponents, SpectralPiece::Kind::GaussPair, 0, s, t});
                    }
                }
            }
        }
        if (rest.degree() > 0) {
            out.push_back({rest.monic(), piece.exponents, SpectralPiece::Kind::Other, 0, 0, 0});
        }
    }
    return out;
}

inline std::vector<SpectralPiece> spectral_pieces(const QMatrix &a)
{
    const auto inv = invariant_factors(a);
    std::vector<UPoly> squarefree;
    for (const auto &d : inv) {
        for (const auto &f : squarefree_decomposition(d)) {
            if (f.degree() > 0) {
                squarefree.push_back(f);
            }
        }
    }
    std::vector<SpectralPiece> pieces;
    for (const auto &b : coprime_base(squarefree)) {
        SpectralPiece p;
        p.poly = b;
        for (const auto &d : inv) {
            p.exponents.push_back(multiplicity_in(d, b));
        }
        pieces.push_back(std::move(p));
    }
    return split_exact_roots(pieces);
}

inline std::vector<int> block_sizes_from(const std::vector<int> &exponents)
{
    std::vector<int> sizes;
    for (int e : exponents) {
        if (e > 0) {
            sizes.push_back(e);
        }
    }
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

} // namespace detail

/// Exact spectrum: realness decided by Sturm sequences, multiplicities from the
/// invariant factors of sI - A.
inline Spectrum eigen(const QMatrix &a)
{
    if (!a.is_square()) {
        throw DimensionMismatch("eigen: matrix must be square");
    }
    Spectrum spec;
    spec.exact_mode = true;
    spec.tolerance = 0.0;
    for (const auto &piece : detail::spectral_pieces(a)) {
        const auto sizes = detail::block_sizes_from(piece.exponents);
        int alg = 0;
        for (int s : sizes) {
            alg += s;
        }
        auto push = [&](std::complex<double> v, std::optional<GaussRational> ex, bool real) {
            Eigenvalue e;
            e.value = v;
            e.exact = std::move(ex);
            e.is_real = real;
            e.algebraic = alg;
            e.geometric = static_cast<int>(sizes.size());
            e.block_sizes = sizes;
            spec.eigenvalues.push_back(std::move(e));
        };
        using Kind = detail::SpectralPiece::Kind;
        if (piece.kind == Kind::Rational) {
            push({piece.root.get_d(), 0.0}, GaussRational(piece.root), true);
        } else if (piece.kind == Kind::GaussPair) {
            push({piece.s.get_d(), piece.t.get_d()}, GaussRational(piece.s, piece.t), false);
            push({piece.s.get_d(), -piece.t.get_d()}, GaussRational(piece.s, -piece.t), false);
        } else {
            const int nreal = sturm_count(sturm_chain(piece.poly), std::nullopt, std::nullopt);
            auto roots = numeric_roots(piece.poly);
            std::sort(roots.begin(), roots.end(), [](auto x, auto y) { return std::abs(x.imag()) < std::abs(y.imag()); });
            for (std::size_t k = 0; k < roots.size(); ++k) {
                const bool real = static_cast<int>(k) < nreal;
                push(real ? std::complex<double>(roots[k].real(), 0.0) : roots[k], std::nullopt, real);
            }
        }
    }
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), [](const Eigenvalue &x, const Eigenvalue &y) {
        if (x.value.real() != y.value.real()) {
            return x.value.real() < y.value.real();
        }
        return x.value.imag() < y.value.imag();
    });
    return spec;
}

class EigenIterationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Float spectrum with eigenvalues clustered at tolerance `tol`.
inline Spectrum eigen(const DMatrix &a, double tol = default_tolerance)
{
    if (!a.is_square()) {
        throw DimensionMismatch("eigen: matrix must be square");
    }
    const Eigen::MatrixXd e = to_eigen(a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(e, true);
    const double scale = std::max(1.0, e.norm());
    if (es.info() != Eigen::Success) {
        throw EigenIterationError("eigenvalue iteration did not converge");
    }
    const Eigen::MatrixXcd v = es.eigenvectors();
    const Eigen::VectorXcd lam = es.eigenvalues();
    const double residual = (e.cast<std::complex<double>>() * v - v * lam.asDiagonal()).norm();
    if (!(residual <= 1e-6 * scale)) {
        std::ostringstream os;
        os << "eigenvalue iteration inaccurate: residual " << residual;
        throw EigenIterationError(os.str());
    }
    Spectrum spec;
    spec.exact_mode = false;
    spec.tolerance = tol;
    std::vector<bool> used(lam.size(), false);
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (used[i]) {
            continue;
        }
        std::complex<double> sum = lam[i];
        int count = 1;
        used[i] = true;
        for (Eigen::Index j = i + 1; j < lam.size(); ++j) {
            if (!used[j] && std::abs(lam[j] - lam[i]) <= tol * scale) {
                used[j] = true;
                sum += lam[j];
                ++count;
            }
        }
        Eigenvalue ev;
        ev.value = sum / static_cast<double>(count);
        ev.is_real = std::abs(ev.value.imag()) <= tol * scale;
        if (ev.is_real) {
            ev.value.imag(0.0);
        }
        ev.algebraic = count;
        Eigen::MatrixXcd shifted = e.cast<std::complex<double>>();
        shifted.diagonal().array() -= ev.value;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
        int null = 0;
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
            if (svd.singularValues()[k] <= std::sqrt(tol) * scale) {
                ++null;
            }
        }
        ev.geometric = std::clamp(null, 1, count);
        spec.eigenvalues.push_back(ev);
    }
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), [](const Eigenvalue &x, const Eigenvalue &y) {
        if (x.value.real() != y.value.real()) {
            return x.value.real() < y.value.real();
        }
        return x.value.imag() < y.value.imag();
    });
    return spec;
}

inline Spectrum eigen(const RealMatrix &a, double tol = default_tolerance)
{
    return a.exact() ? eigen(a.q()) : eigen(a.d(), tol);
}

// ---------------------------------------------------------------------------
// Real Jordan form

/// One real Jordan block: either lambda with size r (upper bidiagonal with ones),
/// or a complex pair s +- i t (t > 0) with k copies of [[s,-t],[t,s]] and I_2 above.
template <typename T>
struct JordanBlock {
    enum class Kind { Real, Complex };
    Kind kind = Kind::Real;
    int size = 1; // r for Real, k for Complex
    T lambda{0};
    T s{0};
    T t{0};

    [[nodiscard]] int dimension() const { return kind == Kind::Real ? size : 2 * size; }

    [[nodiscard]] Matrix<T> matrix() const
    {
        const auto d = static_cast<std::size_t>(dimension());
        Matrix<T> m(d, d);
        if (kind == Kind::Real) {
            for (std::size_t i = 0; i < d; ++i) {
                m(i, i) = lambda;
                if (i + 1 < d) {
                    m(i, i + 1) = T(1);
                }
            }
        } else {
            for (std::size_t b = 0; b < static_cast<std::size_t>(size); ++b) {
                const std::size_t o = 2 * b;
                m(o, o) = s;
                m(o, o + 1) = -t;
                m(o + 1, o) = t;
                m(o + 1, o + 1) = s;
                if (b + 1 < static_cast<std::size_t>(size)) {
                    m(o, o + 2) = T(1);
                    m(o + 1, o + 3) = T(1);
                }
            }
        }
        return m;
    }
};

template <typename T>
struct RealJordanData {
    Matrix<T> P;
    std::vector<JordanBlock<T>> blocks;

    [[nodiscard]] Matrix<T> J() const
    {
        Matrix<T> j(P.rows(), P.rows());
        std::size_t o = 0;
        for (const auto &b : blocks) {
            j.set_block(o, o, b.matrix());
            o += static_cast<std::size_t>(b.dimension());
        }
        return j;
    }
};

class JordanStructureError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

namespace detail
{

template <typename T>
bool in_span(const std::vector<std::vector<T>> &vs, const std::vector<T> &x)
{
    if (vs.empty()) {
        return std::all_of(x.begin(), x.end(), [](const T &e) { return is_zero(e); });
    }
    Matrix<T> m(x.size(), vs.size() + 1);
    for (std::size_t j = 0; j < vs.size(); ++j) {
        m.set_column(j, vs[j]);
    }
    const std::size_t r = rank(m);
    m.set_column(vs.size(), x);
    return rank(m) == r;
}

/// Jordan chains of A - theta I over an exact field; each chain is returned
/// eigenvector first, i.e. (A - theta) c[k] = c[k-1].
template <typename T>
std::vector<std::vector<std::vector<T>>> jordan_chains(const Matrix<T> &a, const T &theta, int index)
{
    const std::size_t n = a.rows();
    Matrix<T> nmat = a;
    for (std::size_t i = 0; i < n; ++i) {
        nmat(i, i) -= theta;
    }
    std::vector<Matrix<T>> powers{Matrix<T>::identity(n)};
    for (int k = 1; k <= index; ++k) {
        powers.push_back(nmat * powers.back());
    }
    std::vector<std::vector<std::vector<T>>> chains;
    // vectors at each level already accounted for by longer chains
    std::vector<std::vector<std::vector<T>>> taken(static_cast<std::size_t>(index) + 1);
    for (int level = index; level >= 1; --level) {
        auto span = nullspace(powers[static_cast<std::size_t>(level) - 1]);
        for (const auto &v : taken[static_cast<std::size_t>(level)]) {
            span.push_back(v);
        }
        for (const auto &cand : nullspace(powers[static_cast<std::size_t>(level)])) {
            if (in_span(span, cand)) {
                continue;
            }
            span.push_back(cand);
            std::vector<std::vector<T>> chain(static_cast<std::size_t>(level));
            chain[static_cast<std::size_t>(level) - 1] = cand;
            for (int k = level - 1; k >= 1; --k) {
                chain[static_cast<std::size_t>(k) - 1] = nmat * chain[static_cast<std::size_t>(k)];
                taken[static_cast<std::size_t>(k)].push_back(chain[static_cast<std::size_t>(k) - 1]);
            }
            chains.push_back(std::move(chain));
        }
    }
    return chains;
}

} // namespace detail

/// Exact real Jordan decomposition A = P J P^{-1}. Requires every eigenvalue
/// to lie in Q or Q(i); otherwise throws JordanStructureError.
inline RealJordanData<Rational> real_jordan(const QMatrix &a)
{
    const std::size_t n = a.rows();
    auto pieces = detail::spectral_pieces(a);
    using Kind = detail::SpectralPiece::Kind;
    for (const auto &p : pieces) {
        if (p.kind == Kind::Other) {
            throw JordanStructureError("eigenvalues are irrational (factor " + p.poly.str()
                                       + "); exact real Jordan form is not rational");
        }
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto &x, const auto &y) {
        if (x.kind != y.kind) {
            return x.kind == Kind::Rational;
        }
        if (x.kind == Kind::Rational) {
            return x.root < y.root;
        }
        return x.s != y.s ? x.s < y.s : x.t < y.t;
    });
    RealJordanData<Rational> out;
    out.P = QMatrix(n, n);
    std::size_t col = 0;
    for (const auto &p : pieces) {
        const auto sizes = detail::block_sizes_from(p.exponents);
        const int index = sizes.front();
        if (p.kind == Kind::Rational) {
            for (const auto &chain : detail::jordan_chains(a, p.root, index)) {
                for (const auto &v : chain) {
                    out.P.set_column(col++, v);
                }
                JordanBlock<Rational> b;
                b.kind = JordanBlock<Rational>::Kind::Real;
                b.size = static_cast<int>(chain.size());
                b.lambda = p.root;
                out.blocks.push_back(b);
            }
        } else {
            const GMatrix ag = to_gauss(a);
            for (const auto &chain : detail::jordan_chains(ag, GaussRational(p.s, p.t), index)) {
                for (const auto &w : chain) {
                    std::vector<Rational> re(n), im(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        re[i] = w[i].re;
                        im[i] = w[i].im;
                    }
                    out.P.set_column(col++, im);
                    out.P.set_column(col++, re);
                }
                JordanBlock<Rational> b;
                b.kind = JordanBlock<Rational>::Kind::Complex;
                b.size = static_cast<int>(chain.size());
                b.s = p.s;
                b.t = p.t;
                out.blocks.push_back(b);
            }
        }
    }
    if (col != n) {
        throw std::logic_error("real_jordan: chain count mismatch");
    }
    if (!(out.P * out.J() == a * out.P)) {
        throw std::logic_error("real_jordan: reconstruction failed");
    }
    return out;
}

/// Float real Jordan decomposition; only semisimple matrices with eigenvalues
/// separated by more than sqrt(tol) (relative) are accepted.
inline RealJordanData<double> real_jordan(const DMatrix &a, double tol = default_tolerance)
{
    const std::size_t n = a.rows();
    const Eigen::MatrixXd e = to_eigen(a);
    const double scale = std::max(1.0, e.norm());
    Eigen::EigenSolver<Eigen::MatrixXd> es(e, true);
    if (es.info() != Eigen::Success) {
        throw EigenIterationError("eigenvalue iteration did not converge");
    }
    const Eigen::VectorXcd lam = es.eigenvalues();
    const double sep = std::sqrt(tol) * scale;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        for (Eigen::Index j = i + 1; j < lam.size(); ++j) {
            if (std::abs(lam[i] - lam[j]) <= sep) {
                throw JordanStructureError(
                    "ill-conditioned Jordan structure: eigenvalue cluster below separation threshold; "
                    "use exact mode");
            }
        }
    }
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (std::abs(lam[i].imag()) <= sep || lam[i].imag() > 0) {
            order.push_back(i);
        }
    }
    std::sort(order.begin(), order.end(), [&](auto x, auto y) {
        const bool rx = std::abs(lam[x].imag()) <= sep;
        const bool ry = std::abs(lam[y].imag()) <= sep;
        if (rx != ry) {
            return rx;
        }
        return lam[x].real() != lam[y].real() ? lam[x].real() < lam[y].real() : lam[x].imag() < lam[y].imag();
    });
    RealJordanData<double> out;
    out.P = DMatrix(n, n);
    std::size_t col = 0;
    for (auto idx : order) {
        const Eigen::VectorXcd w = es.eigenvectors().col(idx);
        if (std::abs(lam[idx].imag()) <= sep) {
            for (std::size_t i = 0; i < n; ++i) {
                out.P(i, col) = w[static_cast<Eigen::Index>(i)].real();
            }
            ++col;
            JordanBlock<double> b;
            b.lambda = lam[idx].real();
            out.blocks.push_back(b);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                out.P(i, col) = w[static_cast<Eigen::Index>(i)].imag();
                out.P(i, col + 1) = w[static_cast<Eigen::Index>(i)].real();
            }
            col += 2;
            JordanBlock<double> b;
            b.kind = JordanBlock<double>::Kind::Complex;
            b.s = lam[idx].real();
            b.t = lam[idx].imag();
            out.blocks.push_back(b);
        }
    }
    const Eigen::MatrixXd p = to_eigen(out.P);
    const Eigen::MatrixXd j = to_eigen(out.J());
    const double residual = (p * j * p.inverse() - e).norm();
    if (!(residual <= 1e3 * tol * scale)) {
        std::ostringstream os;
        os << "ill-conditioned Jordan structure: reconstruction residual " << residual << "; use exact mode";
        throw JordanStructureError(os.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Diagonalizability over R

struct DiagonalizabilityCertificate {
    bool diagonalizable = false;
    UPoly minimal_polynomial;
    bool minpoly_squarefree = false;
    int minpoly_real_roots = 0;
    /// A = Q D Q^{-1}; exact when the spectrum is rational.
    std::optional<QMatrix> exact_eigenvectors;
    std::optional<DMatrix> float_eigenvectors;
    std::vector<double> eigenvalues;
    /// First non-diagonal real Jordan block, in whichever mode it is available.
    std::optional<JordanBlock<Rational>> exact_offending_block;
    std::optional<JordanBlock<double>> float_offending_block;
    std::string reason;
};

inline DiagonalizabilityCertificate is_diagonalizable_real(const QMatrix &a)
{
    if (!a.is_square()) {
        throw DimensionMismatch("is_diagonalizable_real: matrix must be square");
    }
    DiagonalizabilityCertificate cert;
    cert.minimal_polynomial = minimal_polynomial(a);
    cert.minpoly_squarefree = gcd(cert.minimal_polynomial, cert.minimal_polynomial.derivative()).degree() == 0;
    cert.minpoly_real_roots = count_real_roots(cert.minimal_polynomial);
    cert.diagonalizable = cert.minpoly_squarefree && cert.minpoly_real_roots == cert.minimal_polynomial.degree();
    if (!cert.minpoly_squarefree) {
        cert.reason = "minimal polynomial has a repeated root";
    } else if (!cert.diagonalizable) {
        cert.reason = "minimal polynomial has non-real roots";
    }
    std::optional<RealJordanData<Rational>> jd;
    try {
        jd = real_jordan(a);
    } catch (const JordanStructureError &) {
    }
    if (jd) {
        if (cert.diagonalizable) {
            cert.exact_eigenvectors = jd->P;
            for (const auto &b : jd->blocks) {
                cert.eigenvalues.push_back(b.lambda.get_d());
            }
        } else {
            for (const auto &b : jd->blocks) {
                if (b.kind == JordanBlock<Rational>::Kind::Complex || b.size > 1) {
                    cert.exact_offending_block = b;
                    break;
                }
            }
        }
        return cert;
    }
    if (cert.diagonalizable) {
        try {
            const auto fj = real_jordan(to_double(a));
            cert.float_eigenvectors = fj.P;
            for (const auto &b : fj.blocks) {
                cert.eigenvalues.push_back(b.lambda);
            }
        } catch (const JordanStructureError &) {
            // repeated irrational eigenvalues; the verdict stands on the minimal polynomial
        }
        return cert;
    }
    try {
        const auto fj = real_jordan(to_double(a));
        for (const auto &b : fj.blocks) {
            if (b.kind == JordanBlock<double>::Kind::Complex) {
                cert.float_offending_block = b;
                break;
            }
        }
    } catch (const JordanStructureError &) {
        // repeated irrational roots: only the minimal-polynomial certificate is available
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Positive definiteness

class ContractViolation : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Leading principal minors of a square matrix (exact).
inline std::vector<Rational> leading_minors(const QMatrix &h)
{
    std::vector<Rational> out;
    for (std::size_t k = 1; k <= h.rows(); ++k) {
        out.push_back(determinant(h.block(0, 0, k, k)));
    }
    return out;
}

/// Symmetric positive definite test by pivots of symmetric elimination (equivalent
/// to positivity of all leading principal minors).
inline bool is_spd(const QMatrix &h)
{
    if (!h.is_square() || !(h == h.transpose())) {
        throw ContractViolation("is_spd: matrix is not symmetric");
    }
    QMatrix m = h;
    const std::size_t n = m.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (sgn(m(k, k)) <= 0) {
            return false;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (sgn(m(i, k)) == 0) {
                continue;
            }
            const Rational f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) {
                m(i, j) -= f * m(k, j);
            }
        }
    }
    return true;
}

/// Real 2n x 2n embedding [[Re, -Im], [Im, Re]] of a complex matrix.
inline QMatrix realify(const GMatrix &h)
{
    const std::size_t n = h.rows();
    QMatrix r(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            r(i, j) = h(i, j).re;
            r(i, j + n) = -h(i, j).im;
            r(i + n, j) = h(i, j).im;
            r(i + n, j + n) = h(i, j).re;
        }
    }
    return r;
}

/// Hermitian positive definite test (exact).
inline bool is_spd(const GMatrix &h)
{
    if (!h.is_square() || !(h == conj_transpose(h))) {
        throw ContractViolation("is_spd: matrix is not Hermitian");
    }
    return is_spd(realify(h));
}

/// Float test: Cholesky pivots must exceed tol (relative to the matrix scale).
inline bool is_spd(const DMatrix &h, double tol = default_tolerance)
{
    const Eigen::MatrixXd e = to_eigen(h);
    const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
    if (!h.is_square() || (e - e.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
        throw ContractViolation("is_spd: matrix is not symmetric to tolerance");
    }
    const std::size_t n = h.rows();
    Eigen::MatrixXd m = 0.5 * (e + e.transpose());
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        if (!(m(kk, kk) > tol * scale)) {
            return false;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double f = m(ii, kk) / m(kk, kk);
            m.row(ii) -= f * m.row(kk);
        }
    }
    return true;
}

inline bool is_spd(const Matrix<std::complex<double>> &h, double tol = default_tolerance)
{
    const std::size_t n = h.rows();
    DMatrix r(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            r(i, j) = h(i, j).real();
            r(i, j + n) = -h(i, j).imag();
            r(i + n, j) = h(i, j).imag();
            r(i + n, j + n) = h(i, j).real();
        }
    }
    return is_spd(r, tol);
}

} // namespace lagimm
