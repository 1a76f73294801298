#pragma once

// Pairs of totally real n-planes in C^n, normalised to (R^n, S(A)) with
// S(A) = (A + i) R^n. Local rational convexity, Lagrangian capability,
// obstruction values and Kahler witnesses.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "forms.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "numberfield.hpp"
#include "upoly.hpp"

namespace lagimm
{

enum class PairClass { LagrangianAndRC, RCNotLagrangian, NotLocallyRC };

inline std::string to_string(PairClass c)
{
    switch (c) {
    case PairClass::LagrangianAndRC:
        return "LAGRANGIAN_AND_RC";
    case PairClass::RCNotLagrangian:
        return "RC_NOT_LAGRANGIAN";
    case PairClass::NotLocallyRC:
        return "NOT_LOCALLY_RC";
    }
    return "?";
}

class TotallyRealViolation : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

class TransversalityViolation : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

class NoWitnessError : public std::domain_error
{
public:
    NoWitnessError(const std::string &what, DiagonalizabilityCertificate cert)
        : std::domain_error(what), certificate(std::move(cert))
    {
    }
    DiagonalizabilityCertificate certificate;
};

struct PlanePair {
    QMatrix A;
    std::optional<QMatrix> frame1;
    std::optional<QMatrix> frame2;
    std::optional<GMatrix> G;
    [[nodiscard]] std::size_t n() const { return A.rows(); }
};

// ---------------------------------------------------------------------------
// Reduction

struct Reduction {
    QMatrix A;
    GMatrix G;
};

/// Real 2n x n frames (rows x1..xn, y1..yn) of two planes. G is the inverse of
/// the complexified first frame, so G maps plane 1 to R^n and plane 2 to S(A).
inline Reduction reduce_to_standard(const QMatrix &f1, const QMatrix &f2)
{
    if (f1.rows() % 2 != 0 || f1.rows() != f2.rows() || f1.cols() != f1.rows() / 2 || f2.cols() != f1.cols()) {
        throw DimensionMismatch("reduce_to_standard: frames must both be 2n x n");
    }
    const std::size_t n = f1.cols();
    const GMatrix m1 = make_complex(f1.block(0, 0, n, n), f1.block(n, 0, n, n));
    const GMatrix m2 = make_complex(f2.block(0, 0, n, n), f2.block(n, 0, n, n));
    GMatrix g;
    try {
        g = inverse(m1);
    } catch (const SingularMatrixError &) {
        throw TotallyRealViolation("plane 1 is not totally real: its frame is complex-linearly dependent");
    }
    const GMatrix w = g * m2;
    const QMatrix x = real_part(w);
    const QMatrix y = imag_part(w);
    QMatrix yinv;
    try {
        yinv = inverse(y);
    } catch (const SingularMatrixError &) {
        throw TransversalityViolation("the planes meet outside the origin (Im(G F2) is singular)");
    }
    return {x * yinv, g};
}

// ---------------------------------------------------------------------------
// Obstructions

struct ObstructionReport {
    GMatrix h;
    /// Im h, antisymmetric.
    QMatrix im_h;
    /// c_jk(A) = sum_r (Re h_jr a_rk - Re h_kr a_rj), antisymmetric.
    QMatrix c;

    [[nodiscard]] bool is_zero() const { return im_h.is_zero() && c.is_zero(); }
};

inline ObstructionReport lagrangian_obstruction(const GMatrix &h, const QMatrix &a)
{
    if (!h.is_square() || !a.is_square() || h.rows() != a.rows()) {
        throw DimensionMismatch("lagrangian_obstruction: h and A must be n x n");
    }
    if (!(h == conj_transpose(h))) {
        throw ContractViolation("lagrangian_obstruction: h is not Hermitian");
    }
    const QMatrix r = real_part(h);
    return {h, imag_part(h), r * a - a.transpose() * r};
}

/// Coefficients of dt_j ^ dt_k in the pullback of i sum h_jk dz_j ^ dz̄_k
/// under t -> t (antisymmetric matrix).
inline QMatrix real_plane_pullback(const GMatrix &h)
{
    return Rational(-2) * imag_part(h);
}

/// Same under t -> (A + i) t.
inline QMatrix graph_plane_pullback(const GMatrix &h, const QMatrix &a)
{
    const QMatrix s = imag_part(h);
    const auto ob = lagrangian_obstruction(h, a);
    return Rational(-2) * (s + a.transpose() * s * a + ob.c);
}

// ---------------------------------------------------------------------------
// Weinstock criterion

struct WeinstockReport {
    bool locally_rc = true;
    /// gcd of Re and Im of charpoly(iy): its real roots y give the
    /// eigenvalues iy on the imaginary axis.
    UPoly imaginary_axis_poly;
    /// Number of distinct y with |y| > 1.
    int offending = 0;
    /// True when +-i is an eigenvalue.
    bool boundary = false;
};

inline WeinstockReport weinstock_report(const QMatrix &a)
{
    const UPoly p = charpoly(a);
    std::vector<Rational> re(p.coeffs().size()), im(p.coeffs().size());
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
        // i^k
        switch (k % 4) {
        case 0:
            re[k] = p.coeff(k);
            break;
        case 1:
            im[k] = p.coeff(k);
            break;
        case 2:
            re[k] = -p.coeff(k);
            break;
        default:
            im[k] = -p.coeff(k);
            break;
        }
    }
    WeinstockReport rep;
    UPoly g = gcd(UPoly(re), UPoly(im));
    rep.imaginary_axis_poly = g;
    if (g.degree() <= 0) {
        return rep;
    }
    g = squarefree_part(g);
    for (int sign : {1, -1}) {
        if (sgn(g.eval(Rational(sign))) == 0) {
            rep.boundary = true;
            g = exact_div(g, UPoly::linear_root(Rational(sign)));
        }
    }
    if (g.degree() > 0) {
        const auto chain = sturm_chain(g);
        rep.offending = sturm_count(chain, Rational(1), std::nullopt) + sturm_count(chain, std::nullopt, Rational(-1));
    }
    rep.locally_rc = rep.offending == 0;
    return rep;
}

inline bool weinstock_check(const QMatrix &a)
{
    return weinstock_report(a).locally_rc;
}

inline bool weinstock_check(const DMatrix &a, double tol = default_tolerance)
{
    const auto spec = eigen(a, tol);
    for (const auto &e : spec.eigenvalues) {
        if (std::abs(e.value.real()) <= tol && std::abs(e.value.imag()) > 1.0 + tol) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Lagrangian capability and witnesses

inline bool lagrangian_capable(const QMatrix &a)
{
    return is_diagonalizable_real(a).diagonalizable;
}

namespace detail
{

/// Basis of {H symmetric : H A = A^T H} over the scalar type of A.
template <typename T>
std::vector<Matrix<T>> symmetrizer_basis(const Matrix<T> &a)
{
    const std::size_t n = a.rows();
    std::vector<std::pair<std::size_t, std::size_t>> unknowns;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            unknowns.emplace_back(i, j);
        }
    }
    auto index = [&](std::size_t i, std::size_t j) {
        if (i > j) {
            std::swap(i, j);
        }
        return static_cast<std::size_t>(std::find(unknowns.begin(), unknowns.end(), std::make_pair(i, j))
                                        - unknowns.begin());
    };
    // (H A - A^T H)_jk = sum_r h_jr a_rk - a_rj h_rk, for j < k
    Matrix<T> sys(n * (n - 1) / 2, unknowns.size());
    std::size_t row = 0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            for (std::size_t r = 0; r < n; ++r) {
                sys(row, index(j, r)) += a(r, k);
                sys(row, index(r, k)) -= a(r, j);
            }
            ++row;
        }
    }
    std::vector<Matrix<T>> basis;
    for (const auto &v : nullspace(sys)) {
        Matrix<T> h(n, n);
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
            h(unknowns[u].first, unknowns[u].second) = v[u];
            h(unknowns[u].second, unknowns[u].first) = v[u];
        }
        basis.push_back(std::move(h));
    }
    return basis;
}

inline bool is_witness(const QMatrix &h, const QMatrix &a)
{
    return h == h.transpose() && is_spd(h) && h * a == a.transpose() * h;
}

/// Float eigenvector matrix of a matrix with real spectrum.
inline Eigen::MatrixXd real_eigenvectors(const QMatrix &a)
{
    Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(to_double(a)), true);
    const Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::MatrixXd q(v.rows(), v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const Eigen::VectorXd re = v.col(j).real(), im = v.col(j).imag();
        q.col(j) = re.norm() >= im.norm() ? re : im;
    }
    return q;
}

/// Witness for a real-diagonalizable A with irrational spectrum: the float
/// matrix Q^{-T} Q^{-1} projected onto the exact solution space of H A = A^T H.
inline std::optional<QMatrix> projected_witness(const QMatrix &a)
{
    const auto basis = symmetrizer_basis(a);
    const Eigen::MatrixXd q = real_eigenvectors(a);
    const Eigen::MatrixXd qi = q.inverse();
    const Eigen::MatrixXd target = qi.transpose() * qi;
    const auto m = static_cast<Eigen::Index>(basis.size());
    const auto nn = static_cast<Eigen::Index>(a.rows() * a.rows());
    Eigen::MatrixXd design(nn, m);
    for (Eigen::Index l = 0; l < m; ++l) {
        const DMatrix b = to_double(basis[static_cast<std::size_t>(l)]);
        for (Eigen::Index k = 0; k < nn; ++k) {
            design(k, l) = b.data()[static_cast<std::size_t>(k)];
        }
    }
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(target.data(), nn);
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    for (long den : {1000L, 1000000L, 1000000000L}) {
        QMatrix h(a.rows(), a.rows());
        for (Eigen::Index l = 0; l < m; ++l) {
            h = h + rational_approximation(coef[l], den) * basis[static_cast<std::size_t>(l)];
        }
        if (is_witness(h, a)) {
            return h;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Real symmetric positive definite H with H A = A^T H.
inline QMatrix witness_matrix(const QMatrix &a)
{
    auto cert = is_diagonalizable_real(a);
    if (!cert.diagonalizable) {
        throw NoWitnessError("A is not diagonalizable over the reals: " + cert.reason, std::move(cert));
    }
    if (cert.exact_eigenvectors) {
        const QMatrix qi = inverse(*cert.exact_eigenvectors);
        QMatrix h = qi.transpose() * qi;
        if (!detail::is_witness(h, a)) {
            throw std::logic_error("witness_form: eigenvector witness failed verification");
        }
        return h;
    }
    if (auto h = detail::projected_witness(a)) {
        return *h;
    }
    throw std::runtime_error("witness_form: could not round a witness onto the exact solution space");
}

inline HermitianForm witness_form(const QMatrix &a)
{
    return {to_gauss(witness_matrix(a))};
}

// ---------------------------------------------------------------------------
// Classification

struct ClassificationReport {
    bool weinstock_rc = false;
    bool lagrangian_capable = false;
    PairClass cls = PairClass::NotLocallyRC;
    std::optional<QMatrix> witness;
    WeinstockReport weinstock;
    DiagonalizabilityCertificate certificate;
};

inline ClassificationReport classify(const QMatrix &a)
{
    if (!a.is_square()) {
        throw DimensionMismatch("classify: A must be square");
    }
    ClassificationReport rep;
    rep.weinstock = weinstock_report(a);
    rep.weinstock_rc = rep.weinstock.locally_rc;
    rep.certificate = is_diagonalizable_real(a);
    rep.lagrangian_capable = rep.certificate.diagonalizable;
    if (rep.lagrangian_capable) {
        rep.witness = witness_matrix(a);
    }
    if (!rep.weinstock_rc) {
        rep.cls = PairClass::NotLocallyRC;
    } else if (rep.lagrangian_capable) {
        rep.cls = PairClass::LagrangianAndRC;
    } else {
        rep.cls = PairClass::RCNotLagrangian;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Changes of frame

/// P A P^{-1}: the real map P sends R^n to R^n and S(A) to S(P A P^{-1}).
inline QMatrix transform_pair(const QMatrix &p, const QMatrix &a)
{
    return p * a * inverse(p);
}

/// The point (A + i) t of S(A).
inline std::vector<GaussRational> graph_point(const QMatrix &a, const std::vector<Rational> &t)
{
    const auto x = a * t;
    std::vector<GaussRational> z;
    for (std::size_t j = 0; j < t.size(); ++j) {
        z.emplace_back(x[j], t[j]);
    }
    return z;
}

/// Membership z in S(A), i.e. Re z = A Im z.
inline bool in_graph_plane(const QMatrix &a, const std::vector<GaussRational> &z)
{
    std::vector<Rational> x, y;
    for (const auto &c : z) {
        x.push_back(c.re);
        y.push_back(c.im);
    }
    return a * y == x;
}

inline std::vector<GaussRational> apply(const GMatrix &g, const std::vector<GaussRational> &z)
{
    return g * z;
}

/// Matrix of the form transported by the complex-linear map z -> G z, so that
/// omega_{H'}(G u, G v) = omega_H(u, v). For real G this is G^{-T} H G^{-1}.
inline GMatrix transport_form(const GMatrix &g, const GMatrix &h)
{
    const GMatrix gi = inverse(g);
    return gi.transpose() * h * conj(gi);
}

/// omega_H(u, v) = -2 Im(u^T H conj(v)) for the form i sum H_jk dz_j ^ dz̄_k.
inline Rational form_value(const GMatrix &h, const std::vector<GaussRational> &u, const std::vector<GaussRational> &v)
{
    std::vector<GaussRational> vb;
    for (const auto &c : v) {
        vb.push_back(c.conj());
    }
    const auto hv = h * vb;
    GaussRational acc;
    for (std::size_t j = 0; j < u.size(); ++j) {
        acc += u[j] * hv[j];
    }
    return -2 * acc.im;
}

// ---------------------------------------------------------------------------
// Forced vanishing for matrices that are not diagonalizable over R
//
// Let u1, u2 span an A-invariant plane with
//   real block:     A u1 = l u1,           A u2 = u1 + l u2       (Jordan chain)
//   complex block:  A u1 = s u1 + u2,      A u2 = -d u1 + s u2    (d > 0)
// and complete them to a frame P. In J = P^{-1} A P the first two columns are
// supported on the first two rows, so for symmetric H the (1,2) entry of
// H J - J^T H equals h11 (real block) or -(d h11 + h22) (complex block). Rescaling u1 by
// sqrt(d) turns the complex block into the rotation block with t = sqrt(d) and
// the relation into h11 + h22 = 0. Either relation rules out H > 0.

struct ForcedVanishing {
    enum class Case { JordanBlock, ComplexPair };
    Case kind = Case::JordanBlock;
    /// "Q" or "Q[a]/(m(a))" with a the relevant real root of m.
    std::string field;
    /// Eigenvalue l (real block) or real part s (complex block), as an element of the field.
    std::string eigenvalue;
    /// d for a complex block (t^2), "1" for a real block.
    std::string weight;
    Matrix<FieldElement> frame;
    Matrix<FieldElement> J;
    /// Dimension of {H symmetric : H J = J^T H}.
    std::size_t solution_dimension = 0;
    /// Every solution satisfies h11 = 0 (Case 1) or d h11 + h22 = 0 (Case 2),
    /// and d > 0 at the chosen real embedding.
    bool verified = false;

    [[nodiscard]] std::string relation() const
    {
        return kind == Case::JordanBlock ? "h11 = 0" : "h11 + h22 = 0";
    }
};

namespace detail
{

inline Matrix<FieldElement> lift(const QMatrix &a)
{
    Matrix<FieldElement> out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = FieldElement(a(i, j));
        }
    }
    return out;
}

/// Completes u1, u2 with standard basis vectors to an invertible frame.
inline Matrix<FieldElement> complete_frame(const std::vector<FieldElement> &u1, const std::vector<FieldElement> &u2)
{
    const std::size_t n = u1.size();
    std::vector<std::vector<FieldElement>> cols{u1, u2};
    for (std::size_t e = 0; e < n && cols.size() < n; ++e) {
        std::vector<FieldElement> v(n, FieldElement(0));
        v[e] = FieldElement(1);
        Matrix<FieldElement> m(n, cols.size() + 1);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            m.set_column(c, cols[c]);
        }
        m.set_column(cols.size(), v);
        if (rank(m) == cols.size() + 1) {
            cols.push_back(v);
        }
    }
    Matrix<FieldElement> p(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        p.set_column(c, cols[c]);
    }
    return p;
}

inline Matrix<FieldElement> polynomial_in(const Matrix<FieldElement> &a, const std::vector<FieldElement> &coeffs)
{
    const std::size_t n = a.rows();
    Matrix<FieldElement> acc(n, n, FieldElement(0));
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * a + *it * Matrix<FieldElement>::identity(n);
    }
    return acc;
}

inline std::optional<ForcedVanishing> finish_forced(ForcedVanishing fv, const Matrix<FieldElement> &a,
                                                    const std::vector<FieldElement> &u1,
                                                    const std::vector<FieldElement> &u2, const FieldElement &lam,
                                                    const FieldElement &d, bool d_positive)
{
    const std::size_t n = a.rows();
    fv.frame = complete_frame(u1, u2);
    fv.J = inverse(fv.frame) * a * fv.frame;
    const auto &j = fv.J;
    bool shape = true;
    for (std::size_t r = 2; r < n; ++r) {
        shape = shape && j(r, 0).is_zero() && j(r, 1).is_zero();
    }
    if (fv.kind == ForcedVanishing::Case::JordanBlock) {
        shape = shape && j(0, 0) == lam && j(1, 0).is_zero() && j(0, 1) == FieldElement(1) && j(1, 1) == lam;
    } else {
        shape = shape && j(0, 0) == lam && j(1, 0) == FieldElement(1) && j(0, 1) == -d && j(1, 1) == lam;
    }
    const auto sols = symmetrizer_basis(j);
    fv.solution_dimension = sols.size();
    bool forced = true;
    for (const auto &h : sols) {
        if (fv.kind == ForcedVanishing::Case::JordanBlock) {
            forced = forced && h(0, 0).is_zero();
        } else {
            forced = forced && (d * h(0, 0) + h(1, 1)).is_zero();
        }
    }
    fv.verified = shape && forced && d_positive;
    return fv;
}

} // namespace detail

/// Exhibits, in an exact real Jordan-type frame, the diagonal relation that
/// every symmetric H with H A = A^T H must satisfy when A is not
/// diagonalizable over R. Returns nullopt when A is diagonalizable or when no
/// exact frame is available (a non-real or defective eigenvalue whose minimal
/// factor is neither linear, quadratic, nor a cubic with one real root).
inline std::optional<ForcedVanishing> forced_vanishing(const QMatrix &a)
{
    const std::size_t n = a.rows();
    if (n < 2) {
        return std::nullopt;
    }
    using Kind = detail::SpectralPiece::Kind;
    const auto pieces = detail::spectral_pieces(a);
    const Matrix<FieldElement> af = detail::lift(a);

    // Case 1: a defective real eigenvalue.
    for (const auto &p : pieces) {
        const int index = *std::max_element(p.exponents.begin(), p.exponents.end());
        if (index < 2) {
            continue;
        }
        FieldElement lam;
        ForcedVanishing fv;
        fv.kind = ForcedVanishing::Case::JordanBlock;
        fv.weight = "1";
        if (p.kind == Kind::Rational) {
            lam = FieldElement(p.root);
            fv.field = "Q";
        } else if (p.kind == Kind::Other && count_real_roots(p.poly) > 0) {
            auto mod = std::make_shared<const UPoly>(p.poly);
            lam = FieldElement::generator(mod);
            fv.field = "Q[a]/(" + p.poly.str("a") + ")";
        } else {
            continue;
        }
        fv.eigenvalue = lam.str();
        try {
            const auto nmat = af - lam * Matrix<FieldElement>::identity(n);
            const auto ker2 = nullspace(nmat * nmat);
            for (const auto &u2 : ker2) {
                const auto u1 = nmat * u2;
                if (std::any_of(u1.begin(), u1.end(), [](const FieldElement &x) { return !x.is_zero(); })) {
                    return detail::finish_forced(fv, af, u1, u2, lam, FieldElement(1), true);
                }
            }
        } catch (const ZeroDivisorError &) {
            // reducible modulus: no field to work in
        }
    }

    // Case 2: a non-real eigenvalue s + i sqrt(d).
    for (const auto &p : pieces) {
        std::vector<FieldElement> q; // monic quadratic factor x^2 + q1 x + q0
        std::optional<RootInterval> embedding;
        ForcedVanishing fv;
        fv.kind = ForcedVanishing::Case::ComplexPair;
        if (p.kind == Kind::GaussPair || (p.kind == Kind::Other && p.poly.degree() == 2 && count_real_roots(p.poly) == 0)) {
            const UPoly m = p.poly.monic();
            q = {FieldElement(m.coeff(0)), FieldElement(m.coeff(1))};
            fv.field = "Q";
        } else if (p.kind == Kind::Other && p.poly.degree() == 3 && count_real_roots(p.poly) == 1) {
            const UPoly m = p.poly.monic();
            auto mod = std::make_shared<const UPoly>(m);
            const FieldElement x = FieldElement::generator(mod);
            // m(y) = (y - x)(y^2 + q1 y + q0)
            const FieldElement q1 = FieldElement(m.coeff(2)) + x;
            const FieldElement q0 = FieldElement(m.coeff(1)) + x * q1;
            q = {q0, q1};
            fv.field = "Q[a]/(" + m.str("a") + ")";
            double real_root = 0;
            for (const auto &z : numeric_roots(m)) {
                if (std::abs(z.imag()) < std::abs(z.real()) + 1.0 && std::abs(z.imag()) <= 1e-7 * (1 + std::abs(z))) {
                    real_root = z.real();
                }
            }
            embedding = isolate_real_root(m, real_root);
        } else {
            continue;
        }
        const FieldElement s = -q[1] / FieldElement(2);
        const FieldElement d = q[0] - s * s;
        const bool d_positive = embedding ? sign_at_root(d, *embedding) > 0 : sgn(d.rational_value()) > 0;
        fv.eigenvalue = s.str();
        fv.weight = d.str();
        try {
            const auto qa = detail::polynomial_in(af, {q[0], q[1], FieldElement(1)});
            const auto ker = nullspace(qa);
            if (ker.empty()) {
                continue;
            }
            const auto &u1 = ker.front();
            const auto u2 = (af - s * Matrix<FieldElement>::identity(n)) * u1;
            return detail::finish_forced(fv, af, u1, u2, s, d, d_positive);
        } catch (const ZeroDivisorError &) {
        }
    }
    return std::nullopt;
}

} // namespace lagimm
