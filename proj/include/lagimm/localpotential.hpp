#pragma once

// Local Kahler potential at a diagonalizable double point. The two branches
// are the graphs  t -> (t, phi(t))  and  t -> (A t + psi(t), t)  with A
// diagonal; the potential is f = |x|^2 + |y|^2 + r with d^c f vanishing on
// both branches to the order of the input jets.
//
// Coordinates: (x, y) on C^n = R^{2n}; (u, v) are the straightened
// coordinates with Theta(u, v) = (u + A v + psi(v), v - (A + Dpsi(v)) u).

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "forms.hpp"
#include "jets.hpp"
#include "linalg.hpp"

namespace lagimm
{

struct BranchData {
    std::size_t n = 0;
    std::vector<Rational> lambda;
    JetMap phi;
    JetMap psi;
    int order = default_jet_order;

    [[nodiscard]] QMatrix A() const { return QMatrix::diagonal(lambda); }

    /// Throws ContractViolation unless phi, psi : R^n -> R^n vanish to second order.
    void validate() const
    {
        if (lambda.size() != n) {
            throw ContractViolation("branch data: lambda must have n entries");
        }
        if (order < 2) {
            throw ContractViolation("branch data: order must be at least 2");
        }
        for (const auto *m : {&phi, &psi}) {
            const char *name = m == &phi ? "phi" : "psi";
            if (m->size() != n || m->source_dim() != n) {
                throw ContractViolation(std::string("branch data: ") + name + " must map R^n to R^n");
            }
            for (const auto &c : m->components()) {
                if (!c.poly().is_zero() && c.poly().valuation() < 2) {
                    throw ContractViolation(std::string("branch data: ") + name
                                            + " must vanish with its first derivatives at 0");
                }
            }
        }
    }

    /// Straight branches R^n and S(A).
    static BranchData flat(std::vector<Rational> lambda, int order = default_jet_order)
    {
        BranchData b;
        b.n = lambda.size();
        b.lambda = std::move(lambda);
        b.order = order;
        std::vector<Jet> zero(b.n, Jet(b.n, order));
        b.phi = JetMap(zero);
        b.psi = JetMap(zero);
        return b;
    }
};

/// Intermediate objects of the construction. Row vectors are 1 x n matrices.
struct PotentialScaffold {
    int order = 0;
    JetMatrix p, q;        ///< rows on R^n
    JetMap theta, xi;      ///< (u,v) -> (x,y) and its inverse
    JetMap sigma;          ///< R^n -> R^n, Theta({v = sigma(u)}) is the first branch
    JetMatrix b, c;        ///< n x n on (u,v)
    JetMatrix B, C;        ///< n x n on u
    JetMatrix P, Q;        ///< rows; P on u, Q on v
    JetMatrix beta, gamma; ///< row, n x n
    JetMatrix alpha;       ///< row on u
    Jet rtilde;            ///< on (u,v)
};

struct LocalVerification {
    int degree = 0;                ///< claims hold through this total degree
    bool npde1 = false;            ///< grad_u r~ B + grad_v r~ C = P along v = sigma(u)
    bool npde2 = false;            ///< grad_u r~ (0, v) = Q(v)
    bool gradient_zero = false;    ///< grad r~(0) = 0
    bool hessian_zero = false;     ///< Hess r~(0) = 0
    bool alpha_vanishes = false;   ///< alpha(0) = 0 and D alpha(0) = 0
    bool leading_minus_identity = false; ///< C(0) - Dsigma(0) B(0) = -I
    bool pullback_first = false;   ///< d^c f along t -> (t, phi(t))
    bool pullback_second = false;  ///< d^c f along t -> (A t + psi(t), t)
    bool origin_is_2I = false;     ///< hermitian_at(dd^c f, 0) = 2 I
    std::size_t samples = 0;
    std::size_t positive_samples = 0;
    Rational sampled_radius;
    /// sampled_radius / 2^m for the least m such that every sample inside is positive.
    Rational certified_radius;

    [[nodiscard]] bool ok() const
    {
        return npde1 && npde2 && gradient_zero && hessian_zero && alpha_vanishes && leading_minus_identity
               && pullback_first && pullback_second && origin_is_2I && positive_samples == samples;
    }
};

struct LocalPotential {
    std::size_t n = 0;
    Jet f; ///< on (x,y)
    Jet r; ///< r~ o Xi
    PotentialScaffold scaffold;
};

namespace detail
{

inline std::vector<std::size_t> block_map(std::size_t n, std::size_t offset)
{
    std::vector<std::size_t> m(n);
    for (std::size_t j = 0; j < n; ++j) {
        m[j] = offset + j;
    }
    return m;
}

inline JetMap embed_map(const JetMap &f, std::size_t nvars, std::size_t offset)
{
    std::vector<Jet> c;
    for (const auto &x : f.components()) {
        c.push_back(x.embed(nvars, block_map(f.source_dim(), offset)));
    }
    return JetMap(std::move(c));
}

inline JetMatrix embed_matrix(const JetMatrix &m, std::size_t nvars, std::size_t offset)
{
    JetMatrix out(m.rows(), m.cols(), nvars, 0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = m(i, j).embed(nvars, block_map(m.nvars(), offset));
        }
    }
    return out;
}

/// Components [first, first + count) of a map.
inline JetMap slice(const JetMap &f, std::size_t first, std::size_t count)
{
    return JetMap(std::vector<Jet>(f.components().begin() + static_cast<long>(first),
                                   f.components().begin() + static_cast<long>(first + count)));
}

inline JetMap concat(const JetMap &a, const JetMap &b)
{
    std::vector<Jet> c = a.components();
    c.insert(c.end(), b.components().begin(), b.components().end());
    return JetMap(std::move(c));
}

/// u -> (u, s(u))
inline JetMap graph_of(const JetMap &s, int order)
{
    return concat(JetMap::identity(s.source_dim(), order), s);
}

/// v -> (0, v)
inline JetMap zero_then_identity(std::size_t n, int order)
{
    std::vector<Jet> c(n, Jet(n, order));
    for (std::size_t j = 0; j < n; ++j) {
        c.push_back(Jet::variable(n, order, j));
    }
    return JetMap(std::move(c));
}

inline JetMatrix row_of(const JetMap &f)
{
    return JetMatrix::row(f);
}

/// The x-part u + A v + psi(v) of Theta, on (u,v).
inline JetMap theta_x(const BranchData &br)
{
    const std::size_t n = br.n;
    const int k = br.order;
    const JetMap psi_v = embed_map(br.psi, 2 * n, n);
    std::vector<Jet> x;
    for (std::size_t j = 0; j < n; ++j) {
        x.push_back(Jet::variable(2 * n, k, j) + br.lambda[j] * Jet::variable(2 * n, k, n + j) + psi_v[j]);
    }
    return JetMap(std::move(x));
}

} // namespace detail

/// Rows p(t) = 2 phi(t)^T - 2 t^T Dphi(t) and q(t) = 2 t^T Dpsi(t) - 2 psi(t)^T.
inline std::pair<JetMatrix, JetMatrix> pq_from_branches(const BranchData &br)
{
    br.validate();
    const std::size_t n = br.n;
    const int k = br.order;
    const JetMatrix t = JetMatrix::row(JetMap::identity(n, k));
    const JetMatrix p = Rational(2) * detail::row_of(br.phi) - Rational(2) * (t * jacobian(br.phi));
    const JetMatrix q = Rational(2) * (t * jacobian(br.psi)) - Rational(2) * detail::row_of(br.psi);
    return {p, q};
}

inline JetMap build_theta(const BranchData &br)
{
    br.validate();
    const std::size_t n = br.n;
    const int k = br.order;
    const JetMatrix dpsi_v = detail::embed_matrix(jacobian(br.psi), 2 * n, n);
    const JetMatrix u = JetMatrix::column(detail::slice(JetMap::identity(2 * n, k), 0, n));
    const JetMatrix dpsi_u = dpsi_v * u;
    std::vector<Jet> y;
    for (std::size_t j = 0; j < n; ++j) {
        y.push_back(Jet::variable(2 * n, k, n + j) - br.lambda[j] * Jet::variable(2 * n, k, j) - dpsi_u(j, 0));
    }
    return detail::concat(detail::theta_x(br), JetMap(std::move(y)));
}

/// Xi = Theta^{-1} and sigma with Theta({v = sigma(u)}) equal to the first branch.
inline std::pair<JetMap, JetMap> straighten(const BranchData &br, const JetMap &theta)
{
    const std::size_t n = br.n;
    const int k = br.order;
    const JetMap xi = invert_map(theta, k);
    // F(u, v) = y(u, v) - phi(x(u, v))
    const JetMap phi_x = br.phi.compose(detail::theta_x(br));
    const JetMap f = detail::slice(theta, n, n) - phi_x;
    const JetMap sigma = implicit_solve(f, n, k);
    return {xi, sigma};
}

/// b = (D_x u Dphi(x) - D_y u) o Theta and c = (D_x v Dphi(x) - D_y v) o Theta.
inline std::pair<JetMatrix, JetMatrix> frame_fields(const BranchData &br, const JetMap &theta, const JetMap &xi)
{
    const std::size_t n = br.n;
    const JetMatrix dxi = jacobian(xi);
    JetMatrix dxu(n, n, 2 * n, 0), dyu(n, n, 2 * n, 0), dxv(n, n, 2 * n, 0), dyv(n, n, 2 * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dxu(i, j) = dxi(i, j);
            dyu(i, j) = dxi(i, n + j);
            dxv(i, j) = dxi(n + i, j);
            dyv(i, j) = dxi(n + i, n + j);
        }
    }
    const JetMatrix dphi_x = detail::embed_matrix(jacobian(br.phi), 2 * n, 0);
    const JetMatrix b = dxu * dphi_x - dyu;
    const JetMatrix c = dxv * dphi_x - dyv;
    return {b.compose(theta), c.compose(theta)};
}

/// B(u) = b(u, sigma(u)), C(u) = c(u, sigma(u)), P(u) = p(x(u, sigma(u))), Q = q.
struct Restricted {
    JetMatrix B, C, P, Q;
};

inline Restricted restrict_along_sigma(const BranchData &br, const JetMatrix &b, const JetMatrix &c,
                                       const JetMatrix &p, const JetMatrix &q, const JetMap &sigma)
{
    const JetMap g = detail::graph_of(sigma, br.order);
    const JetMap x_on_graph = detail::theta_x(br).compose(g);
    return {b.compose(g), c.compose(g), p.compose(x_on_graph), q};
}

struct AlphaParts {
    JetMatrix alpha, beta, gamma;
};

/// alpha = (P - Q(sigma) B - u^T DQ(sigma) C) (C - Dsigma B)^{-1}.
inline AlphaParts build_alpha(const Restricted &rs, const JetMap &sigma)
{
    const std::size_t n = sigma.size();
    const int k = sigma.order();
    const JetMatrix u = JetMatrix::row(JetMap::identity(n, k));
    const JetMatrix q_sigma = rs.Q.compose(sigma);
    const JetMatrix dq_sigma = jacobian(rs.Q.as_map()).compose(sigma);
    const JetMatrix beta = rs.P - q_sigma * rs.B - u * dq_sigma * rs.C;
    const JetMatrix lead = rs.C - jacobian(sigma) * rs.B;
    JetMatrix gamma;
    try {
        gamma = matrix_jet_inverse(lead);
    } catch (const SingularMatrixError &) {
        std::ostringstream os;
        os << "C(0) - Dsigma(0) B(0) is singular: " << lead.constant_part();
        throw ContractViolation(os.str());
    }
    return {beta * gamma, beta, gamma};
}

/// r~(u, v) = Q(v) u + alpha(u) (v - sigma(u)).
inline Jet build_rtilde(const JetMatrix &Q, const JetMatrix &alpha, const JetMap &sigma)
{
    const std::size_t n = sigma.size();
    const int k = sigma.order();
    const JetMap id = JetMap::identity(2 * n, k);
    const JetMatrix u = JetMatrix::column(detail::slice(id, 0, n));
    const JetMatrix v = JetMatrix::column(detail::slice(id, n, n));
    const JetMatrix q_v = detail::embed_matrix(Q, 2 * n, n);
    const JetMatrix alpha_u = detail::embed_matrix(alpha, 2 * n, 0);
    const JetMatrix sigma_u = JetMatrix::column(detail::embed_map(sigma, 2 * n, 0));
    return (q_v * u + alpha_u * (v - sigma_u))(0, 0);
}

inline LocalPotential assemble_f(const BranchData &br)
{
    br.validate();
    const std::size_t n = br.n;
    const int k = br.order;
    LocalPotential lp;
    lp.n = n;
    auto &s = lp.scaffold;
    s.order = k;
    std::tie(s.p, s.q) = pq_from_branches(br);
    s.theta = build_theta(br);
    std::tie(s.xi, s.sigma) = straighten(br, s.theta);
    std::tie(s.b, s.c) = frame_fields(br, s.theta, s.xi);
    const Restricted rs = restrict_along_sigma(br, s.b, s.c, s.p, s.q, s.sigma);
    s.B = rs.B;
    s.C = rs.C;
    s.P = rs.P;
    s.Q = rs.Q;
    const AlphaParts ap = build_alpha(rs, s.sigma);
    s.alpha = ap.alpha;
    s.beta = ap.beta;
    s.gamma = ap.gamma;
    s.rtilde = build_rtilde(s.Q, s.alpha, s.sigma);
    lp.r = s.rtilde.compose(s.xi.components());
    Poly quad(2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j) {
        quad += Poly::variable(2 * n, j) * Poly::variable(2 * n, j);
    }
    lp.f = Jet(quad, k) + lp.r;
    return lp;
}

// ---------------------------------------------------------------------------
// Verification

/// Parametrisations t -> (t, phi(t)) and t -> (A t + psi(t), t) as polynomials.
inline std::vector<Poly> first_branch_map(const BranchData &br)
{
    std::vector<Poly> m;
    for (std::size_t j = 0; j < br.n; ++j) {
        m.push_back(Poly::variable(br.n, j));
    }
    for (const auto &c : br.phi.components()) {
        m.push_back(c.poly());
    }
    return m;
}

inline std::vector<Poly> second_branch_map(const BranchData &br)
{
    std::vector<Poly> m;
    for (std::size_t j = 0; j < br.n; ++j) {
        m.push_back(Poly::variable(br.n, j, br.lambda[j]) + br.psi[j].poly());
    }
    for (std::size_t j = 0; j < br.n; ++j) {
        m.push_back(Poly::variable(br.n, j));
    }
    return m;
}

/// Grid points of [-radius, radius]^{2n} with `grid` points per axis that lie
/// in the closed ball of that radius.
inline std::vector<std::vector<Rational>> ball_grid(std::size_t dim, const Rational &radius, int grid)
{
    std::vector<std::vector<Rational>> pts;
    if (grid < 2) {
        pts.emplace_back(dim, Rational(0));
        return pts;
    }
    const Rational step = 2 * radius / (grid - 1);
    const Rational r2 = radius * radius;
    std::vector<int> idx(dim, 0);
    while (true) {
        std::vector<Rational> p(dim);
        Rational norm2 = 0;
        for (std::size_t a = 0; a < dim; ++a) {
            p[a] = -radius + step * idx[a];
            norm2 += p[a] * p[a];
        }
        if (norm2 <= r2) {
            pts.push_back(std::move(p));
        }
        std::size_t a = 0;
        while (a < dim && ++idx[a] == grid) {
            idx[a] = 0;
            ++a;
        }
        if (a == dim) {
            break;
        }
    }
    return pts;
}

inline LocalVerification verify_local(const LocalPotential &lp, const BranchData &br,
                                      const Rational &radius = Rational(1, 8), int grid = 11)
{
    const std::size_t n = lp.n;
    const int k = br.order;
    const auto &s = lp.scaffold;
    LocalVerification rep;
    rep.degree = k - 1;
    rep.sampled_radius = radius;

    // Normalised PDEs for r~.
    const JetMatrix grad = gradient(s.rtilde);
    JetMatrix grad_u(1, n, 2 * n, 0), grad_v(1, n, 2 * n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        grad_u(0, j) = grad(0, j);
        grad_v(0, j) = grad(0, n + j);
    }
    const JetMap g = detail::graph_of(s.sigma, k);
    const JetMatrix npde1 = grad_u.compose(g) * s.B + grad_v.compose(g) * s.C - s.P;
    rep.npde1 = npde1.vanishes_through(k - 1);
    const JetMatrix npde2 = grad_u.compose(detail::zero_then_identity(n, k)) - s.Q;
    rep.npde2 = npde2.vanishes_through(k - 1);
    rep.gradient_zero = s.rtilde.vanishes_through(1);
    rep.hessian_zero = s.rtilde.vanishes_through(2);
    rep.alpha_vanishes = s.alpha.vanishes_through(1);
    const QMatrix lead = s.C.constant_part() - jacobian(s.sigma).constant_part() * s.B.constant_part();
    rep.leading_minus_identity = lead == Rational(-1) * QMatrix::identity(n);

    // Pullbacks of d^c f.
    const DiffForm dcf = dc(DiffForm::function(lp.f.poly()));
    rep.pullback_first = pullback(dcf, first_branch_map(br)).vanishes_through(k - 1);
    rep.pullback_second = pullback(dcf, second_branch_map(br)).vanishes_through(k - 1);

    // Positivity of dd^c f.
    const DiffForm w = ddc(DiffForm::function(lp.f.poly()));
    const auto h0 = hermitian_at(w, std::vector<Rational>(2 * n, Rational(0)));
    rep.origin_is_2I = h0.H == to_gauss(Rational(2) * QMatrix::identity(n));
    rep.certified_radius = radius;
    for (const auto &pt : ball_grid(2 * n, radius, grid)) {
        ++rep.samples;
        if (is_positive(w, pt)) {
            ++rep.positive_samples;
        } else {
            Rational norm2 = 0;
            for (const auto &c : pt) {
                norm2 += c * c;
            }
            // keep the largest radius r with all samples of norm <= r positive
            while (rep.certified_radius * rep.certified_radius >= norm2 && sgn(rep.certified_radius) > 0) {
                rep.certified_radius /= 2;
            }
        }
    }
    return rep;
}

} // namespace lagimm
