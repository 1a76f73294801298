#pragma once

// Gluing local potentials into a global Kahler form
//     omega = C dd^c phi + sum_j d(chi_j d^c f_j),
//     chi_j(z) = chi(|z - p_j|),
// evaluated pointwise in floating point, with exact pullback certificates
// where everything involved is polynomial.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "forms.hpp"
#include "linalg.hpp"
#include "poly.hpp"

namespace lagimm
{

class CalibrationFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SceneError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// chi(s) = g(eps - s) / (g(eps - s) + g(s - delta)), g(a) = exp(-1/a) for a > 0.
class Cutoff
{
public:
    Cutoff(double delta, double eps) : m_delta(delta), m_eps(eps)
    {
        if (!(0.0 < delta && delta < eps)) {
            throw std::invalid_argument("cutoff radii must satisfy 0 < delta < eps");
        }
    }

    [[nodiscard]] double delta() const { return m_delta; }
    [[nodiscard]] double eps() const { return m_eps; }

    /// (chi(s), chi'(s)) for s >= 0.
    [[nodiscard]] std::pair<double, double> operator()(double s) const
    {
        if (s <= m_delta) {
            return {1.0, 0.0};
        }
        if (s >= m_eps) {
            return {0.0, 0.0};
        }
        const double a = m_eps - s;
        const double b = s - m_delta;
        const double ga = g(a), gb = g(b);
        const double dga = ga / (a * a), dgb = gb / (b * b);
        const double den = ga + gb;
        return {ga / den, (-dga * gb - ga * dgb) / (den * den)};
    }

private:
    static double g(double a) { return a > 0.0 ? std::exp(-1.0 / a) : 0.0; }

    double m_delta;
    double m_eps;
};

inline Cutoff make_cutoff(double delta, double eps)
{
    return {delta, eps};
}

struct ScenePoint {
    std::vector<Rational> center; ///< 2n real coordinates (x, y)
    Poly f;                       ///< local potential in coordinates centred at the point
};

struct GlobalScene {
    std::size_t n = 0;
    Poly phi;
    std::vector<ScenePoint> points;
    Rational delta = Rational(1, 2);
    Rational eps = 1;
    Rational C = 1;
    /// Bounding box [box_lo, box_hi]^{2n} for sampling away from the points.
    Rational box_lo = -2;
    Rational box_hi = 2;

    void validate() const
    {
        if (phi.nvars() != 2 * n) {
            throw SceneError("global potential must be a polynomial in 2n variables");
        }
        if (!(sgn(delta) > 0 && delta < eps)) {
            throw SceneError("radii must satisfy 0 < delta < eps");
        }
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (points[j].center.size() != 2 * n || points[j].f.nvars() != 2 * n) {
                throw SceneError("point " + std::to_string(j + 1) + " does not live in R^{2n}");
            }
            for (std::size_t k = 0; k < j; ++k) {
                Rational d2 = 0;
                for (std::size_t a = 0; a < 2 * n; ++a) {
                    const Rational d = points[j].center[a] - points[k].center[a];
                    d2 += d * d;
                }
                if (d2 < 4 * eps * eps) {
                    throw SceneError("balls of radius eps around points " + std::to_string(k + 1) + " and "
                                     + std::to_string(j + 1) + " overlap");
                }
            }
        }
    }
};

/// Values of omega (or of its pieces) at one point.
struct GluedValue {
    HermitianFormD full; ///< omega
    HermitianFormD epos; ///< C dd^c phi + sum dchi_j ^ d^c f_j
};

class GluedForm
{
public:
    explicit GluedForm(GlobalScene scene) : m_scene(std::move(scene)), m_cutoff(m_scene.delta.get_d(), m_scene.eps.get_d())
    {
        m_scene.validate();
        const std::size_t dim = 2 * m_scene.n;
        m_ddc_phi = ddc(DiffForm::function(m_scene.phi));
        for (const auto &p : m_scene.points) {
            // f_j(z - p_j)
            std::vector<Poly> shift;
            for (std::size_t a = 0; a < dim; ++a) {
                shift.push_back(Poly::variable(dim, a) - Poly::constant(dim, p.center[a]));
            }
            const Poly fg = p.f.substitute(shift);
            const DiffForm f0 = DiffForm::function(fg);
            m_f.push_back(fg);
            m_dc_f.push_back(dc(f0));
            m_ddc_f.push_back(ddc(f0));
            std::vector<double> c;
            for (const auto &x : p.center) {
                c.push_back(x.get_d());
            }
            m_centers.push_back(std::move(c));
        }
    }

    [[nodiscard]] const GlobalScene &scene() const { return m_scene; }
    [[nodiscard]] const Cutoff &cutoff() const { return m_cutoff; }
    [[nodiscard]] const DiffForm &ddc_phi() const { return m_ddc_phi; }
    [[nodiscard]] const std::vector<DiffForm> &dc_f() const { return m_dc_f; }
    [[nodiscard]] const std::vector<Poly> &f_global() const { return m_f; }

    /// Pieces at z: dd^c phi, sum_j dchi_j ^ d^c f_j, sum_j chi_j dd^c f_j, as
    /// dense antisymmetric 2n x 2n coefficient arrays.
    struct Pieces {
        detail::TwoFormValues<double> ddc_phi, cross, plateau;
    };

    [[nodiscard]] Pieces pieces(const std::vector<double> &z) const
    {
        const std::size_t n = m_scene.n;
        const std::size_t dim = 2 * n;
        Pieces out{detail::evaluate_two_form(m_ddc_phi, z), zero_values(), zero_values()};
        for (std::size_t j = 0; j < m_centers.size(); ++j) {
            double rho2 = 0;
            for (std::size_t a = 0; a < dim; ++a) {
                rho2 += (z[a] - m_centers[j][a]) * (z[a] - m_centers[j][a]);
            }
            const double rho = std::sqrt(rho2);
            const auto [chi, dchi] = m_cutoff(rho);
            if (chi == 0.0 && dchi == 0.0) {
                continue;
            }
            if (chi != 0.0) {
                const auto v = detail::evaluate_two_form(m_ddc_f[j], z);
                for (std::size_t k = 0; k < v.w.size(); ++k) {
                    out.plateau.w[k] += chi * v.w[k];
                }
            }
            if (dchi != 0.0) {
                std::vector<double> alpha(dim);
                for (std::size_t a = 0; a < dim; ++a) {
                    alpha[a] = m_dc_f[j].coeff(a).eval(z);
                }
                for (std::size_t a = 0; a < dim; ++a) {
                    const double ga = dchi * (z[a] - m_centers[j][a]) / rho;
                    for (std::size_t b = 0; b < dim; ++b) {
                        const double gb = dchi * (z[b] - m_centers[j][b]) / rho;
                        out.cross(a, b) += ga * alpha[b] - gb * alpha[a];
                    }
                }
            }
        }
        return out;
    }

    [[nodiscard]] GluedValue evaluate(const std::vector<double> &z, std::optional<double> c = std::nullopt) const
    {
        const double cc = c.value_or(m_scene.C.get_d());
        const Pieces p = pieces(z);
        auto full = zero_values();
        auto epos = zero_values();
        for (std::size_t k = 0; k < full.w.size(); ++k) {
            epos.w[k] = cc * p.ddc_phi.w[k] + p.cross.w[k];
            full.w[k] = epos.w[k] + p.plateau.w[k];
        }
        return {detail::hermitian_from_values(full, 0.0, true), detail::hermitian_from_values(epos, 0.0, true)};
    }

private:
    [[nodiscard]] detail::TwoFormValues<double> zero_values() const
    {
        return {m_scene.n, std::vector<double>(4 * m_scene.n * m_scene.n, 0.0)};
    }

    GlobalScene m_scene;
    Cutoff m_cutoff;
    DiffForm m_ddc_phi;
    std::vector<Poly> m_f;
    std::vector<DiffForm> m_dc_f;
    std::vector<DiffForm> m_ddc_f;
    std::vector<std::vector<double>> m_centers;
};

inline GluedForm assemble(const GlobalScene &scene)
{
    return GluedForm(scene);
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail
{

/// All points of the axis-aligned cube [lo, hi]^dim with `grid` points per axis.
template <typename F>
void for_each_grid_point(std::size_t dim, const std::vector<double> &lo, const std::vector<double> &hi, int grid,
                         F &&fn)
{
    std::vector<int> idx(dim, 0);
    std::vector<double> z(dim);
    while (true) {
        for (std::size_t a = 0; a < dim; ++a) {
            z[a] = grid < 2 ? 0.5 * (lo[a] + hi[a]) : lo[a] + (hi[a] - lo[a]) * idx[a] / (grid - 1);
        }
        fn(z);
        std::size_t a = 0;
        while (a < dim && ++idx[a] >= std::max(grid, 1)) {
            idx[a] = 0;
            ++a;
        }
        if (a == dim) {
            return;
        }
    }
}

inline double distance(const std::vector<double> &z, const std::vector<Rational> &p)
{
    double s = 0;
    for (std::size_t a = 0; a < z.size(); ++a) {
        const double d = z[a] - p[a].get_d();
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace detail

/// Sample points for the positivity check: annuli delta/2 <= |z - p_j| <= eps
/// (sampled on the cube around p_j) and the bounding box minus the delta/2 balls.
inline std::vector<std::vector<double>> calibration_samples(const GlobalScene &scene, int grid)
{
    const std::size_t dim = 2 * scene.n;
    const double half_delta = scene.delta.get_d() / 2;
    const double eps = scene.eps.get_d();
    std::vector<std::vector<double>> pts;
    for (const auto &p : scene.points) {
        std::vector<double> lo(dim), hi(dim);
        for (std::size_t a = 0; a < dim; ++a) {
            lo[a] = p.center[a].get_d() - eps;
            hi[a] = p.center[a].get_d() + eps;
        }
        detail::for_each_grid_point(dim, lo, hi, grid, [&](const std::vector<double> &z) {
            const double r = detail::distance(z, p.center);
            if (r >= half_delta && r <= eps) {
                pts.push_back(z);
            }
        });
    }
    const std::vector<double> lo(dim, scene.box_lo.get_d()), hi(dim, scene.box_hi.get_d());
    detail::for_each_grid_point(dim, lo, hi, grid, [&](const std::vector<double> &z) {
        for (const auto &p : scene.points) {
            if (detail::distance(z, p.center) < half_delta) {
                return;
            }
        }
        pts.push_back(z);
    });
    return pts;
}

struct Calibration {
    Rational C;
    int exponent = 0;
    std::size_t samples = 0;
};

/// Smallest C = 2^k, 0 <= k <= 64, making C dd^c phi + sum dchi_j ^ d^c f_j
/// positive definite at every calibration sample.
inline Calibration calibrate_C(const GlobalScene &scene, int grid = 11, double tol = default_tolerance)
{
    const GluedForm glued(scene);
    const auto pts = calibration_samples(scene, grid);
    std::vector<GluedForm::Pieces> pieces;
    pieces.reserve(pts.size());
    for (const auto &z : pts) {
        pieces.push_back(glued.pieces(z));
    }
    for (int k = 0; k <= 64; ++k) {
        const double c = std::ldexp(1.0, k);
        bool ok = true;
        for (const auto &p : pieces) {
            detail::TwoFormValues<double> v{scene.n, p.ddc_phi.w};
            for (std::size_t i = 0; i < v.w.size(); ++i) {
                v.w[i] = c * p.ddc_phi.w[i] + p.cross.w[i];
            }
            if (!is_spd(detail::hermitian_from_values(v, 0.0, true).H, tol)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            mpz_class two_k;
            mpz_ui_pow_ui(two_k.get_mpz_t(), 2, static_cast<unsigned long>(k));
            return {Rational(two_k), k, pts.size()};
        }
    }
    throw CalibrationFailure("no C <= 2^64 makes C dd^c phi + sum dchi ^ d^c f positive on the samples; "
                             "the global potential is probably not strictly plurisubharmonic there");
}

// ---------------------------------------------------------------------------
// Certification

struct BranchPullback {
    std::string name;
    /// All polynomial ingredients pull back to zero, so the pullback of omega
    /// vanishes identically.
    bool exact_zero = false;
    /// Largest |coefficient| of the pulled-back omega over the parameter grid
    /// (0 when exact_zero).
    double max_residual = 0.0;
};

struct CertifyReport {
    std::size_t samples = 0;
    std::size_t positive = 0;
    /// Largest (2,0)+(0,2) component seen; omega is assessed on its (1,1) part.
    double max_non_11 = 0.0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    /// Grid points where omega is not positive definite.
    std::vector<std::vector<double>> failures;
    std::vector<BranchPullback> branches;

    [[nodiscard]] bool positive_everywhere() const { return positive == samples; }
    [[nodiscard]] bool ok() const
    {
        if (!positive_everywhere()) {
            return false;
        }
        for (const auto &b : branches) {
            if (!b.exact_zero && b.max_residual > 0.0) {
                return false;
            }
        }
        return true;
    }
};

struct BranchMap {
    std::string name;
    std::vector<Poly> map; ///< 2n polynomials in n parameters
};

inline BranchPullback pullback_residual(const GluedForm &glued, const BranchMap &branch, int grid)
{
    const auto &scene = glued.scene();
    const std::size_t n = scene.n;
    const std::size_t dim = 2 * n;
    BranchPullback out{branch.name, false, 0.0};
    const DiffForm phi_pb = pullback(glued.ddc_phi(), branch.map);
    std::vector<DiffForm> dcf_pb, ddcf_pb;
    bool all_zero = phi_pb.is_zero();
    for (const auto &w : glued.dc_f()) {
        dcf_pb.push_back(pullback(w, branch.map));
        ddcf_pb.push_back(exterior_d(dcf_pb.back()));
        all_zero = all_zero && dcf_pb.back().is_zero();
    }
    if (all_zero) {
        out.exact_zero = true;
        return out;
    }
    // Float evaluation of C i*dd^c phi + sum i*dchi ^ i*d^c f + chi d(i*d^c f).
    const double c = scene.C.get_d();
    const std::vector<double> lo(n, scene.box_lo.get_d()), hi(n, scene.box_hi.get_d());
    detail::for_each_grid_point(n, lo, hi, grid, [&](const std::vector<double> &t) {
        std::vector<double> z(dim);
        for (std::size_t a = 0; a < dim; ++a) {
            z[a] = branch.map[a].eval(t);
        }
        std::vector<double> w(n * n, 0.0);
        auto add2 = [&](const DiffForm &f2, double s) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = i + 1; k < n; ++k) {
                    w[i * n + k] += s * f2.coeff(i, k).eval(t);
                }
            }
        };
        add2(phi_pb, c);
        for (std::size_t j = 0; j < dcf_pb.size(); ++j) {
            const double rho = detail::distance(z, scene.points[j].center);
            const auto [chi, dchi] = glued.cutoff()(rho);
            if (chi != 0.0) {
                add2(ddcf_pb[j], chi);
            }
            if (dchi != 0.0) {
                // pulled-back dchi_j = chi'(rho) sum_a (z_a - p_a)/rho d(map_a)
                std::vector<double> g(n, 0.0), a1(n, 0.0);
                for (std::size_t a = 0; a < dim; ++a) {
                    const double da = (z[a] - scene.points[j].center[a].get_d()) / rho;
                    for (std::size_t i = 0; i < n; ++i) {
                        g[i] += dchi * da * branch.map[a].derivative(i).eval(t);
                    }
                }
                for (std::size_t i = 0; i < n; ++i) {
                    a1[i] = dcf_pb[j].coeff(i).eval(t);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t k = i + 1; k < n; ++k) {
                        w[i * n + k] += g[i] * a1[k] - g[k] * a1[i];
                    }
                }
            }
        }
        for (double x : w) {
            out.max_residual = std::max(out.max_residual, std::abs(x));
        }
    });
    return out;
}

/// Positivity of omega on the bounding-box grid and pullbacks along branches.
inline CertifyReport certify(const GluedForm &glued, const std::vector<BranchMap> &branches, int grid = 11,
                             double tol = default_tolerance)
{
    const auto &scene = glued.scene();
    const std::size_t dim = 2 * scene.n;
    CertifyReport rep;
    const std::vector<double> lo(dim, scene.box_lo.get_d()), hi(dim, scene.box_hi.get_d());
    detail::for_each_grid_point(dim, lo, hi, grid, [&](const std::vector<double> &z) {
        const auto v = glued.evaluate(z);
        ++rep.samples;
        rep.max_non_11 = std::max(rep.max_non_11, v.full.non_11_residual);
        Eigen::MatrixXcd h(static_cast<Eigen::Index>(scene.n), static_cast<Eigen::Index>(scene.n));
        for (std::size_t i = 0; i < scene.n; ++i) {
            for (std::size_t k = 0; k < scene.n; ++k) {
                h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v.full.H(i, k);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
        if (is_spd(v.full.H, tol)) {
            ++rep.positive;
        } else {
            rep.failures.push_back(z);
        }
    });
    for (const auto &b : branches) {
        rep.branches.push_back(pullback_residual(glued, b, grid));
    }
    return rep;
}

/// Branch maps of the pair (R^n, S(A)) through the origin.
inline std::vector<BranchMap> plane_pair_branches(const QMatrix &a)
{
    return {{"real", real_plane_parametrization(a.rows())}, {"graph", graph_plane_parametrization(a)}};
}

} // namespace lagimm
