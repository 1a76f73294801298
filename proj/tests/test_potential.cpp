#include <gtest/gtest.h>

#include <cmath>

#include "lagimm/io.hpp"
#include "lagimm/random.hpp"
#include "oracles.hpp"

using namespace lagimm;

namespace
{

Poly squared_norm(std::size_t dim, std::size_t first = 0, std::size_t count = 0)
{
    Poly f(dim);
    const std::size_t last = count == 0 ? dim : first + count;
    for (std::size_t a = first; a < last; ++a) {
        f += Poly::variable(dim, a) * Poly::variable(dim, a);
    }
    return f;
}

bool vanishes_through(const Poly &p, int d)
{
    return p.is_zero() || p.valuation() > d;
}

/// Coefficient of dt_i in the pullback of d^c f along t -> (x(t), y(t)):
/// sum_j f_{x_j}(x, y) dy_j/dt_i - f_{y_j}(x, y) dx_j/dt_i.
std::vector<Poly> dc_pullback_oracle(const Poly &f, const std::vector<Poly> &map, std::size_t n)
{
    const std::size_t m = map.front().nvars();
    std::vector<Poly> out(m, Poly(m));
    for (std::size_t j = 0; j < n; ++j) {
        const Poly fx = f.derivative(j).substitute(map);
        const Poly fy = f.derivative(n + j).substitute(map);
        for (std::size_t i = 0; i < m; ++i) {
            out[i] += fx * map[n + j].derivative(i) - fy * map[j].derivative(i);
        }
    }
    return out;
}

Poly row_entry(const JetMatrix &m, std::size_t j) { return m(0, j).poly(); }

} // namespace

// ---------------------------------------------------------------------------
// Local potentials

TEST(LocalPotentialTest, FlatCaseAtSeveralOrders)
{
    for (int k = 2; k <= 6; ++k) {
        for (std::size_t n : {1u, 2u}) {
            std::vector<Rational> lam;
            for (std::size_t j = 0; j < n; ++j) {
                lam.emplace_back(static_cast<long>(j + 1));
            }
            const BranchData br = BranchData::flat(lam, k);
            const auto lp = assemble_f(br);
            EXPECT_TRUE(lp.scaffold.rtilde.poly().is_zero());
            EXPECT_EQ(lp.f.poly(), squared_norm(2 * n));
            const auto v = verify_local(lp, br, Rational(1, 8), 5);
            EXPECT_TRUE(v.ok()) << "order " << k;
            EXPECT_TRUE(v.origin_is_2I);
        }
    }
}

TEST(LocalPotentialTest, CurvedPullbacksAgainstDirectOracle)
{
    Sampler rng(7);
    for (int t = 0; t < 6; ++t) {
        const std::size_t n = t % 2 == 0 ? 1 : 2;
        const BranchData br = rng.branch(n, 4, 1, 4, 2);
        const auto lp = assemble_f(br);
        for (const auto &map : {first_branch_map(br), second_branch_map(br)}) {
            for (const auto &c : dc_pullback_oracle(lp.f.poly(), map, n)) {
                EXPECT_TRUE(vanishes_through(c, br.order - 1)) << c.str();
            }
        }
    }
}

TEST(LocalPotentialTest, HandComputedOneDimensionalCase)
{
    // n = 1, lambda = 0, phi = t^2, psi = 0: the first branch is y = x^2 and the
    // second is x = 0. On (R, S(0)) coordinates Theta = id, so sigma(u) = u^2.
    BranchData br = BranchData::flat({Rational(0)}, 4);
    br.phi = JetMap({Jet(Poly::monomial({2}), 4)});
    const auto lp = assemble_f(br);
    EXPECT_EQ(lp.scaffold.sigma[0].poly(), Poly::monomial({2}));
    // d^c f vanishes on x = 0 (f_x(0, y) = 0) and on y = x^2 (f_x * 2x - f_y = 0)
    const Poly fx = lp.f.poly().derivative(0), fy = lp.f.poly().derivative(1);
    const Poly on_axis = fx.substitute({Poly(1), Poly::variable(1, 0)});
    EXPECT_TRUE(vanishes_through(on_axis, 3));
    const std::vector<Poly> parab{Poly::variable(1, 0), Poly::monomial({2})};
    EXPECT_TRUE(vanishes_through(fx.substitute(parab) * Poly::variable(1, 0, 2) - fy.substitute(parab), 3));
}

TEST(LocalPotentialTest, RtildeDerivativeFormulas)
{
    Sampler rng(9);
    for (int t = 0; t < 4; ++t) {
        const std::size_t n = t % 2 == 0 ? 1 : 2;
        const BranchData br = rng.branch(n, 4, 1, 4, 2);
        const auto lp = assemble_f(br);
        const auto &s = lp.scaffold;
        const int k = br.order;
        const std::size_t dim = 2 * n;
        const Poly r = s.rtilde.poly();
        // coordinates (u, v) of the 2n-dimensional ring; sigma, alpha live on u
        std::vector<Poly> u_of, v_of;
        for (std::size_t j = 0; j < n; ++j) {
            u_of.push_back(Poly::variable(dim, j));
            v_of.push_back(Poly::variable(dim, n + j));
        }
        auto on_u = [&](const Poly &p) { return p.substitute(u_of); };
        auto on_v = [&](const Poly &p) { return p.substitute(v_of); };
        // (1) grad_u r = Q(v) + sum_k (v_k - sigma_k) dalpha_k/du - sum_k alpha_k dsigma_k/du
        // (2) grad_v r = u^T DQ(v) + alpha(u)
        for (std::size_t i = 0; i < n; ++i) {
            Poly g1 = on_v(row_entry(s.Q, i));
            Poly g2 = on_u(row_entry(s.alpha, i));
            for (std::size_t c = 0; c < n; ++c) {
                const Poly vk = v_of[c] - on_u(s.sigma[c].poly());
                g1 += vk * on_u(row_entry(s.alpha, c).derivative(i))
                      - on_u(row_entry(s.alpha, c)) * on_u(s.sigma[c].poly().derivative(i));
                g2 += u_of[c] * on_v(row_entry(s.Q, c).derivative(i));
            }
            EXPECT_TRUE(vanishes_through((r.derivative(i) - g1).truncated(k - 1), k - 1));
            EXPECT_TRUE(vanishes_through((r.derivative(n + i) - g2).truncated(k - 1), k - 1));
        }
        // (3), (4) restricted to v = sigma(u); (5) NPDE2 at u = 0
        std::vector<Poly> graph;
        for (std::size_t j = 0; j < n; ++j) {
            graph.push_back(Poly::variable(n, j));
        }
        for (std::size_t j = 0; j < n; ++j) {
            graph.push_back(s.sigma[j].poly());
        }
        std::vector<Poly> axis(n, Poly(n));
        for (std::size_t j = 0; j < n; ++j) {
            axis.push_back(Poly::variable(n, j));
        }
        std::vector<Poly> sg;
        for (const auto &c : s.sigma.components()) {
            sg.push_back(c.poly());
        }
        for (std::size_t i = 0; i < n; ++i) {
            Poly g3 = row_entry(s.Q, i).substitute(sg);
            Poly g4 = row_entry(s.alpha, i);
            for (std::size_t c = 0; c < n; ++c) {
                g3 -= row_entry(s.alpha, c) * s.sigma[c].poly().derivative(i);
                g4 += Poly::variable(n, c) * row_entry(s.Q, c).derivative(i).substitute(sg);
            }
            EXPECT_TRUE(vanishes_through((r.derivative(i).substitute(graph) - g3).truncated(k - 1), k - 1));
            EXPECT_TRUE(vanishes_through((r.derivative(n + i).substitute(graph) - g4).truncated(k - 1), k - 1));
            EXPECT_TRUE(
                vanishes_through((r.derivative(i).substitute(axis) - row_entry(s.Q, i)).truncated(k - 1), k - 1));
        }
        const auto v = verify_local(lp, br, Rational(1, 8), 5);
        EXPECT_TRUE(v.npde1 && v.npde2 && v.gradient_zero && v.hessian_zero && v.alpha_vanishes);
        EXPECT_TRUE(v.leading_minus_identity);
    }
}

TEST(LocalPotentialTest, LeadingMatrixIsMinusIdentity)
{
    // C(0) - Dsigma(0) B(0) = -I, hence its determinant is (-1)^n.
    const BranchData br = BranchData::flat({Rational(1), Rational(-3, 2)}, 3);
    const auto lp = assemble_f(br);
    const QMatrix lead = lp.scaffold.C.constant_part()
                         - jacobian(lp.scaffold.sigma).constant_part() * lp.scaffold.B.constant_part();
    EXPECT_EQ(lead, Rational(-1) * QMatrix::identity(2));
    EXPECT_EQ(determinant(lead), 1);
}

TEST(LocalPotentialTest, CertifiedRadiusShrinksWhenPositivityFails)
{
    // Draw 7 of this stream has lambda = (-3/2, -2) and loses positivity near radius 1/8.
    Sampler rng(606);
    BranchData br;
    for (int t = 0; t <= 7; ++t) {
        br = rng.branch(1 + static_cast<std::size_t>(t % 2), 4, 1, 4, 2);
    }
    const auto lp = assemble_f(br);
    const auto v = verify_local(lp, br, Rational(1, 8), 11);
    ASSERT_LT(v.positive_samples, v.samples);
    ASSERT_LT(v.certified_radius, Rational(1, 8));
    const auto inner = verify_local(lp, br, v.certified_radius, 11);
    EXPECT_EQ(inner.positive_samples, inner.samples);
    EXPECT_EQ(inner.certified_radius, v.certified_radius);
}

TEST(LocalPotentialTest, RejectsBranchesWithLinearTerms)
{
    BranchData br = BranchData::flat({Rational(1)}, 3);
    br.phi = JetMap({Jet(Poly::variable(1, 0), 3)});
    EXPECT_THROW(assemble_f(br), ContractViolation);
}

// ---------------------------------------------------------------------------
// Gluing

namespace
{

GlobalScene flat_scene()
{
    GlobalScene s;
    s.n = 2;
    s.phi = squared_norm(4, 2, 2);
    s.points.push_back({std::vector<Rational>(4, Rational(0)), squared_norm(4)});
    return s;
}

} // namespace

TEST(GluingTest, CutoffShape)
{
    const Cutoff c = make_cutoff(0.5, 1.0);
    EXPECT_EQ(c(0.25), std::make_pair(1.0, 0.0));
    EXPECT_EQ(c(1.0).first, 0.0);
    const auto [mid, dmid] = c(0.75);
    EXPECT_GT(mid, 0.0);
    EXPECT_LT(mid, 1.0);
    EXPECT_LT(dmid, 0.0);
    // closed-form derivative against a central difference
    for (double s : {0.55, 0.7, 0.9, 0.97}) {
        const double h = 1e-6;
        EXPECT_NEAR(c(s).second, (c(s + h).first - c(s - h).first) / (2 * h), 1e-5);
    }
    double prev = 1.0;
    for (int i = 0; i <= 200; ++i) {
        const double v = c(i * 0.006).first;
        EXPECT_LE(v, prev + 1e-15);
        prev = v;
    }
    EXPECT_THROW(make_cutoff(1.0, 1.0), std::invalid_argument);
}

TEST(GluingTest, PlateauAndExterior)
{
    GlobalScene s = flat_scene();
    s.C = 4;
    const GluedForm g(s);
    // inside B(p, delta): omega = C dd^c|y|^2 + dd^c|z|^2 = (C + 2) I
    const auto in = g.evaluate({0.1, -0.2, 0.1, 0.05});
    EXPECT_NEAR(in.full.H(0, 0).real(), 6.0, 1e-12);
    EXPECT_NEAR(std::abs(in.full.H(0, 1)), 0.0, 1e-12);
    const auto out = g.evaluate({1.5, 0.0, 0.0, 0.3});
    EXPECT_NEAR(out.full.H(0, 0).real(), 4.0, 1e-12);
    EXPECT_NEAR(out.full.H(1, 1).real(), 4.0, 1e-12);
    GlobalScene empty = flat_scene();
    empty.points.clear();
    const auto e = GluedForm(empty).evaluate({0.1, 0.2, 0.3, 0.4});
    EXPECT_NEAR(e.full.H(0, 0).real(), 1.0, 1e-12);
}

TEST(GluingTest, CalibrationEdgeCases)
{
    GlobalScene none = flat_scene();
    none.points.clear();
    none.phi = squared_norm(4);
    EXPECT_EQ(calibrate_C(none, 5).C, 1);
    GlobalScene zero = flat_scene();
    zero.phi = Poly(4);
    EXPECT_THROW(calibrate_C(zero, 5), CalibrationFailure);
    GlobalScene overlap = flat_scene();
    overlap.points.push_back({{Rational(1), Rational(0), Rational(0), Rational(0)}, squared_norm(4)});
    EXPECT_THROW(GluedForm{overlap}, SceneError);
}

TEST(GluingTest, CalibrationIsMonotone)
{
    GlobalScene s = flat_scene();
    const auto cal = calibrate_C(s, 7);
    const auto pts = calibration_samples(s, 7);
    const GluedForm g(s);
    for (double c : {cal.C.get_d(), 2 * cal.C.get_d(), 8 * cal.C.get_d()}) {
        for (const auto &z : pts) {
            ASSERT_TRUE(is_spd(g.evaluate(z, c).epos.H));
        }
    }
    if (cal.exponent > 0) {
        bool some_fail = false;
        for (const auto &z : pts) {
            some_fail = some_fail || !is_spd(g.evaluate(z, cal.C.get_d() / 2).epos.H);
        }
        EXPECT_TRUE(some_fail);
    }
}

TEST(GluingTest, FlatModelCertifies)
{
    GlobalScene s = flat_scene();
    s.C = calibrate_C(s, 7).C;
    const auto rep = certify(GluedForm(s), plane_pair_branches(QMatrix::diagonal({Rational(1), Rational(2)})), 7);
    EXPECT_TRUE(rep.ok());
    EXPECT_LT(rep.max_non_11, 1e-12);
    for (const auto &b : rep.branches) {
        EXPECT_TRUE(b.exact_zero) << b.name;
    }
}

TEST(GluingTest, CurvedBranchesReportNonzeroPullback)
{
    Sampler rng(12);
    const BranchData br = rng.branch(2, 4);
    const auto lp = assemble_f(br);
    GlobalScene s = flat_scene();
    s.points[0].f = lp.f.poly();
    s.C = 64;
    const GluedForm g(s);
    const auto pb = pullback_residual(g, {"first", first_branch_map(br)}, 5);
    EXPECT_FALSE(pb.exact_zero);
    EXPECT_GT(pb.max_residual, 0.0);
}

// ---------------------------------------------------------------------------
// Serialisation

TEST(IoTest, RoundTrips)
{
    Sampler rng(13);
    const BranchData br = rng.branch(2, 4);
    const auto j = io::to_json(br);
    const BranchData back = io::branch_from_json(io::json::parse(j.dump()));
    EXPECT_EQ(back.lambda, br.lambda);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back.phi[i].poly(), br.phi[i].poly());
        EXPECT_EQ(back.psi[i].poly(), br.psi[i].poly());
    }
    const QMatrix a = rng.matrix(3, 2, 3);
    EXPECT_EQ(io::matrix_from_json(io::to_json(a)).value, a);
    EXPECT_EQ(io::dump(io::to_json(a)), io::dump(io::to_json(a)));
}

TEST(IoTest, FloatEntriesBecomeBinaryRationals)
{
    const auto j = io::json::parse(R"({"n": 1, "mode": "float", "entries": [[0.1]]})");
    const auto m = io::matrix_from_json(j);
    EXPECT_TRUE(m.from_float);
    EXPECT_EQ(m.value(0, 0), Rational("3602879701896397/36028797018963968"));
}

TEST(IoTest, SchemaErrorsCarryLocation)
{
    try {
        (void)io::matrix_from_json(io::json::parse(R"({"n": 2, "entries": [["1", "0"], ["x", "1"]]})"));
        FAIL() << "expected SchemaError";
    } catch (const io::SchemaError &e) {
        EXPECT_EQ(e.location, "/entries/1/0");
    }
    try {
        (void)io::branch_from_json(io::json::parse(R"({"lambda": ["1"]})"));
        FAIL() << "expected SchemaError";
    } catch (const io::SchemaError &e) {
        EXPECT_NE(std::string(e.what()).find("\"n\""), std::string::npos);
    }
}
