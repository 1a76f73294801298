#include <gtest/gtest.h>

#include "lagimm/numberfield.hpp"
#include "lagimm/planepair.hpp"
#include "lagimm/random.hpp"
#include "oracles.hpp"

using namespace lagimm;

namespace
{

QMatrix mat(std::initializer_list<std::initializer_list<long>> rows)
{
    QMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto &r : rows) {
        std::size_t j = 0;
        for (long x : r) {
            m(i, j++) = x;
        }
        ++i;
    }
    return m;
}

oracle::Dense dense(const UPoly &p)
{
    oracle::Dense d;
    for (int k = 0; k <= p.degree(); ++k) {
        d.push_back(p.coeff(k));
    }
    return d;
}

/// Matrix with a prescribed real Jordan structure, conjugated by a random P.
QMatrix conjugated(Sampler &rng, const QMatrix &j)
{
    const QMatrix p = rng.invertible(j.rows(), 2);
    return p * j * inverse(p);
}

std::vector<std::vector<oracle::C>> to_oracle(const GMatrix &h)
{
    std::vector<std::vector<oracle::C>> o(h.rows(), std::vector<oracle::C>(h.cols()));
    for (std::size_t i = 0; i < h.rows(); ++i) {
        for (std::size_t j = 0; j < h.cols(); ++j) {
            o[i][j] = {h(i, j).re, h(i, j).im};
        }
    }
    return o;
}

GMatrix random_hermitian(Sampler &rng, std::size_t n)
{
    GMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = GaussRational(rng.rational(3, 2), 0);
        for (std::size_t j = i + 1; j < n; ++j) {
            h(i, j) = GaussRational(rng.rational(3, 2), rng.rational(3, 2));
            h(j, i) = h(i, j).conj();
        }
    }
    return h;
}

Poly random_poly(Sampler &rng, std::size_t nvars, int degree)
{
    Poly p(nvars);
    for (int t = 0; t < 6; ++t) {
        Exponent e(nvars, 0);
        int left = static_cast<int>(rng.integer(0, degree));
        for (std::size_t i = 0; i < nvars && left > 0; ++i) {
            const int k = static_cast<int>(rng.integer(0, left));
            e[i] = k;
            left -= k;
        }
        p.add_term(e, rng.rational(2, 3));
    }
    return p;
}

} // namespace

// ---------------------------------------------------------------------------
// Polynomials and linear algebra

TEST(UPolyTest, SturmCountMatchesIndependentChain)
{
    Sampler rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Rational> c;
        const int d = static_cast<int>(rng.integer(1, 6));
        for (int k = 0; k <= d; ++k) {
            c.push_back(rng.rational(3, 1));
        }
        if (sgn(c.back()) == 0) {
            c.back() = 1;
        }
        const UPoly p(c);
        EXPECT_EQ(count_real_roots(p), oracle::distinct_real_roots(dense(p))) << p.str("x");
    }
}

TEST(UPolyTest, SquarefreeDecompositionMultipliesBack)
{
    const UPoly x = UPoly::monomial(1);
    const UPoly p = (x - UPoly(Rational(1))) * (x - UPoly(Rational(1))) * (x + UPoly(Rational(2)))
                    * (x * x + UPoly(Rational(1))) * (x * x + UPoly(Rational(1))) * (x * x + UPoly(Rational(1)));
    const auto parts = squarefree_decomposition(p);
    UPoly prod(Rational(1));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t k = 0; k <= i; ++k) {
            prod = prod * parts[i];
        }
    }
    EXPECT_EQ(prod.monic(), p.monic());
    EXPECT_EQ(squarefree_part(p).degree(), 4);
}

TEST(LinalgTest, CharpolyOfCompanionMatrix)
{
    // x^3 - 2x^2 + 3x - 5
    const QMatrix c = mat({{0, 0, 5}, {1, 0, -3}, {0, 1, 2}});
    const UPoly p = charpoly(c);
    EXPECT_EQ(dense(p), (oracle::Dense{-5, 3, -2, 1}));
}

TEST(LinalgTest, MinimalPolynomialMatchesKrylovOracle)
{
    Sampler rng(3);
    std::vector<QMatrix> cases{mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}), mat({{2, 1, 0}, {0, 2, 0}, {0, 0, 2}}),
                               mat({{0, -1, 0}, {1, 0, 0}, {0, 0, 0}})};
    for (int t = 0; t < 40; ++t) {
        cases.push_back(rng.matrix(static_cast<std::size_t>(rng.integer(2, 4)), 2));
    }
    for (const auto &a : cases) {
        EXPECT_EQ(dense(minimal_polynomial(a).monic()), oracle::krylov_minpoly(a)) << a;
    }
}

TEST(LinalgTest, EigenMultiplicities)
{
    const auto s = eigen(mat({{2, 1, 0}, {0, 2, 0}, {0, 0, 2}}));
    ASSERT_EQ(s.eigenvalues.size(), 1u);
    EXPECT_EQ(s.eigenvalues[0].algebraic, 3);
    EXPECT_EQ(s.eigenvalues[0].geometric, 2);
    EXPECT_EQ(s.eigenvalues[0].block_sizes, (std::vector<int>{2, 1}));
    const auto r = eigen(mat({{0, -1}, {1, 0}}));
    EXPECT_EQ(r.eigenvalues.size(), 2u);
    for (const auto &e : r.eigenvalues) {
        EXPECT_FALSE(e.is_real);
        ASSERT_TRUE(e.exact.has_value());
        EXPECT_EQ(abs(e.exact->im), 1);
    }
}

TEST(LinalgTest, RealJordanReconstructsMatrix)
{
    Sampler rng(5);
    const std::vector<QMatrix> shapes{mat({{1, 1, 0}, {0, 1, 0}, {0, 0, -2}}), mat({{3, -2, 0}, {2, 3, 0}, {0, 0, 1}}),
                                      mat({{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 0}, {0, 0, 0, 5}}),
                                      mat({{1, -1, 1, 0}, {1, 1, 0, 1}, {0, 0, 1, -1}, {0, 0, 1, 1}})};
    for (const auto &j : shapes) {
        for (int t = 0; t < 5; ++t) {
            const QMatrix a = conjugated(rng, j);
            const auto jd = real_jordan(a);
            EXPECT_EQ(jd.P * jd.J() * inverse(jd.P), a);
            EXPECT_EQ(charpoly(jd.J()), charpoly(a));
        }
    }
}

TEST(LinalgTest, IrrationalSpectrumFallsBackToFloat)
{
    const QMatrix a = mat({{0, 1}, {2, 0}});
    EXPECT_THROW(real_jordan(a), JordanStructureError);
    const auto jd = real_jordan(to_double(a));
    const Eigen::MatrixXd back = to_eigen(jd.P) * to_eigen(jd.J()) * to_eigen(jd.P).inverse();
    EXPECT_LT((back - to_eigen(to_double(a))).norm(), 1e-9);
}

TEST(LinalgTest, DiagonalizabilityAgreesWithOracle)
{
    Sampler rng(8);
    for (int t = 0; t < 60; ++t) {
        const QMatrix a = t % 3 == 0 ? conjugated(rng, mat({{1, 1, 0}, {0, 1, 0}, {0, 0, 2}})) : rng.matrix(3, 2);
        EXPECT_EQ(is_diagonalizable_real(a).diagonalizable, oracle::diagonalizable_over_r(a)) << a;
    }
}

TEST(LinalgTest, SpdByMinorsAndShapeErrors)
{
    EXPECT_TRUE(is_spd(mat({{2, -1}, {-1, 2}})));
    EXPECT_FALSE(is_spd(mat({{1, 2}, {2, 1}})));
    EXPECT_FALSE(is_spd(mat({{0, 0}, {0, 1}})));
    EXPECT_THROW(charpoly(QMatrix(2, 3)), DimensionMismatch);
    EXPECT_THROW(inverse(mat({{1, 2}, {2, 4}})), SingularMatrixError);
}

// ---------------------------------------------------------------------------
// Differential forms

TEST(FormsTest, DSquaredIsZero)
{
    Sampler rng(21);
    for (int t = 0; t < 10; ++t) {
        const Poly f = random_poly(rng, 4, 4);
        const DiffForm df = exterior_d(DiffForm::function(f));
        EXPECT_TRUE(exterior_d(df).is_zero());
        EXPECT_EQ(exterior_d(dc(DiffForm::function(f))), ddc(DiffForm::function(f)));
        const DiffForm w = wedge(df, dc(DiffForm::function(random_poly(rng, 4, 3))));
        EXPECT_EQ(w.degree(), 2);
    }
}

TEST(FormsTest, DdcOfSquaredNormIsTwiceIdentity)
{
    Poly f(4);
    for (std::size_t a = 0; a < 4; ++a) {
        f += Poly::variable(4, a) * Poly::variable(4, a);
    }
    const auto h = hermitian_at(ddc(DiffForm::function(f)), std::vector<Rational>(4, Rational(0)));
    EXPECT_EQ(h.H, to_gauss(QMatrix::diagonal({Rational(2), Rational(2)})));
}

TEST(FormsTest, HermitianMatchesLeviOracle)
{
    Sampler rng(22);
    for (int t = 0; t < 15; ++t) {
        const Poly f = random_poly(rng, 4, 4);
        std::vector<Rational> z;
        for (int a = 0; a < 4; ++a) {
            z.push_back(rng.rational(1, 3));
        }
        const auto h = hermitian_at(ddc(DiffForm::function(f)), z);
        const auto o = oracle::levi(f, 2, z);
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                EXPECT_EQ(h.H(j, k).re, o[j][k].re);
                EXPECT_EQ(h.H(j, k).im, o[j][k].im);
            }
        }
    }
}

TEST(FormsTest, KahlerFormRoundTripAndTypeError)
{
    Sampler rng(23);
    const GMatrix h = random_hermitian(rng, 3);
    EXPECT_EQ(hermitian_at(kahler_form(h), std::vector<Rational>(6, Rational(0))).H, h);
    DiffForm w = DiffForm::zero(4, 2);
    w.add(0, 1, Poly::constant(4, 1)); // dx1 ^ dx2 alone has a (2,0) part
    EXPECT_THROW(hermitian_at(w, std::vector<Rational>(4, Rational(0))), FormTypeError);
    const auto fd = hermitian_at(w, std::vector<double>(4, 0.0), 1e-9, true);
    EXPECT_GT(fd.non_11_residual, 0.0);
}

TEST(FormsTest, PullbackCommutesWithD)
{
    Sampler rng(24);
    for (int t = 0; t < 8; ++t) {
        const Poly f = random_poly(rng, 4, 3);
        std::vector<Poly> map;
        for (int a = 0; a < 4; ++a) {
            map.push_back(random_poly(rng, 2, 2));
        }
        const DiffForm lhs = pullback(exterior_d(DiffForm::function(f)), map);
        const DiffForm rhs = exterior_d(DiffForm::function(f.substitute(map)));
        EXPECT_TRUE((lhs - rhs).is_zero());
        const DiffForm a = exterior_d(DiffForm::function(f));
        const DiffForm b = dc(DiffForm::function(random_poly(rng, 4, 2)));
        EXPECT_EQ(pullback(wedge(a, b), map), wedge(pullback(a, map), pullback(b, map)));
    }
}

namespace
{

// Complex-valued functions and forms as (real, imaginary) pairs in real coordinates.
struct CFun {
    Poly re, im;
};

struct CForm {
    DiffForm re, im;
};

CForm operator+(const CForm &a, const CForm &b) { return {a.re + b.re, a.im + b.im}; }
CForm operator-(const CForm &a, const CForm &b) { return {a.re - b.re, a.im - b.im}; }
CForm operator*(const CFun &g, const CForm &w) { return {g.re * w.re - g.im * w.im, g.re * w.im + g.im * w.re}; }
CForm cwedge(const CForm &a, const CForm &b)
{
    return {wedge(a.re, b.re) - wedge(a.im, b.im), wedge(a.re, b.im) + wedge(a.im, b.re)};
}

CFun conj(const CFun &g) { return {g.re, Rational(-1) * g.im}; }

// d/dz_j and d/dzbar_j
CFun dz_of(const CFun &g, std::size_t n, std::size_t j)
{
    const Rational h(1, 2);
    return {h * (g.re.derivative(j) + g.im.derivative(n + j)), h * (g.im.derivative(j) - g.re.derivative(n + j))};
}

CFun dzbar_of(const CFun &g, std::size_t n, std::size_t j)
{
    const Rational h(1, 2);
    return {h * (g.re.derivative(j) - g.im.derivative(n + j)), h * (g.im.derivative(j) + g.re.derivative(n + j))};
}

CForm dz(std::size_t n, std::size_t j) { return {DiffForm::differential(2 * n, j), DiffForm::differential(2 * n, n + j)}; }
CForm dzbar(std::size_t n, std::size_t j)
{
    return {DiffForm::differential(2 * n, j), Rational(-1) * DiffForm::differential(2 * n, n + j)};
}

CForm czero(std::size_t n, int deg) { return {DiffForm::zero(2 * n, deg), DiffForm::zero(2 * n, deg)}; }

CForm del(const CFun &g, std::size_t n)
{
    CForm out = czero(n, 1);
    for (std::size_t j = 0; j < n; ++j) {
        out = out + dz_of(g, n, j) * dz(n, j);
    }
    return out;
}

CForm delbar(const CFun &g, std::size_t n)
{
    CForm out = czero(n, 1);
    for (std::size_t j = 0; j < n; ++j) {
        out = out + dzbar_of(g, n, j) * dzbar(n, j);
    }
    return out;
}

CForm del_delbar(const CFun &g, std::size_t n)
{
    CForm out = czero(n, 2);
    for (std::size_t j = 0; j < n; ++j) {
        out = out + cwedge(del(dzbar_of(g, n, j), n), dzbar(n, j));
    }
    return out;
}

CFun compose(const CFun &g, const std::vector<Poly> &map) { return {g.re.substitute(map), g.im.substitute(map)}; }

} // namespace

TEST(FormsTest, DdcChainRuleExpansion)
{
    Sampler rng(26);
    for (int t = 0; t < 12; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(1, 2));
        const CFun f{random_poly(rng, 2 * n, 3), Poly(2 * n)};
        std::vector<Poly> map;
        for (std::size_t a = 0; a < 2 * n; ++a) {
            map.push_back(random_poly(rng, 2 * n, 2));
        }
        std::vector<CFun> g;
        for (std::size_t j = 0; j < n; ++j) {
            g.push_back({map[j], map[n + j]});
        }
        CForm sum = czero(n, 2);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                const CFun f_jkbar = compose(dzbar_of(dz_of(f, n, j), n, k), map);
                const CFun f_jk = compose(dz_of(dz_of(f, n, j), n, k), map);
                const CFun f_jbar_kbar = compose(dzbar_of(dzbar_of(f, n, j), n, k), map);
                sum = sum
                      + f_jkbar
                            * (cwedge(del(g[j], n), delbar(conj(g[k]), n))
                               - cwedge(delbar(g[j], n), del(conj(g[k]), n)))
                      + f_jk * cwedge(del(g[j], n), delbar(g[k], n))
                      + f_jbar_kbar * cwedge(del(conj(g[j]), n), delbar(conj(g[k]), n));
            }
            sum = sum + compose(dz_of(f, n, j), map) * del_delbar(g[j], n)
                  + compose(dzbar_of(f, n, j), map) * del_delbar(conj(g[j]), n);
        }
        // multiply by 2i
        const DiffForm re = Rational(-2) * sum.im;
        const DiffForm im = Rational(2) * sum.re;
        EXPECT_EQ(re, ddc(DiffForm::function(f.re.substitute(map))));
        EXPECT_TRUE(im.is_zero());
    }
}

TEST(FormsTest, GraphPlanePullbackMatchesBilinearOracle)
{
    Sampler rng(25);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
        const GMatrix h = random_hermitian(rng, n);
        const QMatrix a = rng.matrix(n, 2);
        const DiffForm pb = pullback(kahler_form(h), graph_plane_parametrization(a));
        const auto ho = to_oracle(h);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                std::vector<oracle::C> u(n), v(n);
                for (std::size_t r = 0; r < n; ++r) {
                    u[r] = {a(r, j), r == j ? 1 : 0};
                    v[r] = {a(r, k), r == k ? 1 : 0};
                }
                const Rational expect = oracle::omega(ho, u, v);
                EXPECT_EQ(pb.coeff(j, k).constant_term(), expect);
                EXPECT_EQ(graph_plane_pullback(h, a)(j, k), expect);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Jets

TEST(JetsTest, InverseOfTPlusTSquaredIsCatalan)
{
    const int k = 7;
    const Jet t = Jet::variable(1, k, 0);
    const JetMap inv = invert_map(JetMap({t + t * t}));
    // compositional inverse: sum (-1)^m Cat(m) t^{m+1}
    Rational cat = 1;
    for (int m = 0; m < k; ++m) {
        const Rational expect = (m % 2 == 0 ? 1 : -1) * cat;
        EXPECT_EQ(inv[0].poly().coefficient({m + 1}), expect) << "degree " << m + 1;
        cat = cat * 2 * (2 * m + 1) / (m + 2);
    }
}

TEST(JetsTest, InverseComposesToIdentity)
{
    Sampler rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const int k = 5;
        const QMatrix l = rng.invertible(2, 2);
        std::vector<Jet> c = JetMap::linear(l, k).components();
        for (auto &x : c) {
            x = x + Jet(random_poly(rng, 2, 3).truncated(3) - random_poly(rng, 2, 1).truncated(1), k);
        }
        // remove constant and linear perturbations so the linear part is l
        for (std::size_t i = 0; i < c.size(); ++i) {
            Poly p = c[i].poly();
            Poly fixed(2);
            for (const auto &[e, co] : p.terms()) {
                if (total_degree(e) >= 2) {
                    fixed.add_term(e, co);
                }
            }
            c[i] = Jet(fixed, k) + JetMap::linear(l, k)[i];
        }
        const JetMap f(c);
        const JetMap g = invert_map(f);
        const JetMap id = JetMap::identity(2, k);
        EXPECT_TRUE((f.compose(g) - id).vanishes_through(k));
        EXPECT_TRUE((g.compose(f) - id).vanishes_through(k));
    }
}

TEST(JetsTest, ImplicitSolveCubicExample)
{
    // v = 3u + u^2 v  =>  v = 3u + 3u^3 + ...
    const int k = 4;
    const Jet u = Jet::variable(2, k, 0), v = Jet::variable(2, k, 1);
    const JetMap f({v - Rational(3) * u - u * u * v});
    const JetMap s = implicit_solve(f, 1);
    EXPECT_EQ(s[0].poly(), Poly::variable(1, 0, 3) + Poly::monomial({3}, 3));
    const JetMap gr({Jet::variable(1, k, 0), s[0]});
    EXPECT_TRUE(f.compose(gr).vanishes_through(k));
}

TEST(JetsTest, PrecisionBookkeeping)
{
    const Jet t = Jet::variable(1, 3, 0);
    const Jet t2 = Jet(Poly::monomial({2}), 5) * Jet::constant(1, 5, 1);
    const Jet prod = t * t2; // valuations 1 and 2 lift the order
    EXPECT_EQ(prod.order(), 5);
    EXPECT_EQ(t.derivative(0).order(), 2);
    EXPECT_THROW((void)t.vanishes_through(4), std::out_of_range);
    EXPECT_THROW(t.compose({Jet::constant(1, 3, 1)}), CompositionError);
}

TEST(JetsTest, ProductRuleAgreesWithDifferentiation)
{
    Sampler rng(33);
    const int k = 4;
    auto rnd = [&](std::size_t r, std::size_t c) {
        JetMatrix m(r, c, 2, k);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                m(i, j) = Jet(random_poly(rng, 2, 3), k);
            }
        }
        return m;
    };
    for (int t = 0; t < 5; ++t) {
        const JetMatrix a = rnd(2, 3), b = rnd(3, 2);
        const ProductRule pr = product_rule_mul(a, b);
        const JetMatrix direct = vec_derivative(a * b);
        const int common = std::min(direct.order(), pr.derivative.order());
        EXPECT_TRUE((direct.truncated(common) - pr.derivative.truncated(common)).vanishes_through(common));
    }
}

// ---------------------------------------------------------------------------
// Plane pairs

TEST(PlanePairTest, ClassificationTable)
{
    EXPECT_EQ(classify(QMatrix::diagonal({Rational(1), Rational(2)})).cls, PairClass::LagrangianAndRC);
    EXPECT_EQ(classify(mat({{0, 1}, {0, 0}})).cls, PairClass::RCNotLagrangian);
    EXPECT_EQ(classify(mat({{0, -1}, {1, 0}})).cls, PairClass::RCNotLagrangian);
    EXPECT_EQ(classify(mat({{0, -2}, {2, 0}})).cls, PairClass::NotLocallyRC);
    EXPECT_TRUE(weinstock_report(mat({{0, -1}, {1, 0}})).boundary);
    EXPECT_EQ(weinstock_check(to_double(mat({{0, -2}, {2, 0}}))), false);
    EXPECT_EQ(weinstock_check(to_double(mat({{1, -1}, {1, 1}}))), true);
    EXPECT_EQ(weinstock_check(to_double(mat({{0, -3}, {1, 0}}))), false);
    EXPECT_EQ(weinstock_check(to_double(mat({{0, 1}, {2, 0}}))), true);
}

TEST(PlanePairTest, WitnessForDiagonalisableMatrices)
{
    Sampler rng(41);
    for (int t = 0; t < 15; ++t) {
        const QMatrix a = rng.diagonalizable(static_cast<std::size_t>(rng.integer(2, 4)));
        const QMatrix h = witness_matrix(a);
        EXPECT_EQ(h, h.transpose());
        EXPECT_TRUE(is_spd(h));
        EXPECT_EQ(h * a, a.transpose() * h);
        EXPECT_TRUE(lagrangian_obstruction(to_gauss(h), a).is_zero());
    }
    // irrational spectrum: exact projected witness
    const QMatrix a = mat({{0, 1}, {2, 0}});
    const QMatrix h = witness_matrix(a);
    EXPECT_TRUE(is_spd(h));
    EXPECT_EQ(h * a, a.transpose() * h);
    EXPECT_THROW(witness_matrix(mat({{0, 1}, {0, 0}})), NoWitnessError);
}

TEST(PlanePairTest, ForcedVanishing)
{
    const auto j = forced_vanishing(mat({{0, 1}, {0, 0}}));
    ASSERT_TRUE(j.has_value());
    EXPECT_EQ(j->kind, ForcedVanishing::Case::JordanBlock);
    EXPECT_TRUE(j->verified);
    const auto r = forced_vanishing(mat({{0, -1}, {1, 0}}));
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->relation(), "h11 + h22 = 0");
    EXPECT_TRUE(r->verified);
    // cubic with one real root and an irrational complex pair
    const auto c = forced_vanishing(mat({{0, 0, 2}, {1, 0, 0}, {0, 1, 0}}));
    ASSERT_TRUE(c.has_value());
    EXPECT_TRUE(c->verified);
    EXPECT_NE(c->field, "Q");
    EXPECT_FALSE(forced_vanishing(QMatrix::diagonal({Rational(1), Rational(2)})).has_value());
}

TEST(PlanePairTest, ReductionRecoversA)
{
    Sampler rng(42);
    for (int t = 0; t < 8; ++t) {
        const std::size_t n = 2;
        const QMatrix a = rng.matrix(n, 2);
        const GMatrix g0 = make_complex(rng.invertible(n, 2), rng.matrix(n, 2));
        if (sgn(determinant(realify(g0))) == 0) {
            continue;
        }
        const GMatrix p1 = g0;
        const GMatrix p2 = g0 * make_complex(a, QMatrix::identity(n));
        QMatrix f1(2 * n, n), f2(2 * n, n);
        f1.set_block(0, 0, real_part(p1));
        f1.set_block(n, 0, imag_part(p1));
        f2.set_block(0, 0, real_part(p2));
        f2.set_block(n, 0, imag_part(p2));
        const auto red = reduce_to_standard(f1, f2);
        EXPECT_EQ(red.A, a);
        EXPECT_EQ(classify(red.A).cls, classify(a).cls);
    }
    QMatrix bad(4, 2);
    bad(0, 0) = 1;
    bad(2, 1) = 1; // columns e1 and i e1
    EXPECT_THROW(reduce_to_standard(bad, bad), TotallyRealViolation);
    const QMatrix re = QMatrix::identity(4).block(0, 0, 4, 2);
    EXPECT_THROW(reduce_to_standard(re, re), TransversalityViolation);
}

TEST(PlanePairTest, TransportPreservesFormValues)
{
    Sampler rng(43);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 2;
        const GMatrix h = random_hermitian(rng, n);
        const GMatrix g = make_complex(rng.invertible(n, 2), rng.matrix(n, 2));
        if (sgn(determinant(realify(g))) == 0) {
            continue;
        }
        std::vector<GaussRational> u, v;
        std::vector<oracle::C> uo, vo;
        for (std::size_t j = 0; j < n; ++j) {
            u.emplace_back(rng.rational(2, 1), rng.rational(2, 1));
            v.emplace_back(rng.rational(2, 1), rng.rational(2, 1));
            uo.push_back({u.back().re, u.back().im});
            vo.push_back({v.back().re, v.back().im});
        }
        const GMatrix h2 = transport_form(g, h);
        EXPECT_EQ(form_value(h2, lagimm::apply(g, u), lagimm::apply(g, v)), oracle::omega(to_oracle(h), uo, vo));
    }
}

// ---------------------------------------------------------------------------
// Number fields

TEST(NumberFieldTest, InverseAndSign)
{
    const auto m = std::make_shared<const UPoly>(UPoly({Rational(-2), Rational(0), Rational(0), Rational(1)}));
    const FieldElement a = FieldElement::generator(m);
    const FieldElement x = a * a + Rational(3) * a - Rational(1);
    EXPECT_EQ(x * (FieldElement(1) / x), FieldElement(1));
    const RootInterval iv = isolate_real_root(*m, std::cbrt(2.0));
    EXPECT_EQ(sign_at_root(a - Rational(5, 4), iv), 1);   // 2^{1/3} ~ 1.26
    EXPECT_EQ(sign_at_root(a - Rational(127, 100), iv), -1);
    EXPECT_EQ(sign_at_root(a * a * a - Rational(2), iv), 0);
}
