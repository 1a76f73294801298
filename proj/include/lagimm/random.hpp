#pragma once

// Seeded generators for test matrices and branch data.

#include <cstdint>
#include <random>
#include <vector>

#include "localpotential.hpp"

namespace lagimm
{

class Sampler
{
public:
    explicit Sampler(std::uint64_t seed) : m_rng(seed) {}

    /// p/den with p uniform in [-bound*den, bound*den].
    Rational rational(long bound, long den)
    {
        std::uniform_int_distribution<long> d(-bound * den, bound * den);
        Rational r(d(m_rng), den);
        r.canonicalize();
        return r;
    }

    long integer(long lo, long hi)
    {
        std::uniform_int_distribution<long> d(lo, hi);
        return d(m_rng);
    }

    QMatrix matrix(std::size_t n, long bound = 3, long den = 1)
    {
        QMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) = rational(bound, den);
            }
        }
        return m;
    }

    QMatrix invertible(std::size_t n, long bound = 3)
    {
        while (true) {
            QMatrix m = matrix(n, bound);
            if (sgn(determinant(m)) != 0) {
                return m;
            }
        }
    }

    /// Q D Q^{-1} with D rational diagonal.
    QMatrix diagonalizable(std::size_t n, long bound = 3)
    {
        const QMatrix q = invertible(n, bound);
        std::vector<Rational> d;
        for (std::size_t i = 0; i < n; ++i) {
            d.push_back(rational(bound, 2));
        }
        return q * QMatrix::diagonal(d) * inverse(q);
    }

    /// Branch data with phi, psi of degrees 2..order, coefficients p/den in
    /// [-num/den, num/den] and eigenvalues in half steps of [-lambda_bound, lambda_bound].
    BranchData branch(std::size_t n, int order = default_jet_order, long num = 1, long den = 4,
                      long lambda_bound = 1)
    {
        BranchData b;
        b.n = n;
        b.order = order;
        for (std::size_t i = 0; i < n; ++i) {
            b.lambda.push_back(rational(lambda_bound, 2));
        }
        auto make = [&] {
            std::vector<Jet> comps;
            for (std::size_t c = 0; c < n; ++c) {
                Poly p(n);
                std::vector<int> e(n, 0);
                enumerate(e, 0, 0, order, [&](const Exponent &ex, int deg) {
                    if (deg >= 2) {
                        std::uniform_int_distribution<long> d(-num * 4, num * 4);
                        Rational c(d(m_rng), den * 4);
                        c.canonicalize();
                        p.add_term(ex, c);
                    }
                });
                comps.emplace_back(p, order);
            }
            return JetMap(std::move(comps));
        };
        b.phi = make();
        b.psi = make();
        return b;
    }

private:
    template <typename F>
    static void enumerate(std::vector<int> &e, std::size_t i, int deg, int max_deg, F &&fn)
    {
        if (i == e.size()) {
            fn(e, deg);
            return;
        }
        for (int k = 0; deg + k <= max_deg; ++k) {
            e[i] = k;
            enumerate(e, i + 1, deg + k, max_deg, fn);
        }
        e[i] = 0;
    }

    std::mt19937_64 m_rng;
};

} // namespace lagimm
