#pragma once

// Independent reference computations for the acceptance binary. Everything here works on plain
// polynomials and Taylor coefficients; nothing calls the jet, bracket or system code under test.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "jetcalc/linalg.hpp"
#include "jetcalc/multi_index.hpp"
#include "jetcalc/poly.hpp"

namespace oracle {

using jetcalc::Matrix;
using jetcalc::MultiIndex;
using jetcalc::Poly;
using jetcalc::Scalar;
using jetcalc::Vector;

using Field = std::vector<Poly>;

inline Scalar factorial(long m)
{
    Scalar f = 1;
    for (long i = 2; i <= m; ++i) {
        f *= i;
    }
    return f;
}

/// alpha! = prod alpha_i!
inline Scalar multi_factorial(const MultiIndex& alpha)
{
    Scalar f = 1;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        f *= factorial(alpha[i]);
    }
    return f;
}

/// All exponent vectors of total degree <= d, grouped by degree.
inline std::vector<MultiIndex> monomials(std::size_t n, int d)
{
    std::vector<MultiIndex> out;
    for (int deg = 0; deg <= d; ++deg) {
        // compositions of deg into n parts
        std::vector<int> cur;
        auto rec = [&](auto&& self, std::size_t i, int left) -> void {
            if (i + 1 == n) {
                cur.push_back(left);
                MultiIndex m(n);
                for (std::size_t j = 0; j < n; ++j) {
                    for (int c = 0; c < cur[j]; ++c) {
                        m = m.raised(j);
                    }
                }
                out.push_back(m);
                cur.pop_back();
                return;
            }
            for (int v = left; v >= 0; --v) {
                cur.push_back(v);
                self(self, i + 1, left - v);
                cur.pop_back();
            }
        };
        rec(rec, 0, deg);
    }
    return out;
}

inline Poly truncate(const Poly& p, int d)
{
    Poly out(p.dim());
    for (const auto& [m, c] : p.terms()) {
        if (m.order() <= d) {
            out.add_term(m, c);
        }
    }
    return out;
}

/// [X, Y]^i = X^a d_a Y^i - Y^a d_a X^i.
inline Field classical_bracket(const Field& x, const Field& y)
{
    const std::size_t n = x.size();
    Field out(n, Poly(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            out[i] += x[a] * y[i].derivative(a) - y[a] * x[i].derivative(a);
        }
    }
    return out;
}

/// X(f) = X^a d_a f.
inline Poly apply(const Field& x, const Poly& f)
{
    Poly out(f.dim());
    for (std::size_t a = 0; a < x.size(); ++a) {
        out += x[a] * f.derivative(a);
    }
    return out;
}

/// Classical exterior derivative on coefficient maps (sorted index tuple -> coefficient), determinant convention.
inline std::map<std::vector<std::uint32_t>, Poly> classical_d(std::size_t n,
                                                             const std::map<std::vector<std::uint32_t>, Poly>& form)
{
    std::map<std::vector<std::uint32_t>, Poly> out;
    for (const auto& [t, f] : form) {
        for (std::uint32_t j = 0; j < n; ++j) {
            if (std::find(t.begin(), t.end(), j) != t.end()) {
                continue;
            }
            std::size_t before = 0;
            while (before < t.size() && t[before] < j) {
                ++before;
            }
            auto u = t;
            u.insert(u.begin() + static_cast<std::ptrdiff_t>(before), j);
            Poly term = f.derivative(j);
            if (before % 2 == 1) {
                term = -term;
            }
            auto [it, fresh] = out.try_emplace(u, Poly(n));
            it->second += term;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// one-variable power series

/// Taylor coefficients c_0..c_k of g o f where f(0) = 0 is given by its coefficients.
inline std::vector<Scalar> compose_series(const std::vector<Scalar>& g, const std::vector<Scalar>& f)
{
    const std::size_t k = f.size() - 1;
    std::vector<Scalar> out(k + 1, Scalar(0));
    std::vector<Scalar> power(k + 1, Scalar(0));
    power[0] = 1;
    for (std::size_t j = 0; j < g.size() && j <= k; ++j) {
        for (std::size_t i = 0; i <= k; ++i) {
            out[i] += g[j] * power[i];
        }
        std::vector<Scalar> next(k + 1, Scalar(0));
        for (std::size_t a = 0; a <= k; ++a) {
            for (std::size_t b = 0; a + b <= k; ++b) {
                next[a + b] += power[a] * f[b];
            }
        }
        power = next;
    }
    return out;
}

/// Coefficients of the compositional inverse of f (f(0) = 0, f'(0) != 0), by fixed-point refinement.
inline std::vector<Scalar> invert_series(const std::vector<Scalar>& f)
{
    const std::size_t k = f.size() - 1;
    std::vector<Scalar> h(k + 1, Scalar(0));
    if (k >= 1) {
        h[1] = 1 / f[1];
    }
    for (std::size_t order = 2; order <= k; ++order) {
        // coefficient of t^order in f(h(t)) must vanish; it is f1 h_order + (terms in lower h)
        h[order] = 0;
        const auto fh = compose_series(f, h);
        h[order] = -fh[order] / f[1];
    }
    return h;
}

// ---------------------------------------------------------------------------
// Lie derivative systems by polynomial ansatz

/// Order-k infinitesimal symmetries of a symmetric (metric) or antisymmetric tensor given by polynomial entries:
/// unknowns are the Taylor coefficients of X up to degree k, equations are the Taylor coefficients of L_X s up to
/// degree k - 1.  Returns a basis of solutions, coordinates indexed by (component, monomial) as in unknowns().
struct AnsatzSystem {
    std::size_t n = 0;
    int k = 0;
    std::vector<std::pair<std::size_t, MultiIndex>> unknowns;
    Matrix equations;

    [[nodiscard]] std::vector<Vector> solutions() const { return jetcalc::nullspace(equations); }

    /// Rank of the solutions restricted to the unknowns of degree <= m.
    [[nodiscard]] std::size_t projected_rank(const std::vector<Vector>& sol, int m) const
    {
        std::vector<std::size_t> keep;
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
            if (unknowns[u].second.order() <= m) {
                keep.push_back(u);
            }
        }
        Matrix a(keep.size(), sol.size());
        for (std::size_t c = 0; c < sol.size(); ++c) {
            for (std::size_t r = 0; r < keep.size(); ++r) {
                a(r, c) = sol[c][keep[r]];
            }
        }
        return sol.empty() ? 0 : jetcalc::rank(a);
    }
};

inline Poly lie_derivative_entry(const std::vector<std::vector<Poly>>& s, const Field& x, std::size_t i, std::size_t j)
{
    const std::size_t n = s.size();
    Poly out = apply(x, s[i][j]);
    for (std::size_t a = 0; a < n; ++a) {
        out += s[a][j] * x[a].derivative(i) + s[i][a] * x[a].derivative(j);
    }
    return out;
}

inline AnsatzSystem symmetry_ansatz(const std::vector<std::vector<Poly>>& s, int k, bool symmetric)
{
    const std::size_t n = s.size();
    AnsatzSystem sys;
    sys.n = n;
    sys.k = k;
    const auto field_monomials = monomials(n, k);
    for (const auto& m : field_monomials) {
        for (std::size_t i = 0; i < n; ++i) {
            sys.unknowns.emplace_back(i, m);
        }
    }
    const auto eq_monomials = monomials(n, k - 1);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = symmetric ? i : i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    Matrix eq(pairs.size() * eq_monomials.size(), sys.unknowns.size());
    for (std::size_t u = 0; u < sys.unknowns.size(); ++u) {
        Field x(n, Poly(n));
        x[sys.unknowns[u].first] = Poly::monomial(sys.unknowns[u].second, Scalar(1));
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const Poly l = lie_derivative_entry(s, x, pairs[p].first, pairs[p].second);
            for (std::size_t e = 0; e < eq_monomials.size(); ++e) {
                eq(p * eq_monomials.size() + e, u) = l.coeff(eq_monomials[e]);
            }
        }
    }
    sys.equations = eq;
    return sys;
}

// ---------------------------------------------------------------------------
// jet Lie algebras of isotropy by monomial fields

/// The Lie algebra of k-jets at 0 of vector fields vanishing at 0, in the basis x^mu d_i (1 <= |mu| <= k),
/// bracket = classical bracket truncated at degree k.  c[a][b] holds the coordinates of [e_a, e_b].
struct MonomialJetAlgebra {
    std::size_t n = 0;
    int k = 0;
    std::vector<std::pair<std::size_t, MultiIndex>> basis;
    std::vector<std::vector<Vector>> c;

    [[nodiscard]] std::size_t dim() const { return basis.size(); }

    [[nodiscard]] std::size_t index_of(std::size_t i, const MultiIndex& mu) const
    {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            if (basis[b].first == i && basis[b].second == mu) {
                return b;
            }
        }
        return basis.size();
    }
};

inline MonomialJetAlgebra monomial_jet_algebra(std::size_t n, int k)
{
    MonomialJetAlgebra g;
    g.n = n;
    g.k = k;
    for (const auto& m : monomials(n, k)) {
        if (m.order() == 0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            g.basis.emplace_back(i, m);
        }
    }
    const std::size_t d = g.dim();
    auto field = [&](std::size_t b) {
        Field f(n, Poly(n));
        f[g.basis[b].first] = Poly::monomial(g.basis[b].second, Scalar(1));
        return f;
    };
    g.c.assign(d, std::vector<Vector>(d, Vector(d)));
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            const Field br = classical_bracket(field(a), field(b));
            for (std::size_t i = 0; i < n; ++i) {
                const Poly t = truncate(br[i], k);
                for (const auto& [m, coef] : t.terms()) {
                    g.c[a][b][g.index_of(i, m)] += coef;
                }
            }
        }
    }
    return g;
}

/// Whether the span of the basis elements with |mu| > lo is abelian.
inline bool kernel_abelian(const MonomialJetAlgebra& g, int lo)
{
    for (std::size_t a = 0; a < g.dim(); ++a) {
        for (std::size_t b = 0; b < g.dim(); ++b) {
            if (g.basis[a].second.order() > lo && g.basis[b].second.order() > lo) {
                for (const auto& v : g.c[a][b]) {
                    if (v != 0) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

/// Splitting of 0 -> A -> g -> g/A -> 0, A = span{|mu| > m} abelian, decided by solving for a section
/// q -> q + lambda(q) that is a homomorphism (linear in lambda because A is abelian).
inline std::optional<bool> splits(const MonomialJetAlgebra& g, int m)
{
    if (!kernel_abelian(g, m)) {
        return std::nullopt;
    }
    std::vector<std::size_t> qs;
    std::vector<std::size_t> as;
    for (std::size_t b = 0; b < g.dim(); ++b) {
        (g.basis[b].second.order() > m ? as : qs).push_back(b);
    }
    const std::size_t nq = qs.size();
    const std::size_t na = as.size();
    // unknown lambda(a_row, q_col) at index row * nq + col
    std::vector<Vector> rows;
    Vector rhs;
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = i + 1; j < nq; ++j) {
            const Vector& br = g.c[qs[i]][qs[j]];
            for (std::size_t r = 0; r < na; ++r) {
                Vector row(na * nq);
                // [q_i, lambda q_j] - [q_j, lambda q_i]
                for (std::size_t s = 0; s < na; ++s) {
                    row[s * nq + j] += g.c[qs[i]][as[s]][as[r]];
                    row[s * nq + i] -= g.c[qs[j]][as[s]][as[r]];
                }
                // - lambda(Q-part of [q_i, q_j])
                for (std::size_t t = 0; t < nq; ++t) {
                    row[r * nq + t] -= br[qs[t]];
                }
                rows.push_back(row);
                rhs.push_back(-br[as[r]]);
            }
        }
    }
    if (rows.empty()) {
        return true;
    }
    const Matrix a = Matrix::from_rows(rows, na * nq);
    return jetcalc::solve(a, rhs).has_value();
}

} // namespace oracle
