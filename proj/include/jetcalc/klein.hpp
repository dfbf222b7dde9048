#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrow.hpp"
#include "error.hpp"
#include "jet.hpp"
#include "lie_algebra.hpp"
#include "linalg.hpp"
#include "spencer.hpp"

namespace jetcalc {

using PolyField = std::vector<Poly>;

namespace detail {

inline PolyField field_bracket(const PolyField& a, const PolyField& b)
{
    return lie_bracket_fields(a, b);
}

inline PolyField zero_field(std::size_t n) { return PolyField(n, Poly(n)); }

inline PolyField combine(const std::vector<PolyField>& fields, const Vector& coeffs, std::size_t n)
{
    PolyField out = zero_field(n);
    for (std::size_t b = 0; b < fields.size(); ++b) {
        if (coeffs[b] == 0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += fields[b][i] * coeffs[b];
        }
    }
    return out;
}

} // namespace detail

struct RealizationCheck {
    bool ok = true;
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Exact check that [X_i*, X_j*] = sum_k c^k_ij X_k* as polynomial vector fields.
inline RealizationCheck validate_realization(const FiniteLieAlgebra& g, const std::vector<PolyField>& fields)
{
    if (fields.size() != g.dim()) {
        throw dimension_error("one vector field per basis element is required");
    }
    if (fields.empty()) {
        return {};
    }
    const std::size_t n = fields.front().size();
    for (const auto& f : fields) {
        if (f.size() != n) {
            throw dimension_error("realization fields have different numbers of components");
        }
        for (const auto& p : f) {
            if (p.dim() != n) {
                throw dimension_error("realization field component on a chart of wrong dimension");
            }
        }
    }
    for (std::size_t i = 0; i < g.dim(); ++i) {
        for (std::size_t j = i + 1; j < g.dim(); ++j) {
            const auto lhs = detail::field_bracket(fields[i], fields[j]);
            const auto rhs = detail::combine(fields, g.bracket(g.unit(i), g.unit(j)), n);
            if (lhs != rhs) {
                return {false, std::make_pair(i, j)};
            }
        }
    }
    return {};
}

/// An abstract Lie algebra together with polynomial vector fields X* on a chart, and a base point o.
class RealizedLieAlgebra {
public:
    RealizedLieAlgebra(FiniteLieAlgebra g, std::vector<PolyField> fields, Point base = {})
        : g_(std::move(g)), fields_(std::move(fields))
    {
        const auto check = validate_realization(g_, fields_);
        if (!check.ok) {
            throw domain_error("realization is not a Lie algebra homomorphism on basis pair (" +
                               std::to_string(check.witness->first) + ", " + std::to_string(check.witness->second) + ")");
        }
        if (fields_.empty()) {
            throw dimension_error("realization of the zero algebra");
        }
        base_ = base.empty() ? origin(chart_dim()) : std::move(base);
        if (base_.size() != chart_dim()) {
            throw dimension_error("base point has wrong dimension");
        }
    }

    [[nodiscard]] const FiniteLieAlgebra& algebra() const noexcept { return g_; }
    [[nodiscard]] const std::vector<PolyField>& fields() const noexcept { return fields_; }
    [[nodiscard]] const Point& base() const noexcept { return base_; }
    [[nodiscard]] std::size_t chart_dim() const { return fields_.front().size(); }
    [[nodiscard]] std::size_t dim() const { return g_.dim(); }

    /// sigma_m(X) = j_m(X*)_o.
    [[nodiscard]] VectorJetValue sigma(const Vector& x, int m) const
    {
        return evaluate_at(prolong_vector_field(detail::combine(fields_, x, chart_dim()), m), base_);
    }

    /// Whether the images span the tangent space at o.
    [[nodiscard]] bool transitive() const
    {
        Matrix m(chart_dim(), dim());
        for (std::size_t b = 0; b < dim(); ++b) {
            for (std::size_t i = 0; i < chart_dim(); ++i) {
                m(i, b) = fields_[b][i].evaluate(base_);
            }
        }
        return rank(m) == chart_dim();
    }

    [[nodiscard]] int max_field_degree() const
    {
        int d = 0;
        for (const auto& f : fields_) {
            for (const auto& p : f) {
                d = std::max(d, p.degree());
            }
        }
        return d;
    }

private:
    FiniteLieAlgebra g_;
    std::vector<PolyField> fields_;
    Point base_;
};

/// Matrix of sigma_m: one column per abstract basis element, rows the g_m fiber coordinates.
inline Matrix sigma_matrix(const RealizedLieAlgebra& a, int m)
{
    std::vector<Vector> cols;
    for (std::size_t b = 0; b < a.dim(); ++b) {
        cols.push_back(to_fiber_vector(a.sigma(a.algebra().unit(b), m)));
    }
    return Matrix::from_columns(cols, vector_fiber_dimension(a.chart_dim(), m));
}

/// Kernel of X -> X* (the fields as polynomials).
inline std::vector<Vector> realization_kernel(const RealizedLieAlgebra& a)
{
    // a field vanishes iff all its jets at o vanish up to its degree
    return nullspace(sigma_matrix(a, std::max(a.max_field_degree(), 0)));
}

struct FiltrationReport {
    std::vector<std::size_t> dims; // dim h_0, dim h_1, ... through two steps past the order
    std::optional<int> order;      // least m with h_m = h_{m+1}
    bool stabilized = false;
    std::vector<Vector> ghost;
    bool ghost_is_ideal = false;
    bool ghost_is_kernel = false;
    bool transitive = false;
    int depth_max = 0;
};

namespace detail {

/// Same subspace test for two bases in the abstract algebra.
inline bool same_span(std::size_t d, const std::vector<Vector>& a, const std::vector<Vector>& b)
{
    if (a.size() != b.size()) {
        return false;
    }
    Echelon ech(d);
    for (const auto& v : a) {
        ech.insert(to_sparse(v));
    }
    for (const auto& v : b) {
        if (!ech.contains(to_sparse(v))) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// h_k = {X : j_k(X*)_o = 0} for k = 0, 1, ..; the order is the first k with h_k = h_{k+1}, checked one step further.
/// The jets may be transported along an arrow at o first (which must not change anything).
inline FiltrationReport isotropy_filtration(const RealizedLieAlgebra& a, int depth_max = 8,
                                            const std::optional<Arrow>& conjugate = std::nullopt)
{
    if (depth_max < 1) {
        throw order_error("depth_max must be at least 1");
    }
    if (conjugate && conjugate->source() != a.base()) {
        throw base_point_error("conjugating arrow does not start at the base point");
    }
    FiltrationReport rep;
    rep.depth_max = depth_max;
    rep.transitive = a.transitive();
    const std::size_t d = a.dim();
    std::vector<std::vector<Vector>> h;
    auto level = [&](int k) {
        std::vector<Vector> cols;
        for (std::size_t b = 0; b < d; ++b) {
            auto jet = a.sigma(a.algebra().unit(b), k);
            if (conjugate) {
                if (conjugate->order() < k + 1) {
                    throw order_error("conjugating arrow has too low an order for depth_max");
                }
                jet = pushforward_vector_jet(project(*conjugate, k + 1), jet);
            }
            cols.push_back(to_fiber_vector(jet));
        }
        return nullspace(Matrix::from_columns(cols, vector_fiber_dimension(a.chart_dim(), k)));
    };
    for (int k = 0; k <= depth_max; ++k) {
        h.push_back(level(k));
        rep.dims.push_back(h.back().size());
        const auto kk = static_cast<std::size_t>(k);
        if (!rep.order && k >= 1 && detail::same_span(d, h[kk - 1], h[kk])) {
            rep.order = k - 1;
        }
        if (rep.order && k == *rep.order + 2) {
            rep.stabilized = detail::same_span(d, h[kk - 1], h[kk]);
            break;
        }
    }
    if (!rep.order || !rep.stabilized) {
        rep.order.reset();
        rep.stabilized = false;
        return rep;
    }
    rep.ghost = h[static_cast<std::size_t>(*rep.order)];
    rep.ghost_is_ideal = is_ideal(a.algebra(), rep.ghost);
    rep.ghost_is_kernel = detail::same_span(d, rep.ghost, realization_kernel(a));
    if (rep.ghost_is_ideal != rep.ghost_is_kernel) {
        throw domain_error("stabilized isotropy subspace: ideal test and realization-kernel test disagree");
    }
    return rep;
}

struct SigmaCheck {
    bool ok = true;
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// pi_{m,m-1} sigma_m[X, Y] = {sigma_m X, sigma_m Y} on all basis pairs.
inline SigmaCheck sigma_homomorphism_check(const RealizedLieAlgebra& a, int m)
{
    if (m < 1) {
        throw order_error("sigma homomorphism check needs m >= 1");
    }
    const auto& g = a.algebra();
    for (std::size_t i = 0; i < g.dim(); ++i) {
        for (std::size_t j = i + 1; j < g.dim(); ++j) {
            const auto lhs = project(a.sigma(g.bracket(g.unit(i), g.unit(j)), m), m - 1);
            const auto rhs = algebraic_bracket(a.sigma(g.unit(i), m), a.sigma(g.unit(j), m));
            if (lhs != rhs) {
                return {false, std::make_pair(i, j)};
            }
        }
    }
    return {};
}

inline std::size_t sigma_rank(const RealizedLieAlgebra& a, int m) { return rank(sigma_matrix(a, m)); }

// ---------------------------------------------------------------------------
// built-in realizations

namespace realizations {

/// The affine line: e0 -> -x d, e1 -> d.
inline RealizedLieAlgebra affine_line()
{
    const Poly x = Poly::variable(1, 0);
    return RealizedLieAlgebra(lie_algebras::affine_line(), {{-x}, {Poly::constant(1, Scalar(1))}});
}

/// sl(2) on the line: h -> -2x d, e -> d, f -> -x^2 d.
inline RealizedLieAlgebra projective_line()
{
    const Poly x = Poly::variable(1, 0);
    return RealizedLieAlgebra(lie_algebras::sl2(),
                              {{Scalar(-2) * x}, {Poly::constant(1, Scalar(1))}, {Scalar(-1) * x * x}});
}

/// gl(n+1) acting on the affine chart x -> [x : 1] of RP^n: the matrix E_ab maps to -V, with
/// V^i = M x + M_{., n+1} - x_i (M_{n+1, .} x + M_{n+1, n+1}).
inline RealizedLieAlgebra projective_space(std::size_t n)
{
    if (n == 0) {
        throw dimension_error("projective space of dimension 0");
    }
    const std::size_t m = n + 1;
    auto coord = [n](std::size_t j) { return j < n ? Poly::variable(n, j) : Poly::constant(n, Scalar(1)); };
    std::vector<PolyField> fields;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            // M = E_ab: (M y)_i = delta_ia y_b
            PolyField v(n, Poly(n));
            for (std::size_t i = 0; i < n; ++i) {
                if (a == i) {
                    v[i] += coord(b);
                }
                if (a == n) {
                    v[i] -= coord(i) * coord(b);
                }
            }
            for (auto& p : v) {
                p = -p;
            }
            fields.push_back(std::move(v));
        }
    }
    return RealizedLieAlgebra(lie_algebras::gl(m), std::move(fields));
}

} // namespace realizations

} // namespace jetcalc
