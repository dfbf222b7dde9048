#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrow.hpp"
#include "error.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "spencer.hpp"

namespace jetcalc {

enum class StructureKind { metric, two_form };

inline std::string to_string(StructureKind kind)
{
    return kind == StructureKind::metric ? "metric" : "two_form";
}

/// Jet at a base point of a metric g_ij (symmetric) or a two-form w_ij (antisymmetric), stored as derivative values.
class StructureJet {
public:
    StructureJet(StructureKind kind, std::size_t n, int order, Point base = {})
        : kind_(kind), n_(n), order_(order), base_(base.empty() ? origin(n) : std::move(base)),
          entries_(n * n, FunctionJetValue(n, order))
    {
        if (base_.size() != n) {
            throw dimension_error("structure jet base point has wrong dimension");
        }
    }

    /// Jets at base of polynomial entries; entries[i][j] must be symmetric (metric) or antisymmetric (two-form).
    static StructureJet from_polynomials(StructureKind kind, const std::vector<std::vector<Poly>>& entries, int order,
                                         Point base = {})
    {
        const std::size_t n = entries.size();
        StructureJet s(kind, n, order, std::move(base));
        for (std::size_t i = 0; i < n; ++i) {
            if (entries[i].size() != n) {
                throw dimension_error("structure entries are not a square table");
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const Poly other = kind == StructureKind::metric ? entries[j][i] : -entries[j][i];
                if (entries[i][j] != other) {
                    throw domain_error(kind == StructureKind::metric ? "metric entries are not symmetric"
                                                                     : "two-form entries are not antisymmetric");
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const auto jet = evaluate_at(prolong_function(entries[i][j], order), s.base_);
                for (std::size_t r = 0; r < jet.slot_count(); ++r) {
                    s.set(i, j, multi_indices_up_to(n, order)[r], jet.at(r));
                }
            }
        }
        return s;
    }

    [[nodiscard]] StructureKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] const Point& base() const noexcept { return base_; }

    /// The derivative value d^alpha of the (i, j) entry at the base point.
    [[nodiscard]] const Scalar& operator()(std::size_t i, std::size_t j, const MultiIndex& alpha) const
    {
        return entries_.at(i * n_ + j)[alpha];
    }

    /// Sets the (i, j) entry and its mirror (j, i) according to the symmetry type.
    void set(std::size_t i, std::size_t j, const MultiIndex& alpha, const Scalar& value)
    {
        if (i >= n_ || j >= n_) {
            throw dimension_error("structure index out of range");
        }
        if (kind_ == StructureKind::two_form && i == j && value != 0) {
            throw domain_error("diagonal entries of a two-form vanish");
        }
        entries_[i * n_ + j][alpha] = value;
        entries_[j * n_ + i][alpha] = kind_ == StructureKind::metric ? value : Scalar(-value);
    }

    [[nodiscard]] Matrix order_zero() const
    {
        Matrix m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                m(i, j) = (*this)(i, j, MultiIndex(n_));
            }
        }
        return m;
    }

private:
    StructureKind kind_;
    std::size_t n_;
    int order_;
    Point base_;
    std::vector<FunctionJetValue> entries_;
};

/// Linear equations on the g_k fiber at a base point: rows of the coefficient matrix over fiber coordinates.
struct LinearSystem {
    std::size_t n = 0;
    int k = 0;
    Point base;
    Matrix equations;
};

/// A subspace of the g_k fiber at a point, given by a linearly independent basis.
class LinearJetSubspace {
public:
    LinearJetSubspace(std::size_t n, int k, std::vector<Vector> basis, Point base = {})
        : n_(n), k_(k), base_(base.empty() ? origin(n) : std::move(base)), basis_(std::move(basis))
    {
        const std::size_t dim = vector_fiber_dimension(n, k);
        for (const auto& v : basis_) {
            if (v.size() != dim) {
                throw dimension_error("subspace basis vector has wrong length");
            }
        }
        if (!basis_.empty() && rank(Matrix::from_columns(basis_, dim)) != basis_.size()) {
            throw domain_error("subspace basis is linearly dependent");
        }
    }

    /// Independent basis extracted from an arbitrary spanning list.
    static LinearJetSubspace spanned_by(std::size_t n, int k, const std::vector<Vector>& vectors, Point base = {})
    {
        Echelon ech(vector_fiber_dimension(n, k));
        std::vector<Vector> basis;
        for (const auto& v : vectors) {
            if (ech.insert(to_sparse(v))) {
                basis.push_back(v);
            }
        }
        return LinearJetSubspace(n, k, std::move(basis), std::move(base));
    }

    static LinearJetSubspace full(std::size_t n, int k, Point base = {})
    {
        const std::size_t dim = vector_fiber_dimension(n, k);
        std::vector<Vector> basis;
        for (std::size_t s = 0; s < dim; ++s) {
            Vector e(dim);
            e[s] = 1;
            basis.push_back(std::move(e));
        }
        return LinearJetSubspace(n, k, std::move(basis), std::move(base));
    }

    [[nodiscard]] std::size_t dim() const noexcept { return basis_.size(); }
    [[nodiscard]] std::size_t chart_dim() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return k_; }
    [[nodiscard]] const Point& base() const noexcept { return base_; }
    [[nodiscard]] const std::vector<Vector>& basis() const noexcept { return basis_; }

    [[nodiscard]] bool contains(const Vector& v) const
    {
        Echelon ech(vector_fiber_dimension(n_, k_));
        for (const auto& b : basis_) {
            ech.insert(to_sparse(b));
        }
        return ech.contains(to_sparse(v));
    }

    /// Same subspace (as sets), possibly with different bases.
    friend bool same_subspace(const LinearJetSubspace& a, const LinearJetSubspace& b)
    {
        if (a.n_ != b.n_ || a.k_ != b.k_ || a.dim() != b.dim()) {
            return false;
        }
        for (const auto& v : b.basis_) {
            if (!a.contains(v)) {
                return false;
            }
        }
        return true;
    }

private:
    std::size_t n_;
    int k_;
    Point base_;
    std::vector<Vector> basis_;
};

inline LinearJetSubspace solution_space(const LinearSystem& sys)
{
    return LinearJetSubspace(sys.n, sys.k, nullspace(sys.equations), sys.base);
}

namespace detail {

/// Prolonged L_X s = 0 for a metric or two-form jet s: for each pair (i, j) and |alpha| <= k-1,
/// sum_{beta <= alpha} C(alpha, beta) [xi^a_beta s_{ij, alpha-beta+e_a} + s_{aj, alpha-beta} xi^a_{beta+e_i}
///                                     + s_{ia, alpha-beta} xi^a_{beta+e_j}] = 0.
inline LinearSystem lie_derivative_system(const StructureJet& s, int k, bool strict_upper)
{
    const std::size_t n = s.dim();
    if (k < 1) {
        throw order_error("structure systems start at order 1");
    }
    if (s.order() < k) {
        throw order_error("insufficient structure-jet order: order " + std::to_string(k) + " needs the " +
                          std::to_string(k) + "-jet of the structure, got " + std::to_string(s.order()));
    }
    const std::size_t dim = vector_fiber_dimension(n, k);
    LinearSystem sys{n, k, s.base(), Matrix(0, dim)};
    for (const auto& alpha : multi_indices_up_to(n, k - 1)) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = strict_upper ? i + 1 : i; j < n; ++j) {
                Vector row(dim);
                for (const auto& beta : multi_indices_up_to(n, alpha.order())) {
                    if (!alpha.contains(beta)) {
                        continue;
                    }
                    const Scalar c = multi_binomial(alpha, beta);
                    const MultiIndex gamma = alpha - beta;
                    for (std::size_t a = 0; a < n; ++a) {
                        row[fiber_coordinate(n, a, beta)] += c * s(i, j, gamma.raised(a));
                        row[fiber_coordinate(n, a, beta.raised(i))] += c * s(a, j, gamma);
                        row[fiber_coordinate(n, a, beta.raised(j))] += c * s(i, a, gamma);
                    }
                }
                if (std::any_of(row.begin(), row.end(), [](const Scalar& v) { return v != 0; })) {
                    sys.equations.append_row(row);
                }
            }
        }
    }
    return sys;
}

} // namespace detail

/// Infinitesimal isometries of order k: the prolonged Killing equations.  Uses the k-jet of g.
inline LinearSystem killing_system(const StructureJet& g, int k)
{
    if (g.kind() != StructureKind::metric) {
        throw domain_error("killing_system needs a metric jet");
    }
    if (determinant(g.order_zero()) == 0) {
        throw domain_error("singular metric");
    }
    return detail::lie_derivative_system(g, k, false);
}

/// dw = 0 checked on all slots available from the supplied jet.
inline bool is_closed(const StructureJet& w)
{
    if (w.kind() != StructureKind::two_form) {
        throw domain_error("closedness is defined for two-forms");
    }
    const std::size_t n = w.dim();
    for (const auto& alpha : multi_indices_up_to(n, w.order() - 1)) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t l = j + 1; l < n; ++l) {
                    if (w(j, l, alpha.raised(i)) - w(i, l, alpha.raised(j)) + w(i, j, alpha.raised(l)) != 0) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

struct SymplecticOptions {
    bool require_closed = false;
    bool require_nondegenerate = true;
};

/// Infinitesimal symplectomorphisms of order k: prolonged L_X w = 0.  Uses the k-jet of w.
inline LinearSystem symplectic_system(const StructureJet& w, int k, SymplecticOptions opts = {})
{
    if (w.kind() != StructureKind::two_form) {
        throw domain_error("symplectic_system needs a two-form jet");
    }
    if (opts.require_nondegenerate) {
        if (w.dim() % 2 != 0) {
            throw dimension_error("a nondegenerate two-form needs an even chart dimension");
        }
        if (determinant(w.order_zero()) == 0) {
            throw domain_error("two-form is degenerate at the base point");
        }
    }
    if (opts.require_closed && !is_closed(w)) {
        throw domain_error("two-form is not closed to the supplied order");
    }
    return detail::lie_derivative_system(w, k, true);
}

inline LinearSystem structure_system(const StructureJet& s, int k)
{
    return s.kind() == StructureKind::metric ? killing_system(s, k) : symplectic_system(s, k);
}

// ---------------------------------------------------------------------------
// prolongation

struct ProlongationLevel {
    int k = 0;
    std::size_t solution_dim = 0;
    std::size_t projection_rank = 0; // rank of pi_{k,k-1} restricted to the order-k solutions
    std::size_t lower_dim = 0;       // dimension of the order-(k-1) solutions (the full g_0 fiber at k = 1)
    bool surjective = false;
    std::size_t kernel_dim = 0; // the symbol: solutions with vanishing (k-1)-jet
    [[nodiscard]] bool bijective() const { return surjective && kernel_dim == 0; }
};

struct ProlongationReport {
    int k_max = 0;
    std::vector<ProlongationLevel> levels;

    [[nodiscard]] std::vector<std::size_t> dims() const
    {
        std::vector<std::size_t> out;
        for (const auto& l : levels) {
            out.push_back(l.solution_dim);
        }
        return out;
    }

    /// Surjectivity of pi_{k,k-1} on solutions for all 2 <= k <= k_max (k = 1 is the anchor).
    [[nodiscard]] bool all_surjective() const
    {
        for (const auto& l : levels) {
            if (l.k >= 2 && !l.surjective) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] bool all_bijective() const
    {
        for (const auto& l : levels) {
            if (l.k >= 2 && !l.bijective()) {
                return false;
            }
        }
        return true;
    }
};

/// Rank of the truncation of a subspace basis to the order-m fiber coordinates.
inline std::size_t projected_rank(const LinearJetSubspace& s, int m)
{
    const std::size_t low = vector_fiber_dimension(s.chart_dim(), m);
    std::vector<Vector> cut;
    for (const auto& v : s.basis()) {
        cut.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(low));
    }
    return cut.empty() ? 0 : rank(Matrix::from_columns(cut, low));
}

inline ProlongationReport prolongation_report(const std::function<LinearJetSubspace(int)>& solutions, int k_max)
{
    if (k_max < 1) {
        throw order_error("k_max must be at least 1");
    }
    ProlongationReport rep;
    rep.k_max = k_max;
    std::optional<std::size_t> lower;
    for (int k = 1; k <= k_max; ++k) {
        const auto sol = solutions(k);
        ProlongationLevel level;
        level.k = k;
        level.solution_dim = sol.dim();
        level.projection_rank = projected_rank(sol, k - 1);
        level.lower_dim = lower ? *lower : vector_fiber_dimension(sol.chart_dim(), 0);
        level.surjective = level.projection_rank == level.lower_dim;
        level.kernel_dim = level.solution_dim - level.projection_rank;
        rep.levels.push_back(level);
        lower = sol.dim();
    }
    return rep;
}

inline ProlongationReport prolongation_report(const StructureJet& s, int k_max)
{
    if (s.order() < k_max) {
        throw order_error("insufficient jet data: k_max = " + std::to_string(k_max) + " needs the structure to order " +
                          std::to_string(k_max));
    }
    return prolongation_report([&](int k) { return solution_space(structure_system(s, k)); }, k_max);
}

// ---------------------------------------------------------------------------
// Levi-Civita

/// Gamma^i_{jk}, indexed gamma[i][j][k].
struct Christoffel {
    std::size_t n = 0;
    std::vector<std::vector<std::vector<Scalar>>> gamma;

    [[nodiscard]] const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const { return gamma[i][j][k]; }
};

/// Gamma^i_{jk} = 1/2 g^{ia} (g_{aj,k} + g_{ak,j} - g_{jk,a}) from the 1-jet of g.
inline Christoffel levi_civita(const StructureJet& g)
{
    if (g.kind() != StructureKind::metric) {
        throw domain_error("levi_civita needs a metric jet");
    }
    if (g.order() < 1) {
        throw order_error("levi_civita needs the 1-jet of the metric");
    }
    const std::size_t n = g.dim();
    const auto inv = inverse(g.order_zero());
    if (!inv) {
        throw domain_error("singular metric");
    }
    Christoffel c{n, std::vector<std::vector<std::vector<Scalar>>>(n, std::vector<std::vector<Scalar>>(n, std::vector<Scalar>(n)))};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                Scalar sum = 0;
                for (std::size_t a = 0; a < n; ++a) {
                    sum += (*inv)(i, a) * (g(a, j, MultiIndex::unit(n, k)) + g(a, k, MultiIndex::unit(n, j)) -
                                           g(j, k, MultiIndex::unit(n, a)));
                }
                c.gamma[i][j][k] = sum / 2;
            }
        }
    }
    return c;
}

/// Second-order slots of an isometry jet with vanishing order-0 part:
/// xi^i_{jk} = Gamma^m_{jk} xi^i_m - Gamma^i_{jl} xi^l_k - Gamma^i_{kl} xi^l_j.
inline VectorJetValue isotropy_completion(const Christoffel& c, const VectorJetValue& first_order)
{
    const std::size_t n = c.n;
    if (first_order.dim() != n || first_order.order() != 1) {
        throw order_error("isotropy completion takes a 1-jet");
    }
    auto d1 = [&](std::size_t i, std::size_t m) -> const Scalar& { return first_order(i, MultiIndex::unit(n, m)); };
    VectorJetValue out = lift_zero(first_order, 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = j; k < n; ++k) {
                Scalar v = 0;
                for (std::size_t m = 0; m < n; ++m) {
                    v += c(m, j, k) * d1(i, m) - c(i, j, m) * d1(m, k) - c(i, k, m) * d1(m, j);
                }
                out(i, MultiIndex::unit(n, j).raised(k)) = v;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Atiyah sequence, bracket closure, Ad action, order

struct AtiyahReport {
    std::size_t n = 0;
    int k = 0;
    std::size_t solution_dim = 0;
    std::size_t anchor_rank = 0;
    std::size_t isotropy_dim = 0; // dim of solutions with vanishing order-0 part
    bool anchor_surjective = false;
    bool kernel_identity = false; // isotropy_dim == solution_dim - n
    [[nodiscard]] bool exact() const { return anchor_surjective && kernel_identity; }
};

/// 0 -> isotropy -> solutions -> T_x M -> 0 at the base point.
inline AtiyahReport atiyah_exactness(const LinearJetSubspace& s)
{
    AtiyahReport rep;
    rep.n = s.chart_dim();
    rep.k = s.order();
    rep.solution_dim = s.dim();
    rep.anchor_rank = projected_rank(s, 0);
    // isotropy computed independently as the kernel of the anchor restricted to the basis
    const std::size_t n = rep.n;
    Matrix anchor(n, s.dim());
    for (std::size_t b = 0; b < s.dim(); ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            anchor(i, b) = s.basis()[b][i];
        }
    }
    rep.isotropy_dim = nullspace(anchor).size();
    rep.anchor_surjective = rep.anchor_rank == n;
    rep.kernel_identity = rep.solution_dim >= n && rep.isotropy_dim == rep.solution_dim - n;
    return rep;
}

struct ClosureReport {
    bool applicable = true;
    bool closed = true;
    std::optional<std::pair<std::size_t, std::size_t>> witness; // offending pair of spanning sections
    std::optional<std::size_t> outside;                         // a spanning section not in the subspace
};

/// Pointwise closure of a subspace under the Spencer bracket, tested on spanning polynomial sections.
inline ClosureReport bracket_closure_check(const LinearJetSubspace& s, const std::vector<VectorJetSection>& sections)
{
    ClosureReport rep;
    if (sections.empty()) {
        rep.applicable = false;
        return rep;
    }
    for (std::size_t a = 0; a < sections.size(); ++a) {
        if (sections[a].dim() != s.chart_dim() || sections[a].order() != s.order()) {
            throw order_error("spanning section does not match the subspace");
        }
        if (!s.contains(to_fiber_vector(evaluate_at(sections[a], s.base())))) {
            rep.closed = false;
            rep.outside = a;
            return rep;
        }
    }
    for (std::size_t a = 0; a < sections.size(); ++a) {
        for (std::size_t b = a; b < sections.size(); ++b) {
            const auto br = evaluate_at(spencer_bracket(sections[a], sections[b]), s.base());
            if (!s.contains(to_fiber_vector(br))) {
                rep.closed = false;
                rep.witness = std::make_pair(a, b);
                return rep;
            }
        }
    }
    return rep;
}

/// Pushforward of a subspace at source(h) to target(h) along an arrow of order k+1.
inline LinearJetSubspace ad_transform_system(const Arrow& h, const LinearJetSubspace& s)
{
    if (h.dim() != s.chart_dim()) {
        throw dimension_error("arrow and subspace on different charts");
    }
    if (h.order() != s.order() + 1) {
        throw order_error("Ad-transform of an order-k subspace needs an arrow of order k+1");
    }
    if (h.source() != s.base()) {
        throw base_point_error("subspace is not based at the arrow source");
    }
    std::vector<Vector> pushed;
    for (const auto& v : s.basis()) {
        pushed.push_back(to_fiber_vector(pushforward_vector_jet(h, from_fiber_vector(s.chart_dim(), s.order(), v, s.base()))));
    }
    return LinearJetSubspace(s.chart_dim(), s.order(), std::move(pushed), h.target());
}

/// Metric transported along an arrow of order >= r+1: (h.g)(u, v) = g(h^{-1}_* u, h^{-1}_* v), as an r-jet at the target.
inline StructureJet transport_structure(const Arrow& h, const StructureJet& s)
{
    const std::size_t n = s.dim();
    const int r = s.order();
    if (h.order() < r + 1) {
        throw order_error("transporting an r-jet of a tensor needs an arrow of order r+1");
    }
    if (h.source() != s.base()) {
        throw base_point_error("structure jet is not based at the arrow source");
    }
    // pullback along phi = h^{-1} near the target: (phi^* s)_{ij}(y) = s_{ab}(phi(y)) d_i phi^a d_j phi^b
    const Arrow inv = invert_arrow(project(h, r + 1));
    const auto phi = detail::taylor_polynomials(inv.jet(), false); // phi(target + y) - source, in y
    std::vector<std::vector<Poly>> entries(n, std::vector<Poly>(n, Poly(n)));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            FunctionJetValue e(n, r);
            for (const auto& alpha : multi_indices_up_to(n, r)) {
                e[alpha] = s(a, b, alpha);
            }
            const Poly sab = detail::compose_truncated(detail::taylor_polynomial(e), phi, r);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    entries[i][j] += Poly::multiply(Poly::multiply(sab, phi[a].derivative(i), r), phi[b].derivative(j), r);
                }
            }
        }
    }
    StructureJet out(s.kind(), n, r, h.target());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const auto jet = detail::jet_from_taylor(entries[i][j], r, h.target());
            for (const auto& alpha : multi_indices_up_to(n, r)) {
                out.set(i, j, alpha, jet[alpha]);
            }
        }
    }
    return out;
}

struct SystemOrderReport {
    int k_max = 0;
    std::vector<std::size_t> dims;
    std::optional<int> order; // empty: not stabilized within k_max
};

/// Least m < k_max with pi_{m+1,m} a bijection from order-(m+1) solutions onto order-m solutions.
inline SystemOrderReport klein_order_of_system(const std::function<LinearJetSubspace(int)>& solutions, int k_max)
{
    const auto rep = prolongation_report(solutions, k_max);
    SystemOrderReport out;
    out.k_max = k_max;
    out.dims = rep.dims();
    for (const auto& l : rep.levels) {
        if (l.k >= 2 && l.bijective()) {
            out.order = l.k - 1;
            break;
        }
    }
    return out;
}

/// Subspace spanned by the k-jets at base of polynomial vector fields.
inline LinearJetSubspace span_of_field_jets(const std::vector<std::vector<Poly>>& fields, int k, const Point& base)
{
    if (fields.empty()) {
        throw dimension_error("no fields given");
    }
    const std::size_t n = fields.front().size();
    std::vector<Vector> vectors;
    for (const auto& f : fields) {
        vectors.push_back(to_fiber_vector(evaluate_at(prolong_vector_field(f, k), base)));
    }
    return LinearJetSubspace::spanned_by(n, k, vectors, base);
}

} // namespace jetcalc
