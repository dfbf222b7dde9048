#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "error.hpp"
#include "jet.hpp"
#include "lie_algebra.hpp"
#include "multi_index.hpp"
#include "poly.hpp"
#include "random.hpp"

namespace jetcalc {

/// A section of T* (x) J_k or T* (x) g_k: one jet table per coordinate covector dx_j.
template <class Jet>
class CovectorIndexedSection {
public:
    CovectorIndexedSection() = default;
    explicit CovectorIndexedSection(std::vector<Jet> parts) : parts_(std::move(parts))
    {
        if (parts_.empty()) {
            throw dimension_error("covector-indexed section with no parts");
        }
        for (const auto& p : parts_) {
            if (p.dim() != parts_.size() || p.order() != parts_.front().order()) {
                throw dimension_error("covector-indexed parts have inconsistent shape");
            }
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return parts_.size(); }
    [[nodiscard]] int order() const { return parts_.front().order(); }
    [[nodiscard]] const Jet& operator[](std::size_t j) const { return parts_.at(j); }
    [[nodiscard]] const std::vector<Jet>& parts() const noexcept { return parts_; }

    [[nodiscard]] bool is_zero() const
    {
        for (const auto& p : parts_) {
            if (!p.is_zero()) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const CovectorIndexedSection&, const CovectorIndexedSection&) = default;

private:
    std::vector<Jet> parts_;
};

/// How the order-(k+1) slots are chosen when a formula needs a lift of an order-k section.
struct LiftPolicy {
    enum class Kind { zero_extension, randomized };
    Kind kind = Kind::zero_extension;
    std::uint64_t seed = 0;
    int degree = 2;

    static LiftPolicy zero_extension() { return {}; }
    static LiftPolicy randomized(std::uint64_t seed, int degree = 2) { return {Kind::randomized, seed, degree}; }
};

namespace detail {

inline FunctionJetSection lift(const FunctionJetSection& f, RandomSource* rng, int degree)
{
    FunctionJetSection out = lift_zero(f, f.order() + 1);
    if (rng != nullptr) {
        for (const auto& alpha : multi_indices_of_order(f.dim(), f.order() + 1)) {
            out[alpha] = rng->poly(f.dim(), degree);
        }
    }
    return out;
}

inline VectorJetSection lift(const VectorJetSection& x, RandomSource* rng, int degree)
{
    VectorJetSection out(x.dim(), x.order() + 1);
    for (std::size_t i = 0; i < x.dim(); ++i) {
        out.component(i) = lift(x.component(i), rng, degree);
    }
    return out;
}

} // namespace detail

/// The vector field part (xi^1_0, ..., xi^n_0) of a section.
inline std::vector<Poly> vector_part(const VectorJetSection& x)
{
    std::vector<Poly> out;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        out.push_back(x.component(i).at(0));
    }
    return out;
}

/// Classical bracket [X, Y]^i = X^a d_a Y^i - Y^a d_a X^i of polynomial vector fields.
inline std::vector<Poly> lie_bracket_fields(const std::vector<Poly>& x, const std::vector<Poly>& y)
{
    if (x.size() != y.size() || x.empty()) {
        throw dimension_error("vector fields of different dimension");
    }
    const std::size_t n = x.size();
    std::vector<Poly> out(n, Poly(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            out[i] += x[a] * y[i].derivative(a);
            out[i] -= y[a] * x[i].derivative(a);
        }
    }
    return out;
}

/// {X, Y}^i_alpha = sum_{beta <= alpha} C(alpha, beta)(xi^a_beta eta^i_{alpha-beta+e_a} - eta^a_beta xi^i_{alpha-beta+e_a}),
/// |alpha| <= k - 1.  Works pointwise (C = Scalar) and on sections (C = Poly).
template <CoefficientRing C>
VectorJet<C> algebraic_bracket(const VectorJet<C>& x, const VectorJet<C>& y)
{
    x.check_compatible(y);
    const int k = x.order();
    if (k < 1) {
        throw order_error("the algebraic bracket needs jets of order >= 1");
    }
    const std::size_t n = x.dim();
    VectorJet<C> out(n, k - 1);
    const auto alphas = multi_indices_up_to(n, k - 1);
    for (const auto& alpha : alphas) {
        for (const auto& beta : alphas) {
            if (beta.order() > alpha.order()) {
                break;
            }
            if (!alpha.contains(beta)) {
                continue;
            }
            const Scalar c = multi_binomial(alpha, beta);
            const MultiIndex rest = alpha - beta;
            for (std::size_t a = 0; a < n; ++a) {
                const MultiIndex up = rest.raised(a);
                const C& xa = x(a, beta);
                const C& ya = y(a, beta);
                const bool xz = coeff_traits<C>::is_zero(xa);
                const bool yz = coeff_traits<C>::is_zero(ya);
                if (xz && yz) {
                    continue;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    C& slot = out(i, alpha);
                    if (!xz) {
                        slot = slot + (xa * y(i, up)) * c;
                    }
                    if (!yz) {
                        slot = slot - (ya * x(i, up)) * c;
                    }
                }
            }
        }
    }
    out.set_base(x.base().empty() ? y.base() : x.base());
    return out;
}

/// (Ds)_j: slot (i, alpha) = d_j xi^i_alpha - xi^i_{alpha+e_j}, |alpha| <= k, for s of order k+1.
inline CovectorIndexedSection<FunctionJetSection> spencer_operator_fun(const FunctionJetSection& f)
{
    if (f.order() < 1) {
        throw order_error("the Spencer operator needs a section of order >= 1");
    }
    const std::size_t n = f.dim();
    const int k = f.order() - 1;
    const auto alphas = multi_indices_up_to(n, k);
    std::vector<FunctionJetSection> parts;
    for (std::size_t j = 0; j < n; ++j) {
        FunctionJetSection part(n, k);
        for (std::size_t r = 0; r < alphas.size(); ++r) {
            part.at(r) = f.at(r).derivative(j) - f[alphas[r].raised(j)];
        }
        parts.push_back(std::move(part));
    }
    return CovectorIndexedSection<FunctionJetSection>(std::move(parts));
}

inline CovectorIndexedSection<VectorJetSection> spencer_operator_vec(const VectorJetSection& x)
{
    const std::size_t n = x.dim();
    std::vector<CovectorIndexedSection<FunctionJetSection>> comps;
    for (std::size_t i = 0; i < n; ++i) {
        comps.push_back(spencer_operator_fun(x.component(i)));
    }
    std::vector<VectorJetSection> parts;
    for (std::size_t j = 0; j < n; ++j) {
        VectorJetSection part(n, x.order() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            part.component(i) = comps[i][j];
        }
        parts.push_back(std::move(part));
    }
    return CovectorIndexedSection<VectorJetSection>(std::move(parts));
}

/// i(v) of a covector-indexed section: sum_j v^j (part j).
template <class Jet>
Jet contract(const std::vector<Poly>& v, const CovectorIndexedSection<Jet>& s)
{
    if (v.size() != s.dim()) {
        throw dimension_error("contraction with a vector of wrong dimension");
    }
    Jet out = s[0];
    out.scale(v[0]);
    for (std::size_t j = 1; j < v.size(); ++j) {
        Jet t = s[j];
        t.scale(v[j]);
        out += t;
    }
    return out;
}

/// [X, Y] = {X', Y'} + i(X_0) D Y' - i(Y_0) D X' for lifts X', Y' of order k+1; independent of the lifts.
inline VectorJetSection spencer_bracket(const VectorJetSection& x, const VectorJetSection& y,
                                        const LiftPolicy& policy = {})
{
    x.check_compatible(y);
    RandomSource rng(policy.seed);
    RandomSource* src = policy.kind == LiftPolicy::Kind::randomized ? &rng : nullptr;
    const VectorJetSection x1 = detail::lift(x, src, policy.degree);
    const VectorJetSection y1 = detail::lift(y, src, policy.degree);
    VectorJetSection out = algebraic_bracket(x1, y1);
    out += contract(vector_part(x), spencer_operator_vec(y1));
    out -= contract(vector_part(y), spencer_operator_vec(x1));
    return out;
}

/// (X * f)_alpha = sum_{beta <= alpha} C(alpha, beta) xi^a_beta f_{alpha-beta+e_a}, for X of order k and f of order k+1.
template <CoefficientRing C>
JetTable<C> algebraic_action_star(const VectorJet<C>& x, const JetTable<C>& f)
{
    if (x.dim() != f.dim()) {
        throw dimension_error("jet action on a chart of different dimension");
    }
    if (f.order() != x.order() + 1) {
        throw order_error("X * f needs order(f) = order(X) + 1");
    }
    const std::size_t n = x.dim();
    const int k = x.order();
    JetTable<C> out(n, k);
    const auto alphas = multi_indices_up_to(n, k);
    for (const auto& alpha : alphas) {
        C acc = coeff_traits<C>::zero(n);
        for (const auto& beta : alphas) {
            if (beta.order() > alpha.order()) {
                break;
            }
            if (!alpha.contains(beta)) {
                continue;
            }
            const Scalar c = multi_binomial(alpha, beta);
            const MultiIndex rest = alpha - beta;
            for (std::size_t a = 0; a < n; ++a) {
                if (!coeff_traits<C>::is_zero(x(a, beta))) {
                    acc = acc + (x(a, beta) * f[rest.raised(a)]) * c;
                }
            }
        }
        out[alpha] = std::move(acc);
    }
    out.set_base(x.base().empty() ? f.base() : x.base());
    return out;
}

/// X f = X * f' + i(X_0) D f' for a lift f' of order k+1; independent of the lift.
inline FunctionJetSection jet_action(const VectorJetSection& x, const FunctionJetSection& f,
                                     const LiftPolicy& policy = {})
{
    if (x.dim() != f.dim()) {
        throw dimension_error("jet action on a chart of different dimension");
    }
    if (x.order() != f.order()) {
        throw order_error("jet action needs sections of equal order");
    }
    RandomSource rng(policy.seed);
    RandomSource* src = policy.kind == LiftPolicy::Kind::randomized ? &rng : nullptr;
    const FunctionJetSection f1 = detail::lift(f, src, policy.degree);
    FunctionJetSection out = algebraic_action_star(x, f1);
    out += contract(vector_part(x), spencer_operator_fun(f1));
    return out;
}

// ---------------------------------------------------------------------------
// J_{k,0}: jets at a point with vanishing vector part

/// J_{k,0}(T)_p with the algebraic bracket; basis = slots (i, alpha), 1 <= |alpha| <= k, in fiber order.
struct JetGroupAlgebra {
    std::size_t n = 0;
    int k = 0;
    std::vector<std::pair<std::size_t, MultiIndex>> slots;
    FiniteLieAlgebra algebra;

    [[nodiscard]] std::size_t dim() const noexcept { return slots.size(); }

    /// The fiber element of J_k with the given coordinates on the basis.
    [[nodiscard]] VectorJetValue jet(const Vector& coords) const
    {
        VectorJetValue x(n, k);
        for (std::size_t b = 0; b < slots.size(); ++b) {
            x(slots[b].first, slots[b].second) = coords.at(b);
        }
        return x;
    }

    [[nodiscard]] Vector coordinates(const VectorJetValue& x) const
    {
        Vector out(slots.size());
        for (std::size_t b = 0; b < slots.size(); ++b) {
            out[b] = x(slots[b].first, slots[b].second);
        }
        return out;
    }

    /// Index of the basis element for slot (i, alpha).
    [[nodiscard]] std::size_t index_of(std::size_t i, const MultiIndex& alpha) const
    {
        return fiber_coordinate(n, i, alpha) - n;
    }
};

/// The bracket on J_{k,0}: with vanishing order-0 parts the order-k slots of {X', Y'} do not depend on the lift.
inline VectorJetValue jet_group_bracket(const VectorJetValue& x, const VectorJetValue& y)
{
    for (std::size_t i = 0; i < x.dim(); ++i) {
        if (x(i, MultiIndex(x.dim())) != 0 || y(i, MultiIndex(y.dim())) != 0) {
            throw domain_error("J_{k,0} elements have zero vector part");
        }
    }
    return algebraic_bracket(lift_zero(x, x.order() + 1), lift_zero(y, y.order() + 1));
}

inline JetGroupAlgebra jet_group_algebra(std::size_t n, int k)
{
    if (k < 1) {
        throw order_error("J_{k,0} needs k >= 1");
    }
    JetGroupAlgebra g;
    g.n = n;
    g.k = k;
    const std::size_t total = vector_fiber_dimension(n, k);
    for (std::size_t s = n; s < total; ++s) {
        g.slots.push_back(fiber_slot(n, k, s));
    }
    const std::size_t d = g.slots.size();
    std::vector<VectorJetValue> units;
    for (std::size_t b = 0; b < d; ++b) {
        Vector e(d);
        e[b] = 1;
        units.push_back(g.jet(e));
    }
    StructureConstants c(d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            const Vector coords = g.coordinates(jet_group_bracket(units[a], units[b]));
            for (std::size_t t = 0; t < d; ++t) {
                if (coords[t] != 0) {
                    c.set_antisymmetric(a, b, t, coords[t]);
                }
            }
        }
    }
    g.algebra = FiniteLieAlgebra(c);
    return g;
}

/// Basis (in J_{k,0} coordinates) of the kernel of J_{k,0} -> J_{m,0}: slots with |alpha| > m.
inline std::vector<Vector> jet_group_kernel(const JetGroupAlgebra& g, int m)
{
    if (m < 0 || m > g.k) {
        throw order_error("projection order out of range");
    }
    std::vector<Vector> out;
    for (std::size_t b = 0; b < g.dim(); ++b) {
        if (g.slots[b].second.order() > m) {
            Vector e(g.dim());
            e[b] = 1;
            out.push_back(std::move(e));
        }
    }
    return out;
}

} // namespace jetcalc
