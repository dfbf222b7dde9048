#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "poly.hpp"
#include "scalar.hpp"

namespace jetcalc {

/// Slots f_alpha, |alpha| <= k, of a jet of functions on an n-dimensional chart.
///
/// A slot stores the derivative value partial^alpha f (not the Taylor
/// coefficient).  Slots are independent: nothing forces
/// f_{alpha + e_j} = partial_j f_alpha.  With C = Poly the table is a section
/// of J_k over the chart; with C = Scalar it is a single fiber element, and
/// base() records the point it lives over (empty when unknown).
template <CoefficientRing C>
class JetTable {
public:
    JetTable() = default;

    JetTable(std::size_t n, int k) : n_(n), k_(k)
    {
        if (n == 0) {
            throw dimension_error("jets on a zero-dimensional chart are not supported");
        }
        if (k < 0) {
            throw order_error("negative jet order");
        }
        slots_.assign(jet_slot_count(n, k), coeff_traits<C>::zero(n));
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return k_; }
    [[nodiscard]] std::size_t slot_count() const noexcept { return slots_.size(); }

    [[nodiscard]] const C& operator[](const MultiIndex& alpha) const { return slots_[index_of(alpha)]; }
    C& operator[](const MultiIndex& alpha) { return slots_[index_of(alpha)]; }

    /// Slot by position in the graded enumeration.
    [[nodiscard]] const C& at(std::size_t rank) const { return slots_.at(rank); }
    C& at(std::size_t rank) { return slots_.at(rank); }

    [[nodiscard]] const std::vector<C>& slots() const noexcept { return slots_; }

    [[nodiscard]] const Point& base() const noexcept { return base_; }
    void set_base(Point p) { base_ = std::move(p); }

    [[nodiscard]] bool is_zero() const
    {
        for (const auto& s : slots_) {
            if (!coeff_traits<C>::is_zero(s)) {
                return false;
            }
        }
        return true;
    }

    JetTable& operator+=(const JetTable& o)
    {
        check_compatible(o);
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            slots_[i] = slots_[i] + o.slots_[i];
        }
        return *this;
    }

    JetTable& operator-=(const JetTable& o)
    {
        check_compatible(o);
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            slots_[i] = slots_[i] - o.slots_[i];
        }
        return *this;
    }

    /// Multiplies every slot by c (the module structure over functions or scalars).
    JetTable& scale(const C& c)
    {
        for (auto& s : slots_) {
            s = s * c;
        }
        return *this;
    }

    friend JetTable operator+(JetTable a, const JetTable& b) { return a += b; }
    friend JetTable operator-(JetTable a, const JetTable& b) { return a -= b; }
    friend JetTable operator*(const C& c, JetTable a) { return a.scale(c); }

    friend bool operator==(const JetTable& a, const JetTable& b)
    {
        return a.n_ == b.n_ && a.k_ == b.k_ && a.slots_ == b.slots_;
    }

    void check_compatible(const JetTable& o) const
    {
        if (n_ != o.n_) {
            throw dimension_error("jets on charts of different dimension");
        }
        if (k_ != o.k_) {
            throw order_error("jets of different order");
        }
        if (!base_.empty() && !o.base_.empty() && base_ != o.base_) {
            throw base_point_error("jets based at different points");
        }
    }

private:
    [[nodiscard]] std::size_t index_of(const MultiIndex& alpha) const
    {
        if (alpha.size() != n_) {
            throw dimension_error("multi-index length does not match jet dimension");
        }
        if (alpha.order() > k_) {
            throw order_error("multi-index order exceeds jet order");
        }
        return multi_index_rank(alpha);
    }

    std::size_t n_ = 0;
    int k_ = 0;
    std::vector<C> slots_;
    Point base_;
};

/// Slots xi^i_alpha, 1 <= i <= n, |alpha| <= k, of a jet of vector fields.
template <CoefficientRing C>
class VectorJet {
public:
    VectorJet() = default;

    VectorJet(std::size_t n, int k) : n_(n), k_(k), comps_(n, JetTable<C>(n, k)) {}

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return k_; }

    [[nodiscard]] const JetTable<C>& component(std::size_t i) const { return comps_.at(i); }
    JetTable<C>& component(std::size_t i) { return comps_.at(i); }

    [[nodiscard]] const C& operator()(std::size_t i, const MultiIndex& alpha) const { return comps_.at(i)[alpha]; }
    C& operator()(std::size_t i, const MultiIndex& alpha) { return comps_.at(i)[alpha]; }

    /// Dimension n * C(n+k, n) of the fiber.
    [[nodiscard]] std::size_t fiber_dimension() const noexcept { return n_ * jet_slot_count(n_, k_); }

    /// Slot by fiber coordinate s = rank(alpha) * n + i.
    [[nodiscard]] const C& coord(std::size_t s) const { return comps_.at(s % n_).at(s / n_); }
    C& coord(std::size_t s) { return comps_.at(s % n_).at(s / n_); }

    [[nodiscard]] const Point& base() const noexcept { return base_; }
    void set_base(Point p)
    {
        for (auto& c : comps_) {
            c.set_base(p);
        }
        base_ = std::move(p);
    }

    [[nodiscard]] bool is_zero() const
    {
        for (const auto& c : comps_) {
            if (!c.is_zero()) {
                return false;
            }
        }
        return true;
    }

    VectorJet& operator+=(const VectorJet& o)
    {
        check_compatible(o);
        for (std::size_t i = 0; i < n_; ++i) {
            comps_[i] += o.comps_[i];
        }
        return *this;
    }

    VectorJet& operator-=(const VectorJet& o)
    {
        check_compatible(o);
        for (std::size_t i = 0; i < n_; ++i) {
            comps_[i] -= o.comps_[i];
        }
        return *this;
    }

    VectorJet& scale(const C& c)
    {
        for (auto& comp : comps_) {
            comp.scale(c);
        }
        return *this;
    }

    friend VectorJet operator+(VectorJet a, const VectorJet& b) { return a += b; }
    friend VectorJet operator-(VectorJet a, const VectorJet& b) { return a -= b; }
    friend VectorJet operator*(const C& c, VectorJet a) { return a.scale(c); }

    friend bool operator==(const VectorJet& a, const VectorJet& b)
    {
        return a.n_ == b.n_ && a.k_ == b.k_ && a.comps_ == b.comps_;
    }

    void check_compatible(const VectorJet& o) const
    {
        if (n_ != o.n_) {
            throw dimension_error("vector jets on charts of different dimension");
        }
        if (k_ != o.k_) {
            throw order_error("vector jets of different order");
        }
        if (!base_.empty() && !o.base_.empty() && base_ != o.base_) {
            throw base_point_error("vector jets based at different points");
        }
    }

private:
    std::size_t n_ = 0;
    int k_ = 0;
    std::vector<JetTable<C>> comps_;
    Point base_;
};

using FunctionJetSection = JetTable<Poly>;
using VectorJetSection = VectorJet<Poly>;
using FunctionJetValue = JetTable<Scalar>;
using VectorJetValue = VectorJet<Scalar>;

/// Dimension of the fiber of g_k = J_k(T) over an n-dimensional chart.
inline std::size_t vector_fiber_dimension(std::size_t n, int k)
{
    return n * jet_slot_count(n, k);
}

/// Component index and multi-index of fiber coordinate s.
inline std::pair<std::size_t, MultiIndex> fiber_slot(std::size_t n, int k, std::size_t s)
{
    const auto alphas = multi_indices_up_to(n, k);
    return {s % n, alphas.at(s / n)};
}

inline std::size_t fiber_coordinate(std::size_t n, std::size_t i, const MultiIndex& alpha)
{
    return multi_index_rank(alpha) * n + i;
}

// ---------------------------------------------------------------------------
// projections and lifts

template <CoefficientRing C>
JetTable<C> project(const JetTable<C>& f, int m)
{
    if (m < 0 || m > f.order()) {
        throw order_error("projection order out of range");
    }
    JetTable<C> out(f.dim(), m);
    for (std::size_t r = 0; r < out.slot_count(); ++r) {
        out.at(r) = f.at(r);
    }
    out.set_base(f.base());
    return out;
}

template <CoefficientRing C>
VectorJet<C> project(const VectorJet<C>& x, int m)
{
    if (m < 0 || m > x.order()) {
        throw order_error("projection order out of range");
    }
    VectorJet<C> out(x.dim(), m);
    for (std::size_t i = 0; i < x.dim(); ++i) {
        out.component(i) = project(x.component(i), m);
    }
    out.set_base(x.base());
    return out;
}

/// Extends to order m >= order() with the new slots set to zero.
template <CoefficientRing C>
JetTable<C> lift_zero(const JetTable<C>& f, int m)
{
    if (m < f.order()) {
        throw order_error("lift order below jet order");
    }
    JetTable<C> out(f.dim(), m);
    for (std::size_t r = 0; r < f.slot_count(); ++r) {
        out.at(r) = f.at(r);
    }
    out.set_base(f.base());
    return out;
}

template <CoefficientRing C>
VectorJet<C> lift_zero(const VectorJet<C>& x, int m)
{
    if (m < x.order()) {
        throw order_error("lift order below jet order");
    }
    VectorJet<C> out(x.dim(), m);
    for (std::size_t i = 0; i < x.dim(); ++i) {
        out.component(i) = lift_zero(x.component(i), m);
    }
    out.set_base(x.base());
    return out;
}

// ---------------------------------------------------------------------------
// evaluation and fiber coordinates

inline FunctionJetValue evaluate_at(const FunctionJetSection& f, const Point& p)
{
    FunctionJetValue out(f.dim(), f.order());
    for (std::size_t r = 0; r < f.slot_count(); ++r) {
        out.at(r) = f.at(r).evaluate(p);
    }
    out.set_base(p);
    return out;
}

inline VectorJetValue evaluate_at(const VectorJetSection& x, const Point& p)
{
    VectorJetValue out(x.dim(), x.order());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        out.component(i) = evaluate_at(x.component(i), p);
    }
    out.set_base(p);
    return out;
}

inline Vector to_fiber_vector(const VectorJetValue& x)
{
    Vector v(x.fiber_dimension());
    for (std::size_t s = 0; s < v.size(); ++s) {
        v[s] = x.coord(s);
    }
    return v;
}

inline VectorJetValue from_fiber_vector(std::size_t n, int k, const Vector& v, Point base = {})
{
    VectorJetValue x(n, k);
    if (v.size() != x.fiber_dimension()) {
        throw dimension_error("fiber vector has wrong length");
    }
    for (std::size_t s = 0; s < v.size(); ++s) {
        x.coord(s) = v[s];
    }
    x.set_base(std::move(base));
    return x;
}

/// The section with constant slot values (as polynomials) equal to a fiber element.
inline VectorJetSection constant_section(const VectorJetValue& x)
{
    VectorJetSection out(x.dim(), x.order());
    for (std::size_t s = 0; s < x.fiber_dimension(); ++s) {
        out.coord(s) = Poly::constant(x.dim(), x.coord(s));
    }
    return out;
}

/// The constant section E_s: slot s equal to 1, all others 0.
inline VectorJetSection basis_section(std::size_t n, int k, std::size_t s)
{
    VectorJetSection out(n, k);
    out.coord(s) = Poly::constant(n, Scalar(1));
    return out;
}

/// Multiplies every slot of a section by a function.
template <class Jet>
Jet multiply_by_function(const Poly& phi, Jet x)
{
    return x.scale(phi);
}

// ---------------------------------------------------------------------------
// prolongation and holonomy

/// j_k(f): f_alpha = partial^alpha f.
inline FunctionJetSection prolong_function(const Poly& f, int k)
{
    FunctionJetSection out(f.dim(), k);
    const auto alphas = multi_indices_up_to(f.dim(), k);
    for (std::size_t r = 0; r < alphas.size(); ++r) {
        out.at(r) = f.derivative(alphas[r]);
    }
    return out;
}

/// j_k(X) for the vector field X = (xi^1, ..., xi^n).
inline VectorJetSection prolong_vector_field(const std::vector<Poly>& field, int k)
{
    if (field.empty()) {
        throw dimension_error("vector field with no components");
    }
    const std::size_t n = field.size();
    VectorJetSection out(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        if (field[i].dim() != n) {
            throw dimension_error("vector field component on a chart of wrong dimension");
        }
        out.component(i) = prolong_function(field[i], k);
    }
    return out;
}

/// First slot where f_{alpha + e_j} != partial_j f_alpha.
struct HolonomyViolation {
    std::size_t component = 0;
    MultiIndex alpha;
    std::size_t direction = 0;
};

struct HolonomyCheck {
    bool holonomic = true;
    std::optional<HolonomyViolation> violation;
};

inline HolonomyCheck is_holonomic(const FunctionJetSection& f, std::size_t component = 0)
{
    if (f.order() < 1) {
        throw order_error("holonomy is only defined for order >= 1");
    }
    for (const auto& alpha : multi_indices_up_to(f.dim(), f.order() - 1)) {
        for (std::size_t j = 0; j < f.dim(); ++j) {
            if (!(f[alpha].derivative(j) == f[alpha.raised(j)])) {
                return {false, HolonomyViolation{component, alpha, j}};
            }
        }
    }
    return {};
}

inline HolonomyCheck is_holonomic(const VectorJetSection& x)
{
    for (std::size_t i = 0; i < x.dim(); ++i) {
        auto c = is_holonomic(x.component(i), i);
        if (!c.holonomic) {
            return c;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// the jet algebra

/// (f . g)_alpha = sum_{beta <= alpha} C(alpha, beta) f_beta g_{alpha - beta}; j_k(f) . j_k(g) = j_k(fg).
template <CoefficientRing C>
JetTable<C> jet_product(const JetTable<C>& f, const JetTable<C>& g)
{
    f.check_compatible(g);
    JetTable<C> out(f.dim(), f.order());
    const auto alphas = multi_indices_up_to(f.dim(), f.order());
    for (std::size_t r = 0; r < alphas.size(); ++r) {
        const auto& alpha = alphas[r];
        C acc = coeff_traits<C>::zero(f.dim());
        for (std::size_t q = 0; q <= r; ++q) {
            const auto& beta = alphas[q];
            if (!alpha.contains(beta)) {
                continue;
            }
            const Scalar c = multi_binomial(alpha, beta);
            C term = f.at(q) * g[alpha - beta];
            acc = acc + term * c;
        }
        out.at(r) = std::move(acc);
    }
    out.set_base(f.base().empty() ? g.base() : f.base());
    return out;
}

/// The unit j_k(1).
template <CoefficientRing C>
JetTable<C> jet_unit(std::size_t n, int k);

template <>
inline JetTable<Poly> jet_unit<Poly>(std::size_t n, int k)
{
    JetTable<Poly> u(n, k);
    u.at(0) = Poly::constant(n, Scalar(1));
    return u;
}

template <>
inline JetTable<Scalar> jet_unit<Scalar>(std::size_t n, int k)
{
    JetTable<Scalar> u(n, k);
    u.at(0) = 1;
    return u;
}

/// A "smooth function" jet: value f in slot 0, all higher slots zero.
inline FunctionJetSection smooth_function_jet(const Poly& f, int k)
{
    FunctionJetSection out(f.dim(), k);
    out.at(0) = f;
    return out;
}

} // namespace jetcalc
