#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "arrow.hpp"
#include "error.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "poly.hpp"
#include "random.hpp"
#include "spencer.hpp"

namespace jetcalc {

/// Strictly increasing tuple of fiber coordinates s = rank(alpha) * n + i.
using SlotTuple = std::vector<std::uint32_t>;

/// How far up the exterior algebra d and wedge may go.
enum class DegreeBound {
    chart_dimension, // stop at degree n, as in the displayed complexes
    fiber_dimension, // allow every degree up to the fiber dimension of g_k
};

namespace detail {

/// Sorts args in place; returns the permutation sign, or 0 if an entry repeats.
inline int sort_with_sign(SlotTuple& args)
{
    int sign = 1;
    for (std::size_t i = 1; i < args.size(); ++i) {
        for (std::size_t j = i; j > 0 && args[j - 1] > args[j]; --j) {
            std::swap(args[j - 1], args[j]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == args[i - 1]) {
            return 0;
        }
    }
    return sign;
}

/// All strictly increasing r-tuples from [0, limit).
inline std::vector<SlotTuple> increasing_tuples(std::size_t limit, std::size_t r)
{
    std::vector<SlotTuple> out;
    SlotTuple cur;
    auto rec = [&](auto&& self, std::uint32_t start) -> void {
        if (cur.size() == r) {
            out.push_back(cur);
            return;
        }
        for (std::uint32_t i = start; i < limit; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

/// Colexicographic rank of an increasing tuple, in [0, C(limit, r)).
inline std::size_t tuple_rank(const SlotTuple& t)
{
    std::size_t r = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        r += count_binomial(t[i], i + 1);
    }
    return r;
}

} // namespace detail

/// An alternating r-linear map g_k x ... x g_k -> J_k with coefficients in C.
///
/// The coefficient of an increasing slot tuple I is the value omega(E_{I_1}, ..., E_{I_r}) on the
/// constant basis sections; only nonzero coefficients are stored.  C = Poly gives a form over the
/// chart, C = Scalar a form at one point (base() records it).
template <CoefficientRing C>
class BasicForm {
public:
    using Value = JetTable<C>;
    using coefficient_map = std::map<SlotTuple, Value>;

    BasicForm() = default;
    BasicForm(std::size_t n, int k, std::size_t r) : n_(n), k_(k), r_(r)
    {
        if (n == 0) {
            throw dimension_error("forms on a zero-dimensional chart are not supported");
        }
        if (k < 0) {
            throw order_error("negative jet order");
        }
        if (r > fiber_dimension()) {
            throw dimension_error("form degree exceeds the fiber dimension");
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return k_; }
    [[nodiscard]] std::size_t degree() const noexcept { return r_; }
    [[nodiscard]] std::size_t fiber_dimension() const { return vector_fiber_dimension(n_, k_); }
    [[nodiscard]] const coefficient_map& coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] bool is_zero() const noexcept { return coeffs_.empty(); }

    [[nodiscard]] const Point& base() const noexcept { return base_; }
    void set_base(Point p) { base_ = std::move(p); }

    [[nodiscard]] Value zero_value() const { return Value(n_, k_); }

    /// omega(E_{args...}) for an arbitrary argument list (sign and repetition handled).
    [[nodiscard]] Value value(SlotTuple args) const
    {
        const int sign = detail::sort_with_sign(args);
        if (sign == 0) {
            return zero_value();
        }
        auto it = coeffs_.find(args);
        if (it == coeffs_.end()) {
            return zero_value();
        }
        Value v = it->second;
        if (sign < 0) {
            v.scale(coeff_traits<C>::zero(n_) - one());
        }
        return v;
    }

    /// Adds v to the coefficient of args (any order; sign applied).
    void add(SlotTuple args, const Value& v)
    {
        if (args.size() != r_) {
            throw dimension_error("slot tuple length differs from the form degree");
        }
        for (auto s : args) {
            if (s >= fiber_dimension()) {
                throw dimension_error("slot index outside the g_k fiber");
            }
        }
        if (v.dim() != n_ || v.order() != k_) {
            throw order_error("form value has the wrong order or dimension");
        }
        const int sign = detail::sort_with_sign(args);
        if (sign == 0 || v.is_zero()) {
            return;
        }
        auto [it, inserted] = coeffs_.try_emplace(args, zero_value());
        if (sign > 0) {
            it->second += v;
        } else {
            it->second -= v;
        }
        if (it->second.is_zero()) {
            coeffs_.erase(it);
        }
    }

    void set(const SlotTuple& args, const Value& v)
    {
        SlotTuple sorted = args;
        if (detail::sort_with_sign(sorted) != 1 || sorted != args) {
            throw domain_error("set() needs a strictly increasing slot tuple");
        }
        coeffs_.erase(args);
        add(args, v);
    }

    BasicForm& operator+=(const BasicForm& o)
    {
        check_compatible(o);
        for (const auto& [t, v] : o.coeffs_) {
            add(t, v);
        }
        return *this;
    }

    BasicForm& operator-=(const BasicForm& o)
    {
        check_compatible(o);
        for (const auto& [t, v] : o.coeffs_) {
            Value neg = v;
            neg.scale(coeff_traits<C>::zero(n_) - one());
            add(t, neg);
        }
        return *this;
    }

    /// Multiplies every coefficient by c (a function for C = Poly).
    BasicForm& scale(const C& c)
    {
        for (auto it = coeffs_.begin(); it != coeffs_.end();) {
            it->second.scale(c);
            it = it->second.is_zero() ? coeffs_.erase(it) : std::next(it);
        }
        return *this;
    }

    friend BasicForm operator+(BasicForm a, const BasicForm& b) { return a += b; }
    friend BasicForm operator-(BasicForm a, const BasicForm& b) { return a -= b; }

    friend bool operator==(const BasicForm& a, const BasicForm& b)
    {
        return a.n_ == b.n_ && a.k_ == b.k_ && a.r_ == b.r_ && a.coeffs_ == b.coeffs_;
    }

    void check_compatible(const BasicForm& o) const
    {
        if (n_ != o.n_) {
            throw dimension_error("forms on charts of different dimension");
        }
        if (k_ != o.k_) {
            throw order_error("forms of different jet order");
        }
        if (r_ != o.r_) {
            throw dimension_error("forms of different degree");
        }
    }

private:
    [[nodiscard]] C one() const
    {
        if constexpr (std::is_same_v<C, Poly>) {
            return Poly::constant(n_, Scalar(1));
        } else {
            return C(1);
        }
    }

    std::size_t n_ = 0;
    int k_ = 0;
    std::size_t r_ = 0;
    coefficient_map coeffs_;
    Point base_;
};

using FormKR = BasicForm<Poly>;
using FormPointValue = BasicForm<Scalar>;

/// The degree-0 form with value f.
inline FormKR function_form(const FunctionJetSection& f)
{
    FormKR w(f.dim(), f.order(), 0);
    w.add({}, f);
    return w;
}

inline FormPointValue evaluate_at(const FormKR& w, const Point& p)
{
    FormPointValue out(w.dim(), w.order(), w.degree());
    for (const auto& [t, v] : w.coefficients()) {
        out.add(t, evaluate_at(v, p));
    }
    out.set_base(p);
    return out;
}

// ---------------------------------------------------------------------------
// evaluation

/// omega(X_1, ..., X_r) = sum_I omega_I det(X_a^{I_b}), computed pointwise over the chart.
inline FunctionJetSection eval_form(const FormKR& w, const std::vector<VectorJetSection>& xs)
{
    if (xs.size() != w.degree()) {
        throw dimension_error("form evaluated on the wrong number of arguments");
    }
    for (const auto& x : xs) {
        if (x.dim() != w.dim()) {
            throw dimension_error("argument on a chart of different dimension");
        }
        if (x.order() != w.order()) {
            throw order_error("argument order differs from the form order");
        }
    }
    const std::size_t r = w.degree();
    FunctionJetSection out(w.dim(), w.order());
    for (const auto& [t, v] : w.coefficients()) {
        // determinant by permutation expansion; r is small
        std::vector<std::size_t> perm(r);
        for (std::size_t i = 0; i < r; ++i) {
            perm[i] = i;
        }
        Poly det(w.dim());
        do {
            int sign = 1;
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = i + 1; j < r; ++j) {
                    if (perm[i] > perm[j]) {
                        sign = -sign;
                    }
                }
            }
            Poly term = Poly::constant(w.dim(), Scalar(sign));
            for (std::size_t a = 0; a < r && !term.is_zero(); ++a) {
                term = term * xs[a].coord(t[perm[a]]);
            }
            det += term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!det.is_zero()) {
            FunctionJetSection term = v;
            term.scale(det);
            out += term;
        }
    }
    return out;
}

/// Pointwise evaluation on fiber elements.
inline FunctionJetValue eval_form(const FormPointValue& w, const std::vector<VectorJetValue>& xs)
{
    if (xs.size() != w.degree()) {
        throw dimension_error("form evaluated on the wrong number of arguments");
    }
    const std::size_t r = w.degree();
    FunctionJetValue out(w.dim(), w.order());
    for (const auto& [t, v] : w.coefficients()) {
        Matrix m(r, r);
        for (std::size_t a = 0; a < r; ++a) {
            for (std::size_t b = 0; b < r; ++b) {
                m(a, b) = xs[a].coord(t[b]);
            }
        }
        const Scalar det = r == 0 ? Scalar(1) : determinant(m);
        if (det != 0) {
            FunctionJetValue term = v;
            term.scale(det);
            out += term;
        }
    }
    out.set_base(w.base());
    return out;
}

// ---------------------------------------------------------------------------
// the constant basis sections E_s and their brackets

/// E_s f for the constant basis section E_s, s = (i, alpha): d_i f slotwise when alpha = 0, otherwise
/// (E_s f)_beta = C(beta, alpha) f_{beta - alpha + e_i} for beta >= alpha.
inline FunctionJetSection basis_action(std::size_t s, const FunctionJetSection& f)
{
    const std::size_t n = f.dim();
    const int k = f.order();
    const auto [i, alpha] = fiber_slot(n, k, s);
    FunctionJetSection out(n, k);
    if (f.is_zero()) {
        return out;
    }
    const auto betas = multi_indices_up_to(n, k);
    for (std::size_t b = 0; b < betas.size(); ++b) {
        const auto& beta = betas[b];
        if (alpha.order() == 0) {
            out.at(b) = f.at(b).derivative(i);
        } else if (beta.contains(alpha)) {
            const MultiIndex src = (beta - alpha).raised(i);
            const Poly& fv = f[src];
            if (!fv.is_zero()) {
                out.at(b) = fv * multi_binomial(beta, alpha);
            }
        }
    }
    return out;
}

/// Structure constants of the Spencer bracket on constant basis sections: [E_s, E_t] = sum_u c^u E_u.
class BasisBrackets {
public:
    BasisBrackets(std::size_t n, int k) : n_(n), k_(k), size_(vector_fiber_dimension(n, k)), table_(size_ * size_)
    {
        for (std::size_t s = 0; s < size_; ++s) {
            for (std::size_t t = s + 1; t < size_; ++t) {
                const auto br = spencer_bracket(basis_section(n, k, s), basis_section(n, k, t));
                for (std::size_t u = 0; u < size_; ++u) {
                    const Poly& p = br.coord(u);
                    if (p.is_zero()) {
                        continue;
                    }
                    if (p.degree() != 0) {
                        throw domain_error("bracket of constant sections is not constant");
                    }
                    const Scalar c = p.coeff(MultiIndex(n));
                    table_[s * size_ + t].emplace_back(u, c);
                    table_[t * size_ + s].emplace_back(u, -c);
                }
            }
        }
    }

    [[nodiscard]] const std::vector<std::pair<std::size_t, Scalar>>& bracket(std::size_t s, std::size_t t) const
    {
        return table_.at(s * size_ + t);
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return k_; }

private:
    std::size_t n_;
    int k_;
    std::size_t size_;
    std::vector<std::vector<std::pair<std::size_t, Scalar>>> table_;
};

// ---------------------------------------------------------------------------
// exterior derivative, wedge, interior product, Lie derivative

namespace detail {

inline void check_degree(std::size_t n, std::size_t degree, DegreeBound bound, const char* what)
{
    if (bound == DegreeBound::chart_dimension && degree > n) {
        throw dimension_error(std::string(what) + " would leave the complex (degree above the chart dimension)");
    }
}

inline SlotTuple without(const SlotTuple& t, std::size_t i, std::size_t j = static_cast<std::size_t>(-1))
{
    SlotTuple out;
    for (std::size_t a = 0; a < t.size(); ++a) {
        if (a != i && a != j) {
            out.push_back(t[a]);
        }
    }
    return out;
}

} // namespace detail

/// d omega on constant basis sections, following the intrinsic formula with the 1/(r+1) factor:
/// (d omega)(X_0..X_r) = 1/(r+1) [sum_i (-1)^i X_i omega(..^i..) + sum_{i<j} (-1)^{i+j} omega([X_i, X_j], ..^i..^j..)].
inline FormKR exterior_derivative(const FormKR& w, const BasisBrackets& brackets,
                                  DegreeBound bound = DegreeBound::chart_dimension)
{
    const std::size_t n = w.dim();
    const int k = w.order();
    const std::size_t r = w.degree();
    if (brackets.dim() != n || brackets.order() != k) {
        throw order_error("bracket table does not match the form");
    }
    detail::check_degree(n, r + 1, bound, "exterior derivative");
    const std::size_t size = w.fiber_dimension();
    FormKR out(n, k, r + 1);
    if (w.is_zero()) {
        return out;
    }
    const Scalar factor(Scalar(1) / Scalar(static_cast<long>(r + 1)));
    // only output tuples that meet the support of w can be nonzero: every term involves a value of w
    // on a tuple sharing r - 1 entries with the output tuple
    for (const auto& t : detail::increasing_tuples(size, r + 1)) {
        FunctionJetSection acc(n, k);
        for (std::size_t i = 0; i <= r; ++i) {
            const auto v = w.value(detail::without(t, i));
            if (v.is_zero()) {
                continue;
            }
            const auto moved = basis_action(t[i], v);
            if (i % 2 == 0) {
                acc += moved;
            } else {
                acc -= moved;
            }
        }
        for (std::size_t i = 0; i <= r; ++i) {
            for (std::size_t j = i + 1; j <= r; ++j) {
                const auto& br = brackets.bracket(t[i], t[j]);
                if (br.empty()) {
                    continue;
                }
                const SlotTuple rest = detail::without(t, i, j);
                for (const auto& [u, c] : br) {
                    SlotTuple args{static_cast<std::uint32_t>(u)};
                    args.insert(args.end(), rest.begin(), rest.end());
                    auto v = w.value(args);
                    if (v.is_zero()) {
                        continue;
                    }
                    v.scale(Poly::constant(n, ((i + j) % 2 == 0) ? c : Scalar(-c)));
                    acc += v;
                }
            }
        }
        if (!acc.is_zero()) {
            acc.scale(Poly::constant(n, factor));
            out.add(t, acc);
        }
    }
    return out;
}

inline FormKR exterior_derivative(const FormKR& w, DegreeBound bound = DegreeBound::chart_dimension)
{
    return exterior_derivative(w, BasisBrackets(w.dim(), w.order()), bound);
}

/// The right-hand side of the intrinsic formula for d, evaluated on arbitrary sections X_0..X_r
/// (used to test that d does not depend on how fiber vectors are extended to sections).
inline FunctionJetSection exterior_derivative_formula(const FormKR& w, const std::vector<VectorJetSection>& xs)
{
    const std::size_t r = w.degree();
    if (xs.size() != r + 1) {
        throw dimension_error("d of a degree-r form takes r+1 arguments");
    }
    FunctionJetSection acc(w.dim(), w.order());
    for (std::size_t i = 0; i <= r; ++i) {
        std::vector<VectorJetSection> rest;
        for (std::size_t a = 0; a <= r; ++a) {
            if (a != i) {
                rest.push_back(xs[a]);
            }
        }
        const auto moved = jet_action(xs[i], eval_form(w, rest));
        if (i % 2 == 0) {
            acc += moved;
        } else {
            acc -= moved;
        }
    }
    for (std::size_t i = 0; i <= r; ++i) {
        for (std::size_t j = i + 1; j <= r; ++j) {
            std::vector<VectorJetSection> args{spencer_bracket(xs[i], xs[j])};
            for (std::size_t a = 0; a <= r; ++a) {
                if (a != i && a != j) {
                    args.push_back(xs[a]);
                }
            }
            const auto v = eval_form(w, args);
            if ((i + j) % 2 == 0) {
                acc += v;
            } else {
                acc -= v;
            }
        }
    }
    acc.scale(Poly::constant(w.dim(), Scalar(1) / Scalar(static_cast<long>(r + 1))));
    return acc;
}

/// omega ^ tau = (p! q! / (p+q)!) sum over shuffles of sign * omega(..) . tau(..), values multiplied by the jet product.
inline FormKR wedge(const FormKR& a, const FormKR& b, DegreeBound bound = DegreeBound::chart_dimension)
{
    if (a.dim() != b.dim()) {
        throw dimension_error("wedge of forms on different charts");
    }
    if (a.order() != b.order()) {
        throw order_error("wedge of forms of different jet order");
    }
    const std::size_t p = a.degree();
    const std::size_t q = b.degree();
    detail::check_degree(a.dim(), p + q, bound, "wedge product");
    FormKR out(a.dim(), a.order(), p + q);
    const Scalar factor = Scalar(MultiIndex::from_vector({static_cast<int>(p)}).factorial() *
                                 MultiIndex::from_vector({static_cast<int>(q)}).factorial()) /
                          MultiIndex::from_vector({static_cast<int>(p + q)}).factorial();
    for (const auto& [ta, va] : a.coefficients()) {
        for (const auto& [tb, vb] : b.coefficients()) {
            SlotTuple joined = ta;
            joined.insert(joined.end(), tb.begin(), tb.end());
            SlotTuple sorted = joined;
            const int sign = detail::sort_with_sign(sorted);
            if (sign == 0) {
                continue;
            }
            FunctionJetSection v = jet_product(va, vb);
            v.scale(Poly::constant(a.dim(), factor * sign));
            out.add(sorted, v);
        }
    }
    return out;
}

/// (i_Y omega)(X_1..X_r) = (r+1) omega(Y, X_1..X_r) for omega of degree r+1.
inline FormKR interior_product(const VectorJetSection& y, const FormKR& w)
{
    if (y.dim() != w.dim() || y.order() != w.order()) {
        throw order_error("interior product needs a section of the form's order");
    }
    if (w.degree() == 0) {
        throw dimension_error("interior product of a degree-0 form");
    }
    const std::size_t r = w.degree() - 1;
    FormKR out(w.dim(), w.order(), r);
    const Poly factor = Poly::constant(w.dim(), Scalar(static_cast<long>(r + 1)));
    for (const auto& [t, v] : w.coefficients()) {
        for (std::size_t a = 0; a < t.size(); ++a) {
            const Poly& ya = y.coord(t[a]);
            if (ya.is_zero()) {
                continue;
            }
            // omega(E_{t_a}, rest) = (-1)^a omega_t
            FunctionJetSection val = v;
            val.scale(ya * factor);
            if (a % 2 == 1) {
                val.scale(Poly::constant(w.dim(), Scalar(-1)));
            }
            out.add(detail::without(t, a), val);
        }
    }
    return out;
}

/// (L_Y omega)(X_1..X_r) = Y(omega(X_1..X_r)) - sum_a omega(X_1, .., [Y, X_a], .., X_r).
inline FormKR lie_derivative(const VectorJetSection& y, const FormKR& w)
{
    if (y.dim() != w.dim() || y.order() != w.order()) {
        throw order_error("Lie derivative needs a section of the form's order");
    }
    const std::size_t n = w.dim();
    const int k = w.order();
    const std::size_t size = w.fiber_dimension();
    FormKR out(n, k, w.degree());
    std::vector<std::optional<VectorJetSection>> ye(size);
    auto bracket_with = [&](std::size_t s) -> const VectorJetSection& {
        if (!ye[s]) {
            ye[s] = spencer_bracket(y, basis_section(n, k, s));
        }
        return *ye[s];
    };
    for (const auto& t : detail::increasing_tuples(size, w.degree())) {
        FunctionJetSection acc = jet_action(y, w.value(t));
        for (std::size_t a = 0; a < t.size(); ++a) {
            const auto& z = bracket_with(t[a]);
            for (std::size_t u = 0; u < size; ++u) {
                const Poly& zu = z.coord(u);
                if (zu.is_zero()) {
                    continue;
                }
                SlotTuple args = t;
                args[a] = static_cast<std::uint32_t>(u);
                auto v = w.value(args);
                if (v.is_zero()) {
                    continue;
                }
                v.scale(zu);
                acc -= v;
            }
        }
        out.add(t, acc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// (k, r)-forms, filtration, projection

/// Maximal order |alpha| among the slots of a tuple (-1 for the empty tuple).
inline int max_slot_order(std::size_t n, int k, const SlotTuple& t)
{
    int m = -1;
    for (auto s : t) {
        m = std::max(m, fiber_slot(n, k, s).second.order());
    }
    return m;
}

/// Whether the order-<= m part of the values depends only on the order-<= m slots of the arguments.
/// Checked as an identity of polynomial coefficients: omega_{I, beta} = 0 for |beta| <= m whenever I
/// contains a slot of order > m.
inline bool kr_membership(const FormKR& w, int m)
{
    if (m < 0 || m > w.order()) {
        throw order_error("membership order out of range");
    }
    const std::size_t n = w.dim();
    const std::size_t low = jet_slot_count(n, m);
    for (const auto& [t, v] : w.coefficients()) {
        if (max_slot_order(n, w.order(), t) <= m) {
            continue;
        }
        for (std::size_t b = 0; b < low; ++b) {
            if (!v.at(b).is_zero()) {
                return false;
            }
        }
    }
    return true;
}

/// Membership in the (k, r) subspace: kr_membership for every m <= k.
inline bool is_kr_form(const FormKR& w)
{
    for (int m = 0; m < w.order(); ++m) {
        if (!kr_membership(w, m)) {
            return false;
        }
    }
    return true;
}

/// Largest m such that all value slots of order <= m vanish, i.e. omega lies in C^{m+1, r} at the
/// working order; -1 if the order-0 values do not vanish.  The zero form reports the working order.
inline int filtration_tag(const FormKR& w)
{
    int tag = w.order();
    for (const auto& [t, v] : w.coefficients()) {
        const auto alphas = multi_indices_up_to(w.dim(), w.order());
        for (std::size_t b = 0; b < alphas.size(); ++b) {
            if (!v.at(b).is_zero()) {
                tag = std::min(tag, alphas[b].order() - 1);
                break;
            }
        }
    }
    return tag;
}

/// pi_{k,m} on (k, r)-forms: restrict to order-<= m arguments and project the values.
inline FormKR project(const FormKR& w, int m)
{
    if (m < 0 || m > w.order()) {
        throw order_error("projection order out of range");
    }
    const std::size_t limit = vector_fiber_dimension(w.dim(), m);
    if (w.degree() > limit) {
        throw dimension_error("projected form degree exceeds the lower fiber dimension");
    }
    FormKR out(w.dim(), m, w.degree());
    for (const auto& [t, v] : w.coefficients()) {
        if (std::all_of(t.begin(), t.end(), [limit](std::uint32_t s) { return s < limit; })) {
            out.add(t, project(v, m));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// arrow action

/// Transport of a form at source(a) to target(a): (a omega)(v_1..v_r) = a_*(omega(a^{-1}_* v_1, .., a^{-1}_* v_r)).
/// The arrow must have order k+1.
inline FormPointValue arrow_transform_form(const Arrow& a, const FormPointValue& w)
{
    const std::size_t n = w.dim();
    const int k = w.order();
    if (a.dim() != n) {
        throw dimension_error("arrow and form on charts of different dimension");
    }
    if (a.order() != k + 1) {
        throw order_error("transforming a form of order k needs an arrow of order k+1");
    }
    if (!w.base().empty() && w.base() != a.source()) {
        throw base_point_error("form is not based at the arrow source");
    }
    const Arrow inv = invert_arrow(a);
    const std::size_t size = w.fiber_dimension();
    // columns: a^{-1}_* e_s at the source, in fiber coordinates
    Matrix pulled(size, size);
    for (std::size_t s = 0; s < size; ++s) {
        Vector e(size);
        e[s] = 1;
        const auto v = pushforward_vector_jet(inv, from_fiber_vector(n, k, e, a.target()));
        for (std::size_t u = 0; u < size; ++u) {
            pulled(u, s) = v.coord(u);
        }
    }
    FormPointValue out(n, k, w.degree());
    for (const auto& t : detail::increasing_tuples(size, w.degree())) {
        FunctionJetValue acc(n, k);
        acc.set_base(a.source());
        for (const auto& [ti, v] : w.coefficients()) {
            const std::size_t r = t.size();
            Matrix minor(r, r);
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = 0; j < r; ++j) {
                    minor(i, j) = pulled(ti[i], t[j]);
                }
            }
            const Scalar det = r == 0 ? Scalar(1) : determinant(minor);
            if (det != 0) {
                FunctionJetValue term = v;
                term.set_base(a.source());
                term.scale(det);
                acc += term;
            }
        }
        FunctionJetValue moved = pushforward_function_jet(a, acc);
        moved.set_base(a.target());
        out.add(t, moved);
    }
    out.set_base(a.target());
    return out;
}

inline FormPointValue arrow_transform_form(const Arrow& a, const FormKR& w)
{
    return arrow_transform_form(a, evaluate_at(w, a.source()));
}

// ---------------------------------------------------------------------------
// random forms for property tests

/// Random form with polynomial coefficients of degree <= degree; with kr_only the coefficients respect
/// the (k, r) condition.  Density controls the expected fraction of nonzero value slots (in percent).
inline FormKR random_form(RandomSource& rng, std::size_t n, int k, std::size_t r, int degree, bool kr_only,
                          int density = 30)
{
    FormKR w(n, k, r);
    const auto alphas = multi_indices_up_to(n, k);
    for (const auto& t : detail::increasing_tuples(vector_fiber_dimension(n, k), r)) {
        const int low = kr_only ? max_slot_order(n, k, t) : 0;
        FunctionJetSection v(n, k);
        for (std::size_t b = 0; b < alphas.size(); ++b) {
            if (alphas[b].order() >= low && rng.integer(1, 100) <= density) {
                v.at(b) = rng.poly(n, degree, 2);
            }
        }
        w.add(t, v);
    }
    return w;
}

// ---------------------------------------------------------------------------
// structure algebra and relative cochains

namespace detail {

/// Coordinates of a function jet with polynomial slots: (slot rank, monomial rank) -> column.
inline void append_coordinates(const FunctionJetSection& f, std::size_t offset, int max_degree, SparseVector& out)
{
    const std::size_t monomials = jet_slot_count(f.dim(), max_degree);
    for (std::size_t b = 0; b < f.slot_count(); ++b) {
        for (const auto& [m, c] : f.at(b).terms()) {
            if (m.order() > max_degree) {
                throw domain_error("polynomial degree exceeds the coordinate bound");
            }
            out.emplace_back(offset + b * monomials + multi_index_rank(m), c);
        }
    }
}

inline SparseVector normalized(SparseVector v)
{
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVector out;
    for (auto& [i, c] : v) {
        if (!out.empty() && out.back().first == i) {
            out.back().second += c;
            if (out.back().second == 0) {
                out.pop_back();
            }
        } else if (c != 0) {
            out.emplace_back(i, c);
        }
    }
    return out;
}

} // namespace detail

/// Basis of {f in J_k : X f = 0 for every X in the spanning family}, among sections whose slots are
/// polynomials of degree <= degree.
inline std::vector<FunctionJetSection> theta_structure_algebra(const std::vector<VectorJetSection>& spanning,
                                                               std::size_t n, int k, int degree)
{
    const auto alphas = multi_indices_up_to(n, k);
    const auto monomials = multi_indices_up_to(n, degree);
    int max_field_degree = 0;
    for (const auto& x : spanning) {
        if (x.dim() != n || x.order() != k) {
            throw order_error("spanning section does not match the requested jet bundle");
        }
        for (std::size_t s = 0; s < x.fiber_dimension(); ++s) {
            max_field_degree = std::max(max_field_degree, x.coord(s).degree());
        }
    }
    const int image_degree = degree + max_field_degree;
    const std::size_t image_block = alphas.size() * jet_slot_count(n, image_degree);
    const std::size_t unknowns = alphas.size() * monomials.size();
    // one column per unknown (slot, monomial); rows stacked over the spanning family
    std::vector<SparseVector> columns;
    for (std::size_t b = 0; b < alphas.size(); ++b) {
        for (const auto& m : monomials) {
            FunctionJetSection f(n, k);
            f.at(b) = Poly::monomial(m, Scalar(1));
            SparseVector col;
            for (std::size_t x = 0; x < spanning.size(); ++x) {
                detail::append_coordinates(jet_action(spanning[x], f), x * image_block, image_degree, col);
            }
            columns.push_back(detail::normalized(std::move(col)));
        }
    }
    // nullspace via dependency tracking on the columns
    Echelon ech(image_block * std::max<std::size_t>(spanning.size(), 1), true);
    for (const auto& c : columns) {
        ech.insert(c);
    }
    std::vector<FunctionJetSection> out;
    for (const auto& rel : ech.relations()) {
        FunctionJetSection f(n, k);
        for (const auto& [id, c] : rel) {
            const std::size_t b = id / monomials.size();
            f.at(b).add_term(monomials[id % monomials.size()], c);
        }
        out.push_back(std::move(f));
    }
    (void)unknowns;
    return out;
}

/// Whether products of Theta basis elements are again annihilated by the spanning family.
inline bool theta_is_closed_under_product(const std::vector<FunctionJetSection>& basis,
                                          const std::vector<VectorJetSection>& spanning)
{
    for (std::size_t a = 0; a < basis.size(); ++a) {
        for (std::size_t b = a; b < basis.size(); ++b) {
            const auto prod = jet_product(basis[a], basis[b]);
            for (const auto& x : spanning) {
                if (!jet_action(x, prod).is_zero()) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// The constant sections E_s spanning the full g_k.
inline std::vector<VectorJetSection> full_spanning_family(std::size_t n, int k)
{
    std::vector<VectorJetSection> out;
    for (std::size_t s = 0; s < vector_fiber_dimension(n, k); ++s) {
        out.push_back(basis_section(n, k, s));
    }
    return out;
}

/// Relative cochain test: i_X omega = 0 and L_X omega = 0 for every X of the spanning family.
inline bool relative_membership(const FormKR& w, const std::vector<VectorJetSection>& spanning)
{
    for (const auto& x : spanning) {
        if (x.dim() != w.dim()) {
            throw dimension_error("spanning section on a chart of different dimension");
        }
        if (w.degree() > 0 && !interior_product(x, w).is_zero()) {
            return false;
        }
        if (!lie_derivative(x, w).is_zero()) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// local exactness probe

struct ExactnessReport {
    std::size_t n = 0;
    int k = 0;
    std::size_t r = 0;
    int degree = 0;           // polynomial degree of the closed forms
    int primitive_degree = 0; // polynomial degree allowed for primitives
    std::size_t closed_dimension = 0;
    std::size_t exact_dimension = 0;
    std::vector<std::size_t> unsolved; // indices into the closed basis
    std::size_t constants_dimension = 0; // dim ker d on degree-0 forms of the given polynomial degree
    bool all_exact() const { return unsolved.empty(); }
};

namespace detail {

/// Basis of (k, r)-forms whose value slots are monomials of degree <= degree, with coordinates.
struct FormSpace {
    std::size_t n;
    int k;
    std::size_t r;
    int degree;
    std::vector<FormKR> basis;

    [[nodiscard]] std::size_t columns() const
    {
        return count_binomial(vector_fiber_dimension(n, k), r) * jet_slot_count(n, k) * jet_slot_count(n, degree);
    }

    [[nodiscard]] SparseVector coordinates(const FormKR& w) const
    {
        SparseVector out;
        const std::size_t block = jet_slot_count(n, k) * jet_slot_count(n, degree);
        for (const auto& [t, v] : w.coefficients()) {
            append_coordinates(v, tuple_rank(t) * block, degree, out);
        }
        return normalized(std::move(out));
    }
};

inline FormSpace kr_form_space(std::size_t n, int k, std::size_t r, int degree)
{
    FormSpace space{n, k, r, degree, {}};
    const auto alphas = multi_indices_up_to(n, k);
    const auto monomials = multi_indices_up_to(n, degree);
    for (const auto& t : increasing_tuples(vector_fiber_dimension(n, k), r)) {
        const int low = max_slot_order(n, k, t);
        for (std::size_t b = 0; b < alphas.size(); ++b) {
            if (alphas[b].order() < low) {
                continue;
            }
            for (const auto& m : monomials) {
                FormKR w(n, k, r);
                FunctionJetSection v(n, k);
                v.at(b) = Poly::monomial(m, Scalar(1));
                w.add(t, v);
                space.basis.push_back(std::move(w));
            }
        }
    }
    return space;
}

} // namespace detail

/// Upper bound on the number of basis forms handled by the exactness probe.
inline constexpr std::size_t max_exactness_unknowns = 4000;

/// For the d-closed (k, r)-forms with polynomial values of degree <= degree, tries to solve d eta = omega
/// with eta a (k, r-1)-form of polynomial degree <= degree + 1.
inline ExactnessReport local_exactness_check(std::size_t n, int k, std::size_t r, int degree)
{
    if (r < 1) {
        throw dimension_error("exactness probe needs degree r >= 1");
    }
    if (r > n) {
        throw dimension_error("exactness probe limited to degrees <= n");
    }
    ExactnessReport rep;
    rep.n = n;
    rep.k = k;
    rep.r = r;
    rep.degree = degree;
    rep.primitive_degree = degree + 1;
    const BasisBrackets brackets(n, k);

    const auto space = detail::kr_form_space(n, k, r, degree);
    const auto lower = detail::kr_form_space(n, k, r - 1, degree + 1);
    if (space.basis.size() > max_exactness_unknowns || lower.basis.size() > max_exactness_unknowns) {
        throw resource_error("exactness probe exceeds its size bound");
    }
    // closed forms: kernel of d on the space (r + 1 may exceed n; the closedness test still needs it)
    std::vector<FormKR> closed;
    if (r + 1 > vector_fiber_dimension(n, k)) {
        closed = space.basis; // top degree: every form is closed
    } else {
        const auto image_space = detail::FormSpace{n, k, r + 1, degree, {}};
        Echelon dz(image_space.columns(), true);
        for (const auto& b : space.basis) {
            dz.insert(image_space.coordinates(exterior_derivative(b, brackets, DegreeBound::fiber_dimension)));
        }
        for (const auto& rel : dz.relations()) {
            FormKR w(n, k, r);
            for (const auto& [id, c] : rel) {
                FormKR term = space.basis[id];
                term.scale(Poly::constant(n, c));
                w += term;
            }
            closed.push_back(std::move(w));
        }
    }
    rep.closed_dimension = closed.size();
    // image of d from degree r - 1
    const detail::FormSpace wide{n, k, r, degree + 1, {}};
    Echelon image(wide.columns());
    for (const auto& b : lower.basis) {
        image.insert(wide.coordinates(exterior_derivative(b, brackets, DegreeBound::fiber_dimension)));
    }
    for (std::size_t i = 0; i < closed.size(); ++i) {
        if (image.contains(wide.coordinates(closed[i]))) {
            ++rep.exact_dimension;
        } else {
            rep.unsolved.push_back(i);
        }
    }
    // kernel of d on degree-0 forms
    const auto zero_space = detail::kr_form_space(n, k, 0, degree);
    const detail::FormSpace one_space{n, k, 1, degree, {}};
    Echelon d0(one_space.columns(), true);
    for (const auto& b : zero_space.basis) {
        d0.insert(one_space.coordinates(exterior_derivative(b, brackets, DegreeBound::fiber_dimension)));
    }
    rep.constants_dimension = d0.relations().size();
    return rep;
}

} // namespace jetcalc
