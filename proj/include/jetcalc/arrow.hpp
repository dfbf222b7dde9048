#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "poly.hpp"

namespace jetcalc {

namespace detail {

/// Taylor polynomials sum_alpha x_alpha / alpha! h^alpha of each component,
/// optionally without the constant term.
inline std::vector<Poly> taylor_polynomials(const VectorJetValue& x, bool with_constant)
{
    const std::size_t n = x.dim();
    std::vector<Poly> out(n, Poly(n));
    const auto alphas = multi_indices_up_to(n, x.order());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < alphas.size(); ++r) {
            if (r == 0 && !with_constant) {
                continue;
            }
            const Scalar& v = x.component(i).at(r);
            if (v != 0) {
                out[i].add_term(alphas[r], v / alphas[r].factorial());
            }
        }
    }
    return out;
}

inline Poly taylor_polynomial(const FunctionJetValue& f)
{
    Poly out(f.dim());
    const auto alphas = multi_indices_up_to(f.dim(), f.order());
    for (std::size_t r = 0; r < alphas.size(); ++r) {
        if (f.at(r) != 0) {
            out.add_term(alphas[r], f.at(r) / alphas[r].factorial());
        }
    }
    return out;
}

inline FunctionJetValue jet_from_taylor(const Poly& p, int k, Point base)
{
    FunctionJetValue out(p.dim(), k);
    for (const auto& [m, c] : p.terms()) {
        if (m.order() <= k) {
            out[m] = c * m.factorial();
        }
    }
    out.set_base(std::move(base));
    return out;
}

inline VectorJetValue jet_from_taylor(const std::vector<Poly>& ps, int k, Point base)
{
    const std::size_t n = ps.size();
    VectorJetValue out(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        out.component(i) = jet_from_taylor(ps[i], k, base);
    }
    out.set_base(std::move(base));
    return out;
}

/// outer(inner(h)) truncated at degree k; inner must have no constant terms.
inline Poly compose_truncated(const Poly& outer, const std::vector<Poly>& inner, int k)
{
    const std::size_t m = inner.size();
    if (outer.dim() != m) {
        throw dimension_error("composition: outer polynomial dimension mismatch");
    }
    const std::size_t n = inner.empty() ? 0 : inner.front().dim();
    // powers[j][e] = inner_j^e truncated at k
    std::vector<std::vector<Poly>> powers(m);
    for (std::size_t j = 0; j < m; ++j) {
        powers[j].push_back(Poly::constant(n, Scalar(1)));
    }
    auto power = [&](std::size_t j, int e) -> const Poly& {
        while (static_cast<int>(powers[j].size()) <= e) {
            powers[j].push_back(Poly::multiply(powers[j].back(), inner[j], k));
        }
        return powers[j][static_cast<std::size_t>(e)];
    };
    Poly out(n);
    for (const auto& [beta, c] : outer.terms()) {
        if (beta.order() > k) {
            continue;
        }
        Poly term = Poly::constant(n, c);
        for (std::size_t j = 0; j < m && !term.is_zero(); ++j) {
            if (beta[j] > 0) {
                term = Poly::multiply(term, power(j, beta[j]), k);
            }
        }
        out += term;
    }
    return out;
}

inline std::vector<Poly> compose_truncated(const std::vector<Poly>& outer, const std::vector<Poly>& inner, int k)
{
    std::vector<Poly> out;
    out.reserve(outer.size());
    for (const auto& p : outer) {
        out.push_back(compose_truncated(p, inner, k));
    }
    return out;
}

} // namespace detail

/// A k-arrow: the k-jet, with source x and target y, of a local diffeomorphism.
///
/// Slot (i, alpha) holds partial^alpha f^i at the source (derivative values);
/// the order-0 slots are the target coordinates.  The linear part must be
/// invertible.
class Arrow {
public:
    Arrow() = default;

    Arrow(Point source, VectorJetValue jet) : source_(std::move(source)), jet_(std::move(jet))
    {
        if (jet_.order() < 1) {
            throw order_error("arrows have order >= 1");
        }
        if (source_.size() != jet_.dim()) {
            throw dimension_error("arrow source has wrong dimension");
        }
        target_.resize(jet_.dim());
        for (std::size_t i = 0; i < jet_.dim(); ++i) {
            target_[i] = jet_.component(i).at(0);
        }
        jet_.set_base(source_);
        if (!inverse(linear_part())) {
            throw domain_error("arrow has a singular linear part");
        }
    }

    static Arrow identity(const Point& p, int k)
    {
        const std::size_t n = p.size();
        VectorJetValue j(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            j(i, MultiIndex(n)) = p[i];
            j(i, MultiIndex::unit(n, i)) = 1;
        }
        return Arrow(p, std::move(j));
    }

    /// The k-jet of the affine map x -> target + A (x - source).
    static Arrow affine(const Point& source, const Point& target, const Matrix& a, int k)
    {
        const std::size_t n = source.size();
        if (a.rows() != n || a.cols() != n || target.size() != n) {
            throw dimension_error("affine arrow data has inconsistent dimensions");
        }
        VectorJetValue j(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            j(i, MultiIndex(n)) = target[i];
            for (std::size_t c = 0; c < n; ++c) {
                j(i, MultiIndex::unit(n, c)) = a(i, c);
            }
        }
        return Arrow(source, std::move(j));
    }

    [[nodiscard]] std::size_t dim() const noexcept { return jet_.dim(); }
    [[nodiscard]] int order() const noexcept { return jet_.order(); }
    [[nodiscard]] const Point& source() const noexcept { return source_; }
    [[nodiscard]] const Point& target() const noexcept { return target_; }
    [[nodiscard]] const VectorJetValue& jet() const noexcept { return jet_; }

    [[nodiscard]] const Scalar& coefficient(std::size_t i, const MultiIndex& alpha) const { return jet_(i, alpha); }

    /// Jacobian matrix (partial_j f^i) at the source.
    [[nodiscard]] Matrix linear_part() const
    {
        const std::size_t n = dim();
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) = jet_(i, MultiIndex::unit(n, j));
            }
        }
        return a;
    }

    friend bool operator==(const Arrow& a, const Arrow& b)
    {
        return a.source_ == b.source_ && a.jet_ == b.jet_;
    }

private:
    Point source_;
    Point target_;
    VectorJetValue jet_;
};

inline Arrow project(const Arrow& a, int m)
{
    if (m < 1 || m > a.order()) {
        throw order_error("arrow projection order out of range");
    }
    return Arrow(a.source(), project(a.jet(), m));
}

/// b o a, the k-jet of the composite; needs target(a) == source(b).
inline Arrow compose_arrows(const Arrow& b, const Arrow& a)
{
    if (a.dim() != b.dim()) {
        throw dimension_error("composing arrows on charts of different dimension");
    }
    if (a.order() != b.order()) {
        throw order_error("composing arrows of different order");
    }
    if (a.target() != b.source()) {
        throw base_point_error("arrows are not composable: target(a) != source(b)");
    }
    const int k = a.order();
    const auto inner = detail::taylor_polynomials(a.jet(), false);
    const auto outer = detail::taylor_polynomials(b.jet(), true);
    const auto composite = detail::compose_truncated(outer, inner, k);
    return Arrow(a.source(), detail::jet_from_taylor(composite, k, a.source()));
}

/// The arrow with source and target exchanged whose composite with a is the identity.
inline Arrow invert_arrow(const Arrow& a)
{
    const std::size_t n = a.dim();
    const int k = a.order();
    const Matrix ainv = *inverse(a.linear_part());
    auto taylor = detail::taylor_polynomials(a.jet(), false);
    // nonlinear part N(h) = a(h) - target - A h
    std::vector<Poly> nonlinear(n, Poly(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [m, c] : taylor[i].terms()) {
            if (m.order() >= 2) {
                nonlinear[i].add_term(m, c);
            }
        }
    }
    auto apply_inverse_linear = [&](const std::vector<Poly>& v) {
        std::vector<Poly> out(n, Poly(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (ainv(i, j) != 0) {
                    out[i] += v[j] * ainv(i, j);
                }
            }
        }
        return out;
    };
    std::vector<Poly> u(n, Poly(n));
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = Poly::variable(n, i);
    }
    // g = A^{-1}(u - N(g)); each pass fixes one more order
    std::vector<Poly> g = apply_inverse_linear(u);
    for (int pass = 1; pass < k; ++pass) {
        const auto ng = detail::compose_truncated(nonlinear, g, k);
        std::vector<Poly> rhs(n, Poly(n));
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = u[i] - ng[i];
        }
        g = apply_inverse_linear(rhs);
    }
    for (std::size_t i = 0; i < n; ++i) {
        g[i].add_term(MultiIndex(n), a.source()[i]);
    }
    return Arrow(a.target(), detail::jet_from_taylor(g, k, a.target()));
}

/// Transport of a function jet at source(a) to target(a): the jet of f o a^{-1}.
inline FunctionJetValue pushforward_function_jet(const Arrow& a, const FunctionJetValue& f)
{
    if (f.dim() != a.dim()) {
        throw dimension_error("function jet and arrow on different charts");
    }
    if (a.order() < f.order()) {
        throw order_error("transporting a k-jet needs an arrow of order >= k");
    }
    if (!f.base().empty() && f.base() != a.source()) {
        throw base_point_error("function jet is not based at the arrow source");
    }
    const int k = f.order();
    if (k == 0) {
        FunctionJetValue out = f;
        out.set_base(a.target());
        return out;
    }
    const Arrow inv = invert_arrow(project(a, k));
    const auto g = detail::taylor_polynomials(inv.jet(), false);
    const Poly fp = detail::taylor_polynomial(f);
    return detail::jet_from_taylor(detail::compose_truncated(fp, g, k), k, a.target());
}

/// The k-jet at target(a) of the pushforward a_* X, for X a k-jet at source(a); a must have order >= k+1.
inline VectorJetValue pushforward_vector_jet(const Arrow& a, const VectorJetValue& x)
{
    const std::size_t n = a.dim();
    if (x.dim() != n) {
        throw dimension_error("vector jet and arrow on different charts");
    }
    const int k = x.order();
    if (a.order() < k + 1) {
        throw order_error("pushing a k-jet of a vector field needs an arrow of order >= k+1");
    }
    if (!x.base().empty() && x.base() != a.source()) {
        throw base_point_error("vector jet is not based at the arrow source");
    }
    const Arrow a1 = project(a, k + 1);
    const auto taylor = detail::taylor_polynomials(a1.jet(), true);
    const auto xt = detail::taylor_polynomials(x, true);
    // P^i(h) = sum_j partial_j a^i(h) X^j(h), truncated at k
    std::vector<Poly> pushed(n, Poly(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            pushed[i] += Poly::multiply(taylor[i].derivative(j), xt[j], k);
        }
    }
    if (k == 0) {
        return detail::jet_from_taylor(pushed, 0, a.target());
    }
    const Arrow inv = invert_arrow(project(a, k));
    const auto g = detail::taylor_polynomials(inv.jet(), false);
    return detail::jet_from_taylor(detail::compose_truncated(pushed, g, k), k, a.target());
}

} // namespace jetcalc
