#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <utility>

#include "error.hpp"
#include "multi_index.hpp"
#include "scalar.hpp"

namespace jetcalc {

/// Multivariate polynomial with exact rational coefficients on an n-dimensional chart.
/// Zero coefficients are never stored.
class Poly {
public:
    using term_map = std::map<MultiIndex, Scalar>;

    Poly() = default;
    explicit Poly(std::size_t n) : n_(n) {}

    static Poly constant(std::size_t n, const Scalar& c)
    {
        Poly p(n);
        p.add_term(MultiIndex(n), c);
        return p;
    }

    /// The coordinate function x_j (0-based j).
    static Poly variable(std::size_t n, std::size_t j)
    {
        Poly p(n);
        p.add_term(MultiIndex::unit(n, j), Scalar(1));
        return p;
    }

    static Poly monomial(const MultiIndex& alpha, const Scalar& c)
    {
        Poly p(alpha.size());
        p.add_term(alpha, c);
        return p;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] const term_map& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] std::size_t term_count() const noexcept { return terms_.size(); }

    /// Total degree; -1 for the zero polynomial.
    [[nodiscard]] int degree() const noexcept
    {
        return terms_.empty() ? -1 : terms_.rbegin()->first.order();
    }

    [[nodiscard]] Scalar coeff(const MultiIndex& alpha) const
    {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? Scalar(0) : it->second;
    }

    void add_term(const MultiIndex& alpha, const Scalar& c)
    {
        if (alpha.size() != n_) {
            throw dimension_error("monomial length does not match polynomial dimension");
        }
        if (c == 0) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(alpha, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) {
                terms_.erase(it);
            }
        }
    }

    Poly& operator+=(const Poly& o)
    {
        check_same(o);
        for (const auto& [a, c] : o.terms_) {
            add_term(a, c);
        }
        return *this;
    }

    Poly& operator-=(const Poly& o)
    {
        check_same(o);
        for (const auto& [a, c] : o.terms_) {
            add_term(a, -c);
        }
        return *this;
    }

    Poly& operator*=(const Scalar& s)
    {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [a, c] : terms_) {
            c *= s;
        }
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a)
    {
        for (auto& [m, c] : a.terms_) {
            c = -c;
        }
        return a;
    }
    friend Poly operator*(Poly a, const Scalar& s) { return a *= s; }
    friend Poly operator*(const Scalar& s, Poly a) { return a *= s; }

    friend Poly operator*(const Poly& a, const Poly& b) { return multiply(a, b, -1); }

    Poly& operator*=(const Poly& o) { return *this = multiply(*this, o, -1); }

    /// Product with all monomials of degree above max_degree discarded (no truncation if negative).
    static Poly multiply(const Poly& a, const Poly& b, int max_degree)
    {
        a.check_same(b);
        Poly r(a.n_);
        for (const auto& [ma, ca] : a.terms_) {
            const int da = ma.order();
            for (const auto& [mb, cb] : b.terms_) {
                if (max_degree >= 0 && da + mb.order() > max_degree) {
                    continue;
                }
                r.add_term(ma + mb, ca * cb);
            }
        }
        return r;
    }

    /// Discards all monomials of degree above max_degree.
    [[nodiscard]] Poly truncated(int max_degree) const
    {
        Poly r(n_);
        for (const auto& [m, c] : terms_) {
            if (m.order() <= max_degree) {
                r.terms_.emplace_hint(r.terms_.end(), m, c);
            }
        }
        return r;
    }

    /// Partial derivative with respect to x_j (0-based).
    [[nodiscard]] Poly derivative(std::size_t j) const
    {
        if (j >= n_) {
            throw dimension_error("derivative direction out of range");
        }
        Poly r(n_);
        for (const auto& [m, c] : terms_) {
            if (m[j] > 0) {
                r.add_term(m.lowered(j), c * m[j]);
            }
        }
        return r;
    }

    /// partial^alpha
    [[nodiscard]] Poly derivative(const MultiIndex& alpha) const
    {
        if (alpha.size() != n_) {
            throw dimension_error("derivative multi-index length mismatch");
        }
        Poly r = *this;
        for (std::size_t j = 0; j < n_; ++j) {
            for (int t = 0; t < alpha[j]; ++t) {
                r = r.derivative(j);
            }
        }
        return r;
    }

    [[nodiscard]] Scalar evaluate(const Point& x) const
    {
        if (x.size() != n_) {
            throw dimension_error("evaluation point has wrong dimension");
        }
        Scalar total = 0;
        for (const auto& [m, c] : terms_) {
            Scalar t = c;
            for (std::size_t i = 0; i < n_; ++i) {
                for (int e = 0; e < m[i]; ++e) {
                    t *= x[i];
                }
            }
            total += t;
        }
        return total;
    }

    /// The polynomial q(h) = p(x0 + h), i.e. p re-expanded around x0.
    [[nodiscard]] Poly shifted(const Point& x0) const
    {
        if (x0.size() != n_) {
            throw dimension_error("shift point has wrong dimension");
        }
        Poly r(n_);
        for (const auto& [m, c] : terms_) {
            Poly t = constant(n_, c);
            for (std::size_t i = 0; i < n_; ++i) {
                Poly lin = variable(n_, i);
                lin.add_term(MultiIndex(n_), x0[i]);
                for (int e = 0; e < m[i]; ++e) {
                    t = t * lin;
                }
            }
            r += t;
        }
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b)
    {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

    friend std::ostream& operator<<(std::ostream& os, const Poly& p)
    {
        if (p.terms_.empty()) {
            return os << '0';
        }
        bool first = true;
        for (const auto& [m, c] : p.terms_) {
            os << (first ? "" : " + ") << c.get_str();
            for (std::size_t i = 0; i < p.n_; ++i) {
                if (m[i] > 0) {
                    os << "*x" << (i + 1);
                    if (m[i] > 1) {
                        os << '^' << m[i];
                    }
                }
            }
            first = false;
        }
        return os;
    }

    void check_same(const Poly& o) const
    {
        if (n_ != o.n_) {
            throw dimension_error("polynomials on charts of different dimension");
        }
    }

private:
    std::size_t n_ = 0;
    term_map terms_;
};

/// Zero element and chart dimension for the coefficient rings used by jets.
template <class C>
struct coeff_traits;

template <>
struct coeff_traits<Scalar> {
    static Scalar zero(std::size_t /*n*/) { return Scalar(0); }
    static bool is_zero(const Scalar& s) { return s == 0; }
};

template <>
struct coeff_traits<Poly> {
    static Poly zero(std::size_t n) { return Poly(n); }
    static bool is_zero(const Poly& p) { return p.is_zero(); }
};

template <class C>
concept CoefficientRing = requires(const C& a, const C& b, const Scalar& s) {
    { a + b } -> std::convertible_to<C>;
    { a - b } -> std::convertible_to<C>;
    { a * b } -> std::convertible_to<C>;
    { coeff_traits<C>::zero(std::size_t{}) } -> std::convertible_to<C>;
};

} // namespace jetcalc
