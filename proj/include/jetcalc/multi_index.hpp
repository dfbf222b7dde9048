#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"

namespace jetcalc {

/// Largest chart dimension supported by the fixed-capacity multi-index.
inline constexpr std::size_t max_chart_dim = 8;

/// Exponent vector alpha = (alpha_1, ..., alpha_n) with |alpha| = sum of entries.
///
/// Multi-indices are totally ordered by the graded order used for every basis
/// enumeration in the library: lower |alpha| first, and within one degree the
/// lexicographically *larger* exponent vector first, so that (2,0) < (1,1) < (0,2).
class MultiIndex {
public:
    MultiIndex() = default;

    explicit MultiIndex(std::size_t n)
        : n_(static_cast<std::uint8_t>(checked_dim(n)))
    {
    }

    MultiIndex(std::initializer_list<int> exps)
        : n_(static_cast<std::uint8_t>(checked_dim(exps.size())))
    {
        std::size_t i = 0;
        for (int e : exps) {
            if (e < 0) {
                throw domain_error("negative exponent in multi-index");
            }
            e_[i++] = static_cast<std::uint16_t>(e);
        }
    }

    static MultiIndex from_vector(const std::vector<int>& exps)
    {
        MultiIndex m(exps.size());
        for (std::size_t i = 0; i < exps.size(); ++i) {
            if (exps[i] < 0) {
                throw domain_error("negative exponent in multi-index");
            }
            m.e_[i] = static_cast<std::uint16_t>(exps[i]);
        }
        return m;
    }

    static MultiIndex unit(std::size_t n, std::size_t j)
    {
        MultiIndex m(n);
        if (j >= n) {
            throw dimension_error("unit multi-index direction out of range");
        }
        m.e_[j] = 1;
        return m;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    [[nodiscard]] int operator[](std::size_t i) const noexcept { return e_[i]; }

    [[nodiscard]] int order() const noexcept
    {
        int s = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            s += e_[i];
        }
        return s;
    }

    /// alpha + e_j
    [[nodiscard]] MultiIndex raised(std::size_t j) const
    {
        MultiIndex m = *this;
        ++m.e_[j];
        return m;
    }

    /// alpha - e_j; requires alpha_j > 0.
    [[nodiscard]] MultiIndex lowered(std::size_t j) const
    {
        if (e_[j] == 0) {
            throw domain_error("cannot lower a zero exponent");
        }
        MultiIndex m = *this;
        --m.e_[j];
        return m;
    }

    /// Componentwise beta <= alpha.
    [[nodiscard]] bool contains(const MultiIndex& beta) const
    {
        check_same(beta);
        for (std::size_t i = 0; i < n_; ++i) {
            if (beta.e_[i] > e_[i]) {
                return false;
            }
        }
        return true;
    }

    /// alpha! = prod alpha_i!
    [[nodiscard]] Scalar factorial() const
    {
        mpz_class f = 1;
        for (std::size_t i = 0; i < n_; ++i) {
            mpz_class t;
            mpz_fac_ui(t.get_mpz_t(), e_[i]);
            f *= t;
        }
        return Scalar(f);
    }

    [[nodiscard]] std::vector<int> to_vector() const
    {
        return {e_.begin(), e_.begin() + n_};
    }

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b)
    {
        a.check_same(b);
        MultiIndex m = a;
        for (std::size_t i = 0; i < a.n_; ++i) {
            m.e_[i] = static_cast<std::uint16_t>(a.e_[i] + b.e_[i]);
        }
        return m;
    }

    /// Requires b <= a componentwise.
    friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b)
    {
        if (!a.contains(b)) {
            throw domain_error("multi-index difference would be negative");
        }
        MultiIndex m = a;
        for (std::size_t i = 0; i < a.n_; ++i) {
            m.e_[i] = static_cast<std::uint16_t>(a.e_[i] - b.e_[i]);
        }
        return m;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept
    {
        return a.n_ == b.n_ && a.e_ == b.e_;
    }

    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) noexcept
    {
        if (a.n_ != b.n_) {
            return a.n_ <=> b.n_;
        }
        if (auto c = a.order() <=> b.order(); c != 0) {
            return c;
        }
        for (std::size_t i = 0; i < a.n_; ++i) {
            if (a.e_[i] != b.e_[i]) {
                // larger leading exponent comes first
                return b.e_[i] <=> a.e_[i];
            }
        }
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const MultiIndex& m)
    {
        os << '(';
        for (std::size_t i = 0; i < m.n_; ++i) {
            os << (i ? "," : "") << m.e_[i];
        }
        return os << ')';
    }

    void check_same(const MultiIndex& other) const
    {
        if (n_ != other.n_) {
            throw dimension_error("multi-indices of different length");
        }
    }

private:
    static std::size_t checked_dim(std::size_t n)
    {
        if (n > max_chart_dim) {
            throw dimension_error("chart dimension " + std::to_string(n) + " exceeds the supported maximum "
                                  + std::to_string(max_chart_dim));
        }
        return n;
    }

    std::array<std::uint16_t, max_chart_dim> e_{};
    std::uint8_t n_ = 0;
};

/// Binomial coefficient C(n, k) as an exact integer (0 when k > n).
inline mpz_class binomial(long n, long k)
{
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

/// Small binomial as a machine integer; used for counting basis sizes.
inline std::size_t count_binomial(std::size_t n, std::size_t k)
{
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

/// C(alpha, beta) = prod C(alpha_i, beta_i); zero when beta is not below alpha.
inline Scalar multi_binomial(const MultiIndex& alpha, const MultiIndex& beta)
{
    alpha.check_same(beta);
    mpz_class r = 1;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (beta[i] > alpha[i]) {
            return Scalar(0);
        }
        r *= binomial(alpha[i], beta[i]);
    }
    return Scalar(r);
}

/// Number of multi-indices of length n with |alpha| <= k, i.e. C(n+k, n).
inline std::size_t jet_slot_count(std::size_t n, int k)
{
    if (k < 0) {
        return 0;
    }
    return count_binomial(n + static_cast<std::size_t>(k), n);
}

/// All multi-indices of length n and order exactly d, in the graded order.
inline std::vector<MultiIndex> multi_indices_of_order(std::size_t n, int d)
{
    std::vector<MultiIndex> out;
    if (d < 0) {
        return out;
    }
    MultiIndex cur(n);
    std::vector<int> e(n, 0);
    // depth-first over the leading exponent, largest first
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (n == 0) {
            if (remaining == 0) {
                out.push_back(MultiIndex(0));
            }
            return;
        }
        if (pos + 1 == n) {
            e[pos] = remaining;
            out.push_back(MultiIndex::from_vector(e));
            return;
        }
        for (int a = remaining; a >= 0; --a) {
            e[pos] = a;
            self(self, pos + 1, remaining - a);
        }
    };
    rec(rec, 0, d);
    return out;
}

/// All multi-indices of length n with |alpha| <= k, in the graded order.
inline std::vector<MultiIndex> multi_indices_up_to(std::size_t n, int k)
{
    std::vector<MultiIndex> out;
    out.reserve(jet_slot_count(n, k));
    for (int d = 0; d <= k; ++d) {
        auto level = multi_indices_of_order(n, d);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

/// Position of alpha in multi_indices_up_to(n, k) for any k >= |alpha|.
inline std::size_t multi_index_rank(const MultiIndex& alpha)
{
    const std::size_t n = alpha.size();
    const int d = alpha.order();
    std::size_t rank = d == 0 ? 0 : jet_slot_count(n, d - 1);
    // compositions of m into p parts
    auto comps = [](int m, std::size_t p) -> std::size_t {
        if (p == 0) {
            return m == 0 ? 1 : 0;
        }
        return count_binomial(static_cast<std::size_t>(m) + p - 1, p - 1);
    };
    int remaining = d;
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        for (int a = remaining; a > alpha[pos]; --a) {
            rank += comps(remaining - a, n - pos - 1);
        }
        remaining -= alpha[pos];
    }
    return rank;
}

} // namespace jetcalc
