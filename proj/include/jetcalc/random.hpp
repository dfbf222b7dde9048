#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "arrow.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "poly.hpp"
#include "scalar.hpp"

namespace jetcalc {

/// Seeded generator of small exact test data.  Only the raw mt19937_64 stream
/// is used (no std distributions), so sequences agree across standard libraries.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [lo, hi].
    long integer(long lo, long hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(next() % span);
    }

    bool coin() { return (next() & 1U) != 0; }

    /// p/q with |p| <= num_bound and 1 <= q <= den_bound; zero with probability about 1/4.
    Scalar rational(long num_bound = 3, long den_bound = 2)
    {
        if (integer(0, 3) == 0) {
            return Scalar(0);
        }
        Scalar s(integer(-num_bound, num_bound), integer(1, den_bound));
        s.canonicalize();
        return s;
    }

    Scalar nonzero_rational(long num_bound = 3, long den_bound = 2)
    {
        while (true) {
            Scalar s(integer(-num_bound, num_bound), integer(1, den_bound));
            s.canonicalize();
            if (s != 0) {
                return s;
            }
        }
    }

    /// Sparse random polynomial of total degree <= degree.
    Poly poly(std::size_t n, int degree, std::size_t max_terms = 3)
    {
        Poly p(n);
        const auto monomials = multi_indices_up_to(n, degree);
        const std::size_t terms = static_cast<std::size_t>(integer(0, static_cast<long>(max_terms)));
        for (std::size_t t = 0; t < terms; ++t) {
            const auto& m = monomials[static_cast<std::size_t>(integer(0, static_cast<long>(monomials.size()) - 1))];
            p.add_term(m, rational());
        }
        return p;
    }

    std::vector<Poly> vector_field(std::size_t n, int degree)
    {
        std::vector<Poly> out;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(poly(n, degree));
        }
        return out;
    }

    /// Random (generally non-holonomic) section with polynomial slots of degree <= degree.
    FunctionJetSection function_section(std::size_t n, int k, int degree)
    {
        FunctionJetSection f(n, k);
        for (std::size_t r = 0; r < f.slot_count(); ++r) {
            f.at(r) = poly(n, degree);
        }
        return f;
    }

    VectorJetSection vector_section(std::size_t n, int k, int degree)
    {
        VectorJetSection x(n, k);
        for (std::size_t s = 0; s < x.fiber_dimension(); ++s) {
            x.coord(s) = poly(n, degree);
        }
        return x;
    }

    Point point(std::size_t n)
    {
        Point p;
        for (std::size_t i = 0; i < n; ++i) {
            p.push_back(rational());
        }
        return p;
    }

    FunctionJetValue function_value(std::size_t n, int k, const Point& base)
    {
        FunctionJetValue f(n, k);
        for (std::size_t r = 0; r < f.slot_count(); ++r) {
            f.at(r) = rational();
        }
        f.set_base(base);
        return f;
    }

    VectorJetValue vector_value(std::size_t n, int k, const Point& base)
    {
        VectorJetValue x(n, k);
        for (std::size_t s = 0; s < x.fiber_dimension(); ++s) {
            x.coord(s) = rational();
        }
        x.set_base(base);
        return x;
    }

    /// Random invertible matrix: unit lower triangular times random nonzero diagonal times unit upper triangular.
    Matrix invertible_matrix(std::size_t n)
    {
        Matrix l = Matrix::identity(n);
        Matrix u = Matrix::identity(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                l(i, j) = rational();
                u(j, i) = rational();
            }
            u(i, i) = nonzero_rational();
        }
        return l * u;
    }

    /// Random k-arrow with the given source and target.
    Arrow arrow(const Point& source, const Point& target, int k)
    {
        const std::size_t n = source.size();
        const Matrix a = invertible_matrix(n);
        VectorJetValue j(n, k);
        const auto alphas = multi_indices_up_to(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            j(i, MultiIndex(n)) = target[i];
            for (const auto& alpha : alphas) {
                if (alpha.order() == 1) {
                    for (std::size_t c = 0; c < n; ++c) {
                        if (alpha[c] == 1) {
                            j(i, alpha) = a(i, c);
                        }
                    }
                } else if (alpha.order() >= 2) {
                    j(i, alpha) = rational();
                }
            }
        }
        return Arrow(source, std::move(j));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace jetcalc
