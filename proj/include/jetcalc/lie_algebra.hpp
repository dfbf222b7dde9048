#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "scalar.hpp"

namespace jetcalc {

/// Structure constants c^k_{ij} of a bracket on a d-dimensional space: [e_i, e_j] = sum_k c^k_{ij} e_k.
class StructureConstants {
public:
    StructureConstants() = default;
    explicit StructureConstants(std::size_t d) : d_(d), c_(d * d * d) {}

    [[nodiscard]] std::size_t dim() const noexcept { return d_; }

    Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) { return c_.at((i * d_ + j) * d_ + k); }
    const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const { return c_.at((i * d_ + j) * d_ + k); }

    /// Sets [e_i, e_j] = value * e_k and [e_j, e_i] = -value * e_k.
    void set_antisymmetric(std::size_t i, std::size_t j, std::size_t k, const Scalar& value)
    {
        (*this)(i, j, k) = value;
        (*this)(j, i, k) = -value;
    }

    [[nodiscard]] Vector bracket(const Vector& a, const Vector& b) const
    {
        if (a.size() != d_ || b.size() != d_) {
            throw dimension_error("bracket operands have wrong dimension");
        }
        Vector out(d_);
        for (std::size_t i = 0; i < d_; ++i) {
            if (a[i] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < d_; ++j) {
                if (b[j] == 0) {
                    continue;
                }
                const Scalar ab = a[i] * b[j];
                for (std::size_t k = 0; k < d_; ++k) {
                    if ((*this)(i, j, k) != 0) {
                        out[k] += ab * (*this)(i, j, k);
                    }
                }
            }
        }
        return out;
    }

    friend bool operator==(const StructureConstants&, const StructureConstants&) = default;

private:
    std::size_t d_ = 0;
    std::vector<Scalar> c_;
};

/// Outcome of an exact Lie algebra validation; the witness names the first failing indices.
struct LieCheck {
    bool ok = true;
    std::string failure; // "antisymmetry" or "jacobi"
    std::vector<std::size_t> witness;
};

/// Exact antisymmetry and Jacobi check of structure constants.
inline LieCheck validate_lie_algebra(const StructureConstants& c)
{
    const std::size_t d = c.dim();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k) {
                if (c(i, j, k) != -c(j, i, k)) {
                    return {false, "antisymmetry", {i, j, k}};
                }
            }
        }
    }
    auto unit = [d](std::size_t i) {
        Vector v(d);
        v[i] = 1;
        return v;
    };
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            for (std::size_t k = j + 1; k < d; ++k) {
                const Vector a = c.bracket(unit(i), c.bracket(unit(j), unit(k)));
                const Vector b = c.bracket(unit(j), c.bracket(unit(k), unit(i)));
                const Vector e = c.bracket(unit(k), c.bracket(unit(i), unit(j)));
                for (std::size_t t = 0; t < d; ++t) {
                    if (a[t] + b[t] + e[t] != 0) {
                        return {false, "jacobi", {i, j, k}};
                    }
                }
            }
        }
    }
    return {};
}

/// A finite-dimensional Lie algebra; construction verifies antisymmetry and Jacobi exactly.
class FiniteLieAlgebra {
public:
    FiniteLieAlgebra() = default;

    explicit FiniteLieAlgebra(StructureConstants c) : c_(std::move(c))
    {
        const auto check = validate_lie_algebra(c_);
        if (!check.ok) {
            std::string w;
            for (auto i : check.witness) {
                w += (w.empty() ? "" : ",") + std::to_string(i);
            }
            throw domain_error("structure constants fail " + check.failure + " at (" + w + ")");
        }
    }

    static FiniteLieAlgebra abelian(std::size_t d) { return FiniteLieAlgebra(StructureConstants(d)); }

    [[nodiscard]] std::size_t dim() const noexcept { return c_.dim(); }
    [[nodiscard]] const StructureConstants& constants() const noexcept { return c_; }

    [[nodiscard]] Vector bracket(const Vector& a, const Vector& b) const { return c_.bracket(a, b); }

    [[nodiscard]] Vector unit(std::size_t i) const
    {
        Vector v(dim());
        v.at(i) = 1;
        return v;
    }

private:
    StructureConstants c_;
};

/// Classical examples used throughout the tests and built-in scenarios.
namespace lie_algebras {

/// [e0, e1] = e1
inline FiniteLieAlgebra affine_line()
{
    StructureConstants c(2);
    c.set_antisymmetric(0, 1, 1, 1);
    return FiniteLieAlgebra(c);
}

/// sl(2) in the basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
inline FiniteLieAlgebra sl2()
{
    StructureConstants c(3);
    c.set_antisymmetric(0, 1, 1, 2);
    c.set_antisymmetric(0, 2, 2, -2);
    c.set_antisymmetric(1, 2, 0, 1);
    return FiniteLieAlgebra(c);
}

/// Heisenberg algebra (x, y, z): [x, y] = z.
inline FiniteLieAlgebra heisenberg()
{
    StructureConstants c(3);
    c.set_antisymmetric(0, 1, 2, 1);
    return FiniteLieAlgebra(c);
}

/// gl(m) in the basis E_ab (index a*m + b) with the matrix commutator.
inline FiniteLieAlgebra gl(std::size_t m)
{
    const std::size_t d = m * m;
    StructureConstants c(d);
    // [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            for (std::size_t cc = 0; cc < m; ++cc) {
                for (std::size_t dd = 0; dd < m; ++dd) {
                    const std::size_t i = a * m + b;
                    const std::size_t j = cc * m + dd;
                    if (b == cc) {
                        c(i, j, a * m + dd) += 1;
                    }
                    if (dd == a) {
                        c(i, j, cc * m + b) -= 1;
                    }
                }
            }
        }
    }
    return FiniteLieAlgebra(c);
}

} // namespace lie_algebras

/// A representation rho of a Lie algebra on Q^m, given by one m x m matrix per basis element.
class LieModule {
public:
    LieModule() = default;

    LieModule(const FiniteLieAlgebra& g, std::vector<Matrix> action) : action_(std::move(action))
    {
        if (action_.size() != g.dim()) {
            throw dimension_error("one action matrix per basis element is required");
        }
        m_ = action_.empty() ? 0 : action_.front().rows();
        for (const auto& a : action_) {
            if (a.rows() != m_ || a.cols() != m_) {
                throw dimension_error("action matrices must be square of equal size");
            }
        }
        // rho([a, b]) = rho(a) rho(b) - rho(b) rho(a)
        for (std::size_t i = 0; i < g.dim(); ++i) {
            for (std::size_t j = 0; j < g.dim(); ++j) {
                Matrix lhs(m_, m_);
                for (std::size_t k = 0; k < g.dim(); ++k) {
                    const Scalar& c = g.constants()(i, j, k);
                    if (c == 0) {
                        continue;
                    }
                    for (std::size_t r = 0; r < m_; ++r) {
                        for (std::size_t s = 0; s < m_; ++s) {
                            lhs(r, s) += c * action_[k](r, s);
                        }
                    }
                }
                const Matrix ab = action_[i] * action_[j];
                const Matrix ba = action_[j] * action_[i];
                for (std::size_t r = 0; r < m_; ++r) {
                    for (std::size_t s = 0; s < m_; ++s) {
                        if (lhs(r, s) != ab(r, s) - ba(r, s)) {
                            throw domain_error("action matrices do not define a representation");
                        }
                    }
                }
            }
        }
    }

    static LieModule trivial(const FiniteLieAlgebra& g, std::size_t m)
    {
        return LieModule(g, std::vector<Matrix>(g.dim(), Matrix(m, m)));
    }

    static LieModule adjoint(const FiniteLieAlgebra& g)
    {
        const std::size_t d = g.dim();
        std::vector<Matrix> act(d, Matrix(d, d));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t k = 0; k < d; ++k) {
                    act[i](k, j) = g.constants()(i, j, k);
                }
            }
        }
        return LieModule(g, std::move(act));
    }

    [[nodiscard]] std::size_t dim() const noexcept { return m_; }
    [[nodiscard]] const Matrix& action(std::size_t i) const { return action_.at(i); }

private:
    std::size_t m_ = 0;
    std::vector<Matrix> action_;
};

// ---------------------------------------------------------------------------
// Chevalley-Eilenberg complex

/// Cochains Hom(Lambda^r g, V) in the basis (increasing r-tuple, basis vector of V).
class CochainSpace {
public:
    CochainSpace(std::size_t d, std::size_t m, std::size_t r) : d_(d), m_(m), r_(r)
    {
        std::vector<std::size_t> cur;
        auto rec = [&](auto&& self, std::size_t start) -> void {
            if (cur.size() == r_) {
                tuples_.push_back(cur);
                return;
            }
            for (std::size_t i = start; i < d_; ++i) {
                cur.push_back(i);
                self(self, i + 1);
                cur.pop_back();
            }
        };
        rec(rec, 0);
    }

    [[nodiscard]] std::size_t degree() const noexcept { return r_; }
    [[nodiscard]] std::size_t size() const noexcept { return tuples_.size() * m_; }
    [[nodiscard]] const std::vector<std::vector<std::size_t>>& tuples() const noexcept { return tuples_; }

    [[nodiscard]] std::size_t tuple_index(const std::vector<std::size_t>& sorted) const
    {
        auto it = std::lower_bound(tuples_.begin(), tuples_.end(), sorted);
        if (it == tuples_.end() || *it != sorted) {
            throw domain_error("tuple not in cochain basis");
        }
        return static_cast<std::size_t>(it - tuples_.begin());
    }

    /// omega(e_{t_1}, ..., e_{t_r}) for an arbitrary tuple, as a vector in V.
    [[nodiscard]] Vector evaluate(const Vector& omega, std::vector<std::size_t> args) const
    {
        Vector out(m_);
        int sign = 1;
        // insertion sort tracking the permutation sign
        for (std::size_t i = 1; i < args.size(); ++i) {
            for (std::size_t j = i; j > 0 && args[j - 1] > args[j]; --j) {
                std::swap(args[j - 1], args[j]);
                sign = -sign;
            }
        }
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (args[i] == args[i - 1]) {
                return out;
            }
        }
        const std::size_t t = tuple_index(args);
        for (std::size_t v = 0; v < m_; ++v) {
            out[v] = sign * omega[t * m_ + v];
        }
        return out;
    }

private:
    std::size_t d_;
    std::size_t m_;
    std::size_t r_;
    std::vector<std::vector<std::size_t>> tuples_;
};

/// Upper bound on the number of cochain coordinates handled by the cohomology routines.
inline constexpr std::size_t max_cochain_coordinates = 20000;

/// Applies the Chevalley-Eilenberg differential to one r-cochain.
inline Vector ce_differential(const FiniteLieAlgebra& g, const LieModule& v, const CochainSpace& from,
                              const CochainSpace& to, const Vector& omega)
{
    const std::size_t m = v.dim();
    const std::size_t r = from.degree();
    Vector out(to.size());
    for (std::size_t t = 0; t < to.tuples().size(); ++t) {
        const auto& args = to.tuples()[t];
        Vector acc(m);
        for (std::size_t i = 0; i <= r; ++i) {
            std::vector<std::size_t> rest;
            for (std::size_t a = 0; a <= r; ++a) {
                if (a != i) {
                    rest.push_back(args[a]);
                }
            }
            const Vector val = from.evaluate(omega, rest);
            const Vector moved = v.action(args[i]) * val;
            const int sign = (i % 2 == 0) ? 1 : -1;
            for (std::size_t s = 0; s < m; ++s) {
                acc[s] += sign * moved[s];
            }
        }
        for (std::size_t i = 0; i <= r; ++i) {
            for (std::size_t j = i + 1; j <= r; ++j) {
                std::vector<std::size_t> rest;
                for (std::size_t a = 0; a <= r; ++a) {
                    if (a != i && a != j) {
                        rest.push_back(args[a]);
                    }
                }
                const int sign = ((i + j) % 2 == 0) ? 1 : -1;
                for (std::size_t l = 0; l < g.dim(); ++l) {
                    const Scalar& c = g.constants()(args[i], args[j], l);
                    if (c == 0) {
                        continue;
                    }
                    std::vector<std::size_t> full{l};
                    full.insert(full.end(), rest.begin(), rest.end());
                    const Vector val = from.evaluate(omega, full);
                    for (std::size_t s = 0; s < m; ++s) {
                        acc[s] += sign * c * val[s];
                    }
                }
            }
        }
        for (std::size_t s = 0; s < m; ++s) {
            out[t * m + s] = acc[s];
        }
    }
    return out;
}

/// Matrix of d: C^r -> C^{r+1}.
inline Matrix ce_differential_matrix(const FiniteLieAlgebra& g, const LieModule& v, std::size_t r)
{
    const CochainSpace from(g.dim(), v.dim(), r);
    const CochainSpace to(g.dim(), v.dim(), r + 1);
    if (from.size() > max_cochain_coordinates || to.size() > max_cochain_coordinates) {
        throw resource_error("cochain space too large for exact cohomology");
    }
    Matrix d(to.size(), from.size());
    for (std::size_t c = 0; c < from.size(); ++c) {
        Vector e(from.size());
        e[c] = 1;
        const Vector img = ce_differential(g, v, from, to, e);
        for (std::size_t row = 0; row < img.size(); ++row) {
            d(row, c) = img[row];
        }
    }
    return d;
}

/// dim H^r(g, V) for r = 0..r_max.
inline std::vector<std::size_t> ce_cohomology_dims(const FiniteLieAlgebra& g, const LieModule& v, std::size_t r_max)
{
    std::vector<std::size_t> ranks; // ranks[r] = rank of d: C^r -> C^{r+1}
    for (std::size_t r = 0; r <= r_max; ++r) {
        ranks.push_back(r < g.dim() ? rank(ce_differential_matrix(g, v, r)) : 0);
    }
    std::vector<std::size_t> dims;
    for (std::size_t r = 0; r <= r_max; ++r) {
        const std::size_t c = CochainSpace(g.dim(), v.dim(), r).size();
        const std::size_t prev = r == 0 ? 0 : ranks[r - 1];
        dims.push_back(c - ranks[r] - prev);
    }
    return dims;
}

/// Whether span(basis) is closed under the bracket.
inline bool is_subalgebra(const FiniteLieAlgebra& g, const std::vector<Vector>& basis)
{
    Echelon span(g.dim());
    for (const auto& b : basis) {
        span.insert(to_sparse(b));
    }
    for (const auto& a : basis) {
        for (const auto& b : basis) {
            if (!span.contains(to_sparse(g.bracket(a, b)))) {
                return false;
            }
        }
    }
    return true;
}

/// Whether span(basis) is an ideal.
inline bool is_ideal(const FiniteLieAlgebra& g, const std::vector<Vector>& basis)
{
    Echelon span(g.dim());
    for (const auto& b : basis) {
        span.insert(to_sparse(b));
    }
    for (std::size_t i = 0; i < g.dim(); ++i) {
        for (const auto& b : basis) {
            if (!span.contains(to_sparse(g.bracket(g.unit(i), b)))) {
                return false;
            }
        }
    }
    return true;
}

/// dim H^r(g, s; V) of the relative complex: cochains with i_x omega = 0 and L_x omega = 0 for x in s.
inline std::vector<std::size_t> relative_ce_cohomology_dims(const FiniteLieAlgebra& g, const std::vector<Vector>& s,
                                                            const LieModule& v, std::size_t r_max)
{
    if (!is_subalgebra(g, s)) {
        throw domain_error("relative cohomology needs a subalgebra");
    }
    const std::size_t m = v.dim();
    // basis of the relative cochains in each degree up to r_max + 1
    std::vector<std::vector<Vector>> rel;
    for (std::size_t r = 0; r <= r_max + 1; ++r) {
        const CochainSpace cs(g.dim(), m, r);
        if (cs.size() > max_cochain_coordinates) {
            throw resource_error("cochain space too large for exact cohomology");
        }
        Matrix constraints(0, cs.size());
        for (std::size_t col = 0; col < cs.size(); ++col) {
            (void)col;
        }
        std::vector<Vector> rows;
        for (const auto& x : s) {
            // interior product and Lie derivative, as linear maps applied to each basis cochain
            std::vector<Vector> interior_cols;
            std::vector<Vector> lie_cols;
            const CochainSpace lower(g.dim(), m, r == 0 ? 0 : r - 1);
            for (std::size_t c = 0; c < cs.size(); ++c) {
                Vector e(cs.size());
                e[c] = 1;
                if (r > 0) {
                    Vector iv(lower.size());
                    for (std::size_t t = 0; t < lower.tuples().size(); ++t) {
                        Vector acc(m);
                        for (std::size_t a = 0; a < g.dim(); ++a) {
                            if (x[a] == 0) {
                                continue;
                            }
                            std::vector<std::size_t> args{a};
                            args.insert(args.end(), lower.tuples()[t].begin(), lower.tuples()[t].end());
                            const Vector val = cs.evaluate(e, args);
                            for (std::size_t q = 0; q < m; ++q) {
                                acc[q] += x[a] * val[q];
                            }
                        }
                        for (std::size_t q = 0; q < m; ++q) {
                            iv[t * m + q] = acc[q];
                        }
                    }
                    interior_cols.push_back(std::move(iv));
                }
                Vector lv(cs.size());
                for (std::size_t t = 0; t < cs.tuples().size(); ++t) {
                    const auto& args = cs.tuples()[t];
                    Vector acc(m);
                    const Vector val = cs.evaluate(e, args);
                    for (std::size_t a = 0; a < g.dim(); ++a) {
                        if (x[a] == 0) {
                            continue;
                        }
                        const Vector moved = v.action(a) * val;
                        for (std::size_t q = 0; q < m; ++q) {
                            acc[q] += x[a] * moved[q];
                        }
                    }
                    for (std::size_t i = 0; i < args.size(); ++i) {
                        const Vector bx = g.bracket(x, g.unit(args[i]));
                        for (std::size_t l = 0; l < g.dim(); ++l) {
                            if (bx[l] == 0) {
                                continue;
                            }
                            auto changed = args;
                            changed[i] = l;
                            const Vector w = cs.evaluate(e, changed);
                            for (std::size_t q = 0; q < m; ++q) {
                                acc[q] -= bx[l] * w[q];
                            }
                        }
                    }
                    for (std::size_t q = 0; q < m; ++q) {
                        lv[t * m + q] = acc[q];
                    }
                }
                lie_cols.push_back(std::move(lv));
            }
            if (r > 0) {
                const Matrix im = Matrix::from_columns(interior_cols, lower.size());
                for (std::size_t i = 0; i < im.rows(); ++i) {
                    rows.push_back(im.row(i));
                }
            }
            const Matrix lm = Matrix::from_columns(lie_cols, cs.size());
            for (std::size_t i = 0; i < lm.rows(); ++i) {
                rows.push_back(lm.row(i));
            }
        }
        if (rows.empty()) {
            std::vector<Vector> all;
            for (std::size_t c = 0; c < cs.size(); ++c) {
                Vector e(cs.size());
                e[c] = 1;
                all.push_back(std::move(e));
            }
            rel.push_back(std::move(all));
        } else {
            rel.push_back(nullspace(Matrix::from_rows(rows, cs.size())));
        }
    }
    std::vector<std::size_t> ranks;
    for (std::size_t r = 0; r <= r_max; ++r) {
        const CochainSpace from(g.dim(), m, r);
        const CochainSpace to(g.dim(), m, r + 1);
        Echelon img(to.size());
        for (const auto& b : rel[r]) {
            img.insert(to_sparse(ce_differential(g, v, from, to, b)));
        }
        ranks.push_back(img.rank());
    }
    std::vector<std::size_t> dims;
    for (std::size_t r = 0; r <= r_max; ++r) {
        const std::size_t prev = r == 0 ? 0 : ranks[r - 1];
        dims.push_back(rel[r].size() - ranks[r] - prev);
    }
    return dims;
}

// ---------------------------------------------------------------------------
// subalgebras, series, extensions

/// Coordinates of v in the given (independent) basis, or nullopt if v is outside the span.
inline std::optional<Vector> coordinates_in(const std::vector<Vector>& basis, const Vector& v)
{
    if (basis.empty()) {
        for (const auto& x : v) {
            if (x != 0) {
                return std::nullopt;
            }
        }
        return Vector{};
    }
    return solve(Matrix::from_columns(basis, v.size()), v);
}

/// The Lie algebra structure induced on a subalgebra, in the given basis.
inline FiniteLieAlgebra restrict_to_subalgebra(const FiniteLieAlgebra& g, const std::vector<Vector>& basis)
{
    StructureConstants c(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const auto coords = coordinates_in(basis, g.bracket(basis[i], basis[j]));
            if (!coords) {
                throw domain_error("basis does not span a subalgebra");
            }
            for (std::size_t k = 0; k < basis.size(); ++k) {
                c(i, j, k) = (*coords)[k];
            }
        }
    }
    return FiniteLieAlgebra(c);
}

/// Dimensions of the lower central series g = g^1, g^2 = [g, g], g^{i+1} = [g, g^i].
struct NilpotencyReport {
    std::vector<std::size_t> lower_central_dims;
    bool nilpotent = false;
    bool abelian = false;
};

inline NilpotencyReport nilpotency_analysis(const FiniteLieAlgebra& g)
{
    NilpotencyReport rep;
    std::vector<Vector> current;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        current.push_back(g.unit(i));
    }
    rep.lower_central_dims.push_back(g.dim());
    while (true) {
        Echelon next(g.dim());
        std::vector<Vector> basis;
        for (std::size_t i = 0; i < g.dim(); ++i) {
            for (const auto& b : current) {
                Vector br = g.bracket(g.unit(i), b);
                if (next.insert(to_sparse(br))) {
                    basis.push_back(std::move(br));
                }
            }
        }
        if (basis.size() == current.size()) {
            break;
        }
        rep.lower_central_dims.push_back(basis.size());
        current = std::move(basis);
        if (current.empty()) {
            break;
        }
    }
    rep.nilpotent = rep.lower_central_dims.back() == 0;
    rep.abelian = rep.lower_central_dims.size() == 1 ? g.dim() == 0 : rep.lower_central_dims[1] == 0;
    if (g.dim() == 0) {
        rep.nilpotent = true;
        rep.abelian = true;
    }
    return rep;
}

/// 0 -> A -> E -> Q -> 0 with an ideal A of E, the quotient Q, the projection E -> Q and a linear section.
struct ExtensionData {
    FiniteLieAlgebra big;
    std::vector<Vector> ideal;  // basis of A inside E
    FiniteLieAlgebra quotient;  // Q
    Matrix projection;          // dim Q x dim E
    Matrix section;             // dim E x dim Q, projection * section = identity
};

/// Builds Q = E / A using the coordinate complement of A and the inclusion of that complement as section.
inline ExtensionData make_extension(const FiniteLieAlgebra& e, const std::vector<Vector>& ideal)
{
    if (!is_ideal(e, ideal)) {
        throw domain_error("kernel of an extension must be an ideal");
    }
    const std::size_t d = e.dim();
    Matrix a = Matrix::from_rows(ideal, d);
    const auto pivots = rref(a);
    if (pivots.size() != ideal.size()) {
        throw domain_error("ideal basis is linearly dependent");
    }
    std::vector<std::size_t> complement;
    for (std::size_t i = 0; i < d; ++i) {
        if (std::find(pivots.begin(), pivots.end(), i) == pivots.end()) {
            complement.push_back(i);
        }
    }
    std::vector<Vector> full = ideal; // basis of E = ideal + complement units
    for (auto c : complement) {
        full.push_back(e.unit(c));
    }
    const std::size_t q = complement.size();
    const std::size_t na = ideal.size();
    // projection: coordinates of v in "full", keep the complement part
    Matrix proj(q, d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto coords = *coordinates_in(full, e.unit(i));
        for (std::size_t j = 0; j < q; ++j) {
            proj(j, i) = coords[na + j];
        }
    }
    Matrix sect(d, q);
    for (std::size_t j = 0; j < q; ++j) {
        sect(complement[j], j) = 1;
    }
    StructureConstants qc(q);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
            const Vector br = e.bracket(e.unit(complement[i]), e.unit(complement[j]));
            const Vector pb = proj * br;
            for (std::size_t k = 0; k < q; ++k) {
                qc(i, j, k) = pb[k];
            }
        }
    }
    return ExtensionData{e, ideal, FiniteLieAlgebra(qc), proj, sect};
}

/// The same extension with the section replaced by section + (ideal-valued map); delta is dim A x dim Q.
inline ExtensionData with_shifted_section(ExtensionData ext, const Matrix& delta)
{
    const std::size_t d = ext.big.dim();
    for (std::size_t j = 0; j < ext.quotient.dim(); ++j) {
        for (std::size_t a = 0; a < ext.ideal.size(); ++a) {
            for (std::size_t i = 0; i < d; ++i) {
                ext.section(i, j) += delta(a, j) * ext.ideal[a][i];
            }
        }
    }
    return ext;
}

/// A Q-valued 2-cochain with values in the abelian kernel, together with the induced module.
struct ExtensionCocycle {
    LieModule module;  // Q acting on A by [sigma q, a]
    Vector cochain;    // in CochainSpace(dim Q, dim A, 2) coordinates
    bool is_cocycle = false;
};

inline bool kernel_is_abelian(const ExtensionData& ext)
{
    for (const auto& a : ext.ideal) {
        for (const auto& b : ext.ideal) {
            for (const auto& x : ext.big.bracket(a, b)) {
                if (x != 0) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// omega(q1, q2) = [sigma q1, sigma q2] - sigma [q1, q2], expressed in the ideal basis.
inline ExtensionCocycle extension_two_cocycle(const ExtensionData& ext)
{
    const std::size_t q = ext.quotient.dim();
    const std::size_t na = ext.ideal.size();
    const std::size_t d = ext.big.dim();
    if (!kernel_is_abelian(ext)) {
        throw domain_error("extension cocycle needs an abelian kernel");
    }
    const Matrix check = ext.projection * ext.section;
    if (!(check == Matrix::identity(q))) {
        throw domain_error("section is not a right inverse of the projection");
    }
    auto sigma = [&](const Vector& v) { return ext.section * v; };
    std::vector<Matrix> act(q, Matrix(na, na));
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t a = 0; a < na; ++a) {
            const auto coords = coordinates_in(ext.ideal, ext.big.bracket(sigma(ext.quotient.unit(i)), ext.ideal[a]));
            if (!coords) {
                throw domain_error("kernel is not an ideal");
            }
            for (std::size_t b = 0; b < na; ++b) {
                act[i](b, a) = (*coords)[b];
            }
        }
    }
    ExtensionCocycle out{LieModule(ext.quotient, act), {}, false};
    const CochainSpace c2(q, na, 2);
    out.cochain.assign(c2.size(), Scalar(0));
    for (std::size_t t = 0; t < c2.tuples().size(); ++t) {
        const auto& tu = c2.tuples()[t];
        const Vector lhs = ext.big.bracket(sigma(ext.quotient.unit(tu[0])), sigma(ext.quotient.unit(tu[1])));
        const Vector rhs = sigma(ext.quotient.bracket(ext.quotient.unit(tu[0]), ext.quotient.unit(tu[1])));
        Vector diff(d);
        for (std::size_t i = 0; i < d; ++i) {
            diff[i] = lhs[i] - rhs[i];
        }
        const auto coords = coordinates_in(ext.ideal, diff);
        if (!coords) {
            throw domain_error("cocycle value leaves the kernel; projection is not a homomorphism");
        }
        for (std::size_t b = 0; b < na; ++b) {
            out.cochain[t * na + b] = (*coords)[b];
        }
    }
    const CochainSpace c3(q, na, 3);
    const Vector d_omega = ce_differential(ext.quotient, out.module, c2, c3, out.cochain);
    out.is_cocycle = std::all_of(d_omega.begin(), d_omega.end(), [](const Scalar& x) { return x == 0; });
    return out;
}

/// Whether two 2-cochains differ by a coboundary d(lambda), lambda: Q -> A.
inline bool cohomologous(const FiniteLieAlgebra& q, const LieModule& a, const Vector& x, const Vector& y)
{
    const CochainSpace c1(q.dim(), a.dim(), 1);
    const CochainSpace c2(q.dim(), a.dim(), 2);
    Echelon img(c2.size());
    for (std::size_t c = 0; c < c1.size(); ++c) {
        Vector e(c1.size());
        e[c] = 1;
        img.insert(to_sparse(ce_differential(q, a, c1, c2, e)));
    }
    Vector diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff[i] = x[i] - y[i];
    }
    return img.contains(to_sparse(diff));
}

enum class SplitVerdict { split, non_split, inapplicable };

inline const char* to_string(SplitVerdict v)
{
    switch (v) {
    case SplitVerdict::split:
        return "split";
    case SplitVerdict::non_split:
        return "non_split";
    case SplitVerdict::inapplicable:
        return "inapplicable";
    }
    return "?";
}

/// Splitting decided by the class of the extension cocycle in H^2(Q, A); needs an abelian kernel.
inline SplitVerdict is_split(const ExtensionData& ext)
{
    if (!kernel_is_abelian(ext)) {
        return SplitVerdict::inapplicable;
    }
    const auto cocycle = extension_two_cocycle(ext);
    const Vector zero(cocycle.cochain.size());
    return cohomologous(ext.quotient, cocycle.module, cocycle.cochain, zero) ? SplitVerdict::split
                                                                             : SplitVerdict::non_split;
}

} // namespace jetcalc
