#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"

namespace jetcalc {

using Vector = std::vector<Scalar>;

/// Dense row-major matrix over the rationals.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1;
        }
        return m;
    }

    /// Matrix whose columns are the given vectors (all of length rows).
    static Matrix from_columns(const std::vector<Vector>& cols, std::size_t rows)
    {
        Matrix m(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != rows) {
                throw dimension_error("column length mismatch");
            }
            for (std::size_t i = 0; i < rows; ++i) {
                m(i, j) = cols[j][i];
            }
        }
        return m;
    }

    static Matrix from_rows(const std::vector<Vector>& rows, std::size_t cols)
    {
        Matrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) {
                throw dimension_error("row length mismatch");
            }
            for (std::size_t j = 0; j < cols; ++j) {
                m(i, j) = rows[i][j];
            }
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] Vector row(std::size_t i) const
    {
        return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
    }

    [[nodiscard]] Vector column(std::size_t j) const
    {
        Vector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            v[i] = (*this)(i, j);
        }
        return v;
    }

    void append_row(const Vector& r)
    {
        if (rows_ == 0 && cols_ == 0) {
            cols_ = r.size();
        }
        if (r.size() != cols_) {
            throw dimension_error("appended row has wrong length");
        }
        data_.insert(data_.end(), r.begin(), r.end());
        ++rows_;
    }

    [[nodiscard]] Matrix transposed() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) {
            throw dimension_error("matrix product shape mismatch");
        }
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Scalar& aik = a(i, k);
                if (aik == 0) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }

    friend Vector operator*(const Matrix& a, const Vector& v)
    {
        if (a.cols_ != v.size()) {
            throw dimension_error("matrix-vector shape mismatch");
        }
        Vector out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t j = 0; j < a.cols_; ++j) {
                if (a(i, j) != 0) {
                    out[i] += a(i, j) * v[j];
                }
            }
        }
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref(Matrix& m)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c) == 0) {
            ++p;
        }
        if (p == m.rows()) {
            continue;
        }
        if (p != r) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(p, j), m(r, j));
            }
        }
        const Scalar inv = 1 / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) {
            m(r, j) *= inv;
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0) {
                continue;
            }
            const Scalar f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j) {
                if (m(r, j) != 0) {
                    m(i, j) -= f * m(r, j);
                }
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(Matrix m)
{
    return rref(m).size();
}

/// Basis of { v : m v = 0 }.
inline std::vector<Vector> nullspace(Matrix m)
{
    const auto pivots = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) {
        is_pivot[p] = true;
    }
    std::vector<Vector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) {
            continue;
        }
        Vector v(m.cols());
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            v[pivots[r]] = -m(r, f);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Some solution of m x = b, or nullopt when inconsistent.
inline std::optional<Vector> solve(const Matrix& m, const Vector& b)
{
    if (b.size() != m.rows()) {
        throw dimension_error("right-hand side length mismatch");
    }
    Matrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, m.cols()) = b[i];
    }
    const auto pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == m.cols()) {
        return std::nullopt;
    }
    Vector x(m.cols());
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        x[pivots[r]] = aug(r, m.cols());
    }
    return x;
}

inline std::optional<Matrix> inverse(const Matrix& m)
{
    if (m.rows() != m.cols()) {
        throw dimension_error("inverse of a non-square matrix");
    }
    const std::size_t n = m.rows();
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, n + i) = 1;
    }
    const auto pivots = rref(aug);
    if (pivots.size() < n || pivots[n - 1] != n - 1) {
        return std::nullopt;
    }
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            inv(i, j) = aug(i, n + j);
        }
    }
    return inv;
}

inline Scalar determinant(Matrix m)
{
    if (m.rows() != m.cols()) {
        throw dimension_error("determinant of a non-square matrix");
    }
    const std::size_t n = m.rows();
    Scalar det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m(p, c) == 0) {
            ++p;
        }
        if (p == n) {
            return 0;
        }
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(p, j), m(c, j));
            }
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m(i, c) == 0) {
                continue;
            }
            const Scalar f = m(i, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) {
                m(i, j) -= f * m(c, j);
            }
        }
    }
    return det;
}

/// Sparse vector: strictly increasing indices, no zero entries.
using SparseVector = std::vector<std::pair<std::size_t, Scalar>>;

inline SparseVector to_sparse(const Vector& v)
{
    SparseVector s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0) {
            s.emplace_back(i, v[i]);
        }
    }
    return s;
}

inline Vector to_dense(const SparseVector& s, std::size_t size)
{
    Vector v(size);
    for (const auto& [i, c] : s) {
        v.at(i) = c;
    }
    return v;
}

/// Incremental row echelon basis of a subspace of Q^cols.
///
/// Each stored row has a leading 1 at its pivot column; rows are not
/// back-reduced against each other, which keeps insertion sparse.
/// Optionally records, for every inserted vector, the combination of
/// earlier insertions that reduced it to zero (a kernel relation).
class Echelon {
public:
    explicit Echelon(std::size_t cols, bool track_relations = false)
        : cols_(cols), track_(track_relations)
    {
    }

    [[nodiscard]] std::size_t rank() const noexcept { return rows_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    /// Inserts v; returns true when v was independent of the current span.
    bool insert(const SparseVector& v)
    {
        const std::size_t id = inserted_++;
        std::map<std::size_t, Scalar> work(v.begin(), v.end());
        std::map<std::size_t, Scalar> combo;
        if (track_) {
            combo.emplace(id, Scalar(1));
        }
        reduce_in_place(work, track_ ? &combo : nullptr);
        if (work.empty()) {
            if (track_) {
                relations_.emplace_back(combo.begin(), combo.end());
            }
            return false;
        }
        const std::size_t pivot = work.begin()->first;
        const Scalar inv = 1 / work.begin()->second;
        Row row;
        row.entries.reserve(work.size());
        for (auto& [i, c] : work) {
            row.entries.emplace_back(i, c * inv);
        }
        if (track_) {
            for (auto& [i, c] : combo) {
                row.combo.emplace_back(i, c * inv);
            }
        }
        rows_.emplace(pivot, std::move(row));
        return true;
    }

    [[nodiscard]] bool contains(const SparseVector& v) const
    {
        std::map<std::size_t, Scalar> work(v.begin(), v.end());
        reduce_in_place(work, nullptr);
        return work.empty();
    }

    /// Kernel relations: coefficient vectors (over insertion ids) of dependent insertions.
    [[nodiscard]] const std::vector<SparseVector>& relations() const noexcept { return relations_; }

private:
    struct Row {
        SparseVector entries;
        SparseVector combo;
    };

    void reduce_in_place(std::map<std::size_t, Scalar>& work, std::map<std::size_t, Scalar>* combo) const
    {
        auto it = work.begin();
        while (it != work.end()) {
            auto pr = rows_.find(it->first);
            if (pr == rows_.end()) {
                ++it;
                continue;
            }
            const Scalar f = it->second;
            const std::size_t col = it->first;
            for (const auto& [j, c] : pr->second.entries) {
                auto [w, inserted] = work.try_emplace(j, 0);
                w->second -= f * c;
                if (w->second == 0) {
                    work.erase(w);
                }
            }
            if (combo != nullptr) {
                for (const auto& [j, c] : pr->second.combo) {
                    auto [w, inserted] = combo->try_emplace(j, 0);
                    w->second -= f * c;
                    if (w->second == 0) {
                        combo->erase(w);
                    }
                }
            }
            it = work.upper_bound(col);
        }
    }

    std::size_t cols_;
    bool track_;
    std::size_t inserted_ = 0;
    std::map<std::size_t, Row> rows_;
    std::vector<SparseVector> relations_;
};

} // namespace jetcalc
