#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "formality/multivector.hpp"
#include "formality/rational.hpp"

namespace formality {

// Small dense matrix over an exact or floating scalar. Sized for n <= 12
// ambient dimensions; nothing here is tuned beyond that.
template <class S>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(size_t(rows) * cols, scalar_traits<S>::zero()) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix shape");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = scalar_traits<S>::one();
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& at(int i, int j) { return data_[size_t(i) * cols_ + j]; }
    const S& at(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
        Matrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const S& a = at(i, k);
                if (scalar_traits<S>::is_zero(a)) continue;
                for (int j = 0; j < o.cols_; ++j) r.at(i, j) += a * o.at(k, j);
            }
        return r;
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if (at(i, j) != at(j, i)) return false;
        return true;
    }

  private:
    int rows_, cols_;
    std::vector<S> data_;
};

using RatMatrix = Matrix<Rational>;
using FloatMatrix = Matrix<double>;

namespace detail {
// Pivot choice: exact scalars take any nonzero pivot, floats the largest.
template <class S>
int pick_pivot(const Matrix<S>& m, int col, int from_row) {
    int best = -1;
    if constexpr (scalar_traits<S>::exact) {
        for (int i = from_row; i < m.rows(); ++i)
            if (!scalar_traits<S>::is_zero(m.at(i, col))) return i;
    } else {
        double best_mag = 0.0;
        for (int i = from_row; i < m.rows(); ++i) {
            double mag = std::abs(m.at(i, col));
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
    }
    return best;
}

template <class S>
void swap_rows(Matrix<S>& m, int a, int b) {
    for (int j = 0; j < m.cols(); ++j) std::swap(m.at(a, j), m.at(b, j));
}
}  // namespace detail

template <class S>
S determinant(Matrix<S> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    const int n = m.rows();
    S det = scalar_traits<S>::one();
    for (int col = 0; col < n; ++col) {
        int p = detail::pick_pivot(m, col, col);
        if (p < 0) return scalar_traits<S>::zero();
        if (p != col) {
            detail::swap_rows(m, p, col);
            det = -det;
        }
        det *= m.at(col, col);
        for (int i = col + 1; i < n; ++i) {
            if (scalar_traits<S>::is_zero(m.at(i, col))) continue;
            S f = m.at(i, col) / m.at(col, col);
            for (int j = col; j < n; ++j) m.at(i, j) -= f * m.at(col, j);
        }
    }
    return det;
}

template <class S>
Matrix<S> inverse(Matrix<S> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
    const int n = m.rows();
    Matrix<S> inv = Matrix<S>::identity(n);
    for (int col = 0; col < n; ++col) {
        int p = detail::pick_pivot(m, col, col);
        if (p < 0) throw std::domain_error("matrix is singular");
        if (p != col) {
            detail::swap_rows(m, p, col);
            detail::swap_rows(inv, p, col);
        }
        S d = m.at(col, col);
        for (int j = 0; j < n; ++j) {
            m.at(col, j) /= d;
            inv.at(col, j) /= d;
        }
        for (int i = 0; i < n; ++i) {
            if (i == col || scalar_traits<S>::is_zero(m.at(i, col))) continue;
            S f = m.at(i, col);
            for (int j = 0; j < n; ++j) {
                m.at(i, j) -= f * m.at(col, j);
                inv.at(i, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

// Row-echelon rank. Exact for Rational input.
template <class S>
int rank(Matrix<S> m) {
    int r = 0;
    for (int col = 0; col < m.cols() && r < m.rows(); ++col) {
        int p = detail::pick_pivot(m, col, r);
        if (p < 0) continue;
        if (p != r) detail::swap_rows(m, p, r);
        for (int i = r + 1; i < m.rows(); ++i) {
            if (scalar_traits<S>::is_zero(m.at(i, col))) continue;
            S f = m.at(i, col) / m.at(r, col);
            for (int j = col; j < m.cols(); ++j) m.at(i, j) -= f * m.at(r, j);
        }
        ++r;
    }
    return r;
}

// det of the submatrix with rows from `row_mask` and columns from `col_mask`
// (ascending bit order). Masks must have equal popcount.
template <class S>
S minor_det(const Matrix<S>& m, blade_t row_mask, blade_t col_mask) {
    const int k = grade_of(row_mask);
    if (k != grade_of(col_mask)) throw std::invalid_argument("minor masks of unequal grade");
    if (k == 0) return scalar_traits<S>::one();
    std::vector<int> rows, cols;
    for (int i = 0; i < kMaxDim; ++i) {
        if (row_mask & (blade_t(1) << i)) rows.push_back(i);
        if (col_mask & (blade_t(1) << i)) cols.push_back(i);
    }
    Matrix<S> sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub.at(i, j) = m.at(rows[i], cols[j]);
    return determinant(std::move(sub));
}

}  // namespace formality
