#pragma once

#include <optional>
#include <vector>

#include "forge/rational.hpp"

namespace forge {

/// Dense matrix over an exact field (Rational or GaussianRational), with
/// deterministic exact elimination. Pivoting always takes the first row with
/// a nonzero entry in the current column, so results are reproducible.
template <class K> class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = K(1);
        return m;
    }

    static Mat from_rows(const std::vector<std::vector<K>> &rows) {
        Mat m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < m.rows_; ++i) {
            if (rows[i].size() != m.cols_) throw StructuralError("ragged matrix rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    K &operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const K &operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool is_zero() const {
        for (const auto &x : a_)
            if (!x.is_zero()) return false;
        return true;
    }

    Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat conj() const {
        Mat t(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) t.a_[i] = a_[i].conj();
        return t;
    }

    Mat operator-() const {
        Mat t(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) t.a_[i] = -a_[i];
        return t;
    }

    friend Mat operator+(const Mat &x, const Mat &y) {
        x.require_same_dims(y);
        Mat t = x;
        for (std::size_t i = 0; i < t.a_.size(); ++i) t.a_[i] += y.a_[i];
        return t;
    }
    friend Mat operator-(const Mat &x, const Mat &y) {
        x.require_same_dims(y);
        Mat t = x;
        for (std::size_t i = 0; i < t.a_.size(); ++i) t.a_[i] -= y.a_[i];
        return t;
    }
    friend Mat operator*(const Mat &x, const Mat &y) {
        if (x.cols_ != y.rows_) throw StructuralError("matrix dimension mismatch in product");
        Mat t(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                const K &v = x(i, k);
                if (v.is_zero()) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) t(i, j) += v * y(k, j);
            }
        return t;
    }
    Mat scaled(const K &c) const {
        Mat t = *this;
        for (auto &x : t.a_) x *= c;
        return t;
    }

    friend bool operator==(const Mat &x, const Mat &y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }
    friend bool operator!=(const Mat &x, const Mat &y) { return !(x == y); }

    std::vector<K> col(std::size_t j) const {
        std::vector<K> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    Mat cols_slice(const std::vector<std::size_t> &idx) const {
        Mat t(rows_, idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
            for (std::size_t i = 0; i < rows_; ++i) t(i, j) = (*this)(i, idx[j]);
        return t;
    }

    static Mat hcat(const Mat &x, const Mat &y) {
        if (x.rows_ != y.rows_) throw StructuralError("hcat row mismatch");
        Mat t(x.rows_, x.cols_ + y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i) {
            for (std::size_t j = 0; j < x.cols_; ++j) t(i, j) = x(i, j);
            for (std::size_t j = 0; j < y.cols_; ++j) t(i, x.cols_ + j) = y(i, j);
        }
        return t;
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    std::vector<std::size_t> rref() {
        std::vector<std::size_t> pivots;
        std::size_t row = 0;
        for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
            std::size_t p = row;
            while (p < rows_ && (*this)(p, col).is_zero()) ++p;
            if (p == rows_) continue;
            if (p != row)
                for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(p, j), (*this)(row, j));
            K inv = K(1) / (*this)(row, col);
            for (std::size_t j = 0; j < cols_; ++j) (*this)(row, j) *= inv;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == row) continue;
                K f = (*this)(i, col);
                if (f.is_zero()) continue;
                for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) -= f * (*this)(row, j);
            }
            pivots.push_back(col);
            ++row;
        }
        return pivots;
    }

    std::size_t rank() const {
        Mat t = *this;
        return t.rref().size();
    }

    K det() const {
        if (rows_ != cols_) throw StructuralError("determinant of non-square matrix");
        Mat t = *this;
        K d(1);
        for (std::size_t col = 0, row = 0; col < cols_ && row < rows_; ++col, ++row) {
            std::size_t p = row;
            while (p < rows_ && t(p, col).is_zero()) ++p;
            if (p == rows_) return K(0);
            if (p != row) {
                for (std::size_t j = 0; j < cols_; ++j) std::swap(t(p, j), t(row, j));
                d = -d;
            }
            d *= t(row, col);
            K inv = K(1) / t(row, col);
            for (std::size_t i = row + 1; i < rows_; ++i) {
                K f = t(i, col) * inv;
                if (f.is_zero()) continue;
                for (std::size_t j = col; j < cols_; ++j) t(i, j) -= f * t(row, j);
            }
        }
        return d;
    }

    /// Basis of ker as columns.
    Mat kernel() const {
        Mat t = *this;
        auto piv = t.rref();
        std::vector<bool> is_piv(cols_, false);
        for (auto p : piv) is_piv[p] = true;
        std::vector<std::size_t> free;
        for (std::size_t j = 0; j < cols_; ++j)
            if (!is_piv[j]) free.push_back(j);
        Mat ker(cols_, free.size());
        for (std::size_t f = 0; f < free.size(); ++f) {
            ker(free[f], f) = K(1);
            for (std::size_t r = 0; r < piv.size(); ++r) ker(piv[r], f) = -t(r, free[f]);
        }
        return ker;
    }

    std::optional<Mat> inverse() const {
        if (rows_ != cols_) throw StructuralError("inverse of non-square matrix");
        Mat aug = hcat(*this, identity(rows_));
        auto piv = aug.rref();
        if (piv.size() != rows_) return std::nullopt;
        for (std::size_t j = 0; j < rows_; ++j)
            if (piv[j] != j) return std::nullopt;
        Mat inv(rows_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < rows_; ++j) inv(i, j) = aug(i, rows_ + j);
        return inv;
    }

    /// One solution of (*this) x = b, or nullopt when inconsistent.
    std::optional<std::vector<K>> solve(const std::vector<K> &b) const {
        if (b.size() != rows_) throw StructuralError("solve dimension mismatch");
        Mat rhs(rows_, 1);
        for (std::size_t i = 0; i < rows_; ++i) rhs(i, 0) = b[i];
        Mat aug = hcat(*this, rhs);
        auto piv = aug.rref();
        for (auto p : piv)
            if (p == cols_) return std::nullopt;
        std::vector<K> x(cols_);
        for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, cols_);
        return x;
    }

    void require_same_dims(const Mat &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw StructuralError("matrix dimension mismatch");
    }

  private:
    std::size_t rows_, cols_;
    std::vector<K> a_;
};

using QMat = Mat<Rational>;
using GMat = Mat<GaussianRational>;

/// Subspace of K^n presented by spanning columns and canonicalized to a
/// column-reduced echelon basis, so equality of spans is plain equality.
template <class K> class Subspace {
  public:
    explicit Subspace(std::size_t ambient) : basis_(ambient, 0) {}
    explicit Subspace(const Mat<K> &spanning_columns) : basis_(canonical(spanning_columns)) {}

    std::size_t ambient() const { return basis_.rows(); }
    std::size_t dim() const { return basis_.cols(); }
    const Mat<K> &basis() const { return basis_; }

    static Subspace full(std::size_t n) { return Subspace(Mat<K>::identity(n)); }

    bool contains(const std::vector<K> &v) const {
        Mat<K> m(ambient(), 1);
        for (std::size_t i = 0; i < ambient(); ++i) m(i, 0) = v[i];
        return Mat<K>::hcat(basis_, m).rank() == dim();
    }
    bool contains(const Subspace &o) const { return sum(*this, o).dim() == dim(); }

    friend Subspace sum(const Subspace &x, const Subspace &y) {
        x.require_ambient(y);
        return Subspace(Mat<K>::hcat(x.basis_, y.basis_));
    }

    /// Zassenhaus-style intersection: combos of x-columns that also lie in y.
    friend Subspace intersect(const Subspace &x, const Subspace &y) {
        x.require_ambient(y);
        if (x.dim() == 0 || y.dim() == 0) return Subspace(x.ambient());
        Mat<K> stacked = Mat<K>::hcat(x.basis_, y.basis_);
        Mat<K> ker = stacked.kernel();
        Mat<K> pick(x.dim(), ker.cols());
        for (std::size_t i = 0; i < x.dim(); ++i)
            for (std::size_t j = 0; j < ker.cols(); ++j) pick(i, j) = ker(i, j);
        return Subspace(x.basis_ * pick);
    }

    /// Image under a linear map.
    Subspace map(const Mat<K> &m) const { return Subspace(m * basis_); }

    Subspace conj() const { return Subspace(basis_.conj()); }

    friend bool operator==(const Subspace &x, const Subspace &y) { return x.basis_ == y.basis_; }
    friend bool operator!=(const Subspace &x, const Subspace &y) { return !(x == y); }

    void require_ambient(const Subspace &o) const {
        if (ambient() != o.ambient()) throw StructuralError("subspace ambient dimension mismatch");
    }

  private:
    static Mat<K> canonical(const Mat<K> &cols) {
        Mat<K> t = cols.transpose();
        auto piv = t.rref();
        Mat<K> b(cols.rows(), piv.size());
        for (std::size_t r = 0; r < piv.size(); ++r)
            for (std::size_t i = 0; i < cols.rows(); ++i) b(i, r) = t(r, i);
        return b;
    }

    Mat<K> basis_;
};

using QSpace = Subspace<Rational>;
using GSpace = Subspace<GaussianRational>;

} // namespace forge
