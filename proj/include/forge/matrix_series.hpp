#pragma once

#include "forge/linalg.hpp"
#include "forge/series.hpp"

namespace forge {

/// Matrix with TruncatedSeries entries, all sharing one variable set and one
/// bounds vector.
template <class K> class MatrixSeries {
  public:
    MatrixSeries() : rows_(0), cols_(0) {}

    MatrixSeries(std::size_t r, std::size_t c, VarSetPtr vars, std::vector<int> bounds)
        : rows_(r), cols_(c), vars_(std::move(vars)), bounds_(std::move(bounds)) {
        e_.assign(rows_ * cols_, TruncatedSeries<K>(vars_, bounds_));
    }

    static MatrixSeries identity(std::size_t n, VarSetPtr vars, std::vector<int> bounds) {
        MatrixSeries m(n, n, std::move(vars), std::move(bounds));
        for (std::size_t i = 0; i < n; ++i) m(i, i) = TruncatedSeries<K>::constant(m.vars_, m.bounds_, K(1));
        return m;
    }

    static MatrixSeries from_constant(const Mat<K> &c, VarSetPtr vars, std::vector<int> bounds) {
        MatrixSeries m(c.rows(), c.cols(), std::move(vars), std::move(bounds));
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j)
                m(i, j) = TruncatedSeries<K>::constant(m.vars_, m.bounds_, c(i, j));
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const VarSetPtr &vars() const { return vars_; }
    const std::vector<int> &bounds() const { return bounds_; }

    TruncatedSeries<K> &operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const TruncatedSeries<K> &operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    bool is_zero() const {
        for (const auto &s : e_)
            if (!s.is_zero()) return false;
        return true;
    }

    std::size_t nonzero_terms() const {
        std::size_t n = 0;
        for (const auto &s : e_) n += s.nonzero_terms();
        return n;
    }

    /// Constant term in all variables.
    Mat<K> constant_term() const {
        Mat<K> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).constant_term();
        return m;
    }

    MatrixSeries operator-() const { return map([](const TruncatedSeries<K> &s) { return -s; }); }

    friend MatrixSeries operator+(const MatrixSeries &a, const MatrixSeries &b) {
        a.require_same_dims(b);
        return a.zip(b, [](const TruncatedSeries<K> &x, const TruncatedSeries<K> &y) { return x + y; });
    }
    friend MatrixSeries operator-(const MatrixSeries &a, const MatrixSeries &b) {
        a.require_same_dims(b);
        return a.zip(b, [](const TruncatedSeries<K> &x, const TruncatedSeries<K> &y) { return x - y; });
    }
    MatrixSeries &operator+=(const MatrixSeries &b) { return *this = *this + b; }
    MatrixSeries &operator-=(const MatrixSeries &b) { return *this = *this - b; }

    friend MatrixSeries operator*(const MatrixSeries &a, const MatrixSeries &b) {
        if (a.cols_ != b.rows_) throw StructuralError("matrix series dimension mismatch in product");
        MatrixSeries r(a.rows_, b.cols_, a.vars_, a.bounds_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const auto &s = a(i, k);
                if (s.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    if (b(k, j).is_zero()) continue;
                    r(i, j) += s * b(k, j);
                }
            }
        return r;
    }

    friend MatrixSeries commutator(const MatrixSeries &a, const MatrixSeries &b) { return a * b - b * a; }

    MatrixSeries scaled(const K &c) const {
        return map([&](const TruncatedSeries<K> &s) { return s.scaled(c); });
    }
    MatrixSeries scaled(const TruncatedSeries<K> &f) const {
        return map([&](const TruncatedSeries<K> &s) { return s * f; });
    }

    MatrixSeries transpose() const {
        MatrixSeries t(cols_, rows_, vars_, bounds_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    MatrixSeries partial_derivative(std::size_t v) const {
        return map([&](const TruncatedSeries<K> &s) { return s.partial_derivative(v); });
    }
    MatrixSeries log_derivative(std::size_t v) const {
        return map([&](const TruncatedSeries<K> &s) { return s.log_derivative(v); });
    }
    MatrixSeries integrate(std::size_t v) const {
        return map([&](const TruncatedSeries<K> &s) { return s.integrate(v); });
    }
    MatrixSeries integrate_capped(std::size_t v) const {
        return map([&](const TruncatedSeries<K> &s) { return s.integrate_capped(v); });
    }
    MatrixSeries euler_derivative(std::size_t v) const {
        return map([&](const TruncatedSeries<K> &s) { return s.euler_derivative(v); });
    }
    MatrixSeries shifted(std::size_t v, int k) const {
        return map([&](const TruncatedSeries<K> &s) { return s.shifted(v, k); });
    }
    MatrixSeries at_zero(std::size_t v) const {
        return map([&](const TruncatedSeries<K> &s) { return s.at_zero(v); });
    }
    MatrixSeries truncate_var(std::size_t v, int w) const {
        return map([&](const TruncatedSeries<K> &s) { return s.truncate_var(v, w); });
    }
    MatrixSeries var_component(std::size_t v, int k) const {
        return map([&](const TruncatedSeries<K> &s) { return s.var_component(v, k); });
    }
    MatrixSeries var_coefficient(std::size_t v, int k) const {
        return map([&](const TruncatedSeries<K> &s) { return s.var_coefficient(v, k); });
    }
    MatrixSeries restrict_bounds(const std::vector<int> &nb) const {
        return map([&](const TruncatedSeries<K> &s) { return s.restrict_bounds(nb); });
    }
    MatrixSeries embedded(const VarSetPtr &nv, const std::vector<int> &nbounds) const {
        return map([&](const TruncatedSeries<K> &s) { return s.embedded(nv, nbounds); });
    }
    MatrixSeries projected(const VarSetPtr &nv, const std::vector<int> &nbounds) const {
        return map([&](const TruncatedSeries<K> &s) { return s.projected(nv, nbounds); });
    }

    int max_exponent(std::size_t v) const {
        int m = 0;
        for (const auto &s : e_) m = std::max(m, s.max_exponent(v));
        return m;
    }

    /// Substitutes v = -v (used for the z -> -z slot of pairings).
    MatrixSeries negate_var(std::size_t v) const {
        return map([&](const TruncatedSeries<K> &s) {
            TruncatedSeries<K> r(s.vars(), s.bounds());
            for (const auto &[e, c] : s.terms()) r.add_term(e, (e[v] % 2 == 0) ? c : -c);
            return r;
        });
    }

    /// Neumann-series inverse; requires an invertible constant term.
    MatrixSeries invert_unit() const {
        if (rows_ != cols_) throw StructuralError("invert_unit on non-square matrix");
        auto inv0 = constant_term().inverse();
        if (!inv0) throw NotAUnit("matrix series has singular constant term");
        MatrixSeries a0inv = from_constant(*inv0, vars_, bounds_);
        MatrixSeries x = identity(rows_, vars_, bounds_) - a0inv * (*this);
        MatrixSeries acc = identity(rows_, vars_, bounds_);
        MatrixSeries pw = x;
        long total = 0;
        for (int b : bounds_) total += b;
        for (long k = 0; k < total && !pw.is_zero(); ++k) {
            acc += pw;
            pw = pw * x;
        }
        return acc * a0inv;
    }

    std::vector<TruncatedSeries<K>> column(std::size_t j) const {
        std::vector<TruncatedSeries<K>> v;
        v.reserve(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
        return v;
    }

    /// Matrix * column vector of series.
    std::vector<TruncatedSeries<K>> apply(const std::vector<TruncatedSeries<K>> &v) const {
        if (v.size() != cols_) throw StructuralError("matrix/vector dimension mismatch");
        std::vector<TruncatedSeries<K>> out(rows_, TruncatedSeries<K>(vars_, bounds_));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!(*this)(i, j).is_zero() && !v[j].is_zero()) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    friend bool operator==(const MatrixSeries &a, const MatrixSeries &b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        for (std::size_t i = 0; i < a.e_.size(); ++i)
            if (a.e_[i] != b.e_[i]) return false;
        return true;
    }
    friend bool operator!=(const MatrixSeries &a, const MatrixSeries &b) { return !(a == b); }

    void require_same_dims(const MatrixSeries &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw StructuralError("matrix series dimension mismatch");
    }

    template <class F> MatrixSeries map(F f) const {
        MatrixSeries r;
        r.rows_ = rows_;
        r.cols_ = cols_;
        r.e_.reserve(e_.size());
        for (const auto &s : e_) r.e_.push_back(f(s));
        if (!r.e_.empty()) {
            r.vars_ = r.e_.front().vars();
            r.bounds_ = r.e_.front().bounds();
        } else {
            r.vars_ = vars_;
            r.bounds_ = bounds_;
        }
        return r;
    }

  private:
    template <class F> MatrixSeries zip(const MatrixSeries &o, F f) const {
        MatrixSeries r;
        r.rows_ = rows_;
        r.cols_ = cols_;
        r.e_.reserve(e_.size());
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_.push_back(f(e_[i], o.e_[i]));
        if (!r.e_.empty()) {
            r.vars_ = r.e_.front().vars();
            r.bounds_ = r.e_.front().bounds();
        }
        return r;
    }

    std::size_t rows_, cols_;
    VarSetPtr vars_;
    std::vector<int> bounds_;
    std::vector<TruncatedSeries<K>> e_;
};

using RMatrixSeries = MatrixSeries<Rational>;
using GMatrixSeries = MatrixSeries<GaussianRational>;

template <class K> MatrixSeries<K> common_restrict_ms(const MatrixSeries<K> &m, const std::vector<int> &other) {
    std::vector<int> nb = m.bounds();
    for (std::size_t i = 0; i < nb.size(); ++i) nb[i] = std::min(nb[i], other[i]);
    return m.restrict_bounds(nb);
}

// Bound-aligned arithmetic: operands are restricted to their common box
// first. Residual checkers and the unfolding pipeline combine matrices whose
// bounds have drifted apart through derivatives; alignment is explicit, the
// raw operators stay strict.
template <class K> MatrixSeries<K> aligned_add(const MatrixSeries<K> &a, const MatrixSeries<K> &b) {
    return common_restrict_ms(a, b.bounds()) + common_restrict_ms(b, a.bounds());
}
template <class K> MatrixSeries<K> aligned_sub(const MatrixSeries<K> &a, const MatrixSeries<K> &b) {
    return common_restrict_ms(a, b.bounds()) - common_restrict_ms(b, a.bounds());
}
template <class K> MatrixSeries<K> aligned_mul(const MatrixSeries<K> &a, const MatrixSeries<K> &b) {
    return common_restrict_ms(a, b.bounds()) * common_restrict_ms(b, a.bounds());
}
template <class K> MatrixSeries<K> aligned_commutator(const MatrixSeries<K> &a, const MatrixSeries<K> &b) {
    return aligned_mul(a, b) - aligned_mul(b, a);
}
template <class K>
std::vector<TruncatedSeries<K>> aligned_apply(const MatrixSeries<K> &m, const std::vector<TruncatedSeries<K>> &v) {
    std::vector<int> nb = m.bounds();
    for (const auto &s : v)
        for (std::size_t i = 0; i < nb.size(); ++i) nb[i] = std::min(nb[i], s.bounds()[i]);
    std::vector<TruncatedSeries<K>> vr;
    vr.reserve(v.size());
    for (const auto &s : v) vr.push_back(s.restrict_bounds(nb));
    return m.restrict_bounds(nb).apply(vr);
}

} // namespace forge
