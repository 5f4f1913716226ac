#pragma once

#include <map>
#include <sstream>
#include <vector>

#include "forge/budget.hpp"
#include "forge/rational.hpp"
#include "forge/varset.hpp"

namespace forge {

using Mono = std::vector<int>;

/// Multivariate formal power series over an exact coefficient field K,
/// truncated by per-variable exponent bounds. Coefficients are stored
/// sparsely, keyed by exponent multi-index; zero coefficients are never
/// stored and terms beyond the bounds are dropped on construction.
///
/// A series is *valid* up to its bounds: coefficients of monomials inside the
/// box are exact, anything outside is unknown. Binary operations require
/// identical variable sets and identical bounds; use restrict_bounds /
/// common restriction explicitly, never rely on coercion. A partial
/// derivative lowers the bound of the differentiated variable by one and
/// records it; a log derivative t d/dt keeps bounds.
template <class K> class TruncatedSeries {
  public:
    TruncatedSeries() = default;

    TruncatedSeries(VarSetPtr vars, std::vector<int> bounds) : vars_(std::move(vars)), bounds_(std::move(bounds)) {
        check_shape();
    }

    static TruncatedSeries constant(VarSetPtr vars, std::vector<int> bounds, K c) {
        TruncatedSeries s(std::move(vars), std::move(bounds));
        if (!c.is_zero()) s.set(Mono(s.nvars(), 0), std::move(c));
        return s;
    }

    static TruncatedSeries monomial(VarSetPtr vars, std::vector<int> bounds, Mono e, K c) {
        TruncatedSeries s(std::move(vars), std::move(bounds));
        s.add_term(e, std::move(c));
        return s;
    }

    ~TruncatedSeries() { TermBudget::add(-static_cast<long long>(coeffs_.size())); }
    TruncatedSeries(const TruncatedSeries &o) : vars_(o.vars_), bounds_(o.bounds_), coeffs_(o.coeffs_) {
        TermBudget::add(static_cast<long long>(coeffs_.size()));
    }
    TruncatedSeries(TruncatedSeries &&o) noexcept
        : vars_(std::move(o.vars_)), bounds_(std::move(o.bounds_)), coeffs_(std::move(o.coeffs_)) {
        o.coeffs_.clear();
    }
    TruncatedSeries &operator=(const TruncatedSeries &o) {
        if (this != &o) {
            TermBudget::add(static_cast<long long>(o.coeffs_.size()) - static_cast<long long>(coeffs_.size()));
            vars_ = o.vars_;
            bounds_ = o.bounds_;
            coeffs_ = o.coeffs_;
        }
        return *this;
    }
    TruncatedSeries &operator=(TruncatedSeries &&o) noexcept {
        if (this != &o) {
            TermBudget::add(-static_cast<long long>(coeffs_.size()));
            vars_ = std::move(o.vars_);
            bounds_ = std::move(o.bounds_);
            coeffs_ = std::move(o.coeffs_);
            o.coeffs_.clear();
        }
        return *this;
    }

    const VarSetPtr &vars() const { return vars_; }
    const std::vector<int> &bounds() const { return bounds_; }
    std::size_t nvars() const { return vars_ ? vars_->size() : 0; }
    const std::map<Mono, K> &terms() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    std::size_t nonzero_terms() const { return coeffs_.size(); }

    K coefficient(const Mono &e) const {
        auto it = coeffs_.find(e);
        return it == coeffs_.end() ? K() : it->second;
    }
    K constant_term() const { return coefficient(Mono(nvars(), 0)); }

    /// Adds c * x^e, dropping the term if e escapes the bounds.
    void add_term(const Mono &e, K c) {
        if (e.size() != nvars()) throw StructuralError("multi-index arity mismatch");
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] < 0) throw StructuralError("negative exponent");
            if (e[i] > bounds_[i]) return;
        }
        if (c.is_zero()) return;
        auto it = coeffs_.find(e);
        if (it == coeffs_.end()) {
            TermBudget::add(1);
            coeffs_.emplace(e, std::move(c));
        } else {
            it->second += c;
            if (it->second.is_zero()) {
                coeffs_.erase(it);
                TermBudget::add(-1);
            }
        }
    }

    TruncatedSeries operator-() const {
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_) r.set(e, -c);
        return r;
    }

    friend TruncatedSeries operator+(const TruncatedSeries &a, const TruncatedSeries &b) {
        a.require_same_shape(b, "series_add");
        TruncatedSeries r = a;
        for (const auto &[e, c] : b.coeffs_) r.add_term(e, c);
        return r;
    }
    friend TruncatedSeries operator-(const TruncatedSeries &a, const TruncatedSeries &b) {
        a.require_same_shape(b, "series_sub");
        TruncatedSeries r = a;
        for (const auto &[e, c] : b.coeffs_) r.add_term(e, -c);
        return r;
    }
    TruncatedSeries &operator+=(const TruncatedSeries &b) { return *this = *this + b; }
    TruncatedSeries &operator-=(const TruncatedSeries &b) { return *this = *this - b; }

    /// Cauchy product truncated to the common bounds.
    friend TruncatedSeries operator*(const TruncatedSeries &a, const TruncatedSeries &b) {
        a.require_same_shape(b, "series_mul");
        TruncatedSeries r(a.vars_, a.bounds_);
        Mono e(a.nvars());
        for (const auto &[ea, ca] : a.coeffs_) {
            for (const auto &[eb, cb] : b.coeffs_) {
                bool ok = true;
                for (std::size_t i = 0; i < e.size(); ++i) {
                    e[i] = ea[i] + eb[i];
                    if (e[i] > a.bounds_[i]) {
                        ok = false;
                        break;
                    }
                }
                if (ok) r.add_term(e, ca * cb);
            }
        }
        return r;
    }
    TruncatedSeries &operator*=(const TruncatedSeries &b) { return *this = *this * b; }

    TruncatedSeries scaled(const K &c) const {
        TruncatedSeries r(vars_, bounds_);
        if (c.is_zero()) return r;
        for (const auto &[e, v] : coeffs_) r.set(e, v * c);
        return r;
    }

    /// Formal d/dv. The bound of v drops by one; differentiating a series
    /// whose v-bound is already 0 leaves no trusted coefficients and throws.
    TruncatedSeries partial_derivative(std::size_t v) const {
        require_var(v);
        if (bounds_[v] == 0)
            throw StructuralError("derivative in '" + vars_->name(v) + "' exhausts its bound");
        std::vector<int> nb = bounds_;
        nb[v] -= 1;
        TruncatedSeries r(vars_, nb);
        for (const auto &[e, c] : coeffs_) {
            if (e[v] == 0) continue;
            Mono d = e;
            d[v] -= 1;
            r.add_term(d, c * K(e[v]));
        }
        return r;
    }

    /// v d/dv for a log variable; multi-index e maps to e_v * coefficient,
    /// bounds unchanged.
    TruncatedSeries log_derivative(std::size_t v) const {
        require_var(v);
        if (vars_->var_class(v) != VarClass::log_)
            throw StructuralError("log_derivative in non-log variable '" + vars_->name(v) + "'");
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_)
            if (e[v] != 0) r.set(e, c * K(e[v]));
        return r;
    }

    /// Formal antiderivative in v vanishing at v = 0; raises the v-bound by
    /// one (an order-w integrand determines the result through order w+1).
    TruncatedSeries integrate(std::size_t v) const {
        require_var(v);
        std::vector<int> nb = bounds_;
        nb[v] += 1;
        TruncatedSeries r(vars_, nb);
        for (const auto &[e, c] : coeffs_) {
            Mono d = e;
            d[v] += 1;
            r.add_term(d, c / K(d[v]));
        }
        return r;
    }

    /// Antiderivative keeping the original bounds; overflowing terms drop.
    TruncatedSeries integrate_capped(std::size_t v) const {
        require_var(v);
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_) {
            Mono d = e;
            d[v] += 1;
            r.add_term(d, c / K(d[v]));
        }
        return r;
    }

    /// v d/dv for any variable (no class check); exponents scale coefficients
    /// and bounds are unchanged. Internal tool for the z-direction equations.
    TruncatedSeries euler_derivative(std::size_t v) const {
        require_var(v);
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_)
            if (e[v] != 0) r.set(e, c * K(e[v]));
        return r;
    }

    /// Multiplies by v^k, truncating at the bounds.
    TruncatedSeries shifted(std::size_t v, int k) const {
        require_var(v);
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_) {
            Mono d = e;
            d[v] += k;
            if (d[v] < 0) throw StructuralError("negative exponent from shift");
            r.add_term(d, c);
        }
        return r;
    }

    /// Substitutes v = 0; the variable stays in the set with bound 0.
    TruncatedSeries at_zero(std::size_t v) const {
        require_var(v);
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_)
            if (e[v] == 0) r.set(e, c);
        return r;
    }

    /// Drops terms with exponent of v above w. Bounds are unchanged; this is
    /// working-modulo-v^{w+1}, not a validity statement.
    TruncatedSeries truncate_var(std::size_t v, int w) const {
        require_var(v);
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_)
            if (e[v] <= w) r.set(e, c);
        return r;
    }

    /// Homogeneous part of degree k in v.
    TruncatedSeries var_component(std::size_t v, int k) const {
        require_var(v);
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_)
            if (e[v] == k) r.set(e, c);
        return r;
    }

    /// Coefficient of v^k as a series with v-exponent zero.
    TruncatedSeries var_coefficient(std::size_t v, int k) const {
        require_var(v);
        TruncatedSeries r(vars_, bounds_);
        for (const auto &[e, c] : coeffs_)
            if (e[v] == k) {
                Mono d = e;
                d[v] = 0;
                r.add_term(d, c);
            }
        return r;
    }

    int max_exponent(std::size_t v) const {
        require_var(v);
        int m = 0;
        for (const auto &[e, c] : coeffs_) {
            (void)c;
            if (e[v] > m) m = e[v];
        }
        return m;
    }

    /// Truncation to smaller (componentwise) bounds. The one legal bound
    /// change besides derivative/integrate bookkeeping.
    TruncatedSeries restrict_bounds(const std::vector<int> &nb) const {
        if (nb.size() != bounds_.size()) throw StructuralError("bounds arity mismatch");
        for (std::size_t i = 0; i < nb.size(); ++i)
            if (nb[i] > bounds_[i])
                throw StructuralError("cannot raise bound of '" + vars_->name(i) + "' by restriction");
        TruncatedSeries r(vars_, nb);
        for (const auto &[e, c] : coeffs_) r.add_term(e, c);
        return r;
    }

    /// Re-expresses the series over a superset variable set; new variables
    /// enter with exponent zero and the supplied bounds.
    TruncatedSeries embedded(const VarSetPtr &nv, const std::vector<int> &nbounds) const {
        if (nv->size() != nbounds.size()) throw StructuralError("bounds arity mismatch");
        std::vector<std::size_t> pos(nvars());
        for (std::size_t i = 0; i < nvars(); ++i) {
            pos[i] = nv->index(vars_->name(i));
            if (nbounds[pos[i]] != bounds_[i])
                throw StructuralError("embedding changes bound of '" + vars_->name(i) + "'");
        }
        TruncatedSeries r(nv, nbounds);
        for (const auto &[e, c] : coeffs_) {
            Mono d(nv->size(), 0);
            for (std::size_t i = 0; i < nvars(); ++i) d[pos[i]] = e[i];
            r.set(d, c);
        }
        return r;
    }

    /// Projects onto a subset variable set; every dropped variable must have
    /// exponent zero in all stored terms.
    TruncatedSeries projected(const VarSetPtr &nv, const std::vector<int> &nbounds) const {
        std::vector<long> pos(nvars(), -1);
        for (std::size_t j = 0; j < nv->size(); ++j) pos[vars_->index(nv->name(j))] = static_cast<long>(j);
        TruncatedSeries r(nv, nbounds);
        for (const auto &[e, c] : coeffs_) {
            Mono d(nv->size(), 0);
            for (std::size_t i = 0; i < nvars(); ++i) {
                if (pos[i] < 0) {
                    if (e[i] != 0)
                        throw StructuralError("projection drops variable '" + vars_->name(i) +
                                              "' with nonzero exponent");
                } else {
                    d[static_cast<std::size_t>(pos[i])] = e[i];
                }
            }
            r.add_term(d, c);
        }
        return r;
    }

    friend bool operator==(const TruncatedSeries &a, const TruncatedSeries &b) {
        a.require_same_shape(b, "series_eq");
        return a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const TruncatedSeries &a, const TruncatedSeries &b) { return !(a == b); }

    void require_same_shape(const TruncatedSeries &o, const char *op) const {
        if (!vars_ || !o.vars_ || (vars_ != o.vars_ && *vars_ != *o.vars_))
            throw StructuralError(std::string(op) + ": mismatched variable sets");
        if (bounds_ != o.bounds_) throw StructuralError(std::string(op) + ": mismatched truncation bounds");
    }

    std::string str() const {
        if (coeffs_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto &[e, c] : coeffs_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c << ")";
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                os << "*" << vars_->name(i);
                if (e[i] > 1) os << "^" << e[i];
            }
        }
        return os.str();
    }

  private:
    void check_shape() const {
        if (!vars_) throw StructuralError("series without variable set");
        if (bounds_.size() != vars_->size()) throw StructuralError("bounds arity mismatch");
        for (int b : bounds_)
            if (b < 0) throw StructuralError("negative truncation bound");
    }
    void require_var(std::size_t v) const {
        if (!vars_ || v >= vars_->size()) throw StructuralError("variable index out of range");
    }
    // Unchecked insert for terms already known to be in range and nonzero.
    void set(const Mono &e, K c) {
        if (c.is_zero()) return;
        TermBudget::add(1);
        coeffs_.emplace(e, std::move(c));
    }

    VarSetPtr vars_;
    std::vector<int> bounds_;
    std::map<Mono, K> coeffs_;
};

using RSeries = TruncatedSeries<Rational>;
using GSeries = TruncatedSeries<GaussianRational>;

template <class K>
TruncatedSeries<K> common_restrict(const TruncatedSeries<K> &s, const std::vector<int> &other_bounds) {
    std::vector<int> nb = s.bounds();
    for (std::size_t i = 0; i < nb.size(); ++i) nb[i] = std::min(nb[i], other_bounds[i]);
    return s.restrict_bounds(nb);
}

} // namespace forge
