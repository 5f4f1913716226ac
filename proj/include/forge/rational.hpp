#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

#include "forge/errors.hpp"

namespace forge {

/// Exact rational number, always in lowest terms with positive denominator.
/// Backed by GMP; this type is the coefficient field for every formal
/// computation in the library. No floating point anywhere.
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long num, long den) : v_(num, den) {
        if (den == 0) throw StructuralError("rational with zero denominator");
        v_.canonicalize();
    }
    explicit Rational(const mpq_class &v) : v_(v) { v_.canonicalize(); }

    /// Parses "p", "p/q" or "-p/q" (no decimals, no whitespace).
    static Rational parse(const std::string &s);

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    /// Numerator as decimal string; denominator likewise.
    std::string num_str() const { return v_.get_num().get_str(); }
    std::string den_str() const { return v_.get_den().get_str(); }
    /// Canonical "p/q" form ("p" when q = 1).
    std::string str() const;

    long to_long() const;

    const mpq_class &raw() const { return v_; }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational &operator+=(const Rational &o) { v_ += o.v_; return *this; }
    Rational &operator-=(const Rational &o) { v_ -= o.v_; return *this; }
    Rational &operator*=(const Rational &o) { v_ *= o.v_; return *this; }
    Rational &operator/=(const Rational &o) {
        if (o.is_zero()) throw StructuralError("rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational &b) { return a += b; }
    friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational &b) { return a /= b; }
    friend bool operator==(const Rational &a, const Rational &b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational &a, const Rational &b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational &a, const Rational &b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational &a, const Rational &b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational &a, const Rational &b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational &a, const Rational &b) { return a.v_ >= b.v_; }

    friend std::ostream &operator<<(std::ostream &os, const Rational &r);

    /// Conjugation is the identity on Q; lets Rational and GaussianRational
    /// share generic code.
    Rational conj() const { return *this; }
    Rational re() const { return *this; }
    Rational im() const { return Rational(); }

  private:
    mpq_class v_;
};

Rational binomial(long n, long k);
Rational factorial(long n);

/// Element of Q(i). Conjugation is entrywise negation of the imaginary part;
/// needed for the polarization positivity checks i^{p-q} S_l(a, conj a) > 0.
class GaussianRational {
  public:
    GaussianRational() = default;
    GaussianRational(Rational re) : re_(std::move(re)) {}
    GaussianRational(long n) : re_(n) {}
    GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return GaussianRational(Rational(0), Rational(1)); }

    const Rational &re() const { return re_; }
    const Rational &im() const { return im_; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_one() const { return re_.is_one() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    GaussianRational conj() const { return GaussianRational(re_, -im_); }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    std::string str() const;

    GaussianRational operator-() const { return GaussianRational(-re_, -im_); }
    GaussianRational &operator+=(const GaussianRational &o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational &operator-=(const GaussianRational &o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational &operator*=(const GaussianRational &o) {
        Rational r = re_ * o.re_ - im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        return *this;
    }
    GaussianRational &operator/=(const GaussianRational &o) {
        Rational n = o.norm();
        if (n.is_zero()) throw StructuralError("gaussian rational division by zero");
        GaussianRational c = o.conj();
        *this *= c;
        re_ /= n;
        im_ /= n;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational &b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational &b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational &b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational &b) { return a /= b; }
    friend bool operator==(const GaussianRational &a, const GaussianRational &b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational &a, const GaussianRational &b) { return !(a == b); }

    friend std::ostream &operator<<(std::ostream &os, const GaussianRational &g);

  private:
    Rational re_, im_;
};

/// i^k for k possibly negative.
GaussianRational i_power(long k);

} // namespace forge
