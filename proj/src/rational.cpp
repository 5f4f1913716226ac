#include "forge/rational.hpp"

#include <ostream>

namespace forge {

Rational Rational::parse(const std::string &s) {
    if (s.empty()) throw ParseError("empty rational literal");
    for (char c : s)
        if (!(c == '-' || c == '/' || (c >= '0' && c <= '9')))
            throw ParseError("bad rational literal '" + s + "'");
    mpq_class v;
    if (v.set_str(s, 10) != 0) throw ParseError("bad rational literal '" + s + "'");
    if (v.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    v.canonicalize();
    return Rational(v);
}

std::string Rational::str() const {
    if (is_integer()) return num_str();
    return num_str() + "/" + den_str();
}

long Rational::to_long() const {
    if (!is_integer()) throw StructuralError("non-integer rational where integer expected: " + str());
    if (!v_.get_num().fits_slong_p()) throw StructuralError("integer out of long range: " + str());
    return v_.get_num().get_si();
}

std::ostream &operator<<(std::ostream &os, const Rational &r) { return os << r.str(); }

Rational binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return Rational(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(mpq_class(b));
}

Rational factorial(long n) {
    if (n < 0) throw StructuralError("factorial of negative integer");
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(mpq_class(f));
}

std::string GaussianRational::str() const {
    if (im_.is_zero()) return re_.str();
    return re_.str() + (im_.sign() >= 0 ? "+" : "") + im_.str() + "i";
}

std::ostream &operator<<(std::ostream &os, const GaussianRational &g) { return os << g.str(); }

GaussianRational i_power(long k) {
    long m = ((k % 4) + 4) % 4;
    switch (m) {
        case 0: return GaussianRational(1);
        case 1: return GaussianRational::i();
        case 2: return GaussianRational(-1);
        default: return -GaussianRational::i();
    }
}

} // namespace forge
