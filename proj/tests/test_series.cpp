#include <doctest.h>

#include "forge/matrix_series.hpp"
#include "forge/series.hpp"

using namespace forge;

namespace {

VarSetPtr tyz() {
    return make_vars({"t", "y", "z"}, {VarClass::log_, VarClass::unfold, VarClass::z});
}

RSeries S(VarSetPtr v, std::vector<int> b) { return RSeries(std::move(v), std::move(b)); }

// deterministic little generator for property tests
struct Rng {
    unsigned long state = 0x9e3779b97f4a7c15ULL;
    unsigned long next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    long pick(long lo, long hi) { return lo + static_cast<long>(next() % static_cast<unsigned long>(hi - lo + 1)); }
};

RSeries random_series(Rng &rng, const VarSetPtr &vars, const std::vector<int> &bounds) {
    RSeries s(vars, bounds);
    long terms = rng.pick(0, 6);
    for (long t = 0; t < terms; ++t) {
        Mono e(vars->size());
        for (std::size_t v = 0; v < vars->size(); ++v) e[v] = static_cast<int>(rng.pick(0, bounds[v]));
        s.add_term(e, Rational(rng.pick(-5, 5), rng.pick(1, 4)));
    }
    return s;
}

} // namespace

TEST_CASE("rational arithmetic is exact and canonical") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK(Rational::parse("-7/21") == Rational(-1, 3));
    CHECK(Rational::parse("5").str() == "5");
    CHECK(Rational(3, 2).str() == "3/2");
    CHECK_THROWS_AS(Rational::parse("1.5"), ParseError);
    CHECK_THROWS_AS(Rational(1, 0), StructuralError);
    CHECK(binomial(5, 2) == Rational(10));
    CHECK(factorial(6) == Rational(720));
}

TEST_CASE("gaussian rationals: conjugation, powers of i") {
    GaussianRational z(Rational(1, 2), Rational(3));
    CHECK(z.conj().conj() == z);
    CHECK((z * z.conj()).im().is_zero());
    CHECK(i_power(2) == GaussianRational(-1));
    CHECK(i_power(-1) == -GaussianRational::i());
    GaussianRational w = GaussianRational(1, 2) / GaussianRational(Rational(0), Rational(1));
    CHECK(w == GaussianRational(Rational(2), Rational(-1)));
}

TEST_CASE("series add/mul basics") {
    auto v = tyz();
    std::vector<int> b{4, 4, 2};
    auto one = RSeries::constant(v, b, Rational(1));
    auto t = RSeries::monomial(v, b, {1, 0, 0}, Rational(1));

    // (1 + t) + 2t = 1 + 3t
    auto s = (one + t) + t.scaled(Rational(2));
    CHECK(s.coefficient({1, 0, 0}) == Rational(3));
    CHECK(s.constant_term() == Rational(1));

    // s + 0 = s
    CHECK(s + S(v, b) == s);

    // t^2 - t^2 prunes to empty storage
    auto t2 = t * t;
    CHECK((t2 - t2).is_zero());
    CHECK((t2 - t2).nonzero_terms() == 0);

    // (1+t)(1-t) = 1 - t^2 within bound t^2
    std::vector<int> b2{2, 0, 0};
    auto one2 = RSeries::constant(v, b2, Rational(1));
    auto tt = RSeries::monomial(v, b2, {1, 0, 0}, Rational(1));
    auto p = (one2 + tt) * (one2 - tt);
    CHECK(p == one2 - tt * tt);

    // truncation: t*t with bound t^1 is 0
    std::vector<int> b3{1, 0, 0};
    auto t3 = RSeries::monomial(v, b3, {1, 0, 0}, Rational(1));
    CHECK((t3 * t3).is_zero());

    // (1+y)^2 = 1 + 2y + y^2
    std::vector<int> b4{0, 2, 0};
    auto oy = RSeries::constant(v, b4, Rational(1)) + RSeries::monomial(v, b4, {0, 1, 0}, Rational(1));
    auto sq = oy * oy;
    CHECK(sq.coefficient({0, 1, 0}) == Rational(2));
    CHECK(sq.coefficient({0, 2, 0}) == Rational(1));

    CHECK_THROWS_AS(s + one2, StructuralError); // mismatched bounds
}

TEST_CASE("derivatives") {
    auto v = tyz();
    std::vector<int> b{4, 4, 2};
    auto t = RSeries::monomial(v, b, {1, 0, 0}, Rational(1));
    auto y = RSeries::monomial(v, b, {0, 1, 0}, Rational(1));

    // d/dt t^2 = 2t, bound drops
    auto d = (t * t).partial_derivative(0);
    CHECK(d.coefficient({1, 0, 0}) == Rational(2));
    CHECK(d.bounds()[0] == 3);

    // d/dy t = 0
    CHECK(t.partial_derivative(1).is_zero());

    // d/dt (t y) = y
    CHECK((t * y).partial_derivative(0).coefficient({0, 1, 0}) == Rational(1));

    // t d/dt t^3 = 3 t^3, bounds unchanged
    auto t3 = t * t * t;
    auto ld = t3.log_derivative(0);
    CHECK(ld.coefficient({3, 0, 0}) == Rational(3));
    CHECK(ld.bounds() == b);

    // t d/dt 1 = 0
    CHECK(RSeries::constant(v, b, Rational(1)).log_derivative(0).is_zero());

    // t d/dt (t y^2) = t y^2
    auto m = RSeries::monomial(v, b, {1, 2, 0}, Rational(1));
    CHECK(m.log_derivative(0) == m);

    // log derivative requires a log variable
    CHECK_THROWS_AS(t.log_derivative(1), StructuralError);
}

TEST_CASE("property: ring axioms on random series") {
    auto v = make_vars({"a", "b", "c"}, {VarClass::hol, VarClass::hol, VarClass::hol});
    std::vector<int> bounds{3, 3, 3};
    Rng rng;
    for (int i = 0; i < 40; ++i) {
        auto x = random_series(rng, v, bounds);
        auto y = random_series(rng, v, bounds);
        auto z = random_series(rng, v, bounds);
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK(x * y == y * x);
        CHECK(x + y == y + x);
    }
}

TEST_CASE("property: Leibniz rule") {
    auto v = make_vars({"a", "b"}, {VarClass::hol, VarClass::hol});
    std::vector<int> bounds{4, 3};
    Rng rng;
    for (int i = 0; i < 40; ++i) {
        auto x = random_series(rng, v, bounds);
        auto y = random_series(rng, v, bounds);
        auto lhs = (x * y).partial_derivative(0);
        auto dxy = x.partial_derivative(0) * common_restrict(y, x.partial_derivative(0).bounds());
        auto xdy = common_restrict(x, y.partial_derivative(0).bounds()) * y.partial_derivative(0);
        CHECK(lhs == dxy + xdy);
    }
}

TEST_CASE("property: log derivative scales monomials by the exponent") {
    auto v = make_vars({"t", "u"}, {VarClass::log_, VarClass::hol});
    std::vector<int> bounds{4, 3};
    Rng rng;
    for (int i = 0; i < 30; ++i) {
        auto x = random_series(rng, v, bounds);
        auto lhs = x.log_derivative(0);
        RSeries rhs(v, bounds);
        for (const auto &[e, c] : x.terms())
            if (e[0] != 0) rhs.add_term(e, c * Rational(e[0]));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("matrix series: commutators and units") {
    auto v = tyz();
    std::vector<int> b{3, 3, 1};
    auto I = RMatrixSeries::identity(2, v, b);
    RMatrixSeries B(2, 2, v, b);
    B(0, 1) = RSeries::monomial(v, b, {1, 0, 0}, Rational(2));
    B(1, 0) = RSeries::constant(v, b, Rational(1));
    CHECK(commutator(I, B).is_zero());

    // [E12, E21] = E11 - E22
    RMatrixSeries e12(2, 2, v, b), e21(2, 2, v, b);
    e12(0, 1) = RSeries::constant(v, b, Rational(1));
    e21(1, 0) = RSeries::constant(v, b, Rational(1));
    auto c = commutator(e12, e21);
    CHECK(c(0, 0).constant_term() == Rational(1));
    CHECK(c(1, 1).constant_term() == Rational(-1));
    CHECK(c(0, 1).is_zero());

    // (I + tN)(I - tN) = I for N^2 = 0
    RMatrixSeries N(2, 2, v, b);
    N(0, 1) = RSeries::monomial(v, b, {1, 0, 0}, Rational(1));
    CHECK((I + N) * (I - N) == I);

    // invert(I) = I; invert(2I) = I/2
    CHECK(I.invert_unit() == I);
    CHECK(I.scaled(Rational(2)).invert_unit() == I.scaled(Rational(1, 2)));

    // invert(I + tN) = I - tN for N nilpotent of order 2
    CHECK((I + N).invert_unit() == I - N);

    // invert_unit(A) * A = I for a denser unit
    RMatrixSeries A = I + B;
    CHECK((A.invert_unit() * A) == I);
    CHECK((A * A.invert_unit()) == I);

    RMatrixSeries sing(2, 2, v, b);
    sing(0, 0) = RSeries::constant(v, b, Rational(1));
    CHECK_THROWS_AS(sing.invert_unit(), NotAUnit);
}

TEST_CASE("property: invert_unit inverts random units") {
    auto v = make_vars({"a", "b"}, {VarClass::hol, VarClass::hol});
    std::vector<int> bounds{3, 3};
    Rng rng;
    for (int trial = 0; trial < 10; ++trial) {
        RMatrixSeries A = RMatrixSeries::identity(3, v, bounds);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                auto s = random_series(rng, v, bounds);
                RSeries noconst(v, bounds);
                for (const auto &[e, c] : s.terms()) {
                    bool constant = true;
                    for (int x : e) constant = constant && x == 0;
                    if (!constant) noconst.add_term(e, c);
                }
                A(i, j) += noconst;
            }
        CHECK((A.invert_unit() * A) == RMatrixSeries::identity(3, v, bounds));
    }
}

TEST_CASE("budget counter tracks live terms") {
    long long before = TermBudget::current();
    {
        auto v = make_vars({"x"}, {VarClass::hol});
        auto s = RSeries::constant(v, {5}, Rational(1));
        CHECK(TermBudget::current() == before + 1);
    }
    CHECK(TermBudget::current() == before);
}

TEST_CASE("embed and project round trip") {
    auto small = make_vars({"t"}, {VarClass::log_});
    auto big = tyz();
    auto s = RSeries::monomial(small, {3}, {2}, Rational(7, 3));
    auto e = s.embedded(big, {3, 2, 1});
    CHECK(e.coefficient({2, 0, 0}) == Rational(7, 3));
    auto back = e.projected(small, {3});
    CHECK(back == s);
    auto bad = RSeries::monomial(big, {3, 2, 1}, {0, 1, 0}, Rational(1));
    CHECK_THROWS_AS(bad.projected(small, {3}), StructuralError);
}

TEST_CASE("integration and truncation helpers") {
    auto v = tyz();
    std::vector<int> b{2, 3, 0};
    auto y = RSeries::monomial(v, b, {0, 1, 0}, Rational(1));
    auto iy = y.integrate(1);
    CHECK(iy.coefficient({0, 2, 0}) == Rational(1, 2));
    CHECK(iy.bounds()[1] == 4);
    auto ic = y.integrate_capped(1);
    CHECK(ic.bounds()[1] == 3);
    CHECK(ic.coefficient({0, 2, 0}) == Rational(1, 2));
    auto top = RSeries::monomial(v, b, {0, 3, 0}, Rational(5));
    CHECK(top.integrate_capped(1).is_zero()); // overflow drops

    auto mix = y + y * y + RSeries::monomial(v, b, {1, 1, 0}, Rational(2));
    CHECK(mix.truncate_var(1, 1).coefficient({0, 2, 0}) == Rational(0));
    CHECK(mix.var_component(1, 1).coefficient({1, 1, 0}) == Rational(2));
    CHECK(mix.var_coefficient(1, 2).constant_term() == Rational(1));
    CHECK(mix.at_zero(0) == y + y * y);
}
