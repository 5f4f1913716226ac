#include <doctest.h>

#include "forge/json_io.hpp"
#include "forge/unfold.hpp"

using namespace forge;

namespace {

// 2x2 base over one log variable t: A = 0, C = E21, U = 2 E21,
// V = diag(0,1). Flat: t dU/dt = 0 = [V,C] - C + [U,A].
ConnectionForm base_2x2(int tbound = 6, int zbound = 2) {
    auto v = make_vars({"t", "z"}, {VarClass::log_, VarClass::z});
    std::vector<int> b{tbound, zbound};
    ConnectionForm omega;
    omega.rank = 2;
    omega.vars = v;
    omega.bounds = b;
    omega.alog.push_back(RMatrixSeries(2, 2, v, b));
    RMatrixSeries C(2, 2, v, b);
    C(1, 0) = RSeries::constant(v, b, Rational(1));
    omega.clog.push_back(C);
    omega.umat = C.scaled(Rational(2));
    RMatrixSeries V(2, 2, v, b);
    V(1, 1) = RSeries::constant(v, b, Rational(1));
    omega.vmat = V;
    return omega;
}

UnfoldingProblem problem_2x2(int order) {
    UnfoldingProblem p;
    p.base = base_2x2();
    p.names = {"y"};
    p.order = {order};
    auto env = p.extended_vars();
    auto enb = p.extended_bounds();
    // df1 = t, df2 = y  (from f1 = t y, f2 = y^2/2)
    std::vector<RSeries> df;
    df.push_back(RSeries::monomial(env, enb, {1, 0, 0}, Rational(1)));
    df.push_back(RSeries::monomial(env, enb, {0, 1, 0}, Rational(1)));
    p.dfs.push_back(df);
    return p;
}

} // namespace

TEST_CASE("flatness residuals: zero form and the derived base") {
    auto v = make_vars({"t", "s", "z"}, {VarClass::log_, VarClass::hol, VarClass::z});
    std::vector<int> b{3, 3, 1};
    ConnectionForm omega;
    omega.rank = 2;
    omega.vars = v;
    omega.bounds = b;
    omega.alog.push_back(RMatrixSeries(2, 2, v, b));
    omega.clog.push_back(RMatrixSeries(2, 2, v, b));
    omega.chol.push_back(RMatrixSeries(2, 2, v, b));
    omega.umat = RMatrixSeries(2, 2, v, b);
    omega.vmat = RMatrixSeries(2, 2, v, b);
    auto rep = flatness_residuals(omega);
    CHECK(rep.all_pass());
    CHECK(rep.conditions.size() == 23);

    CHECK(flatness_residuals(base_2x2()).all_pass());
}

TEST_CASE("constant commuting C_k with U = U0 - sum t_k C_k satisfies C15") {
    auto v = make_vars({"s1", "s2", "z"}, {VarClass::hol, VarClass::hol, VarClass::z});
    std::vector<int> b{3, 3, 1};
    ConnectionForm omega;
    omega.rank = 2;
    omega.vars = v;
    omega.bounds = b;
    RMatrixSeries C1(2, 2, v, b), C2(2, 2, v, b);
    C1(0, 1) = RSeries::constant(v, b, Rational(1));
    C2(0, 1) = RSeries::constant(v, b, Rational(3));
    C2(0, 0) = RSeries::constant(v, b, Rational(2));
    C2(1, 1) = RSeries::constant(v, b, Rational(2));
    omega.chol = {C1, C2};
    RMatrixSeries U(2, 2, v, b);
    U(0, 0) = RSeries::constant(v, b, Rational(7));
    U(1, 1) = RSeries::constant(v, b, Rational(7));
    U -= C1.scaled(RSeries::monomial(v, b, {1, 0, 0}, Rational(1)));
    U -= C2.scaled(RSeries::monomial(v, b, {0, 1, 0}, Rational(1)));
    omega.umat = U;
    omega.vmat = RMatrixSeries(2, 2, v, b);
    auto rep = flatness_residuals(omega);
    CHECK(rep.all_pass());

    // breaking commutativity shows up in C3c
    RMatrixSeries C2bad = C2;
    C2bad(1, 0) = RSeries::constant(v, b, Rational(1));
    ConnectionForm bad = omega;
    bad.chol[1] = C2bad;
    auto rep2 = flatness_residuals(bad);
    CHECK(!rep2.find("C3c")->pass);
}

TEST_CASE("scalar unfolding integrates U and C in closed form") {
    // base: C = 2t, U = -2t, V = v0; df = 1 + t (f = y(1+t))
    auto v = make_vars({"t", "z"}, {VarClass::log_, VarClass::z});
    std::vector<int> b{5, 1};
    ConnectionForm omega;
    omega.rank = 1;
    omega.vars = v;
    omega.bounds = b;
    omega.alog.push_back(RMatrixSeries(1, 1, v, b));
    RMatrixSeries C(1, 1, v, b);
    C(0, 0) = RSeries::monomial(v, b, {1, 0}, Rational(2));
    omega.clog.push_back(C);
    omega.umat = -C;
    RMatrixSeries V(1, 1, v, b);
    V(0, 0) = RSeries::constant(v, b, Rational(5));
    omega.vmat = V;
    REQUIRE(flatness_residuals(omega).all_pass());

    UnfoldingProblem p;
    p.base = omega;
    p.names = {"y"};
    p.order = {3};
    auto env = p.extended_vars();
    auto enb = p.extended_bounds();
    std::vector<RSeries> df{RSeries::constant(env, enb, Rational(1)) +
                            RSeries::monomial(env, enb, {1, 0, 0}, Rational(1))};
    p.dfs.push_back(df);

    auto out = solve_unfolding(p);
    // F = df
    CHECK(out.funf[0](0, 0) == common_restrict(df[0], out.funf[0](0, 0).bounds()));
    // U = -2t - y(1+t), C = 2t + ty
    std::size_t ti = 0, yi = 1;
    RSeries t = RSeries::monomial(env, enb, {1, 0, 0}, Rational(1));
    RSeries y = RSeries::monomial(env, enb, {0, 1, 0}, Rational(1));
    RSeries expectU = -t.scaled(Rational(2)) - y - t * y;
    CHECK(out.umat(0, 0) == common_restrict(expectU, out.umat(0, 0).bounds()));
    RSeries expectC = t.scaled(Rational(2)) + t * y;
    CHECK(out.clog[0](0, 0) == common_restrict(expectC, out.clog[0](0, 0).bounds()));
    CHECK(out.vmat(0, 0).constant_term() == Rational(5));
    (void)ti;
    (void)yi;
}

TEST_CASE("2x2 unfolding matches the hand computation at every order") {
    auto p = problem_2x2(4);
    auto out = solve_unfolding(p);
    auto env = out.vars;
    auto enb4 = out.funf[0].bounds();

    RSeries t = RSeries::monomial(env, out.bounds, {1, 0, 0}, Rational(1));
    RSeries y = RSeries::monomial(env, out.bounds, {0, 1, 0}, Rational(1));

    // F = t I + y E21 (order-0 word solve gives F^(0) = t I; order 1 adds y E21)
    RMatrixSeries expectF(2, 2, env, out.bounds);
    expectF(0, 0) = t;
    expectF(1, 1) = t;
    expectF(1, 0) = y;
    CHECK(out.funf[0] == common_restrict_ms(expectF, enb4));

    // C = E21 + t y I
    RMatrixSeries expectC(2, 2, env, out.bounds);
    expectC(1, 0) = RSeries::constant(env, out.bounds, Rational(1));
    expectC(0, 0) = t * y;
    expectC(1, 1) = t * y;
    CHECK(out.clog[0] == common_restrict_ms(expectC, out.clog[0].bounds()));

    // U = 2 E21 - t y I
    RMatrixSeries expectU(2, 2, env, out.bounds);
    expectU(1, 0) = RSeries::constant(env, out.bounds, Rational(2));
    expectU(0, 0) = -(t * y);
    expectU(1, 1) = -(t * y);
    CHECK(out.umat == common_restrict_ms(expectU, out.umat.bounds()));

    // V unchanged
    CHECK(out.vmat.constant_term()(1, 1) == Rational(1));
    CHECK(out.vmat.at_zero(1) == out.vmat);

    // first-column contract
    CHECK(out.funf[0](0, 0) == common_restrict(t, enb4));
    CHECK(out.funf[0](1, 0) == common_restrict(y, enb4));

    // all residuals vanish
    CHECK(flatness_residuals(out).all_pass());

    // restriction to y = 0 equals the base
    auto back = out.restrict_to_base();
    CHECK(common_restrict_ms(back.clog[0], p.base.clog[0].bounds()) ==
          common_restrict_ms(p.base.clog[0], back.clog[0].bounds()));
    CHECK(common_restrict_ms(back.umat, p.base.umat.bounds()) ==
          common_restrict_ms(p.base.umat, back.umat.bounds()));
}

TEST_CASE("determinism: two runs agree coefficient for coefficient") {
    auto p = problem_2x2(4);
    auto a = solve_unfolding(p);
    auto b = solve_unfolding(p);
    CHECK(a.funf[0] == b.funf[0]);
    CHECK(a.clog[0] == b.clog[0]);
    CHECK(a.umat == b.umat);
    CHECK(a.vmat == b.vmat);
    // byte-identical serialization
    CHECK(write_omega(a).dump() == write_omega(b).dump());
}

TEST_CASE("identity unfolding: dfs = 0 extends constantly") {
    UnfoldingProblem p;
    p.base = base_2x2();
    p.names = {"y"};
    p.order = {3};
    auto env = p.extended_vars();
    auto enb = p.extended_bounds();
    p.dfs.push_back({RSeries(env, enb), RSeries(env, enb)});
    auto out = solve_unfolding(p);
    CHECK(out.funf[0].is_zero());
    CHECK(out.umat.at_zero(1) == out.umat);
    CHECK(out.clog[0].at_zero(1) == out.clog[0]);
}

TEST_CASE("generation failure raises with the achieved rank") {
    auto v = make_vars({"t", "z"}, {VarClass::log_, VarClass::z});
    std::vector<int> b{3, 1};
    ConnectionForm omega;
    omega.rank = 2;
    omega.vars = v;
    omega.bounds = b;
    omega.alog.push_back(RMatrixSeries(2, 2, v, b));
    omega.clog.push_back(RMatrixSeries(2, 2, v, b));
    omega.umat = RMatrixSeries(2, 2, v, b);
    omega.vmat = RMatrixSeries(2, 2, v, b);
    UnfoldingProblem p;
    p.base = omega;
    p.names = {"y"};
    p.order = {2};
    auto env = p.extended_vars();
    auto enb = p.extended_bounds();
    p.dfs.push_back({RSeries::constant(env, enb, Rational(1)), RSeries::constant(env, enb, Rational(1))});
    CHECK_THROWS_AS(solve_unfolding(p), GenerationFailure);
}

TEST_CASE("non-flat base is rejected") {
    auto omega = base_2x2();
    omega.umat = RMatrixSeries::identity(2, omega.vars, omega.bounds)
                     .scaled(RSeries::monomial(omega.vars, omega.bounds, {1, 0}, Rational(1)));
    UnfoldingProblem p;
    p.base = omega;
    p.names = {"y"};
    p.order = {2};
    auto env = p.extended_vars();
    auto enb = p.extended_bounds();
    p.dfs.push_back({RSeries(env, enb), RSeries(env, enb)});
    CHECK_THROWS_AS(solve_unfolding(p), RejectedInput);
}

TEST_CASE("two-parameter unfolding is order-insensitive") {
    auto build = [&](std::vector<std::string> names, std::vector<std::size_t> pick) {
        UnfoldingProblem p;
        p.base = base_2x2();
        p.names = names;
        p.order = {3, 3};
        auto env = p.extended_vars();
        auto enb = p.extended_bounds();
        for (std::size_t a = 0; a < 2; ++a) {
            std::vector<RSeries> df;
            for (std::size_t i = 0; i < 2; ++i)
                df.push_back(RSeries::constant(env, enb, Rational(i == pick[a] ? 1 : 0)));
            p.dfs.push_back(df);
        }
        return solve_unfolding(p);
    };
    // run 1: u then v; run 2: v then u (same df attached to each name)
    auto a = build({"u", "v"}, {0, 1});
    auto b = build({"v", "u"}, {1, 0});
    // compare over a common variable order
    auto env = a.vars;
    auto enb = a.bounds;
    auto remap = [&](const RMatrixSeries &m) { return m.embedded(env, enb); };
    // b's variables are (t, v, u, z); project entries over to (t, u, v, z)
    for (std::size_t comp = 0; comp < 2; ++comp) {
        const RMatrixSeries &fa = a.funf[comp];
        // find b's matching F by variable name
        std::size_t match = (comp == 0) ? 1 : 0;
        const RMatrixSeries &fb = b.funf[match];
        RMatrixSeries fb_re(2, 2, env, enb);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                RSeries s(env, enb);
                for (const auto &[e, c] : fb(i, j).terms()) {
                    // b order: t, v, u, z -> a order: t, u, v, z
                    Mono d{e[0], e[2], e[1], e[3]};
                    s.add_term(d, c);
                }
                fb_re(i, j) = s;
            }
        CHECK(common_restrict_ms(fa, fb_re.bounds()) == common_restrict_ms(fb_re, fa.bounds()));
    }
    (void)remap;
}

TEST_CASE("pairing extension: antidiagonal pairing stays in z^w") {
    auto p = problem_2x2(4);
    auto out = solve_unfolding(p);
    PairingData r0;
    r0.w = 1;
    RMatrixSeries R(2, 2, out.vars, out.bounds);
    R(0, 1) = RSeries::constant(out.vars, out.bounds, Rational(1));
    R(1, 0) = RSeries::constant(out.vars, out.bounds, Rational(1));
    r0.rnorm = R;
    auto ext = extend_pairing(out, r0);
    CHECK(ext.checks.all_pass());
    // R constant through y^4 and z-free: no negative z-powers
    CHECK(ext.rnorm == R);
    std::size_t zi = out.vars->z_index();
    CHECK(ext.rnorm.max_exponent(zi) == 0);
    // restriction at y = 0 is r0
    CHECK(ext.rnorm.at_zero(out.vars->index("y")) == r0.rnorm);
}

TEST_CASE("universal unfold of the rank-2 log structure") {
    // same data as rank2_fts in the frobenius tests
    auto v = make_vars({"t"}, {VarClass::log_});
    std::vector<int> b{4};
    FTSData fts;
    fts.rank = 2;
    fts.vars = v;
    fts.bounds = b;
    fts.rconn.push_back(RMatrixSeries(2, 2, v, b));
    RMatrixSeries C(2, 2, v, b);
    C(1, 0) = RSeries::constant(v, b, Rational(1));
    fts.higgs.push_back(C);
    fts.umat = C.scaled(Rational(2));
    RMatrixSeries V(2, 2, v, b);
    V(0, 0) = RSeries::constant(v, b, Rational(1, 2));
    V(1, 1) = RSeries::constant(v, b, Rational(-1, 2));
    fts.vmat = V;
    RMatrixSeries G(2, 2, v, b);
    G(0, 1) = RSeries::constant(v, b, Rational(1));
    G(1, 0) = RSeries::constant(v, b, Rational(1));
    fts.gmat = G;
    fts.xi = {RSeries::constant(v, b, Rational(1)), RSeries(v, b)};
    fts.w = 1;
    fts.d = Rational(1);

    auto res = universal_unfold(fts, 3);
    CHECK(res.new_vars.size() == 1);
    CHECK(res.germ.dim == 2);
    CHECK(res.axioms.all_pass());
    CHECK(res.pairing.checks.all_pass());
    // the unfolded structure restricts to the base
    auto back = res.omega.restrict_to_base();
    CHECK(back.clog[0].constant_term() == C.constant_term());
}
