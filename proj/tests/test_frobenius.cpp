#include <doctest.h>

#include "forge/frobenius.hpp"

using namespace forge;

namespace {

// rank-1 structure over one holomorphic coordinate: C = -1, U = u0 + t,
// V = 0. The U-equation reads dU/dt - [C,V] + C = 1 - 1 = 0.
FTSData rank1_fts(Rational u0 = Rational(2)) {
    auto v = make_vars({"t"}, {VarClass::hol});
    std::vector<int> b{4};
    FTSData fts;
    fts.rank = 1;
    fts.vars = v;
    fts.bounds = b;
    fts.rconn.push_back(RMatrixSeries(1, 1, v, b));
    RMatrixSeries C(1, 1, v, b);
    C(0, 0) = RSeries::constant(v, b, Rational(-1));
    fts.higgs.push_back(C);
    RMatrixSeries U(1, 1, v, b);
    U(0, 0) = RSeries::constant(v, b, u0) + RSeries::monomial(v, b, {1}, Rational(1));
    fts.umat = U;
    fts.vmat = RMatrixSeries(1, 1, v, b);
    RMatrixSeries G(1, 1, v, b);
    G(0, 0) = RSeries::constant(v, b, Rational(1));
    fts.gmat = G;
    fts.xi.push_back(RSeries::constant(v, b, Rational(1)));
    fts.w = 0;
    fts.d = Rational(0);
    return fts;
}

// rank-2 structure over one log coordinate: Higgs = E21, U = 2 E21,
// V = diag(1/2,-1/2), g antidiagonal. All conditions hold and xi = e1
// satisfies (IC)/(GC)/(EC) with d = 1.
FTSData rank2_fts() {
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
    fts.xi.push_back(RSeries::constant(v, b, Rational(1)));
    fts.xi.push_back(RSeries(v, b));
    fts.w = 1;
    fts.d = Rational(1);
    return fts;
}

} // namespace

TEST_CASE("check_fts: zero structure with antidiagonal metric passes") {
    auto v = make_vars({"t1", "t2"}, {VarClass::log_, VarClass::hol});
    std::vector<int> b{3, 3};
    FTSData fts;
    fts.rank = 2;
    fts.vars = v;
    fts.bounds = b;
    for (int a = 0; a < 2; ++a) {
        fts.rconn.push_back(RMatrixSeries(2, 2, v, b));
        fts.higgs.push_back(RMatrixSeries(2, 2, v, b));
    }
    fts.umat = RMatrixSeries(2, 2, v, b);
    fts.vmat = RMatrixSeries(2, 2, v, b);
    RMatrixSeries G(2, 2, v, b);
    G(0, 1) = RSeries::constant(v, b, Rational(1));
    G(1, 0) = RSeries::constant(v, b, Rational(1));
    fts.gmat = G;
    fts.xi = {RSeries::constant(v, b, Rational(1)), RSeries(v, b)};
    fts.w = 0;
    fts.d = Rational(0);
    CHECK(check_fts(fts).all_pass());
}

TEST_CASE("check_fts: scalar U-equation, pass and fail") {
    // log variable, C = c1 t, U = -c1 t: t dU/dt = -C
    auto v = make_vars({"t"}, {VarClass::log_});
    std::vector<int> b{4};
    FTSData fts;
    fts.rank = 1;
    fts.vars = v;
    fts.bounds = b;
    fts.rconn.push_back(RMatrixSeries(1, 1, v, b));
    RMatrixSeries C(1, 1, v, b);
    C(0, 0) = RSeries::monomial(v, b, {1}, Rational(3));
    fts.higgs.push_back(C);
    fts.umat = -C;
    fts.vmat = RMatrixSeries(1, 1, v, b);
    RMatrixSeries G(1, 1, v, b);
    G(0, 0) = RSeries::constant(v, b, Rational(1));
    fts.gmat = G;
    fts.xi.push_back(RSeries::constant(v, b, Rational(1)));
    fts.w = 0;
    fts.d = Rational(0);
    auto rep = check_fts(fts);
    CHECK(rep.all_pass());

    // break the relation: U = 0 while C != 0 leaves residual C
    fts.umat = RMatrixSeries(1, 1, v, b);
    auto rep2 = check_fts(fts);
    CHECK(!rep2.find("FTS2")->pass);
    CHECK(rep2.find("FTS2")->residual_nonzero_terms == 1);
}

TEST_CASE("check_hypotheses on the rank-1 and rank-2 structures") {
    auto fts = rank1_fts();
    REQUIRE(check_fts(fts).all_pass());
    auto hyp = check_hypotheses(fts);
    CHECK(hyp.ic);
    CHECK(hyp.gc);
    CHECK(hyp.ec);
    CHECK(hyp.xi_flat);
    CHECK(hyp.d == Rational(0));

    auto fts2 = rank2_fts();
    REQUIRE(check_fts(fts2).all_pass());
    auto hyp2 = check_hypotheses(fts2);
    CHECK(hyp2.ic);
    CHECK(hyp2.gc);
    CHECK(hyp2.ec);
    CHECK(hyp2.d == Rational(1));

    // Higgs = 0 with rank >= 2 cannot generate
    FTSData dead = fts2;
    dead.higgs[0] = RMatrixSeries(2, 2, dead.vars, dead.bounds);
    dead.umat = RMatrixSeries(2, 2, dead.vars, dead.bounds);
    auto hyp3 = check_hypotheses(dead);
    CHECK(!hyp3.gc);
    CHECK(hyp3.gc_rank == 1);
}

TEST_CASE("GC closure is monotone in the Higgs directions") {
    // two-variable variant of the rank-2 structure: adding a second Higgs
    // direction never flips GC from true to false
    auto v = make_vars({"t", "s"}, {VarClass::log_, VarClass::hol});
    std::vector<int> b{4, 4};
    FTSData fts;
    fts.rank = 2;
    fts.vars = v;
    fts.bounds = b;
    RMatrixSeries C(2, 2, v, b);
    C(1, 0) = RSeries::constant(v, b, Rational(1));
    RMatrixSeries zero(2, 2, v, b);
    fts.rconn = {zero, zero};
    fts.higgs = {C, zero};
    fts.umat = zero;
    fts.vmat = zero;
    RMatrixSeries G(2, 2, v, b);
    G(0, 1) = RSeries::constant(v, b, Rational(1));
    G(1, 0) = RSeries::constant(v, b, Rational(1));
    fts.gmat = G;
    fts.xi = {RSeries::constant(v, b, Rational(1)), RSeries(v, b)};
    fts.w = 0;
    fts.d = Rational(0);
    CHECK(check_hypotheses(fts).gc);
    // extra generator on top keeps GC true
    FTSData more = fts;
    RMatrixSeries D(2, 2, v, b);
    D(0, 1) = RSeries::constant(v, b, Rational(1));
    more.higgs[1] = D;
    CHECK(check_hypotheses(more).gc);
}

TEST_CASE("fts <-> trtlep: zero structure and the V-part shift") {
    auto v = make_vars({"t1", "t2"}, {VarClass::log_, VarClass::hol});
    std::vector<int> b{3, 3};
    FTSData fts;
    fts.rank = 2;
    fts.vars = v;
    fts.bounds = b;
    for (int a = 0; a < 2; ++a) {
        fts.rconn.push_back(RMatrixSeries(2, 2, v, b));
        fts.higgs.push_back(RMatrixSeries(2, 2, v, b));
    }
    fts.umat = RMatrixSeries(2, 2, v, b);
    fts.vmat = RMatrixSeries(2, 2, v, b);
    RMatrixSeries G(2, 2, v, b);
    G(0, 1) = RSeries::constant(v, b, Rational(1));
    G(1, 0) = RSeries::constant(v, b, Rational(1));
    fts.gmat = G;
    fts.xi = {RSeries::constant(v, b, Rational(1)), RSeries(v, b)};
    fts.w = 0;
    fts.d = Rational(0);

    auto tr = fts_to_trtlep(fts);
    CHECK(tr.omega.alog[0].is_zero());
    CHECK(tr.omega.clog[0].is_zero());
    CHECK(tr.omega.chol[0].is_zero());
    CHECK(tr.omega.umat.is_zero());
    CHECK(tr.omega.vmat.is_zero()); // w = 0: V-part = -V + 0
    // pnorm = g (z-free)
    CHECK(tr.pnorm.constant_term() == fts.gmat.constant_term());

    auto back = trtlep_to_fts(tr);
    CHECK(back.gmat == fts.gmat);
    CHECK(back.vmat == fts.vmat);
    CHECK(back.umat == fts.umat);
    for (int a = 0; a < 2; ++a) {
        CHECK(back.rconn[a] == fts.rconn[a]);
        CHECK(back.higgs[a] == fts.higgs[a]);
    }
    CHECK(back.w == fts.w);
    CHECK(back.d == fts.d);

    // w = 2 shift: V-part = -V + I
    FTSData shifted = fts;
    shifted.w = 2;
    RMatrixSeries vv(2, 2, v, b);
    vv(0, 0) = RSeries::constant(v, b, Rational(1));
    vv(1, 1) = RSeries::constant(v, b, Rational(-1));
    shifted.vmat = vv;
    auto tr2 = fts_to_trtlep(shifted);
    QMat vpart = tr2.omega.vmat.constant_term();
    CHECK(vpart(0, 0) == Rational(0)); // -1 + w/2
    CHECK(vpart(1, 1) == Rational(2));
    auto back2 = trtlep_to_fts(tr2);
    CHECK(back2.vmat == shifted.vmat);
}

TEST_CASE("round trip on the rank-2 structure, field by field") {
    auto fts = rank2_fts();
    auto tr = fts_to_trtlep(fts, 3);
    auto back = trtlep_to_fts(tr);
    CHECK(back.rank == fts.rank);
    CHECK(*back.vars == *fts.vars);
    CHECK(back.rconn[0] == fts.rconn[0]);
    CHECK(back.higgs[0] == fts.higgs[0]);
    CHECK(back.umat == fts.umat);
    CHECK(back.vmat == fts.vmat);
    CHECK(back.gmat == fts.gmat);
    for (std::size_t i = 0; i < 2; ++i) CHECK(back.xi[i] == fts.xi[i]);
    CHECK(back.w == fts.w);
    CHECK(back.d == fts.d);
}

TEST_CASE("V-spectrum symmetry forced by the pairing") {
    auto fts = rank2_fts();
    QMat v0 = fts.vmat.constant_term();
    // eigenvalues 1/2, -1/2: multiset symmetric about 0
    CHECK(v0(0, 0) == -v0(1, 1));
}

TEST_CASE("isocase_build: rank-1 germ") {
    auto fts = rank1_fts(Rational(2));
    auto germ = isocase_build(fts);
    CHECK(germ.dim == 1);
    // v(d/dt) = -C xi = +1, so mult is the ordinary product and e = d/dt
    CHECK(germ.mult[0](0, 0).constant_term() == Rational(1));
    CHECK(germ.unit[0].constant_term() == Rational(1));
    // E = u(t) d/dt with u = 2 + t
    CHECK(germ.euler[0].constant_term() == Rational(2));
    CHECK(germ.euler[0].coefficient({1}) == Rational(1));
    CHECK(germ.metric(0, 0).constant_term() == Rational(1));

    auto rep = check_frobenius_axioms(germ);
    for (const char *name : {"commutative", "associative", "metric_invariant", "metric_flat", "unit_flat",
                             "potential", "euler_mult", "euler_metric"})
        CHECK(rep.find(name)->pass);
}

TEST_CASE("isocase_build rejects a zero Higgs field") {
    auto fts = rank1_fts();
    fts.higgs[0] = RMatrixSeries(1, 1, fts.vars, fts.bounds);
    fts.umat = RMatrixSeries(1, 1, fts.vars, fts.bounds);
    CHECK_THROWS_AS(isocase_build(fts), NotIsomorphismCase);
}

TEST_CASE("isocase_build rejects when base is smaller than the rank") {
    auto fts = rank2_fts();
    CHECK_THROWS_AS(isocase_build(fts), NotIsomorphismCase);
}

TEST_CASE("trivial log germ: euler metric identity at d = 2") {
    auto v = make_vars({"t"}, {VarClass::log_});
    std::vector<int> b{3};
    FrobeniusGerm germ;
    germ.dim = 1;
    germ.vars = v;
    germ.bounds = b;
    RMatrixSeries one(1, 1, v, b);
    one(0, 0) = RSeries::constant(v, b, Rational(1));
    germ.mult.push_back(one);
    germ.unit.push_back(RSeries::constant(v, b, Rational(1)));
    germ.euler.push_back(RSeries::constant(v, b, Rational(1))); // E = t d/dt
    germ.metric = one;
    germ.d = Rational(2);
    auto rep = check_frobenius_axioms(germ);
    CHECK(rep.find("euler_metric")->pass); // Lie_E g = 0 = (2-2) g
    CHECK(rep.find("metric_flat")->pass);
    CHECK(rep.find("unit_flat")->pass);
}

TEST_CASE("perturbed metric breaks Levi-Civita flatness") {
    auto fts = rank1_fts();
    auto germ = isocase_build(fts);
    // rank 1 metric m(t): flatness of the Levi-Civita connection of
    // m = 1 + t^2 fails (curvature of a 1-dim metric is zero, so perturb a
    // 2-dim germ instead)
    auto v = make_vars({"s", "t"}, {VarClass::hol, VarClass::hol});
    std::vector<int> b{4, 4};
    FrobeniusGerm g2;
    g2.dim = 2;
    g2.vars = v;
    g2.bounds = b;
    RMatrixSeries I2 = RMatrixSeries::identity(2, v, b);
    RMatrixSeries m01(2, 2, v, b);
    m01(0, 1) = RSeries::constant(v, b, Rational(1));
    g2.mult = {I2, m01};
    g2.unit = {RSeries::constant(v, b, Rational(1)), RSeries(v, b)};
    g2.euler = {RSeries::monomial(v, b, {1, 0}, Rational(1)), RSeries::monomial(v, b, {0, 1}, Rational(1))};
    RMatrixSeries G(2, 2, v, b);
    G(0, 1) = RSeries::constant(v, b, Rational(1));
    G(1, 0) = RSeries::constant(v, b, Rational(1));
    // off-symmetric t-linear perturbation
    G(0, 0) = RSeries::monomial(v, b, {0, 1}, Rational(1));
    G(1, 1) = RSeries::monomial(v, b, {0, 1}, Rational(3)) + RSeries::monomial(v, b, {0, 2}, Rational(2));
    g2.metric = G;
    g2.d = Rational(0);
    auto rep = check_frobenius_axioms(g2);
    CHECK(!rep.find("metric_flat")->pass);
}

TEST_CASE("conjugate_frame moves xi to e1 and preserves the conditions") {
    auto fts = rank2_fts();
    QMat T(2, 2);
    T(0, 0) = Rational(0);
    T(1, 0) = Rational(1);
    T(0, 1) = Rational(1);
    T(1, 1) = Rational(0);
    auto moved = conjugate_frame(fts, T);
    CHECK(moved.xi[1].constant_term() == Rational(1));
    CHECK(check_fts(moved).all_pass());
    auto back = conjugate_frame(moved, T); // T is an involution
    CHECK(back.higgs[0] == fts.higgs[0]);
    CHECK(back.xi[0] == fts.xi[0]);
}
