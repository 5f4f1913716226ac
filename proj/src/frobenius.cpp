#include "forge/frobenius.hpp"

#include <algorithm>

namespace forge {

namespace {

RMatrixSeries sub_common(const RMatrixSeries &a, const RMatrixSeries &b) { return aligned_sub(a, b); }
RMatrixSeries add_common(const RMatrixSeries &a, const RMatrixSeries &b) { return aligned_add(a, b); }

// Derivation of the frame direction at variable v: t d/dt for log variables,
// d/dt otherwise.
RMatrixSeries dir_derivative(const RMatrixSeries &m, const VariableSet &vars, std::size_t v) {
    return vars.var_class(v) == VarClass::log_ ? m.log_derivative(v) : m.partial_derivative(v);
}
RSeries dir_derivative(const RSeries &s, const VariableSet &vars, std::size_t v) {
    return vars.var_class(v) == VarClass::log_ ? s.log_derivative(v) : s.partial_derivative(v);
}

std::vector<RSeries> sub_common_vec(std::vector<RSeries> a, const std::vector<RSeries> &b) {
    std::vector<RSeries> out;
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(common_restrict(a[i], b[i].bounds()) - common_restrict(b[i], a[i].bounds()));
    return out;
}

std::size_t vec_terms(const std::vector<RSeries> &v) {
    std::size_t n = 0;
    for (const auto &s : v) n += s.nonzero_terms();
    return n;
}
bool vec_zero(const std::vector<RSeries> &v) {
    for (const auto &s : v)
        if (!s.is_zero()) return false;
    return true;
}

} // namespace

void FTSData::validate() const {
    if (!vars) throw StructuralError("fts without variable set");
    if (vars->has_z()) throw StructuralError("fts variable set must not contain z");
    if (!vars->indices_of(VarClass::unfold).empty())
        throw StructuralError("fts variable set must not contain unfolding variables");
    if (rconn.size() != base_dim() || higgs.size() != base_dim())
        throw StructuralError("fts component count mismatch");
    auto check = [&](const RMatrixSeries &m, const char *what) {
        if (m.rows() != rank || m.cols() != rank) throw StructuralError(std::string(what) + ": wrong dimensions");
        if (!m.vars() || *m.vars() != *vars) throw StructuralError(std::string(what) + ": wrong variable set");
    };
    for (const auto &m : rconn) check(m, "rconn");
    for (const auto &m : higgs) check(m, "higgs");
    check(umat, "u");
    check(vmat, "v");
    check(gmat, "g");
    if (xi.size() != rank) throw StructuralError("xi has wrong length");
    if (!gmat.constant_term().inverse()) throw StructuralError("g has singular constant term");
}

ConditionReport check_fts(const FTSData &fts) {
    fts.validate();
    ConditionReport rep;
    const auto &vars = *fts.vars;
    std::size_t m = fts.base_dim();
    const auto &A = fts.rconn;
    const auto &C = fts.higgs;
    const auto &U = fts.umat;
    const auto &V = fts.vmat;
    const auto &G = fts.gmat;

    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b) {
                auto r = sub_common(add_common(dir_derivative(A[b], vars, a), aligned_commutator(A[a], A[b])),
                                    dir_derivative(A[a], vars, b));
                if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            }
        rep.add("rconn_flat", pass, terms);
    }
    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b) {
                auto r = aligned_commutator(C[a], C[b]);
                if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            }
        rep.add("higgs_commute", pass, terms);
    }
    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b) {
                auto r = sub_common(add_common(dir_derivative(C[b], vars, a), aligned_commutator(A[a], C[b])),
                                    add_common(dir_derivative(C[a], vars, b), aligned_commutator(A[b], C[a])));
                if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            }
        rep.add("FTS1", pass, terms);
    }
    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < m; ++a) {
            auto r = sub_common(add_common(add_common(dir_derivative(U, vars, a), aligned_commutator(A[a], U)), C[a]),
                                aligned_commutator(C[a], V));
            if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
        }
        rep.add("FTS2", pass, terms);
    }
    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < m; ++a) {
            auto r = sub_common(dir_derivative(V, vars, a), aligned_commutator(V, A[a]));
            if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
        }
        rep.add("v_flat", pass, terms);
    }
    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < m; ++a) {
            auto r = sub_common(dir_derivative(G, vars, a),
                                aligned_add(aligned_mul(A[a].transpose(), G), aligned_mul(G, A[a])));
            if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
        }
        rep.add("g_flat", pass, terms);
    }
    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < m; ++a) {
            auto r = aligned_sub(aligned_mul(C[a].transpose(), G), aligned_mul(G, C[a]));
            if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
        }
        rep.add("g_higgs_sym", pass, terms);
    }
    rep.residual("g_u_sym", aligned_sub(aligned_mul(U.transpose(), G), aligned_mul(G, U)));
    rep.residual("g_v_antisym", aligned_add(aligned_mul(V.transpose(), G), aligned_mul(G, V)));
    rep.residual("g_symmetric", G - G.transpose());
    rep.add("g_nondegenerate", static_cast<bool>(G.constant_term().inverse()));
    return rep;
}

HypothesesReport check_hypotheses(const FTSData &fts) {
    fts.validate();
    HypothesesReport rep;
    rep.d = fts.d;
    std::size_t n = fts.rank;
    std::size_t m = fts.base_dim();

    std::vector<Rational> xi0(n);
    for (std::size_t i = 0; i < n; ++i) xi0[i] = fts.xi[i].constant_term();

    // (IC): X -> C_X xi|_0 injective.
    QMat icmat(n, m);
    for (std::size_t a = 0; a < m; ++a) {
        QMat c0 = fts.higgs[a].constant_term();
        for (std::size_t i = 0; i < n; ++i) {
            Rational acc;
            for (std::size_t j = 0; j < n; ++j) acc += c0(i, j) * xi0[j];
            icmat(i, a) = acc;
        }
    }
    rep.ic = icmat.rank() == m;

    // (GC): xi|_0 and its iterated images under the constant terms of the
    // Higgs components and U span the fiber. Breadth-first closure.
    std::vector<QMat> gens;
    for (std::size_t a = 0; a < m; ++a) gens.push_back(fts.higgs[a].constant_term());
    gens.push_back(fts.umat.constant_term());
    QMat span(n, 0);
    std::vector<std::vector<Rational>> frontier{xi0};
    {
        QMat first(n, 1);
        for (std::size_t i = 0; i < n; ++i) first(i, 0) = xi0[i];
        span = first;
    }
    std::size_t rank = span.rank();
    while (!frontier.empty() && rank < n) {
        std::vector<std::vector<Rational>> next;
        for (const auto &v : frontier) {
            for (const auto &g : gens) {
                std::vector<Rational> w(n);
                for (std::size_t i = 0; i < n; ++i) {
                    Rational acc;
                    for (std::size_t j = 0; j < n; ++j) acc += g(i, j) * v[j];
                    w[i] = acc;
                }
                QMat cand(n, span.cols() + 1);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < span.cols(); ++j) cand(i, j) = span(i, j);
                    cand(i, span.cols()) = w[i];
                }
                if (cand.rank() > rank) {
                    span = cand;
                    rank = cand.rank();
                    next.push_back(w);
                    if (rank == n) break;
                }
            }
            if (rank == n) break;
        }
        frontier = std::move(next);
    }
    rep.gc_rank = rank;
    rep.gc = rank == n;

    // (EC): V xi = (d/2) xi as series.
    {
        auto vxi = aligned_apply(fts.vmat, fts.xi);
        std::vector<RSeries> target;
        for (const auto &x : fts.xi) target.push_back(x.scaled(fts.d / Rational(2)));
        rep.ec = vec_zero(sub_common_vec(vxi, target));
    }

    // nabla^r xi = D_a xi + A_a xi = 0 per direction (flat-on-M\D collapses
    // to this in the formal frame).
    {
        bool flat = true;
        for (std::size_t a = 0; a < m && flat; ++a) {
            auto axi = aligned_apply(fts.rconn[a], fts.xi);
            for (std::size_t i = 0; i < n; ++i) {
                auto dxi = dir_derivative(fts.xi[i], *fts.vars, a);
                auto r = dxi + common_restrict(axi[i], dxi.bounds());
                if (!r.is_zero()) {
                    flat = false;
                    break;
                }
            }
        }
        rep.xi_flat = flat;
    }
    return rep;
}

void TrTLEPData::validate() const {
    omega.validate();
    if (rank != omega.rank) throw StructuralError("trtlep rank mismatch");
    if (!omega.vars->has_z()) throw StructuralError("trtlep variable set must contain z");
    if (pnorm.rows() != rank || pnorm.cols() != rank) throw StructuralError("pnorm has wrong dimensions");
    if (!pnorm.vars() || *pnorm.vars() != *omega.vars) throw StructuralError("pnorm variable set mismatch");
    std::size_t zi = omega.vars->z_index();
    if (!pnorm.constant_term().inverse()) {
        // constant term of pnorm in all variables includes z = 0 reduction
        throw MalformedPairing("z^{-w} P has singular reduction at z = 0");
    }
    if (!(pnorm.transpose() - pnorm.negate_var(zi)).is_zero())
        throw MalformedPairing("pairing violates the (-1)^w symmetry law");
    if (xi.size() != rank) throw StructuralError("xi has wrong length");
}

TrTLEPData fts_to_trtlep(const FTSData &fts, int zbound) {
    fts.validate();
    auto rep = check_fts(fts);
    if (!rep.all_pass()) {
        std::string bad;
        for (const auto &c : rep.conditions)
            if (!c.pass) bad += (bad.empty() ? "" : ", ") + c.name;
        throw RejectedInput("fts_to_trtlep requires check_fts to pass; failing: " + bad);
    }
    const auto &vars = *fts.vars;
    std::size_t m = fts.base_dim();
    // adapted-frame convention: no z-free dt_k connection term survives
    for (std::size_t a = 0; a < m; ++a)
        if (vars.var_class(a) != VarClass::log_ && !fts.rconn[a].is_zero())
            throw RejectedInput("fts_to_trtlep requires vanishing holomorphic rconn components "
                                "(choose a frame flat in the holomorphic directions)");

    std::vector<std::string> names = vars.names();
    std::vector<VarClass> classes = vars.classes();
    names.push_back("z");
    classes.push_back(VarClass::z);
    auto nv = make_vars(names, classes);
    std::vector<int> nb = fts.bounds;
    nb.push_back(zbound);

    // lift each matrix at its own bounds (derivative bookkeeping downstream
    // may have tightened some components)
    auto lift = [&](const RMatrixSeries &mseries) {
        std::vector<int> mb = mseries.bounds();
        mb.push_back(zbound);
        return mseries.embedded(nv, mb);
    };
    auto lift_series = [&](const RSeries &s) {
        std::vector<int> sb = s.bounds();
        sb.push_back(zbound);
        return s.embedded(nv, sb);
    };

    TrTLEPData tr;
    tr.rank = fts.rank;
    tr.w = fts.w;
    tr.d = fts.d;
    tr.omega.rank = fts.rank;
    tr.omega.vars = nv;
    tr.omega.bounds = nb;
    for (std::size_t a = 0; a < m; ++a) {
        if (vars.var_class(a) == VarClass::log_) {
            tr.omega.alog.push_back(lift(fts.rconn[a]));
            tr.omega.clog.push_back(lift(fts.higgs[a]));
        } else {
            tr.omega.chol.push_back(lift(fts.higgs[a]));
        }
    }
    tr.omega.umat = lift(fts.umat);
    RMatrixSeries half_w = RMatrixSeries::identity(fts.rank, nv, nb).scaled(Rational(fts.w, 2));
    tr.omega.vmat = aligned_add(-lift(fts.vmat), half_w);
    tr.pnorm = lift(fts.gmat);
    for (const auto &x : fts.xi) tr.xi.push_back(lift_series(x));
    tr.validate();
    return tr;
}

FTSData trtlep_to_fts(const TrTLEPData &tr) {
    tr.validate();
    const auto &vars = *tr.omega.vars;
    std::size_t zi = vars.z_index();

    std::vector<std::string> names;
    std::vector<VarClass> classes;
    std::vector<int> nb;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i == zi) continue;
        names.push_back(vars.name(i));
        // unfolding variables of a solved structure become holomorphic base
        // coordinates of the restricted Frobenius type structure
        classes.push_back(vars.var_class(i) == VarClass::unfold ? VarClass::hol : vars.var_class(i));
        nb.push_back(tr.omega.bounds[i]);
    }
    auto nv = make_vars(names, classes);

    auto drop = [&](const RMatrixSeries &mseries) {
        std::vector<int> pb = nb;
        for (std::size_t j = 0; j < nv->size(); ++j) {
            std::size_t oi = vars.index(nv->name(j));
            pb[j] = std::min(pb[j], mseries.bounds()[oi]);
        }
        return mseries.at_zero(zi).projected(nv, pb);
    };

    FTSData fts;
    fts.rank = tr.rank;
    fts.vars = nv;
    fts.bounds = nb;
    fts.w = tr.w;
    fts.d = tr.d;
    auto lv = tr.omega.log_vars();
    auto hv = tr.omega.hol_vars();
    auto uv = tr.omega.unfold_vars();
    std::size_t li = 0, hi = 0, ui = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i == zi) continue;
        switch (vars.var_class(i)) {
            case VarClass::log_:
                fts.rconn.push_back(drop(tr.omega.alog[li]));
                fts.higgs.push_back(drop(tr.omega.clog[li]));
                ++li;
                break;
            case VarClass::hol: {
                RMatrixSeries zero(tr.rank, tr.rank, nv, nb);
                fts.rconn.push_back(zero);
                fts.higgs.push_back(drop(tr.omega.chol[hi]));
                ++hi;
                break;
            }
            case VarClass::unfold: {
                RMatrixSeries zero(tr.rank, tr.rank, nv, nb);
                fts.rconn.push_back(zero);
                fts.higgs.push_back(drop(tr.omega.funf[ui]));
                ++ui;
                break;
            }
            case VarClass::z: break;
        }
    }
    fts.umat = drop(tr.omega.umat);
    RMatrixSeries half_w = RMatrixSeries::identity(tr.rank, nv, nb).scaled(Rational(tr.w, 2));
    fts.vmat = aligned_add(-drop(tr.omega.vmat), half_w);
    fts.gmat = drop(tr.pnorm);
    for (const auto &x : tr.xi) {
        std::vector<int> pb = nb;
        for (std::size_t j = 0; j < nv->size(); ++j) {
            std::size_t oi = vars.index(nv->name(j));
            pb[j] = std::min(pb[j], x.bounds()[oi]);
        }
        fts.xi.push_back(x.at_zero(zi).projected(nv, pb));
    }
    fts.validate();
    return fts;
}

FTSData conjugate_frame(const FTSData &fts, const QMat &T) {
    auto tinv_c = T.inverse();
    if (!tinv_c) throw StructuralError("frame change matrix is singular");
    RMatrixSeries Tm = RMatrixSeries::from_constant(T, fts.vars, fts.bounds);
    RMatrixSeries Ti = RMatrixSeries::from_constant(*tinv_c, fts.vars, fts.bounds);
    auto conj = [&](const RMatrixSeries &mseries) { return aligned_mul(aligned_mul(Ti, mseries), Tm); };
    FTSData out = fts;
    for (auto &mseries : out.rconn) mseries = conj(mseries);
    for (auto &mseries : out.higgs) mseries = conj(mseries);
    out.umat = conj(fts.umat);
    out.vmat = conj(fts.vmat);
    out.gmat = aligned_mul(aligned_mul(Tm.transpose(), fts.gmat), Tm);
    out.xi = aligned_apply(Ti, fts.xi);
    return out;
}

FrobeniusGerm isocase_build(const FTSData &fts_in) {
    fts_in.validate();
    std::size_t n = fts_in.rank, m = fts_in.base_dim();
    if (m != n)
        throw NotIsomorphismCase("base dimension " + std::to_string(m) + " differs from rank " +
                                 std::to_string(n) + "; unfold first");

    // uniform working box: the common bounds of every component
    std::vector<int> wb = fts_in.bounds;
    auto meet = [&](const std::vector<int> &b) {
        for (std::size_t i = 0; i < wb.size(); ++i) wb[i] = std::min(wb[i], b[i]);
    };
    for (const auto &mtx : fts_in.higgs) meet(mtx.bounds());
    meet(fts_in.umat.bounds());
    meet(fts_in.gmat.bounds());
    for (const auto &x : fts_in.xi) meet(x.bounds());
    FTSData fts = fts_in;
    fts.bounds = wb;
    for (auto &mtx : fts.rconn) mtx = common_restrict_ms(mtx, wb);
    for (auto &mtx : fts.higgs) mtx = common_restrict_ms(mtx, wb);
    fts.umat = common_restrict_ms(fts.umat, wb);
    fts.vmat = common_restrict_ms(fts.vmat, wb);
    fts.gmat = common_restrict_ms(fts.gmat, wb);
    for (auto &x : fts.xi) x = common_restrict(x, wb);

    // v(X_a) = -C_{X_a} xi
    RMatrixSeries vm(n, n, fts.vars, wb);
    for (std::size_t a = 0; a < m; ++a) {
        auto col = fts.higgs[a].apply(fts.xi);
        for (std::size_t i = 0; i < n; ++i) vm(i, a) = -col[i];
    }
    if (!vm.constant_term().inverse())
        throw NotIsomorphismCase("the map X -> -C_X xi is singular at the origin");
    auto hyp = check_hypotheses(fts);
    if (!hyp.ec) throw RejectedInput("isocase_build requires the eigenvector condition V xi = (d/2) xi");

    RMatrixSeries vinv = vm.invert_unit();

    FrobeniusGerm germ;
    germ.dim = n;
    germ.vars = fts.vars;
    germ.bounds = wb;
    germ.d = fts.d;
    germ.metric = vm.transpose() * fts.gmat * vm;
    germ.unit = vinv.apply(fts.xi);
    germ.euler = vinv.apply(fts.umat.apply(fts.xi));
    for (std::size_t a = 0; a < m; ++a) {
        RMatrixSeries ma(n, n, fts.vars, wb);
        for (std::size_t b = 0; b < m; ++b) {
            auto prod = vinv.apply(fts.higgs[a].apply(fts.higgs[b].apply(fts.xi)));
            for (std::size_t k = 0; k < n; ++k) ma(k, b) = prod[k];
        }
        germ.mult.push_back(ma);
    }
    return germ;
}

ConditionReport check_frobenius_axioms(const FrobeniusGerm &germ) {
    ConditionReport rep;
    const auto &vars = *germ.vars;
    std::size_t n = germ.dim;

    // Non-log variables lose one order per frame derivative: wb1 after the
    // Christoffel symbols, wb2 after the curvature.
    std::vector<int> wb1 = germ.bounds, wb2 = germ.bounds;
    for (std::size_t i = 0; i < wb1.size(); ++i)
        if (vars.var_class(i) != VarClass::log_) {
            wb1[i] = std::max(0, wb1[i] - 1);
            wb2[i] = std::max(0, wb2[i] - 2);
        }
    auto R1 = [&](const RMatrixSeries &m) { return common_restrict_ms(m, wb1); };
    auto R2 = [&](const RMatrixSeries &m) { return common_restrict_ms(m, wb2); };
    auto R1s = [&](const RSeries &s) { return common_restrict(s, wb1); };

    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                for (std::size_t k = 0; k < n; ++k) {
                    auto r = germ.mult[a](k, b) - germ.mult[b](k, a);
                    if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
                }
        rep.add("commutative", pass, terms);
    }
    {
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                auto r = commutator(germ.mult[a], germ.mult[b]);
                if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            }
        rep.add("associative", pass, terms);
    }
    {
        // g(X_a o X_b, X_c) totally symmetric in (a, b, c)
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < n; ++a) {
            auto gm = germ.metric * germ.mult[a]; // (c,b): g(X_a o X_b, X_c)
            auto r = gm - gm.transpose();
            if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            for (std::size_t b = a + 1; b < n; ++b) {
                auto gmb = germ.metric * germ.mult[b];
                for (std::size_t c = 0; c < n; ++c) {
                    auto diff = gm(c, b) - gmb(c, a);
                    if (!diff.is_zero()) pass = false, terms += diff.nonzero_terms();
                }
            }
        }
        rep.add("metric_invariant", pass, terms);
    }

    // Christoffel symbols in the logarithmic frame (the frame fields
    // commute, so the coordinate formula applies with the frame derivations)
    RMatrixSeries ginv = germ.metric.invert_unit();
    std::vector<RMatrixSeries> dg;
    for (std::size_t a = 0; a < n; ++a) dg.push_back(R1(dir_derivative(germ.metric, vars, a)));
    RMatrixSeries ginv1 = R1(ginv);
    // gamma[a](c,b) = Gamma^c_{ab}, all entries at wb1
    std::vector<RMatrixSeries> gamma(n, RMatrixSeries(n, n, germ.vars, wb1));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                RSeries acc(germ.vars, wb1);
                for (std::size_t e = 0; e < n; ++e) {
                    auto term = dg[a](b, e) + dg[b](a, e) - dg[e](a, b);
                    acc += ginv1(c, e) * term;
                }
                gamma[a](c, b) = acc.scaled(Rational(1, 2));
            }

    {
        // curvature R(X_a, X_b) = D_a Gamma_b - D_b Gamma_a + [Gamma_a, Gamma_b]
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                auto da = R2(dir_derivative(gamma[b], vars, a));
                auto db = R2(dir_derivative(gamma[a], vars, b));
                auto quad = R2(commutator(gamma[a], gamma[b]));
                auto r = da + quad - db;
                if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            }
        rep.add("metric_flat", pass, terms);
    }
    {
        // nabla e = 0: D_a e^c + Gamma^c_{ab} e^b
        bool pass = true;
        std::size_t terms = 0;
        std::vector<RSeries> unit1;
        for (const auto &u : germ.unit) unit1.push_back(R1s(u));
        for (std::size_t a = 0; a < n; ++a) {
            auto ge = gamma[a].apply(unit1);
            for (std::size_t c = 0; c < n; ++c) {
                auto r = R1s(dir_derivative(germ.unit[c], vars, a)) + ge[c];
                if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            }
        }
        rep.add("unit_flat", pass, terms);
    }
    {
        // potentiality: (nabla_a o)(X_b, .) symmetric in a <-> b
        bool pass = true;
        std::size_t terms = 0;
        auto nabla_mult = [&](std::size_t a, std::size_t b) {
            RMatrixSeries out = R1(dir_derivative(germ.mult[b], vars, a));
            out += commutator(gamma[a], R1(germ.mult[b]));
            for (std::size_t e = 0; e < n; ++e) {
                RMatrixSeries me = R1(germ.mult[e]);
                RSeries coeff = gamma[a](e, b);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) out(i, j) -= coeff * me(i, j);
            }
            return out;
        };
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                auto r = nabla_mult(a, b) - nabla_mult(b, a);
                if (!r.is_zero()) pass = false, terms += r.nonzero_terms();
            }
        rep.add("potential", pass, terms);
    }
    {
        // Lie_E(o) = o
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t dd = 0; dd < n; ++dd) {
                    RSeries acc(germ.vars, wb1);
                    for (std::size_t e = 0; e < n; ++e) {
                        acc += R1s(germ.euler[e]) * R1s(dir_derivative(germ.mult[b](dd, c), vars, e));
                        acc -= R1s(germ.mult[b](e, c)) * R1s(dir_derivative(germ.euler[dd], vars, e));
                        acc += R1s(dir_derivative(germ.euler[e], vars, b)) * R1s(germ.mult[e](dd, c));
                        acc += R1s(dir_derivative(germ.euler[e], vars, c)) * R1s(germ.mult[b](dd, e));
                    }
                    acc -= R1s(germ.mult[b](dd, c));
                    if (!acc.is_zero()) pass = false, terms += acc.nonzero_terms();
                }
        rep.add("euler_mult", pass, terms);
    }
    {
        // Lie_E(g) = (2-d) g
        bool pass = true;
        std::size_t terms = 0;
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                RSeries acc(germ.vars, wb1);
                for (std::size_t e = 0; e < n; ++e) {
                    acc += R1s(germ.euler[e]) * R1s(dir_derivative(germ.metric(b, c), vars, e));
                    acc += R1s(dir_derivative(germ.euler[e], vars, b)) * R1s(germ.metric(e, c));
                    acc += R1s(dir_derivative(germ.euler[e], vars, c)) * R1s(germ.metric(b, e));
                }
                acc -= R1s(germ.metric(b, c)).scaled(Rational(2) - germ.d);
                if (!acc.is_zero()) pass = false, terms += acc.nonzero_terms();
            }
        rep.add("euler_metric", pass, terms);
    }
    // Truncated series cannot store negative exponents, so e and E are
    // logarithmic by representation; recorded for completeness.
    rep.add("log_fields", true, 0);
    return rep;
}

} // namespace forge
