#include "forge/connection.hpp"

namespace forge {

namespace {

// Accumulates a family of residuals under one label.
struct Family {
    std::string name;
    bool pass = true;
    std::size_t terms = 0;
    void feed(const RMatrixSeries &r) {
        if (!r.is_zero()) {
            pass = false;
            terms += r.nonzero_terms();
        }
    }
    void emit(ConditionReport &rep) const { rep.add(name, pass, terms); }
};

} // namespace

void ConnectionForm::validate() const {
    if (!vars) throw StructuralError("connection form without variable set");
    if (!vars->has_z()) throw StructuralError("connection form variable set must declare z");
    auto lv = log_vars(), hv = hol_vars(), uv = unfold_vars();
    if (alog.size() != lv.size() || clog.size() != lv.size())
        throw StructuralError("log component count mismatch");
    if (chol.size() != hv.size()) throw StructuralError("holomorphic component count mismatch");
    if (funf.size() != uv.size()) throw StructuralError("unfolding component count mismatch");
    auto check = [&](const RMatrixSeries &m, const char *what) {
        if (m.rows() != rank || m.cols() != rank) throw StructuralError(std::string(what) + ": wrong dimensions");
        if (!m.vars() || *m.vars() != *vars) throw StructuralError(std::string(what) + ": wrong variable set");
        if (vars->has_z() && m.max_exponent(vars->z_index()) > 0)
            throw StructuralError(std::string(what) + ": component involves z");
    };
    for (const auto &m : alog) check(m, "A");
    for (const auto &m : clog) check(m, "C(log)");
    for (const auto &m : chol) check(m, "C(hol)");
    for (const auto &m : funf) check(m, "F");
    check(umat, "U");
    check(vmat, "V");
}

const RMatrixSeries &ConnectionForm::higgs_of(std::size_t var_index) const {
    auto lv = log_vars();
    for (std::size_t i = 0; i < lv.size(); ++i)
        if (lv[i] == var_index) return clog[i];
    auto hv = hol_vars();
    for (std::size_t k = 0; k < hv.size(); ++k)
        if (hv[k] == var_index) return chol[k];
    auto uv = unfold_vars();
    for (std::size_t a = 0; a < uv.size(); ++a)
        if (uv[a] == var_index) return funf[a];
    throw StructuralError("no Higgs component for variable index");
}

ConnectionForm ConnectionForm::restrict_to_base() const {
    std::vector<std::string> names;
    std::vector<VarClass> classes;
    std::vector<int> nb;
    for (std::size_t i = 0; i < vars->size(); ++i) {
        if (vars->var_class(i) == VarClass::unfold) continue;
        names.push_back(vars->name(i));
        classes.push_back(vars->var_class(i));
        nb.push_back(bounds[i]);
    }
    auto nv = make_vars(names, classes);
    auto uv = unfold_vars();
    auto cut = [&](const RMatrixSeries &m) {
        RMatrixSeries r = m;
        for (auto u : uv) r = r.at_zero(u);
        std::vector<int> pb = nb;
        // keep each matrix's own bound where tighter
        for (std::size_t j = 0; j < nv->size(); ++j) {
            std::size_t oi = vars->index(nv->name(j));
            pb[j] = std::min(nb[j], m.bounds()[oi]);
        }
        return r.projected(nv, pb);
    };
    ConnectionForm out;
    out.rank = rank;
    out.vars = nv;
    out.bounds = nb;
    for (const auto &m : alog) out.alog.push_back(cut(m));
    for (const auto &m : clog) out.clog.push_back(cut(m));
    for (const auto &m : chol) out.chol.push_back(cut(m));
    out.umat = cut(umat);
    out.vmat = cut(vmat);
    return out;
}

ConditionReport flatness_residuals(const ConnectionForm &omega) {
    omega.validate();
    ConditionReport rep;
    auto lv = omega.log_vars();
    auto hv = omega.hol_vars();
    auto uv = omega.unfold_vars();
    const auto &A = omega.alog;
    const auto &Ci = omega.clog;
    const auto &Ck = omega.chol;
    const auto &F = omega.funf;
    const auto &U = omega.umat;
    const auto &V = omega.vmat;

    Family c0{"C0"}, c1{"C1"}, c2{"C2"}, c3a{"C3a"}, c3b{"C3b"}, c3c{"C3c"}, c4a{"C4a"}, c4b{"C4b"}, c5{"C5"},
        c6{"C6"}, c7{"C7"}, c8{"C8"}, c9{"C9"}, c10{"C10"}, c11{"C11"}, c12{"C12"}, c13{"C13"}, c14{"C14"},
        c15{"C15"}, c16{"C16"}, c20{"C20"}, c21{"C21"}, c22{"C22"};

    for (std::size_t i = 0; i < lv.size(); ++i) {
        for (auto k : hv) c0.feed(A[i].partial_derivative(k));
        for (auto a : uv) c1.feed(A[i].partial_derivative(a));
        for (std::size_t j = i + 1; j < lv.size(); ++j)
            c2.feed(aligned_sub(aligned_add(A[j].log_derivative(lv[i]), aligned_commutator(A[i], A[j])),
                                A[i].log_derivative(lv[j])));
    }
    for (std::size_t i = 0; i < lv.size(); ++i)
        for (std::size_t j = i + 1; j < lv.size(); ++j) c3a.feed(aligned_commutator(Ci[i], Ci[j]));
    for (std::size_t i = 0; i < lv.size(); ++i)
        for (std::size_t k = 0; k < hv.size(); ++k) c3b.feed(aligned_commutator(Ci[i], Ck[k]));
    for (std::size_t k = 0; k < hv.size(); ++k)
        for (std::size_t l = k + 1; l < hv.size(); ++l) c3c.feed(aligned_commutator(Ck[k], Ck[l]));
    for (std::size_t a = 0; a < uv.size(); ++a) {
        for (std::size_t i = 0; i < lv.size(); ++i) c4a.feed(aligned_commutator(Ci[i], F[a]));
        for (std::size_t k = 0; k < hv.size(); ++k) c4b.feed(aligned_commutator(Ck[k], F[a]));
        for (std::size_t b = a + 1; b < uv.size(); ++b) c5.feed(aligned_commutator(F[a], F[b]));
    }
    for (std::size_t i = 0; i < lv.size(); ++i)
        for (std::size_t j = i + 1; j < lv.size(); ++j)
            c6.feed(aligned_sub(aligned_add(Ci[i].log_derivative(lv[j]), aligned_commutator(A[j], Ci[i])),
                                aligned_add(Ci[j].log_derivative(lv[i]), aligned_commutator(A[i], Ci[j]))));
    for (std::size_t i = 0; i < lv.size(); ++i)
        for (std::size_t k = 0; k < hv.size(); ++k)
            c7.feed(aligned_sub(Ci[i].partial_derivative(hv[k]),
                                aligned_add(Ck[k].log_derivative(lv[i]), aligned_commutator(A[i], Ck[k]))));
    for (std::size_t k = 0; k < hv.size(); ++k)
        for (std::size_t l = k + 1; l < hv.size(); ++l)
            c8.feed(aligned_sub(Ck[l].partial_derivative(hv[k]), Ck[k].partial_derivative(hv[l])));
    for (std::size_t a = 0; a < uv.size(); ++a) {
        for (std::size_t i = 0; i < lv.size(); ++i)
            c9.feed(aligned_sub(Ci[i].partial_derivative(uv[a]),
                                aligned_add(F[a].log_derivative(lv[i]), aligned_commutator(A[i], F[a]))));
        for (std::size_t k = 0; k < hv.size(); ++k)
            c10.feed(aligned_sub(Ck[k].partial_derivative(uv[a]), F[a].partial_derivative(hv[k])));
        for (std::size_t b = a + 1; b < uv.size(); ++b)
            c11.feed(aligned_sub(F[a].partial_derivative(uv[b]), F[b].partial_derivative(uv[a])));
    }
    for (std::size_t i = 0; i < lv.size(); ++i) c12.feed(aligned_commutator(U, Ci[i]));
    for (std::size_t k = 0; k < hv.size(); ++k) c12.feed(aligned_commutator(U, Ck[k]));
    for (std::size_t a = 0; a < uv.size(); ++a) c13.feed(aligned_commutator(U, F[a]));
    for (std::size_t i = 0; i < lv.size(); ++i)
        c14.feed(aligned_sub(aligned_add(U.log_derivative(lv[i]), Ci[i]),
                             aligned_add(aligned_commutator(V, Ci[i]), aligned_commutator(U, A[i]))));
    for (std::size_t k = 0; k < hv.size(); ++k)
        c15.feed(aligned_sub(aligned_add(U.partial_derivative(hv[k]), Ck[k]), aligned_commutator(V, Ck[k])));
    for (std::size_t a = 0; a < uv.size(); ++a)
        c16.feed(aligned_sub(aligned_add(U.partial_derivative(uv[a]), F[a]), aligned_commutator(V, F[a])));
    for (std::size_t i = 0; i < lv.size(); ++i)
        c20.feed(aligned_sub(V.log_derivative(lv[i]), aligned_commutator(V, A[i])));
    for (std::size_t k = 0; k < hv.size(); ++k) c21.feed(V.partial_derivative(hv[k]));
    for (std::size_t a = 0; a < uv.size(); ++a) c22.feed(V.partial_derivative(uv[a]));

    for (const Family *f : {&c0, &c1, &c2, &c3a, &c3b, &c3c, &c4a, &c4b, &c5, &c6, &c7, &c8, &c9, &c10, &c11,
                            &c12, &c13, &c14, &c15, &c16, &c20, &c21, &c22})
        f->emit(rep);
    return rep;
}

} // namespace forge
