#include "forge/json_io.hpp"

#include <sstream>

namespace forge {

namespace {

[[noreturn]] void fail(const std::string &where, const std::string &what) {
    throw ParseError(where + ": " + what);
}

const Json &need(const Json &j, const char *key, const std::string &where) {
    if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
    return j.at(key);
}

Rational read_rational(const Json &j, const std::string &where) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    fail(where, "rational must be an integer or a 'p/q' string");
}

GaussianRational read_gaussian(const Json &j, const std::string &where) {
    if (j.is_object()) {
        Rational re = j.contains("re") ? read_rational(j.at("re"), where) : Rational(0);
        Rational im = j.contains("im") ? read_rational(j.at("im"), where) : Rational(0);
        return GaussianRational(re, im);
    }
    return GaussianRational(read_rational(j, where));
}

Json write_rational(const Rational &r) { return Json(r.str()); }

Json write_gaussian(const GaussianRational &g) {
    if (g.im().is_zero()) return Json(g.re().str());
    return Json{{"re", g.re().str()}, {"im", g.im().str()}};
}

std::vector<int> read_int_vec(const Json &j, const std::string &where) {
    if (!j.is_array()) fail(where, "expected an array of integers");
    std::vector<int> v;
    for (const auto &x : j) v.push_back(x.get<int>());
    return v;
}

} // namespace

VarContext read_var_context(const Json &j) {
    const std::string where = "vars";
    auto names = need(j, "vars", where).get<std::vector<std::string>>();
    auto class_names = need(j, "classes", where).get<std::vector<std::string>>();
    if (names.size() != class_names.size()) fail(where, "vars/classes length mismatch");
    std::vector<VarClass> classes;
    for (const auto &c : class_names) classes.push_back(var_class_parse(c));
    VarContext ctx;
    ctx.vars = make_vars(names, classes);
    ctx.bounds = read_int_vec(need(j, "bounds", where), where);
    if (ctx.bounds.size() != names.size()) fail(where, "bounds length mismatch");
    return ctx;
}

Json write_var_context(const VarContext &ctx) {
    Json j;
    j["vars"] = ctx.vars->names();
    std::vector<std::string> cls;
    for (auto c : ctx.vars->classes()) cls.push_back(var_class_name(c));
    j["classes"] = cls;
    j["bounds"] = ctx.bounds;
    return j;
}

RSeries read_series(const Json &j, const VarContext *ctx) {
    VarContext local;
    const VarContext *use = ctx;
    if (j.contains("vars")) {
        local = read_var_context(j);
        use = &local;
    }
    if (!use) fail("series", "no variable context available");
    RSeries s(use->vars, use->bounds);
    if (j.contains("terms")) {
        for (const auto &t : j.at("terms")) {
            auto e = read_int_vec(need(t, "e", "series term"), "series term");
            if (e.size() != use->vars->size()) fail("series term", "multi-index arity mismatch");
            s.add_term(e, read_rational(need(t, "c", "series term"), "series term"));
        }
    }
    return s;
}

Json write_series(const RSeries &s, bool with_vars) {
    Json j;
    if (with_vars) {
        VarContext ctx{s.vars(), s.bounds()};
        j = write_var_context(ctx);
    } else {
        j["bounds"] = s.bounds();
    }
    Json terms = Json::array();
    for (const auto &[e, c] : s.terms()) terms.push_back(Json{{"e", e}, {"c", c.str()}});
    j["terms"] = terms;
    return j;
}

RMatrixSeries read_matrix_series(const Json &j, const VarContext &ctx) {
    if (!j.is_array()) fail("matrix series", "expected a 2D array of series literals");
    std::size_t rows = j.size();
    std::size_t cols = rows ? j.at(0).size() : 0;
    RMatrixSeries m(rows, cols, ctx.vars, ctx.bounds);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols) fail("matrix series", "ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            RSeries e = read_series(j.at(i).at(c), &ctx);
            if (*e.vars() != *ctx.vars) fail("matrix series", "entry variable set differs from document");
            if (e.bounds() != ctx.bounds) {
                // entries may carry reduced bounds from derivatives; refuse
                // silently differing bounds to keep equality well-defined
                fail("matrix series", "entry bounds differ from document bounds");
            }
            m(i, c) = e;
        }
    }
    return m;
}

Json write_matrix_series(const RMatrixSeries &m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            Json terms = Json::array();
            for (const auto &[e, coeff] : m(i, c).terms()) terms.push_back(Json{{"e", e}, {"c", coeff.str()}});
            row.push_back(Json{{"terms", terms}});
        }
        rows.push_back(row);
    }
    return rows;
}

QMat read_qmat(const Json &j) {
    if (!j.is_array()) fail("matrix", "expected a 2D array");
    std::size_t rows = j.size();
    std::size_t cols = rows ? j.at(0).size() : 0;
    QMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols) fail("matrix", "ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = read_rational(j.at(i).at(c), "matrix entry");
    }
    return m;
}

Json write_qmat(const QMat &m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(i, c).str());
        rows.push_back(row);
    }
    return rows;
}

GMat read_gmat(const Json &j) {
    if (!j.is_array()) fail("matrix", "expected a 2D array");
    std::size_t rows = j.size();
    std::size_t cols = rows ? j.at(0).size() : 0;
    GMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols) fail("matrix", "ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = read_gaussian(j.at(i).at(c), "matrix entry");
    }
    return m;
}

Json write_gmat(const GMat &m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(write_gaussian(m(i, c)));
        rows.push_back(row);
    }
    return rows;
}

FTSData read_fts(const Json &j) {
    VarContext ctx = read_var_context(j);
    FTSData fts;
    fts.rank = need(j, "rank", "fts").get<std::size_t>();
    fts.vars = ctx.vars;
    fts.bounds = ctx.bounds;
    for (const auto &m : need(j, "rconn", "fts")) fts.rconn.push_back(read_matrix_series(m, ctx));
    for (const auto &m : need(j, "higgs", "fts")) fts.higgs.push_back(read_matrix_series(m, ctx));
    fts.umat = read_matrix_series(need(j, "u", "fts"), ctx);
    fts.vmat = read_matrix_series(need(j, "v", "fts"), ctx);
    fts.gmat = read_matrix_series(need(j, "g", "fts"), ctx);
    for (const auto &x : need(j, "xi", "fts")) fts.xi.push_back(read_series(x, &ctx));
    fts.w = need(j, "w", "fts").get<int>();
    fts.d = read_rational(need(j, "d", "fts"), "fts.d");
    fts.validate();
    return fts;
}

Json write_fts(const FTSData &fts) {
    Json j = write_var_context({fts.vars, fts.bounds});
    j["rank"] = fts.rank;
    Json rconn = Json::array(), higgs = Json::array();
    for (const auto &m : fts.rconn) rconn.push_back(write_matrix_series(m));
    for (const auto &m : fts.higgs) higgs.push_back(write_matrix_series(m));
    j["rconn"] = rconn;
    j["higgs"] = higgs;
    j["u"] = write_matrix_series(fts.umat);
    j["v"] = write_matrix_series(fts.vmat);
    j["g"] = write_matrix_series(fts.gmat);
    Json xi = Json::array();
    for (const auto &x : fts.xi) xi.push_back(write_series(x, false));
    j["xi"] = xi;
    j["w"] = fts.w;
    j["d"] = fts.d.str();
    return j;
}

ConnectionForm read_omega(const Json &j) {
    VarContext ctx = read_var_context(j);
    ConnectionForm omega;
    omega.rank = need(j, "rank", "omega").get<std::size_t>();
    omega.vars = ctx.vars;
    omega.bounds = ctx.bounds;
    for (const auto &m : need(j, "alog", "omega")) omega.alog.push_back(read_matrix_series(m, ctx));
    for (const auto &m : need(j, "clog", "omega")) omega.clog.push_back(read_matrix_series(m, ctx));
    for (const auto &m : need(j, "chol", "omega")) omega.chol.push_back(read_matrix_series(m, ctx));
    if (j.contains("funf"))
        for (const auto &m : j.at("funf")) omega.funf.push_back(read_matrix_series(m, ctx));
    omega.umat = read_matrix_series(need(j, "u", "omega"), ctx);
    omega.vmat = read_matrix_series(need(j, "v", "omega"), ctx);
    omega.validate();
    return omega;
}

Json write_omega(const ConnectionForm &omega) {
    Json j = write_var_context({omega.vars, omega.bounds});
    j["rank"] = omega.rank;
    auto arr = [&](const std::vector<RMatrixSeries> &v) {
        Json a = Json::array();
        for (const auto &m : v) a.push_back(write_matrix_series(m));
        return a;
    };
    j["alog"] = arr(omega.alog);
    j["clog"] = arr(omega.clog);
    j["chol"] = arr(omega.chol);
    j["funf"] = arr(omega.funf);
    j["u"] = write_matrix_series(omega.umat);
    j["v"] = write_matrix_series(omega.vmat);
    return j;
}

UnfoldingProblem read_unfold_problem(const Json &j) {
    UnfoldingProblem p;
    p.base = read_omega(need(j, "base", "unfold"));
    auto orders = need(j, "order", "unfold");
    if (orders.is_number_integer()) {
        // one order for every variable; count from dfs
        std::size_t l = need(j, "dfs", "unfold").size();
        p.order.assign(l, orders.get<int>());
    } else {
        for (const auto &o : orders) p.order.push_back(o.get<int>());
    }
    if (j.contains("names"))
        p.names = j.at("names").get<std::vector<std::string>>();
    else
        for (std::size_t a = 0; a < p.order.size(); ++a) p.names.push_back("y" + std::to_string(a + 1));
    // dfs live over the extended variable set
    if (p.names.size() != need(j, "dfs", "unfold").size()) fail("unfold", "dfs/order arity mismatch");
    auto env = p.extended_vars();
    auto enb = p.extended_bounds();
    VarContext ctx{env, enb};
    for (const auto &vec : j.at("dfs")) {
        std::vector<RSeries> v;
        for (const auto &s : vec) v.push_back(read_series(s, &ctx));
        p.dfs.push_back(std::move(v));
    }
    return p;
}

TrTLEPData read_trtlep(const Json &j) {
    TrTLEPData tr;
    tr.omega = read_omega(need(j, "omega", "trtlep"));
    tr.rank = tr.omega.rank;
    VarContext ctx{tr.omega.vars, tr.omega.bounds};
    tr.pnorm = read_matrix_series(need(j, "pnorm", "trtlep"), ctx);
    tr.w = need(j, "w", "trtlep").get<int>();
    for (const auto &x : need(j, "xi", "trtlep")) tr.xi.push_back(read_series(x, &ctx));
    tr.d = read_rational(need(j, "d", "trtlep"), "trtlep.d");
    tr.validate();
    return tr;
}

Json write_trtlep(const TrTLEPData &tr) {
    Json j;
    j["omega"] = write_omega(tr.omega);
    j["pnorm"] = write_matrix_series(tr.pnorm);
    j["w"] = tr.w;
    Json xi = Json::array();
    for (const auto &x : tr.xi) xi.push_back(write_series(x, false));
    j["xi"] = xi;
    j["d"] = tr.d.str();
    return j;
}

PairingData read_pairing(const Json &j, const VarContext &ctx) {
    PairingData p;
    p.w = need(j, "w", "pairing").get<int>();
    p.rnorm = read_matrix_series(need(j, "rnorm", "pairing"), ctx);
    return p;
}

Json write_pairing(const PairingData &p) {
    Json j;
    j["w"] = p.w;
    j["rnorm"] = write_matrix_series(p.rnorm);
    j["checks"] = write_report(p.checks);
    return j;
}

CohModel read_model(const Json &j) {
    CohModel m;
    m.dimX = need(j, "dimX", "model").get<int>();
    for (const auto &c : need(j, "classes", "model")) {
        CohClass cc;
        cc.name = need(c, "name", "model class").get<std::string>();
        cc.degree = need(c, "deg", "model class").get<int>();
        cc.is_h2 = c.contains("h2") ? c.at("h2").get<bool>() : (cc.degree == 2);
        m.classes.push_back(cc);
    }
    std::size_t nm = m.classes.size();
    m.cup.assign(nm, std::vector<std::vector<Rational>>(nm, std::vector<Rational>(nm)));
    for (const auto &t : need(j, "cup", "model")) {
        std::size_t i = need(t, "i", "cup").get<std::size_t>();
        std::size_t jj = need(t, "j", "cup").get<std::size_t>();
        std::size_t k = need(t, "k", "cup").get<std::size_t>();
        if (i >= nm || jj >= nm || k >= nm) fail("cup", "index out of range");
        m.cup[i][jj][k] = read_rational(need(t, "c", "cup"), "cup");
        m.cup[jj][i][k] = m.cup[i][jj][k];
    }
    // unit row is implicit
    for (std::size_t k = 0; k < nm; ++k)
        for (std::size_t i = 0; i < nm; ++i) m.cup[0][i][k] = m.cup[i][0][k] = Rational(i == k ? 1 : 0);
    m.pairing = read_qmat(need(j, "pairing", "model"));
    for (const auto &c : need(j, "c1", "model")) m.c1.push_back(read_rational(c, "c1"));
    m.mori_rank = need(j, "mori_rank", "model").get<int>();
    for (const auto &row : need(j, "beta_pairing", "model")) m.beta_pairing.push_back(row.get<std::vector<long>>());
    m.validate();
    return m;
}

Json write_model(const CohModel &m) {
    Json j;
    j["dimX"] = m.dimX;
    Json cls = Json::array();
    for (const auto &c : m.classes) cls.push_back(Json{{"name", c.name}, {"deg", c.degree}, {"h2", c.is_h2}});
    j["classes"] = cls;
    Json cup = Json::array();
    for (std::size_t i = 1; i < m.size(); ++i)
        for (std::size_t jj = i; jj < m.size(); ++jj)
            for (std::size_t k = 0; k < m.size(); ++k)
                if (!m.cup[i][jj][k].is_zero())
                    cup.push_back(Json{{"i", i}, {"j", jj}, {"k", k}, {"c", m.cup[i][jj][k].str()}});
    j["cup"] = cup;
    j["pairing"] = write_qmat(m.pairing);
    Json c1 = Json::array();
    for (const auto &c : m.c1) c1.push_back(c.str());
    j["c1"] = c1;
    j["mori_rank"] = m.mori_rank;
    j["beta_pairing"] = m.beta_pairing;
    return j;
}

GWTable read_gw_table(const Json &j, const CohModel &model) {
    GWTable t;
    auto big = model.big_indices();
    for (const auto &e : j) {
        GWKey key;
        key.beta = need(e, "beta", "gw entry").get<std::vector<long>>();
        if (key.beta.size() != static_cast<std::size_t>(model.mori_rank)) fail("gw entry", "beta arity mismatch");
        key.ins.assign(big.size(), 0);
        if (e.contains("insertions"))
            for (const auto &[name, count] : e.at("insertions").items()) {
                bool found = false;
                for (std::size_t a = 0; a < big.size(); ++a)
                    if (model.classes[big[a]].name == name) {
                        key.ins[a] = count.get<long>();
                        found = true;
                    }
                if (!found) fail("gw entry", "unknown insertion class '" + name + "'");
            }
        t.entries[key] = read_rational(need(e, "value", "gw entry"), "gw entry");
    }
    return t;
}

Json write_gw_table(const GWTable &t, const CohModel &model) {
    auto big = model.big_indices();
    Json arr = Json::array();
    for (const auto &[key, value] : t.entries) {
        Json e;
        e["beta"] = key.beta;
        Json ins;
        for (std::size_t a = 0; a < big.size(); ++a)
            if (key.ins[a] > 0) ins[model.classes[big[a]].name] = key.ins[a];
        e["insertions"] = ins.is_null() ? Json::object() : ins;
        e["value"] = value.str();
        arr.push_back(e);
    }
    return arr;
}

PotentialSeries read_potential(const Json &j) {
    PotentialSeries phi;
    VarContext ctx = read_var_context(j);
    phi.vars = ctx.vars;
    phi.bounds = ctx.bounds;
    phi.quantum = read_series(need(j, "quantum", "potential"), &ctx);
    phi.dimX = need(j, "dimX", "potential").get<int>();
    return phi;
}

Json write_potential(const PotentialSeries &phi, const CohModel &model) {
    Json j = write_var_context({phi.vars, phi.bounds});
    j["dimX"] = phi.dimX;
    j["quantum"] = write_series(phi.quantum, false);
    Json classical = Json::array();
    for (std::size_t i = 0; i < model.size(); ++i)
        for (std::size_t k = i; k < model.size(); ++k)
            for (std::size_t l = k; l < model.size(); ++l) {
                Rational c = model.triple(i, k, l);
                if (!c.is_zero()) classical.push_back(Json{{"i", i}, {"j", k}, {"k", l}, {"c", c.str()}});
            }
    j["classical"] = classical;
    return j;
}

PMHSInput read_pmhs(const Json &j) {
    PMHSInput in;
    in.space.dim = need(j, "dim", "pmhs").get<std::size_t>();
    in.space.w = need(j, "w", "pmhs").get<int>();
    in.space.S = read_qmat(need(j, "S", "pmhs"));
    for (const auto &nmat : need(j, "N", "pmhs")) in.nlist.push_back(read_qmat(nmat));
    for (const auto &[p, basis] : need(j, "F", "pmhs").items()) {
        GMat cols = read_gmat(basis);
        // bases are given as lists of column vectors
        in.flim.steps[std::stoi(p)] = cols.transpose();
    }
    return in;
}

Json write_dec_filtration(const DecFiltration &f) {
    Json j;
    for (const auto &[p, b] : f.steps) j[std::to_string(p)] = write_gmat(b.transpose());
    return j;
}

Json write_inc_filtration(const IncFiltration &f) {
    Json j;
    for (const auto &[l, b] : f.steps) j[std::to_string(l)] = write_gmat(b.transpose());
    return j;
}

Json write_splitting(const DeligneSplitting &d) {
    Json j;
    Json ipq, ipq0;
    for (const auto &[k, b] : d.ipq)
        ipq[std::to_string(k.first) + "," + std::to_string(k.second)] = write_gmat(b.transpose());
    for (const auto &[k, b] : d.ipq0)
        ipq0[std::to_string(k.first) + "," + std::to_string(k.second)] = write_gmat(b.transpose());
    j["ipq"] = ipq.is_null() ? Json::object() : ipq;
    j["ipq0"] = ipq0.is_null() ? Json::object() : ipq0;
    return j;
}

Json write_pmhs_data(const PMHSData &pm) {
    Json j;
    j["dim"] = pm.space.dim;
    j["w"] = pm.space.w;
    j["S"] = write_qmat(pm.space.S);
    Json ns = Json::array();
    for (const auto &n : pm.nlist) ns.push_back(write_qmat(n));
    j["N"] = ns;
    j["F"] = write_dec_filtration(pm.flim);
    j["W"] = write_inc_filtration(pm.weight);
    j["deligne"] = write_splitting(pm.deligne);
    return j;
}

Json write_report(const ConditionReport &rep) {
    Json arr = Json::array();
    for (const auto &c : rep.conditions) {
        Json e{{"condition", c.name}, {"pass", c.pass}, {"residual_nonzero_terms", c.residual_nonzero_terms}};
        if (!c.note.empty()) e["note"] = c.note;
        arr.push_back(e);
    }
    return arr;
}

Json write_hypotheses(const HypothesesReport &rep) {
    return Json{{"IC", rep.ic},      {"GC", rep.gc},           {"EC", rep.ec},
                {"xi_flat", rep.xi_flat}, {"d", rep.d.str()},  {"gc_rank", rep.gc_rank}};
}

Json write_germ(const FrobeniusGerm &germ) {
    Json j = write_var_context({germ.vars, germ.bounds});
    j["dim"] = germ.dim;
    Json mult = Json::array();
    for (const auto &m : germ.mult) mult.push_back(write_matrix_series(m));
    j["mult"] = mult;
    Json unit = Json::array(), euler = Json::array();
    for (const auto &u : germ.unit) unit.push_back(write_series(u, false));
    for (const auto &e : germ.euler) euler.push_back(write_series(e, false));
    j["unit"] = unit;
    j["euler"] = euler;
    j["metric"] = write_matrix_series(germ.metric);
    j["d"] = germ.d.str();
    return j;
}

std::string render_report_text(const ConditionReport &rep) {
    std::ostringstream os;
    for (const auto &c : rep.conditions) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (!c.pass) os << "  (nonzero residual terms: " << c.residual_nonzero_terms << ")";
        if (!c.note.empty()) os << "  [" << c.note << "]";
        os << "\n";
    }
    return os.str();
}

} // namespace forge
