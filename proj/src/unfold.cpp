#include "forge/unfold.hpp"

#include <deque>

namespace forge {

namespace {

RMatrixSeries sub_common(const RMatrixSeries &a, const RMatrixSeries &b) {
    return common_restrict_ms(a, b.bounds()) - common_restrict_ms(b, a.bounds());
}

RSeries sub_common_series(const RSeries &a, const RSeries &b) {
    return common_restrict(a, b.bounds()) - common_restrict(b, a.bounds());
}

// Breadth-first enumeration of monomial words in the generators whose images
// of e_1 span the fiber; returns the chosen words as generator index lists,
// realize(word) = gens[word[0]] * gens[word[1]] * ... (empty word = id).
// Expanding only rank-increasing items is enough: images of a linear
// combination are the combination of the images.
std::vector<std::vector<std::size_t>> enumerate_words(const std::vector<QMat> &gens, std::size_t n) {
    struct Item {
        std::vector<std::size_t> word;
        std::vector<Rational> v; // image of e_1
    };
    std::vector<Rational> e1(n);
    e1[0] = Rational(1);
    std::deque<Item> frontier{{{}, e1}};
    std::vector<std::vector<std::size_t>> chosen;
    QMat cols(n, 0);
    std::size_t rank = 0;
    const std::size_t len_cap = n * n;
    while (!frontier.empty()) {
        Item it = std::move(frontier.front());
        frontier.pop_front();
        QMat cand(n, cols.cols() + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < cols.cols(); ++j) cand(i, j) = cols(i, j);
            cand(i, cols.cols()) = it.v[i];
        }
        if (cand.rank() <= rank) continue;
        cols = cand;
        ++rank;
        chosen.push_back(it.word);
        if (rank == n) return chosen;
        if (it.word.size() >= len_cap) continue;
        for (std::size_t g = 0; g < gens.size(); ++g) {
            std::vector<Rational> w(n);
            for (std::size_t i = 0; i < n; ++i) {
                Rational acc;
                for (std::size_t j = 0; j < n; ++j) acc += gens[g](i, j) * it.v[j];
                w[i] = acc;
            }
            std::vector<std::size_t> nw;
            nw.reserve(it.word.size() + 1);
            nw.push_back(g);
            for (auto x : it.word) nw.push_back(x);
            frontier.push_back({std::move(nw), std::move(w)});
        }
    }
    throw GenerationFailure("word algebra reaches rank " + std::to_string(rank) + " of " + std::to_string(n) +
                            " (generation condition fails at the origin)");
}

} // namespace

VarSetPtr UnfoldingProblem::extended_vars() const {
    std::vector<std::string> names_out;
    std::vector<VarClass> classes_out;
    const auto &bv = *base.vars;
    std::size_t zi = bv.z_index();
    for (std::size_t i = 0; i < bv.size(); ++i) {
        if (i == zi) continue;
        names_out.push_back(bv.name(i));
        classes_out.push_back(bv.var_class(i));
    }
    for (const auto &nm : names) {
        if (bv.has(nm)) throw StructuralError("unfolding variable '" + nm + "' collides with a base variable");
        names_out.push_back(nm);
        classes_out.push_back(VarClass::unfold);
    }
    names_out.push_back(bv.name(zi));
    classes_out.push_back(VarClass::z);
    return make_vars(names_out, classes_out);
}

std::vector<int> UnfoldingProblem::extended_bounds() const {
    const auto &bv = *base.vars;
    std::size_t zi = bv.z_index();
    std::vector<int> nb;
    for (std::size_t i = 0; i < bv.size(); ++i) {
        if (i == zi) continue;
        nb.push_back(base.bounds[i]);
    }
    for (int K : order) {
        if (K < 0) throw StructuralError("negative unfolding order");
        nb.push_back(K + 1);
    }
    nb.push_back(base.bounds[zi]);
    return nb;
}

ConnectionForm solve_unfolding(const UnfoldingProblem &p) {
    p.base.validate();
    if (!p.base.unfold_vars().empty())
        throw RejectedInput("base connection form already contains unfolding variables");
    if (p.names.size() != p.dfs.size() || p.names.size() != p.order.size())
        throw StructuralError("unfolding problem arity mismatch");
    {
        auto rep = flatness_residuals(p.base);
        if (!rep.all_pass()) {
            std::string bad;
            for (const auto &c : rep.conditions)
                if (!c.pass) bad += (bad.empty() ? "" : ", ") + c.name;
            throw RejectedInput("base connection form is not flat; failing: " + bad);
        }
    }

    const std::size_t n = p.base.rank;
    const std::size_t l = p.names.size();
    auto nv = p.extended_vars();
    auto nb = p.extended_bounds();
    std::size_t zi = nv->z_index();

    ConnectionForm cur;
    cur.rank = n;
    cur.vars = nv;
    cur.bounds = nb;
    // embed each base matrix at its own bounds; downstream components may
    // carry tighter boxes than the nominal ones
    const auto &bv = *p.base.vars;
    auto embed_m = [&](const RMatrixSeries &m) {
        std::vector<int> mb(nv->size());
        for (std::size_t i = 0; i < nv->size(); ++i) {
            const std::string &name = nv->name(i);
            mb[i] = bv.has(name) ? m.bounds()[bv.index(name)] : nb[i];
        }
        return m.embedded(nv, mb);
    };
    for (const auto &m : p.base.alog) cur.alog.push_back(embed_m(m));
    for (const auto &m : p.base.clog) cur.clog.push_back(embed_m(m));
    for (const auto &m : p.base.chol) cur.chol.push_back(embed_m(m));
    cur.umat = embed_m(p.base.umat);
    cur.vmat = embed_m(p.base.vmat);

    // dfs over the extended variables, z-free, closed (symmetric mixed y-derivatives)
    std::vector<std::vector<RSeries>> dfs;
    for (std::size_t a = 0; a < l; ++a) {
        if (p.dfs[a].size() != n) throw StructuralError("dfs vector has wrong length");
        std::vector<RSeries> v;
        for (const auto &s : p.dfs[a]) {
            RSeries t = (*s.vars() == *nv) ? s.restrict_bounds([&] {
                std::vector<int> mb = nb;
                for (std::size_t i = 0; i < mb.size(); ++i) mb[i] = std::min(mb[i], s.bounds()[i]);
                return mb;
            }())
                                           : s.embedded(nv, nb);
            if (t.max_exponent(zi) > 0) throw StructuralError("dfs entries must be z-free");
            v.push_back(common_restrict(t, nb));
        }
        dfs.push_back(std::move(v));
    }
    for (std::size_t a = 0; a < l; ++a)
        for (std::size_t b = a + 1; b < l; ++b) {
            std::size_t ya = nv->index(p.names[a]), yb = nv->index(p.names[b]);
            for (std::size_t i = 0; i < n; ++i) {
                auto r = sub_common_series(dfs[a][i].partial_derivative(yb), dfs[b][i].partial_derivative(ya));
                if (!r.is_zero())
                    throw RejectedInput("dfs are not closed: d(df_" + p.names[a] + ")/d" + p.names[b] +
                                        " differs from d(df_" + p.names[b] + ")/d" + p.names[a]);
            }
        }

    auto lv = cur.log_vars();
    auto hv = cur.hol_vars();

    // word realization against the current matrices
    auto gen_series = [&](std::size_t g) -> const RMatrixSeries & {
        if (g < cur.clog.size()) return cur.clog[g];
        g -= cur.clog.size();
        if (g < cur.chol.size()) return cur.chol[g];
        g -= cur.chol.size();
        if (g < cur.funf.size()) return cur.funf[g];
        return cur.umat;
    };
    auto realize = [&](const std::vector<std::size_t> &word) {
        RMatrixSeries m = RMatrixSeries::identity(n, nv, nb);
        for (auto g : word) m = aligned_mul(m, gen_series(g));
        return m;
    };

    for (std::size_t a = 0; a < l; ++a) {
        std::size_t yi = nv->index(p.names[a]);
        int K = p.order[a];

        // Part III restriction: later unfolding variables sit at 0 here.
        std::vector<RSeries> df = dfs[a];
        for (std::size_t b = a + 1; b < l; ++b)
            for (auto &s : df) s = s.at_zero(nv->index(p.names[b]));

        std::vector<QMat> gens;
        for (const auto &m : cur.clog) gens.push_back(m.constant_term());
        for (const auto &m : cur.chol) gens.push_back(m.constant_term());
        for (const auto &m : cur.funf) gens.push_back(m.constant_term());
        gens.push_back(cur.umat.constant_term());
        auto words = enumerate_words(gens, n);

        for (int w = 0; w <= K; ++w) {
            std::vector<RMatrixSeries> wm;
            wm.reserve(words.size());
            std::vector<int> rb = nb; // working box of this step
            for (const auto &word : words) {
                wm.push_back(realize(word));
                for (std::size_t i = 0; i < rb.size(); ++i) rb[i] = std::min(rb[i], wm.back().bounds()[i]);
            }
            RMatrixSeries G(n, n, nv, rb);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) G(i, j) = common_restrict(wm[j](i, 0), rb);
            RMatrixSeries Ginv = G.invert_unit();
            std::vector<RSeries> dfr(df.size(), RSeries(nv, rb));
            for (std::size_t i = 0; i < n; ++i) dfr[i] = common_restrict(df[i], rb);
            std::vector<RSeries> g = Ginv.apply(dfr);
            RMatrixSeries F(n, n, nv, rb);
            for (std::size_t j = 0; j < n; ++j) F += common_restrict_ms(wm[j], rb).scaled(g[j]);
            F = F.truncate_var(yi, w);

            for (std::size_t i = 0; i < lv.size(); ++i) {
                auto rhs = aligned_add(F.log_derivative(lv[i]), aligned_commutator(cur.alog[i], F));
                auto inc = rhs.var_component(yi, w).integrate_capped(yi);
                cur.clog[i] = aligned_add(cur.clog[i], inc);
            }
            for (std::size_t k = 0; k < hv.size(); ++k) {
                auto inc = F.partial_derivative(hv[k]).var_component(yi, w).integrate_capped(yi);
                cur.chol[k] = aligned_add(cur.chol[k], inc);
            }
            {
                auto rhs = aligned_sub(aligned_commutator(cur.vmat, F), F);
                auto inc = rhs.var_component(yi, w).integrate_capped(yi);
                cur.umat = aligned_add(cur.umat, inc);
            }
            // V constant along y by (C:22).

            // induction step (3): the remaining equations must already hold
            int mod = std::min(w + 1, K + 1);
            auto tr = [&](RMatrixSeries m) { return m.truncate_var(yi, mod); };
            auto feed = [&](const char *eq, const RMatrixSeries &r) {
                if (!tr(r).is_zero())
                    throw InternalConsistencyError(std::string("unfolding step violates (") + eq + ") at " +
                                                   p.names[a] + "-order " + std::to_string(mod));
            };
            for (std::size_t i = 0; i < lv.size(); ++i)
                for (std::size_t j = i + 1; j < lv.size(); ++j) {
                    feed("C3", aligned_commutator(cur.clog[i], cur.clog[j]));
                    feed("C6", aligned_sub(aligned_add(cur.clog[i].log_derivative(lv[j]),
                                                       aligned_commutator(cur.alog[j], cur.clog[i])),
                                           aligned_add(cur.clog[j].log_derivative(lv[i]),
                                                       aligned_commutator(cur.alog[i], cur.clog[j]))));
                }
            for (std::size_t i = 0; i < lv.size(); ++i)
                for (std::size_t k = 0; k < hv.size(); ++k) {
                    feed("C3", aligned_commutator(cur.clog[i], cur.chol[k]));
                    feed("C7", aligned_sub(cur.clog[i].partial_derivative(hv[k]),
                                           aligned_add(cur.chol[k].log_derivative(lv[i]),
                                                       aligned_commutator(cur.alog[i], cur.chol[k]))));
                }
            for (std::size_t k = 0; k < hv.size(); ++k)
                for (std::size_t k2 = k + 1; k2 < hv.size(); ++k2) {
                    feed("C3", aligned_commutator(cur.chol[k], cur.chol[k2]));
                    feed("C8", aligned_sub(cur.chol[k2].partial_derivative(hv[k]),
                                           cur.chol[k].partial_derivative(hv[k2])));
                }
            for (std::size_t i = 0; i < lv.size(); ++i) {
                feed("C12", aligned_commutator(cur.umat, cur.clog[i]));
                feed("C14", aligned_sub(aligned_add(cur.umat.log_derivative(lv[i]), cur.clog[i]),
                                        aligned_add(aligned_commutator(cur.vmat, cur.clog[i]),
                                                    aligned_commutator(cur.umat, cur.alog[i]))));
                feed("C20", aligned_sub(cur.vmat.log_derivative(lv[i]), aligned_commutator(cur.vmat, cur.alog[i])));
            }
            for (std::size_t k = 0; k < hv.size(); ++k) {
                feed("C12", aligned_commutator(cur.umat, cur.chol[k]));
                feed("C15", aligned_sub(aligned_add(cur.umat.partial_derivative(hv[k]), cur.chol[k]),
                                        aligned_commutator(cur.vmat, cur.chol[k])));
                feed("C21", cur.vmat.partial_derivative(hv[k]));
            }
        }

        // close the run: all F's recomputed as algebra combinations pinned by
        // their first columns, now valid on the whole current box
        std::vector<QMat> gens2;
        for (const auto &m : cur.clog) gens2.push_back(m.constant_term());
        for (const auto &m : cur.chol) gens2.push_back(m.constant_term());
        for (const auto &m : cur.funf) gens2.push_back(m.constant_term());
        gens2.push_back(cur.umat.constant_term());
        auto words2 = enumerate_words(gens2, n);
        std::vector<RMatrixSeries> wm2;
        std::vector<int> rb2 = nb;
        for (const auto &word : words2) {
            wm2.push_back(realize(word));
            for (std::size_t i = 0; i < rb2.size(); ++i) rb2[i] = std::min(rb2[i], wm2.back().bounds()[i]);
        }
        RMatrixSeries G2(n, n, nv, rb2);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) G2(i, j) = common_restrict(wm2[j](i, 0), rb2);
        RMatrixSeries G2inv = G2.invert_unit();
        std::vector<RMatrixSeries> newf;
        for (std::size_t b = 0; b <= a; ++b) {
            std::vector<RSeries> dfb = dfs[b];
            for (std::size_t c = a + 1; c < l; ++c)
                for (auto &s : dfb) s = s.at_zero(nv->index(p.names[c]));
            for (auto &s : dfb) s = common_restrict(s, rb2);
            std::vector<RSeries> g = G2inv.apply(dfb);
            RMatrixSeries F(n, n, nv, rb2);
            for (std::size_t j = 0; j < n; ++j) F += common_restrict_ms(wm2[j], rb2).scaled(g[j]);
            newf.push_back(F);
        }
        cur.funf = std::move(newf);
    }

    // final closure checks: full flatness and the first-column contract
    {
        auto rep = flatness_residuals(cur);
        if (!rep.all_pass()) {
            std::string bad;
            for (const auto &c : rep.conditions)
                if (!c.pass) bad += (bad.empty() ? "" : ", ") + c.name;
            throw InternalConsistencyError("unfolded connection form is not flat; failing: " + bad);
        }
        for (std::size_t a = 0; a < l; ++a)
            for (std::size_t i = 0; i < n; ++i) {
                auto r = common_restrict(cur.funf[a](i, 0), dfs[a][i].bounds()) -
                         common_restrict(dfs[a][i], cur.funf[a](i, 0).bounds());
                if (!r.is_zero())
                    throw InternalConsistencyError("first-column contract (F_a)_{i1} = df_i/dy_a violated");
            }
        // restriction to y = 0 reproduces the base
        ConnectionForm back = cur.restrict_to_base();
        auto same = [&](const RMatrixSeries &x, const RMatrixSeries &y) {
            return sub_common(x, y).is_zero();
        };
        bool ok = true;
        for (std::size_t i = 0; i < p.base.alog.size(); ++i) ok = ok && same(back.alog[i], p.base.alog[i]);
        for (std::size_t i = 0; i < p.base.clog.size(); ++i) ok = ok && same(back.clog[i], p.base.clog[i]);
        for (std::size_t k = 0; k < p.base.chol.size(); ++k) ok = ok && same(back.chol[k], p.base.chol[k]);
        ok = ok && same(back.umat, p.base.umat) && same(back.vmat, p.base.vmat);
        if (!ok) throw InternalConsistencyError("unfolding does not restrict to the base at y = 0");
    }
    return cur;
}

void PairingData::validate_against(const ConnectionForm &omega) const {
    if (rnorm.rows() != omega.rank || rnorm.cols() != omega.rank)
        throw StructuralError("pairing matrix has wrong dimensions");
    if (!rnorm.vars() || *rnorm.vars() != *omega.vars) throw StructuralError("pairing variable set mismatch");
    std::size_t zi = omega.vars->z_index();
    if (rnorm.max_exponent(zi) + 1 > omega.bounds[zi])
        throw StructuralError("z bound too small for the pairing extension; raise it");
    if (!(rnorm.transpose() - rnorm.negate_var(zi)).is_zero())
        throw MalformedPairing("pairing violates the (-1)^w symmetry law");
}

PairingData extend_pairing(const ConnectionForm &omega, const PairingData &r0) {
    omega.validate();
    {
        auto rep = flatness_residuals(omega);
        if (!rep.all_pass()) throw RejectedInput("extend_pairing requires a flat connection form");
    }
    r0.validate_against(omega);
    const auto &nv = omega.vars;
    const auto &nb = omega.bounds;
    std::size_t zi = nv->z_index();
    auto uv = omega.unfold_vars();
    auto lv = omega.log_vars();
    auto hv = omega.hol_vars();

    RMatrixSeries R = r0.rnorm;
    for (auto u : uv)
        if (R != R.at_zero(u)) throw StructuralError("initial pairing must not depend on the unfolding variables");

    PairingData out;
    out.w = r0.w;

    for (std::size_t ai = 0; ai < uv.size(); ++ai) {
        std::size_t yi = uv[ai];
        const RMatrixSeries &F = omega.funf[ai];
        int K = nb[yi];
        for (int w = 0; w < K; ++w) {
            RMatrixSeries S = aligned_sub(aligned_mul(F.transpose(), R), aligned_mul(R, F));
            auto z0 = S.var_component(yi, w).var_coefficient(zi, 0);
            if (!z0.is_zero())
                throw PairingEscape("pairing escapes z^w at " + nv->name(yi) + "-order " + std::to_string(w + 1));
            RMatrixSeries inc = S.var_component(yi, w).shifted(zi, -1).integrate_capped(yi);
            R = aligned_add(R, inc);
        }
        out.checks.add("membership_" + nv->name(yi), true, 0);
    }

    // Punfold residuals on the final pairing; the dz-direction uses the
    // single-matrix form with U-check(z) = U + zV.
    RMatrixSeries Uz = aligned_add(omega.umat, omega.vmat.shifted(zi, 1));
    {
        RMatrixSeries T = aligned_sub(aligned_mul(Uz.transpose(), R), aligned_mul(R, Uz.negate_var(zi)));
        auto z0 = T.var_coefficient(zi, 0);
        if (!z0.is_zero()) {
            out.checks.add("Punfold1", false, z0.nonzero_terms(), "z-division obstruction");
        } else {
            auto lhs = aligned_add(R.scaled(Rational(r0.w)), R.euler_derivative(zi));
            auto res = aligned_sub(lhs, T.shifted(zi, -1));
            out.checks.residual("Punfold1", res);
        }
    }
    for (std::size_t i = 0; i < lv.size(); ++i) {
        RMatrixSeries Cz = aligned_add(omega.clog[i], omega.alog[i].shifted(zi, 1));
        RMatrixSeries T = aligned_sub(aligned_mul(Cz.transpose(), R), aligned_mul(R, Cz.negate_var(zi)));
        auto z0 = T.var_coefficient(zi, 0);
        if (!z0.is_zero()) {
            out.checks.add("Punfold2_" + nv->name(lv[i]), false, z0.nonzero_terms(), "z-division obstruction");
        } else {
            auto res = aligned_sub(R.log_derivative(lv[i]), T.shifted(zi, -1));
            out.checks.residual("Punfold2_" + nv->name(lv[i]), res);
        }
    }
    for (std::size_t k = 0; k < hv.size(); ++k) {
        const RMatrixSeries &Ck = omega.chol[k];
        RMatrixSeries T = aligned_sub(aligned_mul(Ck.transpose(), R), aligned_mul(R, Ck));
        auto z0 = T.var_coefficient(zi, 0);
        if (!z0.is_zero()) {
            out.checks.add("Punfold3_" + nv->name(hv[k]), false, z0.nonzero_terms(), "z-division obstruction");
        } else {
            auto res = sub_common(R.partial_derivative(hv[k]), T.shifted(zi, -1));
            out.checks.residual("Punfold3_" + nv->name(hv[k]), res);
        }
    }
    {
        auto res = aligned_sub(R.transpose(), R.negate_var(zi));
        out.checks.residual("symmetry", res);
    }
    out.rnorm = R;
    return out;
}

UniversalUnfoldResult universal_unfold(const FTSData &fts_in, int order, int zbound) {
    FTSData fts = fts_in;
    fts.validate();
    {
        auto rep = check_fts(fts);
        if (!rep.all_pass()) throw RejectedInput("universal_unfold requires check_fts to pass");
    }

    std::size_t n = fts.rank;
    std::size_t m = fts.base_dim();

    // move xi to the first frame vector
    {
        bool is_e1 = true;
        for (std::size_t i = 0; i < n; ++i) {
            const auto &s = fts.xi[i];
            if (s.nonzero_terms() > 1 || (!s.is_zero() && s.constant_term().is_zero())) {
                throw RejectedInput("universal_unfold expects a constant xi in this frame");
            }
            Rational want = (i == 0) ? Rational(1) : Rational(0);
            if (s.constant_term() != want) is_e1 = false;
        }
        if (!is_e1) {
            QMat T(n, n);
            std::vector<Rational> xi0(n);
            for (std::size_t i = 0; i < n; ++i) xi0[i] = fts.xi[i].constant_term();
            for (std::size_t i = 0; i < n; ++i) T(i, 0) = xi0[i];
            // complete with the lexicographically earliest standard vectors
            std::size_t c = 1;
            for (std::size_t p = 0; p < n && c < n; ++p) {
                QMat cand = T;
                cand(p, c) = Rational(1);
                QMat sub(n, c + 1);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j <= c; ++j) sub(i, j) = cand(i, j);
                if (sub.rank() == c + 1) {
                    T = cand;
                    ++c;
                }
            }
            fts = conjugate_frame(fts, T);
        }
    }

    auto hyp = check_hypotheses(fts);
    if (!hyp.ic || !hyp.gc || !hyp.ec)
        throw RejectedInput(std::string("unfolding hypotheses fail:") + (hyp.ic ? "" : " (IC)") +
                            (hyp.gc ? "" : " (GC)") + (hyp.ec ? "" : " (EC)"));

    TrTLEPData tr = fts_to_trtlep(fts, zbound);

    UniversalUnfoldResult result;

    if (m == n) {
        result.omega = tr.omega;
        result.pairing.rnorm = tr.pnorm;
        result.pairing.w = tr.w;
        result.extended_fts = fts;
        result.germ = isocase_build(fts);
        result.axioms = check_frobenius_axioms(result.germ);
        return result;
    }

    // greedy completion of the Higgs span by standard basis vectors
    std::vector<Rational> xi0(n);
    for (std::size_t i = 0; i < n; ++i) xi0[i] = fts.xi[i].constant_term();
    QMat span(n, m);
    for (std::size_t a = 0; a < m; ++a) {
        QMat c0 = fts.higgs[a].constant_term();
        for (std::size_t i = 0; i < n; ++i) {
            Rational acc;
            for (std::size_t j = 0; j < n; ++j) acc += c0(i, j) * xi0[j];
            span(i, a) = acc;
        }
    }
    std::size_t rank = span.rank();
    std::vector<std::size_t> picks;
    for (std::size_t pidx = 0; pidx < n && rank < n; ++pidx) {
        QMat cand(n, span.cols() + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < span.cols(); ++j) cand(i, j) = span(i, j);
            cand(i, span.cols()) = Rational(pidx == i ? 1 : 0);
        }
        if (cand.rank() > rank) {
            span = cand;
            rank = cand.rank();
            picks.push_back(pidx);
        }
    }
    if (rank < n) throw GenerationFailure("cannot complete the Higgs span (unexpected)");

    UnfoldingProblem prob;
    prob.base = tr.omega;
    auto fresh_name = [&](std::size_t k) {
        std::string base_name = "y" + std::to_string(k + 1);
        std::string nm = base_name;
        int suffix = 0;
        while (tr.omega.vars->has(nm)) nm = base_name + "_" + std::to_string(++suffix);
        return nm;
    };
    for (std::size_t k = 0; k < picks.size(); ++k) {
        prob.names.push_back(fresh_name(k));
        prob.order.push_back(order);
    }
    auto env = prob.extended_vars();
    auto enb = prob.extended_bounds();
    for (std::size_t k = 0; k < picks.size(); ++k) {
        std::vector<RSeries> df;
        for (std::size_t i = 0; i < n; ++i)
            df.push_back(TruncatedSeries<Rational>::constant(env, enb, Rational(i == picks[k] ? 1 : 0)));
        prob.dfs.push_back(std::move(df));
    }
    result.new_vars = prob.names;

    result.omega = solve_unfolding(prob);

    PairingData r0;
    r0.w = tr.w;
    {
        std::vector<int> pb(env->size());
        const auto &tv = *tr.omega.vars;
        for (std::size_t i = 0; i < env->size(); ++i) {
            const std::string &name = env->name(i);
            pb[i] = tv.has(name) ? tr.pnorm.bounds()[tv.index(name)] : enb[i];
        }
        r0.rnorm = tr.pnorm.embedded(env, pb);
    }
    result.pairing = extend_pairing(result.omega, r0);
    if (!result.pairing.checks.all_pass())
        throw InternalConsistencyError("pairing extension residuals do not vanish");

    TrTLEPData tr2;
    tr2.rank = n;
    tr2.omega = result.omega;
    tr2.pnorm = result.pairing.rnorm;
    tr2.w = tr.w;
    tr2.d = tr.d;
    for (const auto &x : tr.xi) {
        std::vector<int> xb(env->size());
        const auto &tv = *tr.omega.vars;
        for (std::size_t i = 0; i < env->size(); ++i) {
            const std::string &name = env->name(i);
            xb[i] = tv.has(name) ? x.bounds()[tv.index(name)] : enb[i];
        }
        tr2.xi.push_back(x.embedded(env, xb));
    }
    result.extended_fts = trtlep_to_fts(tr2);

    result.germ = isocase_build(result.extended_fts);
    result.axioms = check_frobenius_axioms(result.germ);
    if (!result.axioms.all_pass()) {
        std::string bad;
        for (const auto &c : result.axioms.conditions)
            if (!c.pass) bad += (bad.empty() ? "" : ", ") + c.name;
        throw InternalConsistencyError("unfolded germ fails Frobenius axioms: " + bad);
    }
    return result;
}

} // namespace forge
