#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "forge/json_io.hpp"

using namespace forge;

namespace {

Json load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

struct Output {
    std::string format = "text";
    std::string path;

    void emit(const Json &j, const std::string &text) const {
        if (!path.empty()) {
            std::ofstream out(path);
            out << j.dump(2) << "\n";
        }
        if (format == "json")
            std::cout << j.dump(2) << "\n";
        else
            std::cout << text;
    }
};

void add_output_opts(CLI::App *cmd, Output &out) {
    cmd->add_option("--format", out.format, "output format: text|json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--output", out.path, "write JSON result to this file");
}

int report_exit(const ConditionReport &rep) { return rep.all_pass() ? 0 : 3; }

std::vector<long> parse_longs(const std::string &s) {
    std::vector<long> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stol(cur));
            cur.clear();
        } else
            cur += c;
    }
    return out;
}

std::set<std::size_t> parse_w(const CohModel &model, const std::string &wspec) {
    std::set<std::size_t> W;
    if (wspec.empty()) {
        for (auto j : model.h2_indices()) W.insert(j);
        return W;
    }
    std::string cur;
    for (char c : wspec + ",") {
        if (c == ',') {
            if (!cur.empty()) {
                bool found = false;
                for (std::size_t i = 0; i < model.size(); ++i)
                    if (model.classes[i].name == cur) {
                        W.insert(i);
                        found = true;
                    }
                if (!found) throw ParseError("unknown class '" + cur + "' in W");
            }
            cur.clear();
        } else
            cur += c;
    }
    for (auto j : model.h2_indices()) W.insert(j);
    return W;
}

PotentialBounds derive_bounds(const CohModel &model, const std::vector<long> &beta_cap,
                              const std::vector<int> &t_cap_opt) {
    PotentialBounds b;
    b.beta_cap = beta_cap;
    if (!t_cap_opt.empty()) {
        b.t_cap = t_cap_opt;
        return b;
    }
    // largest insertion count allowed by the dimension axiom for beta in the box
    Rational cmax = model.c1_dot(beta_cap);
    long nmax = model.dimX - 3 + (cmax.is_integer() ? cmax.to_long() : 0);
    if (nmax < 0) nmax = 0;
    // third derivatives eat three orders; entries beyond the admissible
    // maximum are genuinely zero, so the padding stays exact
    b.t_cap.assign(model.big_indices().size(), static_cast<int>(nmax + 3));
    return b;
}

PMHSData load_pmhs(const std::string &path) {
    auto in = read_pmhs(load(path));
    return build_pmhs(in.space, in.nlist, in.flim);
}

std::string spectrum_text(const RMatrixSeries &v) {
    std::string s = "{";
    QMat c = v.constant_term();
    for (std::size_t i = 0; i < c.rows(); ++i) s += (i ? ", " : "") + c(i, i).str();
    return s + "}";
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"forge: logarithmic Frobenius structures, quantum cohomology reconstruction, Hodge asymptotics"};
    app.require_subcommand(1);

    try {
        // ------------------------------------------------ validate
        std::string v_path;
        auto *c_validate = app.add_subcommand("validate", "parse and validate an input file");
        c_validate->add_option("file", v_path)->required();

        // ------------------------------------------------ check-fts
        std::string fts_path;
        Output fts_out;
        auto *c_fts = app.add_subcommand("check-fts", "verify the Frobenius type structure conditions");
        c_fts->add_option("--fts", fts_path)->required();
        add_output_opts(c_fts, fts_out);

        std::string f2t_path;
        int f2t_zbound = 2;
        Output f2t_out;
        auto *c_f2t = app.add_subcommand("fts-to-trtlep", "correspondence to a trTLEP(w)-structure");
        c_f2t->add_option("--fts", f2t_path)->required();
        c_f2t->add_option("--zbound", f2t_zbound);
        add_output_opts(c_f2t, f2t_out);

        std::string flat_path;
        Output flat_out;
        auto *c_flat = app.add_subcommand("flatness", "flatness residuals of a connection form");
        c_flat->add_option("--omega", flat_path)->required();
        add_output_opts(c_flat, flat_out);

        std::string unfold_base, unfold_dfs, unfold_problem;
        int unfold_order = 4;
        Output unfold_out;
        auto *c_unfold = app.add_subcommand("unfold", "order-by-order unfolding of a flat base");
        c_unfold->add_option("--base", unfold_base);
        c_unfold->add_option("--dfs", unfold_dfs);
        c_unfold->add_option("--order", unfold_order);
        c_unfold->add_option("--problem", unfold_problem, "complete unfold.json problem file");
        add_output_opts(c_unfold, unfold_out);

        std::string ep_omega, ep_pairing;
        Output ep_out;
        auto *c_ep = app.add_subcommand("extend-pairing", "extend the pairing along the unfolding");
        c_ep->add_option("--omega", ep_omega)->required();
        c_ep->add_option("--pairing", ep_pairing)->required();
        add_output_opts(c_ep, ep_out);

        std::string uu_path;
        int uu_order = 4, uu_zbound = 2;
        Output uu_out;
        auto *c_uu = app.add_subcommand("universal-unfold", "universal unfolding to a Frobenius germ");
        c_uu->add_option("--fts", uu_path)->required();
        c_uu->add_option("--order", uu_order);
        c_uu->add_option("--zbound", uu_zbound);
        add_output_opts(c_uu, uu_out);

        std::string qp_model, qp_gw, qp_beta, qp_tcap;
        Output qp_out;
        auto *c_qp = app.add_subcommand("qc-potential", "assemble the Gromov-Witten potential");
        c_qp->add_option("--model", qp_model)->required();
        c_qp->add_option("--gw", qp_gw)->required();
        c_qp->add_option("--beta-cap", qp_beta)->required();
        c_qp->add_option("--t-cap", qp_tcap);
        add_output_opts(c_qp, qp_out);

        std::string qpr_model, qpr_phi;
        Output qpr_out;
        auto *c_qpr = app.add_subcommand("qc-product", "big quantum product tensor");
        c_qpr->add_option("--model", qpr_model)->required();
        c_qpr->add_option("--potential", qpr_phi)->required();
        add_output_opts(c_qpr, qpr_out);

        std::string qw_model, qw_phi;
        Output qw_out;
        auto *c_qw = app.add_subcommand("qc-wdvv", "WDVV associator residual");
        c_qw->add_option("--model", qw_model)->required();
        c_qw->add_option("--potential", qw_phi)->required();
        add_output_opts(c_qw, qw_out);

        std::string qe_model, qe_phi;
        Output qe_out;
        auto *c_qe = app.add_subcommand("qc-euler", "Euler grading checks");
        c_qe->add_option("--model", qe_model)->required();
        c_qe->add_option("--potential", qe_phi)->required();
        add_output_opts(c_qe, qe_out);

        std::string qr_model, qr_seed, qr_w, qr_beta, qr_tcap;
        long qr_maxdeg = 0;
        Output qr_out;
        auto *c_qr = app.add_subcommand("qc-reconstruct", "WDVV reconstruction of invariants from a seed");
        c_qr->add_option("--model", qr_model)->required();
        c_qr->add_option("--seed", qr_seed)->required();
        c_qr->add_option("--w", qr_w, "comma-separated class names generating the ring (H^2 always included)");
        c_qr->add_option("--max-degree", qr_maxdeg, "cap every Mori coordinate at this degree");
        c_qr->add_option("--beta-cap", qr_beta, "comma-separated per-generator caps");
        c_qr->add_option("--t-cap", qr_tcap);
        add_output_opts(c_qr, qr_out);

        std::string qf_model, qf_phi, qf_w;
        Output qf_out;
        auto *c_qf = app.add_subcommand("qc-to-fts", "Frobenius type structure of the large-radius germ");
        c_qf->add_option("--model", qf_model)->required();
        c_qf->add_option("--potential", qf_phi)->required();
        c_qf->add_option("--w", qf_w);
        add_output_opts(c_qf, qf_out);

        std::string hw_path;
        Output hw_out;
        auto *c_hw = app.add_subcommand("hodge-weight", "monodromy weight filtration");
        c_hw->add_option("--pmhs", hw_path)->required();
        add_output_opts(c_hw, hw_out);

        std::string hi_path;
        Output hi_out;
        auto *c_hi = app.add_subcommand("hodge-ipq", "Deligne splitting I^{p,q}");
        c_hi->add_option("--pmhs", hi_path)->required();
        add_output_opts(c_hi, hi_out);

        std::string ho_path;
        Output ho_out;
        auto *c_ho = app.add_subcommand("hodge-opposite", "opposite filtration U_*");
        c_ho->add_option("--pmhs", ho_path)->required();
        add_output_opts(c_ho, ho_out);

        std::string hp_path;
        Output hp_out;
        auto *c_hp = app.add_subcommand("hodge-pmhs", "polarized mixed Hodge structure checks");
        c_hp->add_option("--pmhs", hp_path)->required();
        add_output_opts(c_hp, hp_out);

        std::string hc_path, hc_samples = "1";
        Output hc_out;
        auto *c_hc = app.add_subcommand("hodge-cone", "monodromy-cone weight filtration agreement");
        c_hc->add_option("--pmhs", hc_path)->required();
        c_hc->add_option("--samples", hc_samples, "semicolon-separated positive weight vectors, e.g. '1,1;1,2;3,1'");
        add_output_opts(c_hc, hc_out);

        std::string hf_path, hf_qnames;
        int hf_order = 4;
        Output hf_out;
        auto *c_hf = app.add_subcommand("hodge-to-fts", "split the twisted connection into a Frobenius type structure");
        c_hf->add_option("--pmhs", hf_path)->required();
        c_hf->add_option("--order", hf_order);
        c_hf->add_option("--qnames", hf_qnames, "comma-separated q variable names");
        add_output_opts(c_hf, hf_out);

        std::string pv_path, pv_qnames;
        int pv_order = 4, pv_zbound = 2;
        Output pv_out;
        auto *c_pv = app.add_subcommand("pipeline-vphs-to-frobenius",
                                        "variation of Hodge structures to logarithmic Frobenius germ");
        c_pv->add_option("--pmhs", pv_path)->required();
        c_pv->add_option("--order", pv_order);
        c_pv->add_option("--zbound", pv_zbound);
        c_pv->add_option("--qnames", pv_qnames);
        add_output_opts(c_pv, pv_out);

        CLI11_PARSE(app, argc, argv);

        if (*c_validate) {
            Json j = load(v_path);
            std::string kind;
            if (j.is_array()) {
                kind = "gw";
            } else if (j.contains("dimX")) {
                read_model(j);
                kind = "model";
            } else if (j.contains("N") && j.contains("F")) {
                load_pmhs(v_path);
                kind = "pmhs";
            } else if (j.contains("higgs")) {
                read_fts(j);
                kind = "fts";
            } else if (j.contains("alog")) {
                read_omega(j);
                kind = "omega";
            } else if (j.contains("base") && j.contains("dfs")) {
                read_unfold_problem(j);
                kind = "unfold";
            } else if (j.contains("omega") && j.contains("pnorm")) {
                read_trtlep(j);
                kind = "trtlep";
            } else {
                throw ParseError("unrecognized document shape");
            }
            std::cout << "valid " << kind << "\n";
            return 0;
        }
        if (*c_fts) {
            auto fts = read_fts(load(fts_path));
            auto rep = check_fts(fts);
            auto hyp = check_hypotheses(fts);
            Json j{{"conditions", write_report(rep)}, {"hypotheses", write_hypotheses(hyp)}};
            fts_out.emit(j, render_report_text(rep) + "IC " + (hyp.ic ? "true" : "false") + ", GC " +
                                (hyp.gc ? "true" : "false") + ", EC " + (hyp.ec ? "true" : "false") +
                                ", xi flat " + (hyp.xi_flat ? "true" : "false") + ", d = " + hyp.d.str() + "\n");
            return report_exit(rep);
        }
        if (*c_f2t) {
            auto fts = read_fts(load(f2t_path));
            auto tr = fts_to_trtlep(fts, f2t_zbound);
            Json j = write_trtlep(tr);
            f2t_out.emit(j, "trTLEP(" + std::to_string(tr.w) + ")-structure of rank " + std::to_string(tr.rank) +
                                "\n");
            return 0;
        }
        if (*c_flat) {
            auto omega = read_omega(load(flat_path));
            auto rep = flatness_residuals(omega);
            flat_out.emit(write_report(rep), render_report_text(rep));
            return report_exit(rep);
        }
        if (*c_unfold) {
            UnfoldingProblem p;
            if (!unfold_problem.empty()) {
                p = read_unfold_problem(load(unfold_problem));
            } else {
                if (unfold_base.empty() || unfold_dfs.empty())
                    throw ParseError("unfold needs --problem or --base/--dfs/--order");
                Json j;
                j["base"] = load(unfold_base);
                Json d = load(unfold_dfs);
                j["dfs"] = d.contains("dfs") ? d.at("dfs") : d;
                if (d.contains("names")) j["names"] = d.at("names");
                j["order"] = unfold_order;
                p = read_unfold_problem(j);
            }
            auto omega = solve_unfolding(p);
            auto rep = flatness_residuals(omega);
            unfold_out.emit(write_omega(omega),
                            "unfolded over " + std::to_string(p.names.size()) + " parameter(s); " +
                                (rep.all_pass() ? "flat" : "NOT FLAT") + "\n");
            return report_exit(rep);
        }
        if (*c_ep) {
            auto omega = read_omega(load(ep_omega));
            VarContext ctx{omega.vars, omega.bounds};
            auto r0 = read_pairing(load(ep_pairing), ctx);
            auto ext = extend_pairing(omega, r0);
            ep_out.emit(write_pairing(ext), render_report_text(ext.checks));
            return report_exit(ext.checks);
        }
        if (*c_uu) {
            auto fts = read_fts(load(uu_path));
            auto res = universal_unfold(fts, uu_order, uu_zbound);
            Json j;
            j["germ"] = write_germ(res.germ);
            j["fts"] = write_fts(res.extended_fts);
            j["axioms"] = write_report(res.axioms);
            j["new_vars"] = res.new_vars;
            uu_out.emit(j, "germ of dimension " + std::to_string(res.germ.dim) + " over " +
                               std::to_string(res.new_vars.size()) + " new parameter(s)\n" +
                               render_report_text(res.axioms));
            return report_exit(res.axioms);
        }
        if (*c_qp) {
            auto model = read_model(load(qp_model));
            auto gw = read_gw_table(load(qp_gw), model);
            auto bounds = derive_bounds(model, parse_longs(qp_beta), [&] {
                std::vector<int> t;
                for (long x : parse_longs(qp_tcap)) t.push_back(static_cast<int>(x));
                return t;
            }());
            auto phi = potential_assemble(model, gw, bounds);
            qp_out.emit(write_potential(phi, model),
                        "potential with " + std::to_string(phi.quantum.nonzero_terms()) + " quantum terms\n");
            return 0;
        }
        if (*c_qpr) {
            auto model = read_model(load(qpr_model));
            auto phi = read_potential(load(qpr_phi));
            auto prod = quantum_product(model, phi);
            Json arr = Json::array();
            for (const auto &m : prod) arr.push_back(write_matrix_series(m));
            Json j = write_var_context({prod[0].vars(), prod[0].bounds()});
            j["product"] = arr;
            std::ostringstream os;
            for (std::size_t i = 0; i < prod.size(); ++i)
                for (std::size_t jj = 0; jj < prod.size(); ++jj)
                    for (std::size_t k = 0; k < prod.size(); ++k)
                        if (!prod[i](k, jj).is_zero())
                            os << model.classes[i].name << " * " << model.classes[jj].name << " -> "
                               << model.classes[k].name << " : " << prod[i](k, jj).str() << "\n";
            qpr_out.emit(j, os.str());
            return 0;
        }
        if (*c_qw) {
            auto model = read_model(load(qw_model));
            auto phi = read_potential(load(qw_phi));
            auto rep = wdvv_residual(model, phi);
            qw_out.emit(write_report(rep), render_report_text(rep));
            return report_exit(rep);
        }
        if (*c_qe) {
            auto model = read_model(load(qe_model));
            auto phi = read_potential(load(qe_phi));
            auto rep = euler_check(model, phi);
            qe_out.emit(write_report(rep), render_report_text(rep));
            return report_exit(rep);
        }
        if (*c_qr) {
            auto model = read_model(load(qr_model));
            auto seed = read_gw_table(load(qr_seed), model);
            std::vector<long> beta_cap;
            if (!qr_beta.empty())
                beta_cap = parse_longs(qr_beta);
            else if (qr_maxdeg > 0)
                beta_cap.assign(model.mori_rank, qr_maxdeg);
            else
                throw ParseError("qc-reconstruct needs --max-degree or --beta-cap");
            auto bounds = derive_bounds(model, beta_cap, [&] {
                std::vector<int> t;
                for (long x : parse_longs(qr_tcap)) t.push_back(static_cast<int>(x));
                return t;
            }());
            auto W = parse_w(model, qr_w);
            auto table = reconstruct(model, seed, W, bounds);
            std::ostringstream os;
            auto big = model.big_indices();
            for (const auto &[key, value] : table.entries) {
                os << "beta=(";
                for (std::size_t s = 0; s < key.beta.size(); ++s) os << (s ? "," : "") << key.beta[s];
                os << ")";
                for (std::size_t a = 0; a < key.ins.size(); ++a)
                    if (key.ins[a] > 0) os << " " << model.classes[big[a]].name << "^" << key.ins[a];
                os << "  " << value.str() << "\n";
            }
            qr_out.emit(write_gw_table(table, model), os.str());
            return 0;
        }
        if (*c_qf) {
            auto model = read_model(load(qf_model));
            auto phi = read_potential(load(qf_phi));
            auto W = parse_w(model, qf_w);
            auto fts = qc_to_fts(model, phi, W);
            auto rep = check_fts(fts);
            qf_out.emit(write_fts(fts), render_report_text(rep));
            return report_exit(rep);
        }
        if (*c_hw) {
            // the weight filtration needs only the monodromy logarithms
            auto in = read_pmhs(load(hw_path));
            QMat N(in.space.dim, in.space.dim);
            for (const auto &nj : in.nlist) N = N + nj;
            auto W = weight_filtration(N, in.space.w);
            hw_out.emit(write_inc_filtration(W), [&] {
                std::ostringstream os;
                for (const auto &[l, b] : W.steps)
                    os << "W_" << l << "  dim " << GSpace(b).dim() << "\n";
                return os.str();
            }());
            return 0;
        }
        if (*c_hi) {
            auto pm = load_pmhs(hi_path);
            hi_out.emit(write_splitting(pm.deligne), [&] {
                std::ostringstream os;
                for (const auto &[k, b] : pm.deligne.ipq)
                    os << "I^{" << k.first << "," << k.second << "}  dim " << GSpace(b).dim() << "\n";
                return os.str();
            }());
            return 0;
        }
        if (*c_ho) {
            auto pm = load_pmhs(ho_path);
            auto U = opposite_filtration(pm);
            ho_out.emit(write_inc_filtration(U), [&] {
                std::ostringstream os;
                for (const auto &[l, b] : U.steps) os << "U_" << l << "  dim " << GSpace(b).dim() << "\n";
                return os.str();
            }());
            return 0;
        }
        if (*c_hp) {
            auto pm = load_pmhs(hp_path);
            auto rep = check_polarization(pm);
            hp_out.emit(write_report(rep), render_report_text(rep));
            return report_exit(rep);
        }
        if (*c_hc) {
            auto in = read_pmhs(load(hc_path));
            std::vector<std::vector<Rational>> samples;
            std::string cur;
            for (char c : hc_samples + ";") {
                if (c == ';') {
                    if (!cur.empty()) {
                        std::vector<Rational> v;
                        for (long x : parse_longs(cur)) v.push_back(Rational(x));
                        samples.push_back(v);
                    }
                    cur.clear();
                } else
                    cur += c;
            }
            bool agree = cone_agreement(in.nlist, in.space.w, samples);
            hc_out.emit(Json{{"agree", agree}}, std::string(agree ? "agree" : "DISAGREE") + "\n");
            return agree ? 0 : 3;
        }
        if (*c_hf || *c_pv) {
            bool pipeline = static_cast<bool>(*c_pv);
            auto pm = load_pmhs(pipeline ? pv_path : hf_path);
            SplitConnectionOptions opt;
            std::string qn = pipeline ? pv_qnames : hf_qnames;
            if (qn.empty())
                for (std::size_t jj = 0; jj < pm.nlist.size(); ++jj) opt.qnames.push_back("q" + std::to_string(jj + 1));
            else {
                std::string cur;
                for (char c : qn + ",") {
                    if (c == ',') {
                        if (!cur.empty()) opt.qnames.push_back(cur);
                        cur.clear();
                    } else
                        cur += c;
                }
            }
            int order = pipeline ? pv_order : hf_order;
            opt.bounds.assign(opt.qnames.size(), order);
            auto fts = split_connection(pm, opt);
            if (!pipeline) {
                auto rep = check_fts(fts);
                hf_out.emit(write_fts(fts), render_report_text(rep) + "spec(V) = " + spectrum_text(fts.vmat) + "\n");
                return report_exit(rep);
            }
            auto rep = check_fts(fts);
            auto gen = h2_generation(pm.flim, pm.nlist, pm.space.dim);
            auto res = universal_unfold(fts, order, 2);
            Json j;
            j["fts"] = write_fts(fts);
            j["fts_conditions"] = write_report(rep);
            j["h2_generated"] = gen.generated;
            j["rank_hypothesis"] = gen.rank_hypothesis;
            j["germ"] = write_germ(res.germ);
            j["axioms"] = write_report(res.axioms);
            std::ostringstream os;
            os << "U = " << (fts.umat.is_zero() ? "0" : "NONZERO") << "\n";
            os << "spec(V) = " << spectrum_text(fts.vmat) << "\n";
            bool residues_zero = true;
            for (const auto &r : fts.rconn)
                if (!r.constant_term().is_zero()) residues_zero = false;
            os << "nabla^r residues zero: " << (residues_zero ? "true" : "false") << "\n";
            os << "H^2-generation: " << (gen.generated ? "true" : "false") << "\n";
            os << "germ dimension " << res.germ.dim << "\n" << render_report_text(res.axioms);
            pv_out.emit(j, os.str());
            return (rep.all_pass() && res.axioms.all_pass() && gen.generated) ? 0 : 3;
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.error_class());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
