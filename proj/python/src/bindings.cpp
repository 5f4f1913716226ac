#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "forge/json_io.hpp"

namespace py = pybind11;
using namespace forge;

namespace {

Json parse(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const std::exception &e) {
        throw ParseError(e.what());
    }
}

std::set<std::size_t> w_set(const CohModel &model, const std::vector<std::string> &names) {
    std::set<std::size_t> W;
    for (auto j : model.h2_indices()) W.insert(j);
    for (const auto &nm : names) {
        bool found = false;
        for (std::size_t i = 0; i < model.size(); ++i)
            if (model.classes[i].name == nm) {
                W.insert(i);
                found = true;
            }
        if (!found) throw ParseError("unknown class '" + nm + "' in W");
    }
    return W;
}

PotentialBounds bounds_of(const CohModel &model, const std::vector<long> &beta_cap, const std::vector<int> &t_cap) {
    PotentialBounds b;
    b.beta_cap = beta_cap;
    if (!t_cap.empty()) {
        b.t_cap = t_cap;
        return b;
    }
    Rational cmax = model.c1_dot(beta_cap);
    long nmax = model.dimX - 3 + (cmax.is_integer() ? cmax.to_long() : 0);
    if (nmax < 0) nmax = 0;
    b.t_cap.assign(model.big_indices().size(), static_cast<int>(nmax + 3));
    return b;
}

PMHSData pmhs_of(const std::string &text) {
    auto in = read_pmhs(parse(text));
    return build_pmhs(in.space, in.nlist, in.flim);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "forge: logarithmic Frobenius structures, quantum cohomology reconstruction, Hodge asymptotics";

    py::register_exception<forge::Error>(m, "ForgeError");

    m.def("validate_fts", [](const std::string &s) { read_fts(parse(s)); });
    m.def("validate_model", [](const std::string &s) { read_model(parse(s)); });

    m.def("check_fts", [](const std::string &s) {
        auto fts = read_fts(parse(s));
        Json j{{"conditions", write_report(check_fts(fts))}, {"hypotheses", write_hypotheses(check_hypotheses(fts))}};
        return j.dump();
    });

    m.def("fts_to_trtlep", [](const std::string &s, int zbound) {
        return write_trtlep(fts_to_trtlep(read_fts(parse(s)), zbound)).dump();
    }, py::arg("fts"), py::arg("zbound") = 2);

    m.def("flatness", [](const std::string &s) {
        return write_report(flatness_residuals(read_omega(parse(s)))).dump();
    });

    m.def("unfold", [](const std::string &s) {
        return write_omega(solve_unfolding(read_unfold_problem(parse(s)))).dump();
    });

    m.def("universal_unfold", [](const std::string &s, int order, int zbound) {
        auto res = universal_unfold(read_fts(parse(s)), order, zbound);
        Json j{{"germ", write_germ(res.germ)},
               {"fts", write_fts(res.extended_fts)},
               {"axioms", write_report(res.axioms)},
               {"new_vars", res.new_vars}};
        return j.dump();
    }, py::arg("fts"), py::arg("order") = 4, py::arg("zbound") = 2);

    m.def("qc_potential", [](const std::string &model_s, const std::string &gw_s, const std::vector<long> &beta_cap,
                             const std::vector<int> &t_cap) {
        auto model = read_model(parse(model_s));
        auto gw = read_gw_table(parse(gw_s), model);
        auto phi = potential_assemble(model, gw, bounds_of(model, beta_cap, t_cap));
        return write_potential(phi, model).dump();
    }, py::arg("model"), py::arg("gw"), py::arg("beta_cap"), py::arg("t_cap") = std::vector<int>{});

    m.def("qc_wdvv", [](const std::string &model_s, const std::string &phi_s) {
        auto model = read_model(parse(model_s));
        return write_report(wdvv_residual(model, read_potential(parse(phi_s)))).dump();
    });

    m.def("qc_euler", [](const std::string &model_s, const std::string &phi_s) {
        auto model = read_model(parse(model_s));
        return write_report(euler_check(model, read_potential(parse(phi_s)))).dump();
    });

    m.def("qc_reconstruct", [](const std::string &model_s, const std::string &seed_s,
                               const std::vector<long> &beta_cap, const std::vector<std::string> &w_names,
                               const std::vector<int> &t_cap) {
        auto model = read_model(parse(model_s));
        auto seed = read_gw_table(parse(seed_s), model);
        auto table = reconstruct(model, seed, w_set(model, w_names), bounds_of(model, beta_cap, t_cap));
        return write_gw_table(table, model).dump();
    }, py::arg("model"), py::arg("seed"), py::arg("beta_cap"), py::arg("w") = std::vector<std::string>{},
       py::arg("t_cap") = std::vector<int>{});

    m.def("qc_to_fts", [](const std::string &model_s, const std::string &phi_s, const std::vector<std::string> &w) {
        auto model = read_model(parse(model_s));
        auto fts = qc_to_fts(model, read_potential(parse(phi_s)), w_set(model, w));
        return write_fts(fts).dump();
    }, py::arg("model"), py::arg("potential"), py::arg("w") = std::vector<std::string>{});

    m.def("hodge_weight", [](const std::string &s) {
        auto pm = pmhs_of(s);
        return write_inc_filtration(pm.weight).dump();
    });

    m.def("hodge_ipq", [](const std::string &s) { return write_splitting(pmhs_of(s).deligne).dump(); });

    m.def("hodge_opposite", [](const std::string &s) {
        auto pm = pmhs_of(s);
        return write_inc_filtration(opposite_filtration(pm)).dump();
    });

    m.def("hodge_pmhs", [](const std::string &s) { return write_report(check_polarization(pmhs_of(s))).dump(); });

    m.def("hodge_cone", [](const std::string &s, const std::vector<std::vector<long>> &samples) {
        auto in = read_pmhs(parse(s));
        std::vector<std::vector<Rational>> lam;
        for (const auto &v : samples) {
            std::vector<Rational> row;
            for (long x : v) row.push_back(Rational(x));
            lam.push_back(row);
        }
        return cone_agreement(in.nlist, in.space.w, lam);
    });

    m.def("hodge_to_fts", [](const std::string &s, int order) {
        auto pm = pmhs_of(s);
        SplitConnectionOptions opt;
        for (std::size_t j = 0; j < pm.nlist.size(); ++j) opt.qnames.push_back("q" + std::to_string(j + 1));
        opt.bounds.assign(opt.qnames.size(), order);
        return write_fts(split_connection(pm, opt)).dump();
    }, py::arg("pmhs"), py::arg("order") = 4);

    m.def("vphs_to_frobenius", [](const std::string &s, int order) {
        auto pm = pmhs_of(s);
        SplitConnectionOptions opt;
        for (std::size_t j = 0; j < pm.nlist.size(); ++j) opt.qnames.push_back("q" + std::to_string(j + 1));
        opt.bounds.assign(opt.qnames.size(), order);
        auto fts = split_connection(pm, opt);
        auto gen = h2_generation(pm.flim, pm.nlist, pm.space.dim);
        auto res = universal_unfold(fts, order, 2);
        Json j{{"fts", write_fts(fts)},
               {"fts_conditions", write_report(check_fts(fts))},
               {"h2_generated", gen.generated},
               {"rank_hypothesis", gen.rank_hypothesis},
               {"germ", write_germ(res.germ)},
               {"axioms", write_report(res.axioms)}};
        return j.dump();
    }, py::arg("pmhs"), py::arg("order") = 4);
}
