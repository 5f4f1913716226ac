#pragma once

#include <json.hpp>

#include "forge/hodge.hpp"
#include "forge/quantum.hpp"
#include "forge/unfold.hpp"

namespace forge {

using Json = nlohmann::json;

/// Shared variable context of a document: vars/classes/bounds pinned at the
/// top level and inherited by nested series literals that omit them.
struct VarContext {
    VarSetPtr vars;
    std::vector<int> bounds;
};

VarContext read_var_context(const Json &j);
Json write_var_context(const VarContext &ctx);

RSeries read_series(const Json &j, const VarContext *ctx = nullptr);
Json write_series(const RSeries &s, bool with_vars = true);

RMatrixSeries read_matrix_series(const Json &j, const VarContext &ctx);
Json write_matrix_series(const RMatrixSeries &m);

QMat read_qmat(const Json &j);
Json write_qmat(const QMat &m);
GMat read_gmat(const Json &j);
Json write_gmat(const GMat &m);

FTSData read_fts(const Json &j);
Json write_fts(const FTSData &fts);

ConnectionForm read_omega(const Json &j);
Json write_omega(const ConnectionForm &omega);

UnfoldingProblem read_unfold_problem(const Json &j);

TrTLEPData read_trtlep(const Json &j);
Json write_trtlep(const TrTLEPData &tr);

PairingData read_pairing(const Json &j, const VarContext &ctx);
Json write_pairing(const PairingData &p);

CohModel read_model(const Json &j);
Json write_model(const CohModel &m);

GWTable read_gw_table(const Json &j, const CohModel &model);
Json write_gw_table(const GWTable &t, const CohModel &model);

PotentialSeries read_potential(const Json &j);
Json write_potential(const PotentialSeries &phi, const CohModel &model);

struct PMHSInput {
    BilinearSpace space;
    std::vector<QMat> nlist;
    DecFiltration flim;
};
PMHSInput read_pmhs(const Json &j);
Json write_pmhs_data(const PMHSData &pm);

Json write_inc_filtration(const IncFiltration &f);
Json write_dec_filtration(const DecFiltration &f);
Json write_splitting(const DeligneSplitting &d);

Json write_report(const ConditionReport &rep);
Json write_hypotheses(const HypothesesReport &rep);
Json write_germ(const FrobeniusGerm &germ);

std::string render_report_text(const ConditionReport &rep);

} // namespace forge
