#pragma once

#include "forge/matrix_series.hpp"
#include "forge/report.hpp"

namespace forge {

/// Components of the connection matrix
///   Omega = sum A_i dt_i/t_i + (1/z) sum C_i dt_i/t_i + (1/z) sum C_k dt_k
///         + (1/z) sum F_a dy_a + (1/z^2 U + 1/z V) dz
/// in an adapted frame. All component matrices are z-free; the variable set
/// carries z for the pairing computations living on the same bundle.
struct ConnectionForm {
    std::size_t rank = 0;
    VarSetPtr vars;            // log vars, hol vars, unfolding vars, z
    std::vector<int> bounds;   // nominal bounds (components may carry tighter derived bounds)
    std::vector<RMatrixSeries> alog; // per log var
    std::vector<RMatrixSeries> clog; // per log var
    std::vector<RMatrixSeries> chol; // per hol var
    std::vector<RMatrixSeries> funf; // per unfolding var
    RMatrixSeries umat, vmat;

    std::vector<std::size_t> log_vars() const { return vars->indices_of(VarClass::log_); }
    std::vector<std::size_t> hol_vars() const { return vars->indices_of(VarClass::hol); }
    std::vector<std::size_t> unfold_vars() const { return vars->indices_of(VarClass::unfold); }

    /// Structural invariants: component counts match the variable classes,
    /// dimensions agree, no component involves z.
    void validate() const;

    /// Higgs component (the 1/z matrix) of a base or unfolding direction,
    /// indexed by variable position.
    const RMatrixSeries &higgs_of(std::size_t var_index) const;

    /// Restriction to the sub-variable-set with all unfolding vars set to 0
    /// and dropped.
    ConnectionForm restrict_to_base() const;
};

/// Residuals of the flatness condition d Omega + Omega ^ Omega = 0, one
/// entry per equation family; all must vanish identically for a flat form.
ConditionReport flatness_residuals(const ConnectionForm &omega);

} // namespace forge
