#pragma once

#include "forge/connection.hpp"
#include "forge/frobenius.hpp"

namespace forge {

/// Unfolding problem: a flat base form, names for the new parameters, the
/// prescribed first-column data df[a][i] = d f_i / d y_a (series over the
/// extended variable set, z-free), and a target order per parameter.
struct UnfoldingProblem {
    ConnectionForm base;
    std::vector<std::string> names;           // unfolding variable names
    std::vector<std::vector<RSeries>> dfs;    // per variable: n-vector
    std::vector<int> order;                   // per variable

    /// Extended variable set: base variables, then the unfolding variables,
    /// with z kept last. Unfolding bounds are order+1 (an order-K induction
    /// determines the connection matrices through y^{K+1}).
    VarSetPtr extended_vars() const;
    std::vector<int> extended_bounds() const;
};

/// Pairing matrix in z^w-normalized form: rnorm = z^{-w} R where R is the
/// Gram matrix of P in the adapted frame; symmetry reads rnorm(z)^T =
/// rnorm(-z) and z^w-membership is "no negative z-powers", which the
/// integration step verifies order by order.
struct PairingData {
    RMatrixSeries rnorm;
    int w = 0;
    ConditionReport checks; // Punfold1-3 residuals and membership notes

    void validate_against(const ConnectionForm &omega) const;
};

/// Order-by-order construction of the unique unfolding with
/// (F_a)_{i1} = d f_i / d y_a. Requires a flat base whose constant-term
/// algebra generated by the Higgs components and U reaches the whole fiber
/// from the first basis vector (the generation condition at the origin).
ConnectionForm solve_unfolding(const UnfoldingProblem &p);

/// Extends the pairing along the unfolding variables by integrating
/// dR/dy = (1/z)(F^T R - R F(-z)) and re-verifying the z-, t_i- and t_k-
/// direction equations together with z^w-membership at each order.
PairingData extend_pairing(const ConnectionForm &omega, const PairingData &r0);

struct UniversalUnfoldResult {
    FrobeniusGerm germ;
    FTSData extended_fts;
    ConnectionForm omega;
    PairingData pairing;
    ConditionReport axioms;
    std::vector<std::string> new_vars;
};

/// End-to-end pipeline of the unfolding theorem: correspondence to a
/// trTLEP-structure, greedy completion of the Higgs span by unfolding
/// parameters, solve_unfolding, pairing extension, back to a Frobenius type
/// structure, isomorphism-case germ, and the axiom checks.
UniversalUnfoldResult universal_unfold(const FTSData &fts, int order, int zbound = 2);

} // namespace forge
