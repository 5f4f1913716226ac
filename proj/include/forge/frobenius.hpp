#pragma once

#include "forge/connection.hpp"
#include "forge/matrix_series.hpp"
#include "forge/report.hpp"

namespace forge {

/// Logarithmic Frobenius type structure in a fixed frame: the connection
/// matrices of nabla^r per base direction (dt_i/t_i coefficient for log
/// variables, dt_k coefficient for holomorphic ones), the Higgs components C
/// in the same split, the endomorphisms U and V, the Gram matrix of g, the
/// distinguished section xi and the eigenvector datum d with V xi = (d/2) xi.
struct FTSData {
    std::size_t rank = 0;
    VarSetPtr vars;           // log + hol base variables, no z, no unfolding
    std::vector<int> bounds;
    std::vector<RMatrixSeries> rconn; // per base variable, in declaration order
    std::vector<RMatrixSeries> higgs; // per base variable
    RMatrixSeries umat, vmat, gmat;
    std::vector<RSeries> xi;
    int w = 0;
    Rational d;

    std::size_t base_dim() const { return vars ? vars->size() : 0; }
    void validate() const;
};

/// (logD-trTLEP(w))-structure over the same base with the twistor variable
/// z adjoined. The pairing is stored z^w-normalized: pnorm = z^{-w} P, a
/// series regular at z = 0 with invertible reduction; the symmetry law reads
/// pnorm(z)^T = pnorm(-z). xi and d ride along so the correspondence with
/// FTSData inverts on the nose.
struct TrTLEPData {
    std::size_t rank = 0;
    ConnectionForm omega;
    RMatrixSeries pnorm;
    int w = 0;
    std::vector<RSeries> xi;
    Rational d;

    void validate() const;
};

/// Frobenius manifold germ in a logarithmic frame: multiplication operators
/// mult[a] of the frame fields (X_a o X_b = sum_k mult[a](k,b) X_k), unit and
/// Euler field components over the frame, metric Gram matrix, and d.
struct FrobeniusGerm {
    std::size_t dim = 0;
    VarSetPtr vars;
    std::vector<int> bounds;
    std::vector<RMatrixSeries> mult;
    std::vector<RSeries> unit;
    std::vector<RSeries> euler;
    RMatrixSeries metric;
    Rational d;

    /// Structure constant a_{ab}^k of X_a o X_b.
    const RSeries &structure_constant(std::size_t a, std::size_t b, std::size_t k) const {
        return mult.at(a)(k, b);
    }
};

struct HypothesesReport {
    bool ic = false;
    bool gc = false;
    bool ec = false;
    bool xi_flat = false;
    Rational d;
    std::size_t gc_rank = 0; // dimension actually generated
};

/// Residual checks for the definition of a Frobenius type structure:
/// flatness of nabla^r, commuting Higgs, potentiality of C, the U-equation,
/// flatness of V and g, and the three g-compatibilities.
ConditionReport check_fts(const FTSData &fts);

/// (IC)/(GC)/(EC) of the unfolding theorem, plus flatness of xi.
HypothesesReport check_hypotheses(const FTSData &fts);

/// One direction of the 1-1 correspondence: nabla = nabla^r + C/z +
/// (U/z - V + w/2) dz/z and P = z^w g. Requires check_fts to pass and the
/// holomorphic rconn components to vanish (adapted-frame convention).
TrTLEPData fts_to_trtlep(const FTSData &fts, int zbound = 2);

/// Reverse direction: K = H|_{z=0}, C = [z nabla], U = [z nabla_{z d/dz}],
/// V = -(V-part) + (w/2) id, g = (z^{-w} P)|_{z=0}.
FTSData trtlep_to_fts(const TrTLEPData &tr);

/// The isomorphism case: v(X) = -C_X xi must be a frame isomorphism at 0;
/// the germ is pulled back through v. Throws NotIsomorphismCase otherwise.
FrobeniusGerm isocase_build(const FTSData &fts);

/// Frobenius manifold axioms as residuals, checked up to the germ's bounds:
/// commutativity, associativity, multiplication invariance of the metric,
/// flatness of the Levi-Civita connection in the logarithmic frame, flat
/// unit, potentiality, the two Euler rescalings, and logarithmic vector
/// field sanity for e and E.
ConditionReport check_frobenius_axioms(const FrobeniusGerm &germ);

/// Conjugates an FTSData by a constant invertible frame change T (new frame
/// vectors are the columns of T expressed in the old frame).
FTSData conjugate_frame(const FTSData &fts, const QMat &T);

} // namespace forge
