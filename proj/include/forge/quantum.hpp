#pragma once

#include <map>
#include <set>

#include "forge/frobenius.hpp"
#include "forge/matrix_series.hpp"
#include "forge/report.hpp"

namespace forge {

struct CohClass {
    std::string name;
    int degree = 0; // even cohomological degree
    bool is_h2 = false;
};

/// Even cohomology ring of a smooth projective variety, user-supplied:
/// basis with grading, cup structure constants, Poincare pairing, first
/// Chern class over the degree-2 basis, and the pairings of the chosen
/// Mori-cone generators against the degree-2 basis.
struct CohModel {
    int dimX = 0;
    std::vector<CohClass> classes; // T_0 = unit first
    std::vector<std::vector<std::vector<Rational>>> cup; // cup[i][j][k]: T_i u T_j = sum_k cup[i][j][k] T_k
    QMat pairing;
    std::vector<Rational> c1; // aligned with h2_indices()
    int mori_rank = 0;
    std::vector<std::vector<long>> beta_pairing; // [mori generator][h2 index]

    std::size_t size() const { return classes.size(); }
    std::vector<std::size_t> h2_indices() const;
    std::vector<std::size_t> big_indices() const; // degree >= 4 classes
    /// (beta, T_j) for the j-th h2 class.
    long beta_dot(const std::vector<long> &beta, std::size_t h2_pos) const;
    /// integral of c1 over beta.
    Rational c1_dot(const std::vector<long> &beta) const;
    /// integral of T_i u T_j u T_k.
    Rational triple(std::size_t i, std::size_t j, std::size_t k) const;

    void validate() const;
};

/// Normalized table of genus-0 invariants: beta != 0 and all H^0/H^2
/// insertions removed by the fundamental-class and divisor axioms. The
/// insertion vector is aligned with big_indices().
struct GWKey {
    std::vector<long> beta;
    std::vector<long> ins;
    auto operator<=>(const GWKey &) const = default;
};

struct GWTable {
    std::map<GWKey, Rational> entries;
};

struct PotentialBounds {
    std::vector<long> beta_cap; // per Mori generator
    std::vector<int> t_cap;     // per big class
};

/// Gromov-Witten potential split into the classical cubic (kept as the
/// triple-intersection tensor) and the quantum part, a series in the
/// log-class variables q_j (exponents (beta, T_j)) and the big-class
/// coordinates. No t_0 and no naked H^2 coordinates appear in the quantum
/// part; that is the divisor-axiom normal form.
struct PotentialSeries {
    VarSetPtr vars;          // q vars (log, per h2 class) then t vars (hol, per big class)
    std::vector<int> bounds;
    RSeries quantum;
    int dimX = 0;

    std::size_t q_count() const { return vars->indices_of(VarClass::log_).size(); }
};

/// Dimension-axiom admissibility: (1/2) sum deg = dimX + c1.beta + n - 3.
bool admissible(const CohModel &model, const std::vector<long> &beta, const std::vector<int> &degrees);

PotentialSeries potential_assemble(const CohModel &model, const GWTable &gw, const PotentialBounds &bounds);

GWTable extract_invariants(const CohModel &model, const PotentialSeries &phi);

/// Third-derivative tensor contracted with the inverse pairing: product
/// operators prod[i](k,j) = a_{ij}^k over the potential's variables, with
/// H^2 derivatives realized as q log-derivatives.
std::vector<RMatrixSeries> quantum_product(const CohModel &model, const PotentialSeries &phi);

/// Full associator (T_i * T_j) * T_k - T_i * (T_j * T_k); entry (i,j) holds
/// the matrix acting on T_k slots. Zero iff WDVV holds up to bounds.
std::vector<std::vector<RMatrixSeries>> wdvv_associator(const CohModel &model, const PotentialSeries &phi);

ConditionReport wdvv_residual(const CohModel &model, const PotentialSeries &phi);

/// Euler grading: every quantum monomial has E-weight 3 - dimX, and claim
/// (c) for the third derivatives.
ConditionReport euler_check(const CohModel &model, const PotentialSeries &phi);

/// WDVV-based reconstruction: fills every admissible entry within bounds
/// from seed entries, processing unknowns in increasing
/// (c1.beta, #non-W insertions, beta, insertions) order and solving the
/// associativity coefficient equations in which exactly one unknown appears.
GWTable reconstruct(const CohModel &model, const GWTable &seed, const std::set<std::size_t> &W,
                    const PotentialBounds &bounds);

/// Frobenius type structure of the large-radius germ restricted to the
/// W-directions: full cohomology frame, Higgs = -(quantum product), U = E*,
/// V from nabla E, g = pairing, xi = T_0.
FTSData qc_to_fts(const CohModel &model, const PotentialSeries &phi, const std::set<std::size_t> &W);

} // namespace forge
