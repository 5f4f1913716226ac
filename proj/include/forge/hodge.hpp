#pragma once

#include <map>
#include <optional>

#include "forge/frobenius.hpp"
#include "forge/linalg.hpp"
#include "forge/report.hpp"

namespace forge {

/// (H, S, w): rational bilinear space with S nondegenerate and
/// (-1)^w-symmetric. The real structure is the rational span of the standard
/// basis; conjugation acts entrywise on Gaussian-rational coordinates.
struct BilinearSpace {
    std::size_t dim = 0;
    QMat S;
    int w = 0;

    void validate() const;
};

/// Decreasing filtration F^p given by spanning-column matrices; between
/// declared steps the filtration is constant, above the largest declared p
/// it is zero and below the smallest it is everything.
struct DecFiltration {
    std::map<int, GMat> steps;

    GSpace at(int p, std::size_t ambient) const;
    int min_step() const;
    int max_step() const;
    void validate(std::size_t ambient) const;
};

/// Increasing filtration W_l (or U_p): below the smallest declared step it
/// is zero, above the largest it is everything.
struct IncFiltration {
    std::map<int, GMat> steps;

    GSpace at(int l, std::size_t ambient) const;
    int min_step() const;
    int max_step() const;
    void validate(std::size_t ambient) const;
};

struct DeligneSplitting {
    std::map<std::pair<int, int>, GMat> ipq;
    std::map<std::pair<int, int>, GMat> ipq0; // primitive parts, when N supplied

    GSpace piece(int p, int q, std::size_t ambient) const;
};

struct PMHSData {
    BilinearSpace space;
    std::vector<QMat> nlist;
    DecFiltration flim;
    IncFiltration weight;     // monodromy weight filtration of the cone
    DeligneSplitting deligne; // filled by build_pmhs

    void validate() const;
};

/// The unique increasing filtration with N(W_l) in W_{l-2} and
/// N^l: Gr_{w+l} -> Gr_{w-l} isomorphisms, by the recursive kernel/image
/// construction; the defining properties are re-verified on the result.
IncFiltration weight_filtration(const QMat &N, int w);

/// Assembles a PMHSData: W from the sum of the N_j, mixed-Hodge-structure
/// check, Deligne splitting and primitive parts. Validates commutation and
/// infinitesimal-isometry requirements. Polarization is checked separately.
PMHSData build_pmhs(const BilinearSpace &space, const std::vector<QMat> &nlist, const DecFiltration &flim);

/// Deligne's I^{p,q} for a filtration pair, with the six splitting
/// identities verified; throws NotMHS when the graded pieces are not Hodge
/// structures.
DeligneSplitting deligne_splitting(const DecFiltration &F, const IncFiltration &W, std::size_t ambient,
                                   const BilinearSpace *space = nullptr, const std::vector<QMat> *nlist = nullptr);

/// Polarization conditions: N(F^p) in F^{p-1}, S(F^p, F^{w+1-p}) = 0,
/// S(W_l, W_l') = 0 for l + l' < w, primitive decomposition with
/// S_l-orthogonality, and positivity of i^{p-q} S_l on the primitive
/// (p,q)-pieces (exact, via Hermitian leading minors).
ConditionReport check_polarization(const PMHSData &pm);

/// U_p = sum of I^{i,q} over i <= p; checks K = F^p + U_{p-1} (direct) and
/// N_j(U_p) in U_{p-1}.
IncFiltration opposite_filtration(const PMHSData &pm);

/// True iff all positive combinations of the N_j in the sample list yield
/// the same weight filtration.
bool cone_agreement(const std::vector<QMat> &nlist, int w, const std::vector<std::vector<Rational>> &samples);

struct H2GenReport {
    bool generated = false;
    bool rank_hypothesis = false; // dim F^w = 1 and dim F^{w-1} = 1 + #N
};

/// Generation of the graded pieces by F^w under iterated N_i.
H2GenReport h2_generation(const DecFiltration &flim, const std::vector<QMat> &nlist, std::size_t ambient);

/// Splits the twisted-frame connection nabla = d - sum N_j dq_j/q_j in a
/// frame adapted to F^p cap U_p: block-diagonal part nabla^r (residues must
/// vanish), block-subdiagonal part the Higgs field, U = 0, V semisimple with
/// eigenvalues p - w/2, and g read off S blockwise. The canonical
/// nilpotent-orbit family (constant F_lim in the twisted frame) is used
/// unless an explicit series family is supplied.
struct SplitConnectionOptions {
    std::vector<std::string> qnames; // one log variable per N_j
    std::vector<int> bounds;         // per q variable
    // optional explicit family: step p -> basis columns over series
    std::optional<std::map<int, std::vector<std::vector<GSeries>>>> family;
};

FTSData split_connection(const PMHSData &pm, const SplitConnectionOptions &opt);

} // namespace forge
