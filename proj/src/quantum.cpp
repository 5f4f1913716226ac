#include "forge/quantum.hpp"

#include <algorithm>
#include <tuple>

namespace forge {

std::vector<std::size_t> CohModel::h2_indices() const {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].is_h2) v.push_back(i);
    return v;
}

std::vector<std::size_t> CohModel::big_indices() const {
    std::vector<std::size_t> v;
    for (std::size_t i = 1; i < classes.size(); ++i)
        if (!classes[i].is_h2) v.push_back(i);
    return v;
}

long CohModel::beta_dot(const std::vector<long> &beta, std::size_t h2_pos) const {
    long acc = 0;
    for (std::size_t s = 0; s < beta.size(); ++s) acc += beta[s] * beta_pairing[s][h2_pos];
    return acc;
}

Rational CohModel::c1_dot(const std::vector<long> &beta) const {
    Rational acc;
    auto h2 = h2_indices();
    for (std::size_t j = 0; j < h2.size(); ++j) acc += c1[j] * Rational(beta_dot(beta, j));
    return acc;
}

Rational CohModel::triple(std::size_t i, std::size_t j, std::size_t k) const {
    Rational acc;
    for (std::size_t l = 0; l < size(); ++l) acc += cup[i][j][l] * pairing(l, k);
    return acc;
}

void CohModel::validate() const {
    std::size_t m = size();
    if (m == 0) throw StructuralError("empty cohomology model");
    if (classes[0].degree != 0 || classes[0].is_h2) throw StructuralError("T_0 must be the degree-0 unit class");
    for (const auto &c : classes) {
        if (c.degree % 2 != 0 || c.degree < 0 || c.degree > 2 * dimX)
            throw StructuralError("class '" + c.name + "' has bad degree");
        if (c.is_h2 != (c.degree == 2)) throw StructuralError("h2 flag inconsistent with degree for '" + c.name + "'");
    }
    if (cup.size() != m) throw StructuralError("cup tensor has wrong size");
    for (const auto &row : cup) {
        if (row.size() != m) throw StructuralError("cup tensor has wrong size");
        for (const auto &e : row)
            if (e.size() != m) throw StructuralError("cup tensor has wrong size");
    }
    if (pairing.rows() != m || pairing.cols() != m) throw StructuralError("pairing has wrong size");
    // unit
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            if (cup[0][j][k] != Rational(j == k ? 1 : 0))
                throw StructuralError("T_0 is not the cup unit");
    // degree-complementary nondegenerate pairing
    if (!pairing.inverse()) throw StructuralError("pairing is degenerate");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (!pairing(i, j).is_zero() && classes[i].degree + classes[j].degree != 2 * dimX)
                throw StructuralError("pairing entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") violates degree complementarity");
            if (pairing(i, j) != pairing(j, i)) throw StructuralError("pairing is not symmetric");
        }
    // graded cup: commutative, associative, degree-additive
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                if (cup[i][j][k] != cup[j][i][k]) throw StructuralError("cup is not commutative");
                if (!cup[i][j][k].is_zero() && classes[k].degree != classes[i].degree + classes[j].degree)
                    throw StructuralError("cup is not degree-additive");
            }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    Rational lhs, rhs;
                    for (std::size_t s = 0; s < m; ++s) {
                        lhs += cup[i][j][s] * cup[s][k][l];
                        rhs += cup[j][k][s] * cup[i][s][l];
                    }
                    if (lhs != rhs) throw StructuralError("cup is not associative");
                }
    auto h2 = h2_indices();
    if (c1.size() != h2.size()) throw StructuralError("c1 has wrong length");
    if (beta_pairing.size() != static_cast<std::size_t>(mori_rank))
        throw StructuralError("beta_pairing has wrong number of rows");
    QMat bp(mori_rank, h2.size());
    for (int s = 0; s < mori_rank; ++s) {
        if (beta_pairing[s].size() != h2.size()) throw StructuralError("beta_pairing has wrong row length");
        for (std::size_t j = 0; j < h2.size(); ++j) {
            if (beta_pairing[s][j] < 0)
                throw StructuralError("beta_pairing must be nonnegative (effectivity)");
            bp(s, j) = Rational(beta_pairing[s][j]);
        }
    }
    if (bp.rank() != static_cast<std::size_t>(mori_rank))
        throw StructuralError("beta_pairing rows must be linearly independent (q-exponents must determine beta)");
}

bool admissible(const CohModel &model, const std::vector<long> &beta, const std::vector<int> &degrees) {
    Rational lhs;
    for (int d : degrees) lhs += Rational(d, 2);
    Rational rhs = Rational(model.dimX) + model.c1_dot(beta) + Rational(static_cast<long>(degrees.size())) - Rational(3);
    return lhs == rhs;
}

namespace {

struct QVars {
    VarSetPtr vars;
    std::vector<int> bounds;
    std::vector<std::size_t> qpos; // variable index per h2 class position
    std::vector<std::size_t> tpos; // variable index per big class position
};

QVars potential_vars(const CohModel &model, const PotentialBounds &b) {
    auto h2 = model.h2_indices();
    auto big = model.big_indices();
    if (b.beta_cap.size() != static_cast<std::size_t>(model.mori_rank))
        throw StructuralError("beta_cap has wrong length");
    if (b.t_cap.size() != big.size()) throw StructuralError("t_cap has wrong length");
    std::vector<std::string> names;
    std::vector<VarClass> classes;
    std::vector<int> bounds;
    for (std::size_t j = 0; j < h2.size(); ++j) {
        names.push_back("q_" + model.classes[h2[j]].name);
        classes.push_back(VarClass::log_);
        bounds.push_back(static_cast<int>(model.beta_dot(b.beta_cap, j)));
    }
    for (std::size_t a = 0; a < big.size(); ++a) {
        names.push_back("t_" + model.classes[big[a]].name);
        classes.push_back(VarClass::hol);
        bounds.push_back(b.t_cap[a]);
    }
    QVars out;
    out.vars = make_vars(names, classes);
    out.bounds = bounds;
    for (std::size_t j = 0; j < h2.size(); ++j) out.qpos.push_back(j);
    for (std::size_t a = 0; a < big.size(); ++a) out.tpos.push_back(h2.size() + a);
    return out;
}

bool within_caps(const PotentialBounds &b, const GWKey &key) {
    for (std::size_t s = 0; s < key.beta.size(); ++s)
        if (key.beta[s] > b.beta_cap[s]) return false;
    for (std::size_t a = 0; a < key.ins.size(); ++a)
        if (key.ins[a] > b.t_cap[a]) return false;
    return true;
}

std::vector<int> key_degrees(const CohModel &model, const GWKey &key, int extra_h2) {
    auto big = model.big_indices();
    std::vector<int> degs;
    for (std::size_t a = 0; a < big.size(); ++a)
        for (long c = 0; c < key.ins[a]; ++c) degs.push_back(model.classes[big[a]].degree);
    for (int c = 0; c < extra_h2; ++c) degs.push_back(2);
    return degs;
}

} // namespace

PotentialSeries potential_assemble(const CohModel &model, const GWTable &gw, const PotentialBounds &b) {
    model.validate();
    auto qv = potential_vars(model, b);
    auto big = model.big_indices();

    std::string rejected;
    for (const auto &[key, value] : gw.entries) {
        if (key.beta.size() != static_cast<std::size_t>(model.mori_rank) || key.ins.size() != big.size())
            throw StructuralError("gw key has wrong arity");
        bool zero_beta = true;
        for (long x : key.beta) {
            if (x < 0) throw StructuralError("negative beta coordinate");
            if (x != 0) zero_beta = false;
        }
        if (zero_beta) throw StructuralError("beta = 0 entries belong to the classical part");
        // the divisor axiom leaves the invariant with its H^2 insertions
        // eliminated; admissibility is checked for the bare entry
        if (!admissible(model, key.beta, key_degrees(model, key, 0)))
            rejected += (rejected.empty() ? "" : ", ") + std::to_string(key.beta[0]);
    }
    if (!rejected.empty()) throw RejectedInput("inadmissible gw entries at beta = " + rejected);

    PotentialSeries phi;
    phi.vars = qv.vars;
    phi.bounds = qv.bounds;
    phi.dimX = model.dimX;
    phi.quantum = RSeries(qv.vars, qv.bounds);
    for (const auto &[key, value] : gw.entries) {
        if (!within_caps(b, key)) continue;
        Mono e(qv.vars->size(), 0);
        auto h2 = model.h2_indices();
        for (std::size_t j = 0; j < h2.size(); ++j) e[qv.qpos[j]] = static_cast<int>(model.beta_dot(key.beta, j));
        Rational denom(1);
        for (std::size_t a = 0; a < big.size(); ++a) {
            e[qv.tpos[a]] = static_cast<int>(key.ins[a]);
            denom *= factorial(key.ins[a]);
        }
        phi.quantum.add_term(e, value / denom);
    }
    return phi;
}

GWTable extract_invariants(const CohModel &model, const PotentialSeries &phi) {
    model.validate();
    auto h2 = model.h2_indices();
    auto big = model.big_indices();
    QMat bp(h2.size(), model.mori_rank);
    for (int s = 0; s < model.mori_rank; ++s)
        for (std::size_t j = 0; j < h2.size(); ++j) bp(j, s) = Rational(model.beta_pairing[s][j]);

    GWTable out;
    for (const auto &[e, c] : phi.quantum.terms()) {
        std::vector<Rational> rhs(h2.size());
        bool qfree = true;
        for (std::size_t j = 0; j < h2.size(); ++j) {
            rhs[j] = Rational(e[j]);
            if (e[j] != 0) qfree = false;
        }
        if (qfree) throw RejectedInput("potential is not in divisor normal form: q-free quantum monomial");
        auto sol = bp.solve(rhs);
        if (!sol) throw RejectedInput("quantum monomial q-exponents do not match any effective beta");
        GWKey key;
        key.beta.resize(model.mori_rank);
        for (int s = 0; s < model.mori_rank; ++s) {
            if (!(*sol)[s].is_integer() || (*sol)[s].sign() < 0)
                throw RejectedInput("quantum monomial q-exponents do not match any effective beta");
            key.beta[s] = (*sol)[s].to_long();
        }
        key.ins.resize(big.size());
        Rational fact(1);
        for (std::size_t a = 0; a < big.size(); ++a) {
            key.ins[a] = e[h2.size() + a];
            fact *= factorial(key.ins[a]);
        }
        out.entries[key] += c * fact;
    }
    for (auto it = out.entries.begin(); it != out.entries.end();)
        it = it->second.is_zero() ? out.entries.erase(it) : std::next(it);
    return out;
}

namespace {

// Direction derivative on the potential's variables for a model class:
// nothing for the unit, q log-derivative for H^2, t-derivative for the rest.
RSeries class_derivative(const CohModel &model, const RSeries &s, std::size_t cls) {
    auto h2 = model.h2_indices();
    auto big = model.big_indices();
    if (cls == 0) return RSeries(s.vars(), s.bounds()); // t_0 only enters the classical cubic
    for (std::size_t j = 0; j < h2.size(); ++j)
        if (h2[j] == cls) return s.log_derivative(j);
    for (std::size_t a = 0; a < big.size(); ++a)
        if (big[a] == cls) return s.partial_derivative(h2.size() + a);
    throw StructuralError("unknown class index");
}

std::vector<int> product_bounds(const CohModel &model, const PotentialSeries &phi) {
    // three derivatives in the big-class directions
    std::vector<int> wb = phi.bounds;
    auto h2 = model.h2_indices();
    for (std::size_t a = h2.size(); a < wb.size(); ++a) wb[a] = std::max(0, wb[a] - 3);
    return wb;
}

} // namespace

std::vector<RMatrixSeries> quantum_product(const CohModel &model, const PotentialSeries &phi) {
    model.validate();
    std::size_t m = model.size();
    auto wb = product_bounds(model, phi);
    auto ginv_c = model.pairing.inverse();
    QMat ginv = *ginv_c;

    // third derivatives, restricted to the common working bounds
    std::vector<std::vector<std::vector<RSeries>>> d3(
        m, std::vector<std::vector<RSeries>>(m, std::vector<RSeries>(m, RSeries(phi.vars, wb))));
    for (std::size_t i = 0; i < m; ++i) {
        RSeries di = class_derivative(model, phi.quantum, i);
        for (std::size_t j = i; j < m; ++j) {
            RSeries dij = class_derivative(model, di, j);
            for (std::size_t k = j; k < m; ++k) {
                RSeries dijk = common_restrict(class_derivative(model, dij, k), wb);
                dijk += TruncatedSeries<Rational>::constant(phi.vars, wb, model.triple(i, j, k));
                d3[i][j][k] = d3[i][k][j] = d3[j][i][k] = d3[j][k][i] = d3[k][i][j] = d3[k][j][i] = dijk;
            }
        }
    }

    std::vector<RMatrixSeries> prod(m, RMatrixSeries(m, m, phi.vars, wb));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                RSeries acc(phi.vars, wb);
                for (std::size_t l = 0; l < m; ++l)
                    if (!ginv(l, k).is_zero()) acc += d3[i][j][l].scaled(ginv(l, k));
                prod[i](k, j) = acc;
            }
    return prod;
}

std::vector<std::vector<RMatrixSeries>> wdvv_associator(const CohModel &model, const PotentialSeries &phi) {
    auto prod = quantum_product(model, phi);
    std::size_t m = model.size();
    std::vector<std::vector<RMatrixSeries>> assoc(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            RMatrixSeries lhs(m, m, prod[0].vars(), prod[0].bounds());
            for (std::size_t s = 0; s < m; ++s) lhs += prod[s].scaled(prod[i](s, j));
            assoc[i].push_back(lhs - prod[i] * prod[j]);
        }
    }
    return assoc;
}

ConditionReport wdvv_residual(const CohModel &model, const PotentialSeries &phi) {
    auto assoc = wdvv_associator(model, phi);
    ConditionReport rep;
    bool pass = true;
    std::size_t terms = 0;
    for (const auto &row : assoc)
        for (const auto &mtx : row)
            if (!mtx.is_zero()) {
                pass = false;
                terms += mtx.nonzero_terms();
            }
    rep.add("wdvv", pass, terms);
    return rep;
}

ConditionReport euler_check(const CohModel &model, const PotentialSeries &phi) {
    model.validate();
    ConditionReport rep;
    auto h2 = model.h2_indices();
    auto big = model.big_indices();
    std::vector<Rational> weight(phi.vars->size());
    for (std::size_t j = 0; j < h2.size(); ++j) weight[j] = model.c1[j];
    for (std::size_t a = 0; a < big.size(); ++a)
        weight[h2.size() + a] = Rational(1) - Rational(model.classes[big[a]].degree, 2);
    Rational target = Rational(3 - model.dimX);

    {
        bool pass = true;
        std::size_t badn = 0;
        for (const auto &[e, c] : phi.quantum.terms()) {
            (void)c;
            Rational wsum;
            for (std::size_t v = 0; v < e.size(); ++v) wsum += weight[v] * Rational(e[v]);
            if (wsum != target) {
                pass = false;
                ++badn;
            }
        }
        rep.add("euler_potential", pass, badn);
    }
    {
        // claim (c): E Phi_ijk = ((3 - dimX) - (3 - (deg_i+deg_j+deg_k)/2)) Phi_ijk
        bool pass = true;
        std::size_t badn = 0;
        std::size_t m = model.size();
        auto wb = product_bounds(model, phi);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j)
                for (std::size_t k = j; k < m; ++k) {
                    RSeries dijk = common_restrict(
                        class_derivative(model,
                                         class_derivative(model, class_derivative(model, phi.quantum, i), j), k),
                        wb);
                    dijk += TruncatedSeries<Rational>::constant(phi.vars, wb, model.triple(i, j, k));
                    Rational degsum = Rational(model.classes[i].degree + model.classes[j].degree +
                                               model.classes[k].degree, 2);
                    Rational expected = target - (Rational(3) - degsum);
                    for (const auto &[e, c] : dijk.terms()) {
                        (void)c;
                        Rational wsum;
                        for (std::size_t v = 0; v < e.size(); ++v) wsum += weight[v] * Rational(e[v]);
                        if (wsum != expected) {
                            pass = false;
                            ++badn;
                        }
                    }
                }
        rep.add("euler_third_derivatives", pass, badn);
    }
    return rep;
}

namespace {

// Structural coefficient of a third-derivative series: the monomial
// (beta, J) of Phi_{abc} is factor * <I(beta, J + bigs(a,b,c))> / J!, with
// the divisor axiom turning H^2 slots into (beta, T) factors and the
// fundamental-class axiom killing unit slots.
struct Phi3Term {
    Rational coeff;       // includes 1/J!
    bool has_key = false; // false: pure constant (classical or zero)
    GWKey key;
    bool out_of_box = false;
};

struct ReconstructCtx {
    const CohModel &model;
    const PotentialBounds &bounds;
    std::vector<std::size_t> h2, big;
    QMat ginv;

    Phi3Term phi3(std::size_t a, std::size_t b, std::size_t c, const std::vector<long> &beta,
                  const std::vector<long> &J) const {
        Phi3Term t;
        bool zero_beta = std::all_of(beta.begin(), beta.end(), [](long x) { return x == 0; });
        if (zero_beta) {
            bool zero_j = std::all_of(J.begin(), J.end(), [](long x) { return x == 0; });
            t.coeff = zero_j ? model.triple(a, b, c) : Rational(0);
            return t;
        }
        Rational factor(1);
        GWKey key;
        key.beta = beta;
        key.ins.assign(big.size(), 0);
        for (std::size_t i = 0; i < big.size(); ++i) key.ins[i] = J[i];
        for (std::size_t x : {a, b, c}) {
            if (x == 0) {
                t.coeff = Rational(0);
                return t;
            }
            bool matched = false;
            for (std::size_t j = 0; j < h2.size(); ++j)
                if (h2[j] == x) {
                    factor *= Rational(model.beta_dot(beta, j));
                    matched = true;
                    break;
                }
            if (!matched)
                for (std::size_t i = 0; i < big.size(); ++i)
                    if (big[i] == x) {
                        key.ins[i] += 1;
                        break;
                    }
        }
        if (factor.is_zero()) {
            t.coeff = Rational(0);
            return t;
        }
        std::vector<int> degs;
        for (std::size_t i = 0; i < big.size(); ++i)
            for (long cnt = 0; cnt < key.ins[i]; ++cnt) degs.push_back(model.classes[big[i]].degree);
        if (!admissible(model, beta, degs)) {
            t.coeff = Rational(0);
            return t;
        }
        Rational jf(1);
        for (std::size_t i = 0; i < big.size(); ++i) jf *= factorial(J[i]);
        t.coeff = factor / jf;
        t.has_key = true;
        t.key = std::move(key);
        for (std::size_t i = 0; i < big.size(); ++i)
            if (t.key.ins[i] > bounds.t_cap[i]) t.out_of_box = true;
        return t;
    }
};

struct LinForm {
    Rational c;
    std::map<GWKey, Rational> lin;
    bool poisoned = false;

    void add_product(const Rational &scale, const Phi3Term &x, const Phi3Term &y,
                     const std::map<GWKey, Rational> &known) {
        if (poisoned || scale.is_zero()) return;
        auto resolve = [&](const Phi3Term &t, Rational &value, const GWKey *&sym) {
            value = t.coeff;
            sym = nullptr;
            if (!t.has_key || t.coeff.is_zero()) return true;
            auto it = known.find(t.key);
            if (it != known.end()) {
                value = t.coeff * it->second;
                return true;
            }
            if (t.out_of_box) return false;
            sym = &t.key;
            return true;
        };
        Rational xv, yv;
        const GWKey *xs = nullptr, *ys = nullptr;
        if (!resolve(x, xv, xs) || !resolve(y, yv, ys)) {
            poisoned = true;
            return;
        }
        if (xs && ys) {
            poisoned = true; // quadratic in unknowns
            return;
        }
        if (!xs && !ys) {
            c += scale * xv * yv;
        } else if (xs) {
            if (!yv.is_zero()) lin[*xs] += scale * xv * yv;
        } else {
            if (!xv.is_zero()) lin[*ys] += scale * xv * yv;
        }
    }

    void prune() {
        for (auto it = lin.begin(); it != lin.end();) it = it->second.is_zero() ? lin.erase(it) : std::next(it);
    }
};

std::string key_str(const CohModel &model, const GWKey &key) {
    std::string s = "beta=(";
    for (std::size_t i = 0; i < key.beta.size(); ++i) s += (i ? "," : "") + std::to_string(key.beta[i]);
    s += "), ins=(";
    auto big = model.big_indices();
    bool first = true;
    for (std::size_t i = 0; i < key.ins.size(); ++i)
        if (key.ins[i] > 0) {
            s += (first ? "" : ",") + model.classes[big[i]].name + "^" + std::to_string(key.ins[i]);
            first = false;
        }
    return s + ")";
}

} // namespace

GWTable reconstruct(const CohModel &model, const GWTable &seed, const std::set<std::size_t> &W,
                    const PotentialBounds &bounds) {
    model.validate();
    auto h2 = model.h2_indices();
    auto big = model.big_indices();
    for (auto j : h2)
        if (!W.count(j))
            throw RejectedInput("W must contain the degree-2 classes (divisor directions)");
    for (auto x : W)
        if (x >= model.size()) throw StructuralError("W contains an out-of-range class index");
    {
        // W must generate the even cohomology under cup
        QMat span(model.size(), 1);
        span(0, 0) = Rational(1);
        std::size_t rank = 1;
        bool grew = true;
        while (grew && rank < model.size()) {
            grew = false;
            for (std::size_t col = 0; col < span.cols(); ++col)
                for (auto wcls : W) {
                    std::vector<Rational> image(model.size());
                    for (std::size_t k = 0; k < model.size(); ++k) {
                        Rational acc;
                        for (std::size_t j = 0; j < model.size(); ++j) acc += model.cup[wcls][j][k] * span(j, col);
                        image[k] = acc;
                    }
                    QMat cand(model.size(), span.cols() + 1);
                    for (std::size_t i = 0; i < model.size(); ++i) {
                        for (std::size_t j2 = 0; j2 < span.cols(); ++j2) cand(i, j2) = span(i, j2);
                        cand(i, span.cols()) = image[i];
                    }
                    if (cand.rank() > rank) {
                        span = cand;
                        rank = cand.rank();
                        grew = true;
                    }
                }
        }
        if (rank < model.size())
            throw RejectedInput("W does not generate the cohomology ring under cup");
    }

    ReconstructCtx ctx{model, bounds, h2, big, *model.pairing.inverse()};

    std::map<GWKey, Rational> known = seed.entries;
    for (const auto &[key, value] : seed.entries) {
        (void)value;
        std::vector<int> degs;
        for (std::size_t i = 0; i < big.size(); ++i)
            for (long c = 0; c < key.ins[i]; ++c) degs.push_back(model.classes[big[i]].degree);
        if (!admissible(model, key.beta, degs))
            throw RejectedInput("seed entry is inadmissible: " + key_str(model, key));
    }

    // enumerate admissible in-box keys
    std::vector<GWKey> unknowns;
    {
        std::vector<long> beta(model.mori_rank, 0);
        auto next_beta = [&](std::vector<long> &b) {
            for (std::size_t s = 0; s < b.size(); ++s) {
                if (b[s] < bounds.beta_cap[s]) {
                    ++b[s];
                    return true;
                }
                b[s] = 0;
            }
            return false;
        };
        do {
            if (std::all_of(beta.begin(), beta.end(), [](long x) { return x == 0; })) continue;
            std::vector<long> ins(big.size(), 0);
            auto next_ins = [&](std::vector<long> &v) {
                for (std::size_t a = 0; a < v.size(); ++a) {
                    if (v[a] < bounds.t_cap[a]) {
                        ++v[a];
                        return true;
                    }
                    v[a] = 0;
                }
                return false;
            };
            bool more = true;
            while (more) {
                std::vector<int> degs;
                for (std::size_t a = 0; a < big.size(); ++a)
                    for (long c = 0; c < ins[a]; ++c) degs.push_back(model.classes[big[a]].degree);
                if (admissible(model, beta, degs)) {
                    GWKey key{beta, ins};
                    if (!known.count(key)) unknowns.push_back(key);
                }
                more = next_ins(ins);
            }
        } while (next_beta(beta));
    }

    auto non_w = [&](const GWKey &key) {
        long cnt = 0;
        for (std::size_t a = 0; a < big.size(); ++a)
            if (!W.count(big[a])) cnt += key.ins[a];
        return cnt;
    };
    std::stable_sort(unknowns.begin(), unknowns.end(), [&](const GWKey &x, const GWKey &y) {
        Rational cx = model.c1_dot(x.beta), cy = model.c1_dot(y.beta);
        if (cx != cy) return cx < cy;
        long nx = non_w(x), ny = non_w(y);
        if (nx != ny) return nx < ny;
        return x < y;
    });

    std::size_t m = model.size();
    // evaluate one associativity coefficient equation
    auto equation = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l, const std::vector<long> &beta,
                        const std::vector<long> &J) {
        LinForm form;
        std::vector<long> b1(beta.size(), 0), j1(J.size(), 0);
        auto next_vec = [](std::vector<long> &v, const std::vector<long> &cap) {
            for (std::size_t s = 0; s < v.size(); ++s) {
                if (v[s] < cap[s]) {
                    ++v[s];
                    return true;
                }
                v[s] = 0;
            }
            return false;
        };
        bool more_b = true;
        while (more_b && !form.poisoned) {
            std::vector<long> b2(beta.size());
            for (std::size_t s = 0; s < beta.size(); ++s) b2[s] = beta[s] - b1[s];
            std::fill(j1.begin(), j1.end(), 0);
            bool more_j = true;
            while (more_j && !form.poisoned) {
                std::vector<long> j2(J.size());
                for (std::size_t s = 0; s < J.size(); ++s) j2[s] = J[s] - j1[s];
                for (std::size_t s = 0; s < m && !form.poisoned; ++s)
                    for (std::size_t t = 0; t < m; ++t) {
                        const Rational &g = ctx.ginv(s, t);
                        if (g.is_zero()) continue;
                        form.add_product(g, ctx.phi3(i, j, s, b1, j1), ctx.phi3(t, k, l, b2, j2), known);
                        form.add_product(-g, ctx.phi3(k, j, s, b1, j1), ctx.phi3(t, i, l, b2, j2), known);
                        if (form.poisoned) break;
                    }
                more_j = next_vec(j1, J);
            }
            more_b = next_vec(b1, beta);
        }
        form.prune();
        return form;
    };

    auto try_pin = [&](const GWKey &u, bool wide) -> bool {
        std::vector<std::vector<long>> betas;
        if (!wide) {
            betas.push_back(u.beta);
        } else {
            std::vector<long> beta(model.mori_rank, 0);
            auto next_beta = [&](std::vector<long> &b) {
                for (std::size_t s = 0; s < b.size(); ++s) {
                    if (b[s] < bounds.beta_cap[s]) {
                        ++b[s];
                        return true;
                    }
                    b[s] = 0;
                }
                return false;
            };
            do {
                bool ge = true;
                for (std::size_t s = 0; s < beta.size(); ++s) ge = ge && beta[s] >= u.beta[s];
                if (ge) betas.push_back(beta);
            } while (next_beta(beta));
        }
        for (const auto &beta : betas) {
            std::vector<long> J(big.size(), 0);
            auto next_j = [&](std::vector<long> &v) {
                for (std::size_t a = 0; a < v.size(); ++a) {
                    if (v[a] < bounds.t_cap[a]) {
                        ++v[a];
                        return true;
                    }
                    v[a] = 0;
                }
                return false;
            };
            bool more = true;
            while (more) {
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t k = i + 1; k < m; ++k)
                        for (std::size_t j = 0; j < m; ++j)
                            for (std::size_t l = 0; l < m; ++l) {
                                LinForm f = equation(i, j, k, l, beta, J);
                                if (f.poisoned) continue;
                                if (f.lin.empty()) {
                                    if (!f.c.is_zero())
                                        throw Inconsistent("seed violates associativity at " +
                                                           key_str(model, GWKey{beta, J}));
                                    continue;
                                }
                                if (f.lin.size() == 1 && f.lin.begin()->first == u) {
                                    known[u] = -f.c / f.lin.begin()->second;
                                    return true;
                                }
                            }
                more = next_j(J);
            }
        }
        return false;
    };

    std::vector<GWKey> remaining = unknowns;
    bool progress = true;
    bool widened = false;
    while (!remaining.empty() && progress) {
        progress = false;
        std::vector<GWKey> still;
        for (const auto &u : remaining) {
            if (known.count(u)) {
                progress = true;
                continue;
            }
            if (try_pin(u, widened))
                progress = true;
            else
                still.push_back(u);
        }
        remaining = std::move(still);
        if (!progress && !widened && !remaining.empty()) {
            widened = true;
            progress = true; // one more lap with the wide scan
        }
    }
    if (!remaining.empty())
        throw Underdetermined("no associativity equation pins " + key_str(model, remaining.front()) +
                              " within the given bounds");

    GWTable out;
    out.entries = std::move(known);
    for (auto it = out.entries.begin(); it != out.entries.end();)
        it = it->second.is_zero() ? out.entries.erase(it) : std::next(it);

    // final gate: the assembled potential must be associative up to bounds
    {
        PotentialBounds padded = bounds;
        for (auto &t : padded.t_cap) t += 3;
        auto phi = potential_assemble(model, out, padded);
        if (!wdvv_residual(model, phi).all_pass())
            throw Inconsistent("table violates associativity within the bounds (bad seed)");
    }
    return out;
}

FTSData qc_to_fts(const CohModel &model, const PotentialSeries &phi, const std::set<std::size_t> &W) {
    model.validate();
    auto h2 = model.h2_indices();
    auto big = model.big_indices();
    for (auto j : h2)
        if (!W.count(j)) throw RejectedInput("W must contain the degree-2 classes");

    auto prod = quantum_product(model, phi);
    const auto wb = prod[0].bounds();

    // restrict to the W-submanifold: non-W big-class coordinates at 0
    std::vector<std::string> names;
    std::vector<VarClass> classes;
    std::vector<int> nb;
    std::vector<std::size_t> keep; // variable indices of phi.vars kept
    std::vector<std::size_t> dir_class; // model class per new base variable
    for (std::size_t j = 0; j < h2.size(); ++j) {
        names.push_back(phi.vars->name(j));
        classes.push_back(VarClass::log_);
        nb.push_back(wb[j]);
        keep.push_back(j);
        dir_class.push_back(h2[j]);
    }
    for (std::size_t a = 0; a < big.size(); ++a) {
        if (!W.count(big[a])) continue;
        names.push_back(phi.vars->name(h2.size() + a));
        classes.push_back(VarClass::hol);
        nb.push_back(wb[h2.size() + a]);
        keep.push_back(h2.size() + a);
        dir_class.push_back(big[a]);
    }
    bool with_unit = W.count(0) > 0;
    if (with_unit) {
        names.push_back("t_" + model.classes[0].name);
        classes.push_back(VarClass::hol);
        nb.push_back(2);
        dir_class.push_back(0);
    }
    auto nv = make_vars(names, classes);

    auto restrict_op = [&](RMatrixSeries mtx) {
        for (std::size_t a = 0; a < big.size(); ++a)
            if (!W.count(big[a])) mtx = mtx.at_zero(h2.size() + a);
        // project onto kept variables, then embed the unit coordinate
        std::vector<std::string> pn;
        std::vector<VarClass> pc;
        std::vector<int> pbb;
        for (std::size_t v = 0; v < keep.size(); ++v) {
            pn.push_back(phi.vars->name(keep[v]));
            pc.push_back(phi.vars->var_class(keep[v]));
            pbb.push_back(mtx.bounds()[keep[v]]);
        }
        auto pv = make_vars(pn, pc);
        auto projected = mtx.projected(pv, pbb);
        std::vector<int> eb = pbb;
        if (with_unit) eb.push_back(nb.back());
        return projected.embedded(nv, eb);
    };

    std::size_t n = model.size();
    FTSData fts;
    fts.rank = n;
    fts.vars = nv;
    fts.bounds.resize(nv->size());
    fts.w = model.dimX;
    fts.d = Rational(model.dimX);

    // Higgs_X = -(X *), per W direction
    for (std::size_t dir = 0; dir < dir_class.size(); ++dir) fts.higgs.push_back(-restrict_op(prod[dir_class[dir]]));
    for (std::size_t v = 0; v < nv->size(); ++v) fts.bounds[v] = fts.higgs[0].bounds()[v];
    for (std::size_t dir = 0; dir < dir_class.size(); ++dir)
        fts.rconn.push_back(RMatrixSeries(n, n, nv, fts.bounds));

    // U = E* with E = t_0 d_0 + sum r^j q_j d_j + sum (1 - deg/2) t_a d_a
    RMatrixSeries U(n, n, nv, fts.bounds);
    for (std::size_t j = 0; j < h2.size(); ++j)
        U += common_restrict_ms(restrict_op(prod[h2[j]]), fts.bounds).scaled(model.c1[j]);
    for (std::size_t dir = 0; dir < dir_class.size(); ++dir) {
        std::size_t cls = dir_class[dir];
        if (model.classes[cls].is_h2) continue;
        Rational coeff = Rational(1) - Rational(model.classes[cls].degree, 2);
        if (coeff.is_zero()) continue;
        RSeries tvar = TruncatedSeries<Rational>::monomial(nv, fts.bounds, [&] {
            Mono e(nv->size(), 0);
            e[dir] = 1;
            return e;
        }(), Rational(1));
        U += common_restrict_ms(restrict_op(prod[cls]), fts.bounds).scaled(tvar).scaled(coeff);
    }
    fts.umat = U;

    RMatrixSeries V(n, n, nv, fts.bounds);
    for (std::size_t i = 0; i < n; ++i)
        V(i, i) = TruncatedSeries<Rational>::constant(nv, fts.bounds,
                                                      Rational(model.dimX - model.classes[i].degree, 2));
    fts.vmat = V;
    fts.gmat = RMatrixSeries::from_constant(model.pairing, nv, fts.bounds);
    for (std::size_t i = 0; i < n; ++i)
        fts.xi.push_back(TruncatedSeries<Rational>::constant(nv, fts.bounds, Rational(i == 0 ? 1 : 0)));
    return fts;
}

} // namespace forge
