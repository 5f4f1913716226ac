#include "forge/hodge.hpp"

#include <algorithm>

namespace forge {

namespace {

GMat lift(const QMat &m) {
    GMat g(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) g(i, j) = GaussianRational(m(i, j));
    return g;
}

QMat mat_pow(const QMat &m, long k) {
    QMat r = QMat::identity(m.rows());
    for (long i = 0; i < k; ++i) r = r * m;
    return r;
}

// Columns of `inside` extending `sub` to a basis of `inside`; deterministic
// (first independent columns win).
template <class K> Mat<K> complement_in(const Subspace<K> &sub, const Subspace<K> &inside) {
    Mat<K> probe = Mat<K>::hcat(sub.basis(), inside.basis());
    Mat<K> t = probe;
    auto piv = t.rref();
    std::vector<std::size_t> extra;
    for (auto p : piv)
        if (p >= sub.dim()) extra.push_back(p);
    Mat<K> out(inside.ambient(), extra.size());
    for (std::size_t c = 0; c < extra.size(); ++c)
        for (std::size_t i = 0; i < inside.ambient(); ++i) out(i, c) = probe(i, extra[c]);
    return out;
}

bool is_nilpotent(const QMat &n) {
    QMat p = n;
    for (std::size_t k = 1; k <= n.rows(); ++k) {
        if (p.is_zero()) return true;
        p = p * n;
    }
    return p.is_zero();
}

// Recursive kernel/image construction centered at 0; steps returned for
// l in [-k-1, k].
std::map<int, QSpace> weight_centered(const QMat &N) {
    std::size_t n = N.rows();
    std::map<int, QSpace> W;
    if (N.is_zero()) {
        W.insert_or_assign(-1, QSpace(n));
        W.insert_or_assign(0, QSpace::full(n));
        return W;
    }
    long k = 0;
    {
        QMat p = N;
        while (!(p * N).is_zero()) {
            p = p * N;
            ++k;
        }
        ++k; // now N^k != 0, N^{k+1} = 0, k >= 1
    }
    QMat nk = mat_pow(N, k);
    QSpace ker_nk(nk.kernel());
    QSpace im_nk(nk * QMat::identity(n));
    W.insert_or_assign(static_cast<int>(k), QSpace::full(n));
    W.insert_or_assign(static_cast<int>(k) - 1, ker_nk);
    W.insert_or_assign(-static_cast<int>(k), im_nk);
    W.insert_or_assign(-static_cast<int>(k) - 1, QSpace(n));
    if (k >= 1) {
        // induced N on ker N^k / im N^k
        QMat comp = complement_in(im_nk, ker_nk);
        std::size_t qd = comp.cols();
        if (qd > 0) {
            QMat lift_basis = QMat::hcat(im_nk.basis(), comp);
            QMat nq(qd, qd);
            for (std::size_t c = 0; c < qd; ++c) {
                std::vector<Rational> img(n);
                for (std::size_t i = 0; i < n; ++i) {
                    Rational acc;
                    for (std::size_t j = 0; j < n; ++j) acc += N(i, j) * comp(j, c);
                    img[i] = acc;
                }
                auto sol = lift_basis.solve(img);
                if (!sol) throw InternalConsistencyError("weight filtration: quotient action escaped the kernel");
                for (std::size_t r = 0; r < qd; ++r) nq(r, c) = (*sol)[im_nk.dim() + r];
            }
            auto inner = weight_centered(nq);
            auto inner_at = [&](int l) {
                if (l < inner.begin()->first) return QSpace(qd);
                if (l > inner.rbegin()->first) return QSpace::full(qd);
                auto it = inner.upper_bound(l);
                --it;
                return it->second;
            };
            for (int l = -static_cast<int>(k) + 1; l <= static_cast<int>(k) - 2; ++l)
                W.insert_or_assign(l, sum(im_nk, QSpace(comp * inner_at(l).basis())));
        } else {
            for (int l = -static_cast<int>(k) + 1; l <= static_cast<int>(k) - 2; ++l) W.insert_or_assign(l, im_nk);
        }
    }
    return W;
}

GSpace gspace_of(const QSpace &s) { return GSpace(lift(s.basis())); }

} // namespace

void BilinearSpace::validate() const {
    if (S.rows() != dim || S.cols() != dim) throw StructuralError("bilinear form has wrong dimensions");
    if (!S.inverse()) throw StructuralError("bilinear form is degenerate");
    Rational sign = (w % 2 == 0) ? Rational(1) : Rational(-1);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (S(i, j) != sign * S(j, i)) throw StructuralError("bilinear form is not (-1)^w-symmetric");
}

GSpace DecFiltration::at(int p, std::size_t ambient) const {
    if (steps.empty()) throw StructuralError("empty filtration");
    auto it = steps.lower_bound(p); // smallest declared key >= p
    if (it == steps.end()) return GSpace(ambient);
    return GSpace(it->second);
}
int DecFiltration::min_step() const { return steps.empty() ? 0 : steps.begin()->first; }
int DecFiltration::max_step() const { return steps.empty() ? 0 : steps.rbegin()->first; }
void DecFiltration::validate(std::size_t ambient) const {
    if (steps.empty()) throw StructuralError("empty filtration");
    const GMat *prev = nullptr;
    for (const auto &[p, b] : steps) {
        (void)p;
        if (b.rows() != ambient) throw StructuralError("filtration basis has wrong ambient dimension");
        if (prev) {
            // decreasing in p: later (larger p) contained in earlier
            if (!GSpace(*prev).contains(GSpace(b)))
                throw StructuralError("decreasing filtration steps are not nested");
        }
        prev = &b;
    }
}

GSpace IncFiltration::at(int l, std::size_t ambient) const {
    if (steps.empty()) throw StructuralError("empty filtration");
    auto it = steps.upper_bound(l); // first declared key > l
    if (it == steps.begin()) return GSpace(ambient);
    --it;
    return GSpace(it->second);
}
int IncFiltration::min_step() const { return steps.empty() ? 0 : steps.begin()->first; }
int IncFiltration::max_step() const { return steps.empty() ? 0 : steps.rbegin()->first; }
void IncFiltration::validate(std::size_t ambient) const {
    if (steps.empty()) throw StructuralError("empty filtration");
    const GMat *prev = nullptr;
    for (const auto &[l, b] : steps) {
        (void)l;
        if (b.rows() != ambient) throw StructuralError("filtration basis has wrong ambient dimension");
        if (prev && !GSpace(b).contains(GSpace(*prev)))
            throw StructuralError("increasing filtration steps are not nested");
        prev = &b;
    }
}

GSpace DeligneSplitting::piece(int p, int q, std::size_t ambient) const {
    auto it = ipq.find({p, q});
    if (it == ipq.end()) return GSpace(ambient);
    return GSpace(it->second);
}

IncFiltration weight_filtration(const QMat &N, int w) {
    if (N.rows() != N.cols()) throw StructuralError("weight filtration of non-square matrix");
    if (!is_nilpotent(N)) throw NotNilpotent("matrix is not nilpotent");
    auto centered = weight_centered(N);
    IncFiltration out;
    for (const auto &[l, sp] : centered) out.steps[w + l] = lift(sp.basis());

    // re-verify the defining properties
    std::size_t n = N.rows();
    auto at = [&](int l) {
        auto it = out.steps.upper_bound(l);
        if (it == out.steps.begin()) return QSpace(n);
        --it;
        QMat b(n, it->second.cols());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < it->second.cols(); ++j) b(i, j) = it->second(i, j).re();
        return QSpace(b);
    };
    int lo = out.min_step() - 1, hi = out.max_step() + 1;
    for (int l = lo; l <= hi; ++l) {
        QSpace wl = at(l);
        QSpace target = at(l - 2);
        if (!target.contains(wl.map(N)))
            throw InternalConsistencyError("weight filtration violates N(W_l) in W_{l-2}");
    }
    for (int l = 1; l <= hi - w; ++l) {
        // rank of N^l: Gr_{w+l} -> Gr_{w-l}
        QSpace top = at(w + l), topm = at(w + l - 1);
        QSpace bot = at(w - l), botm = at(w - l - 1);
        std::size_t gr_top = top.dim() - topm.dim();
        std::size_t gr_bot = bot.dim() - botm.dim();
        QMat nl = mat_pow(N, l);
        // dim of image of W_{w+l} under N^l modulo W_{w-l-1}
        QSpace img = top.map(nl);
        std::size_t rank_mod = sum(img, botm).dim() - botm.dim();
        std::size_t ker_mod = sum(topm.map(nl), botm).dim() - botm.dim();
        (void)ker_mod;
        if (gr_top != gr_bot || rank_mod != gr_top)
            throw InternalConsistencyError("weight filtration violates the N^l graded isomorphism");
    }
    return out;
}

DeligneSplitting deligne_splitting(const DecFiltration &F, const IncFiltration &W, std::size_t ambient,
                                   const BilinearSpace *space, const std::vector<QMat> *nlist) {
    F.validate(ambient);
    W.validate(ambient);

    // graded pieces must be Hodge structures of their weight
    for (int k = W.min_step(); k <= W.max_step(); ++k) {
        GSpace wk = W.at(k, ambient), wkm = W.at(k - 1, ambient);
        std::size_t grd = wk.dim() - wkm.dim();
        if (grd == 0) continue;
        for (int p = F.min_step() - 1; p <= F.max_step() + 1; ++p) {
            GSpace a = sum(intersect(F.at(p, ambient), wk), wkm);
            GSpace b = sum(intersect(F.at(k + 1 - p, ambient).conj(), wk), wkm);
            std::size_t da = a.dim() - wkm.dim();
            std::size_t db = b.dim() - wkm.dim();
            std::size_t di = intersect(a, b).dim() - wkm.dim();
            if (da + db != grd || di != 0)
                throw NotMHS("graded piece of weight " + std::to_string(k) +
                             " is not a Hodge structure (p = " + std::to_string(p) + ")");
        }
    }

    DeligneSplitting out;
    int pmin = F.min_step() - 1, pmax = F.max_step() + 1;
    int qmin = std::min(pmin, W.min_step() - pmax), qmax = std::max(pmax, W.max_step() - pmin);
    for (int p = pmin; p <= pmax; ++p)
        for (int q = qmin; q <= qmax; ++q) {
            GSpace fp = F.at(p, ambient);
            GSpace wpq = W.at(p + q, ambient);
            GSpace lhs = intersect(fp, wpq);
            GSpace rhs = intersect(F.at(q, ambient).conj(), wpq);
            for (int j = 1; p + q - j - 1 >= W.min_step() - 1; ++j) {
                GSpace term = intersect(F.at(q - j, ambient).conj(), W.at(p + q - j - 1, ambient));
                rhs = sum(rhs, term);
                if (q - j < F.min_step() && W.at(p + q - j - 1, ambient).dim() == 0) break;
            }
            GSpace piece = intersect(lhs, rhs);
            if (piece.dim() > 0) out.ipq[{p, q}] = piece.basis();
        }

    // splitting identities that only need (F, W)
    for (int p = pmin; p <= pmax; ++p) {
        GSpace acc(ambient);
        for (const auto &[key, b] : out.ipq)
            if (key.first >= p) acc = sum(acc, GSpace(b));
        if (acc != F.at(p, ambient))
            throw InternalConsistencyError("Deligne splitting does not recover F^" + std::to_string(p));
    }
    for (int l = W.min_step() - 1; l <= W.max_step(); ++l) {
        GSpace acc(ambient);
        for (const auto &[key, b] : out.ipq)
            if (key.first + key.second <= l) acc = sum(acc, GSpace(b));
        if (acc != W.at(l, ambient))
            throw InternalConsistencyError("Deligne splitting does not recover W_" + std::to_string(l));
    }

    // primitive parts relative to the cone representative N = sum N_j
    if (nlist && space) {
        QMat N(ambient, ambient);
        for (const auto &nj : *nlist) N = N + nj;
        GMat Ng = lift(N);
        int w = space->w;
        for (const auto &[key, b] : out.ipq) {
            int p = key.first, q = key.second;
            long s = p + q - w + 1;
            if (s < 0) continue;
            GMat pw = GMat::identity(ambient);
            GMat Npow = pw;
            for (long i = 0; i < s; ++i) Npow = Npow * Ng;
            GMat img = Npow * b;
            GMat ker = img.kernel();
            GMat basis = b * ker; // combinations of I^{p,q} basis killed by N^{s}
            if (basis.cols() > 0) out.ipq0[{p, q}] = GSpace(basis).basis();
        }
    }
    return out;
}

PMHSData build_pmhs(const BilinearSpace &space, const std::vector<QMat> &nlist, const DecFiltration &flim) {
    space.validate();
    for (std::size_t j = 0; j < nlist.size(); ++j) {
        const auto &nj = nlist[j];
        if (nj.rows() != space.dim || nj.cols() != space.dim)
            throw StructuralError("N[" + std::to_string(j) + "] has wrong dimensions");
        if (!is_nilpotent(nj)) throw NotNilpotent("at N[" + std::to_string(j) + "]");
        QMat r = nj.transpose() * space.S + space.S * nj;
        if (!r.is_zero())
            throw StructuralError("N[" + std::to_string(j) + "] is not an infinitesimal isometry of S");
    }
    for (std::size_t i = 0; i < nlist.size(); ++i)
        for (std::size_t j = i + 1; j < nlist.size(); ++j)
            if (!(nlist[i] * nlist[j] - nlist[j] * nlist[i]).is_zero())
                throw StructuralError("monodromy logarithms do not commute");
    QMat N(space.dim, space.dim);
    for (const auto &nj : nlist) N = N + nj;

    PMHSData pm;
    pm.space = space;
    pm.nlist = nlist;
    pm.flim = flim;
    pm.weight = weight_filtration(N, space.w);
    pm.deligne = deligne_splitting(flim, pm.weight, space.dim, &space, &nlist);
    return pm;
}

void PMHSData::validate() const {
    space.validate();
    flim.validate(space.dim);
    weight.validate(space.dim);
}

ConditionReport check_polarization(const PMHSData &pm) {
    pm.validate();
    std::size_t n = pm.space.dim;
    int w = pm.space.w;
    GMat Sg = lift(pm.space.S);
    QMat N(n, n);
    for (const auto &nj : pm.nlist) N = N + nj;
    GMat Ng = lift(N);
    ConditionReport rep;

    {
        bool pass = true;
        for (const auto &nj : pm.nlist)
            for (int p = pm.flim.min_step(); p <= pm.flim.max_step(); ++p)
                if (!pm.flim.at(p - 1, n).contains(pm.flim.at(p, n).map(lift(nj)))) pass = false;
        rep.add("N_shifts_F", pass);
    }
    {
        bool pass = true;
        for (int p = pm.flim.min_step(); p <= pm.flim.max_step() + 1; ++p) {
            GMat a = pm.flim.at(p, n).basis();
            GMat b = pm.flim.at(w + 1 - p, n).basis();
            if (!(a.transpose() * Sg * b).is_zero()) pass = false;
        }
        rep.add("S_F_orthogonality", pass);
    }
    {
        bool pass = true;
        for (int l = pm.weight.min_step(); l <= pm.weight.max_step(); ++l)
            for (int l2 = pm.weight.min_step(); l + l2 < w; ++l2) {
                GMat a = pm.weight.at(l, n).basis();
                GMat b = pm.weight.at(l2, n).basis();
                if (!(a.transpose() * Sg * b).is_zero()) pass = false;
            }
        rep.add("S_W_orthogonality", pass);
    }
    {
        // Deligne S-orthogonality: S(I^{p,q}, I^{r,s}) = 0 unless (r,s) = (w-p, w-q)
        bool pass = true;
        std::size_t bad = 0;
        for (const auto &[k1, b1] : pm.deligne.ipq)
            for (const auto &[k2, b2] : pm.deligne.ipq) {
                if (k2.first == w - k1.first && k2.second == w - k1.second) continue;
                GMat prodm = b1.transpose() * Sg * b2;
                if (!prodm.is_zero()) {
                    pass = false;
                    ++bad;
                }
            }
        rep.add("S_Ipq_orthogonality", pass, bad);
    }
    {
        // N maps I^{p,q} into I^{p-1,q-1} (each N_j)
        bool pass = true;
        for (const auto &nj : pm.nlist) {
            GMat njg = lift(nj);
            for (const auto &[k, b] : pm.deligne.ipq) {
                GSpace target = pm.deligne.piece(k.first - 1, k.second - 1, n);
                if (!target.contains(GSpace(njg * b))) pass = false;
            }
        }
        rep.add("N_shifts_Ipq", pass);
    }
    {
        // I^{p,q} = direct sum of N^j I_0^{p+j,q+j}
        bool pass = true;
        for (const auto &[k, b] : pm.deligne.ipq) {
            GSpace acc(n);
            for (int j = 0;; ++j) {
                auto it = pm.deligne.ipq0.find({k.first + j, k.second + j});
                if (it == pm.deligne.ipq0.end()) {
                    if (pm.deligne.ipq.find({k.first + j, k.second + j}) == pm.deligne.ipq.end() && j > 0) break;
                    if (j > 2 * static_cast<int>(n)) break;
                    continue;
                }
                GMat pw = GMat::identity(n);
                for (int s = 0; s < j; ++s) pw = pw * Ng;
                acc = sum(acc, GSpace(pw * it->second));
            }
            if (acc != GSpace(b)) pass = false;
        }
        rep.add("primitive_decomposition", pass);
    }
    {
        // S(N^i I_0^{p,q}, N^j I_0^{r,s}) = 0 unless (r,s,i+j) = (q,p,p+q-w)
        bool pass = true;
        auto npow = [&](int j) {
            GMat pw = GMat::identity(n);
            for (int s = 0; s < j; ++s) pw = pw * Ng;
            return pw;
        };
        for (const auto &[k1, b1] : pm.deligne.ipq0)
            for (const auto &[k2, b2] : pm.deligne.ipq0)
                for (int i = 0; i <= k1.first + k1.second - w; ++i)
                    for (int j = 0; j <= k2.first + k2.second - w; ++j) {
                        bool allowed = (k2.first == k1.second && k2.second == k1.first &&
                                        i + j == k1.first + k1.second - w);
                        if (allowed) continue;
                        GMat prodm = (npow(i) * b1).transpose() * Sg * (npow(j) * b2);
                        if (!prodm.is_zero()) pass = false;
                    }
        rep.add("S_primitive_orthogonality", pass);
    }
    {
        // positivity of the Hermitian form i^{p-q} S(., N^l conj .) on each
        // primitive piece, by leading principal minors
        bool pass = true;
        std::string note;
        for (const auto &[k, b] : pm.deligne.ipq0) {
            int p = k.first, q = k.second;
            int l = p + q - w;
            if (l < 0) continue;
            GMat nl = GMat::identity(n);
            for (int s = 0; s < l; ++s) nl = nl * Ng;
            std::size_t d = b.cols();
            GMat H(d, d);
            GaussianRational phase = i_power(p - q);
            GMat right = nl * b.conj();
            for (std::size_t u = 0; u < d; ++u)
                for (std::size_t v = 0; v < d; ++v) {
                    GaussianRational acc;
                    for (std::size_t r = 0; r < n; ++r)
                        for (std::size_t c = 0; c < n; ++c) acc += b(r, u) * Sg(r, c) * right(c, v);
                    H(u, v) = phase * acc;
                }
            for (std::size_t mm = 1; mm <= d; ++mm) {
                GMat minor(mm, mm);
                for (std::size_t i2 = 0; i2 < mm; ++i2)
                    for (std::size_t j2 = 0; j2 < mm; ++j2) minor(i2, j2) = H(i2, j2);
                GaussianRational dv = minor.det();
                if (!dv.im().is_zero() || dv.re().sign() <= 0) {
                    pass = false;
                    note = "I_0^{" + std::to_string(p) + "," + std::to_string(q) + "}";
                }
            }
        }
        rep.add("positivity", pass, 0, note);
    }
    return rep;
}

IncFiltration opposite_filtration(const PMHSData &pm) {
    std::size_t n = pm.space.dim;
    IncFiltration U;
    int pmin = pm.flim.min_step() - 1, pmax = pm.flim.max_step() + 1;
    for (int p = pmin; p <= pmax; ++p) {
        GSpace acc(n);
        for (const auto &[k, b] : pm.deligne.ipq)
            if (k.first <= p) acc = sum(acc, GSpace(b));
        U.steps[p] = acc.basis();
    }
    // oppositeness: K = F^p + U_{p-1}, direct
    for (int p = pmin; p <= pmax + 1; ++p) {
        GSpace fp = pm.flim.at(p, n);
        GSpace um = U.at(p - 1, n);
        if (fp.dim() + um.dim() != n || intersect(fp, um).dim() != 0)
            throw NotOpposite("U_{p-1} is not opposite to F^p at p = " + std::to_string(p));
    }
    for (const auto &nj : pm.nlist) {
        GMat njg = lift(nj);
        for (int p = pmin; p <= pmax; ++p)
            if (!U.at(p - 1, n).contains(U.at(p, n).map(njg)))
                throw NotOpposite("N does not shift the opposite filtration");
    }
    return U;
}

bool cone_agreement(const std::vector<QMat> &nlist, int w, const std::vector<std::vector<Rational>> &samples) {
    if (nlist.empty()) throw StructuralError("empty monodromy list");
    std::size_t n = nlist[0].rows();
    for (std::size_t i = 0; i < nlist.size(); ++i)
        for (std::size_t j = i + 1; j < nlist.size(); ++j)
            if (!(nlist[i] * nlist[j] - nlist[j] * nlist[i]).is_zero())
                throw StructuralError("monodromy logarithms do not commute");
    std::vector<IncFiltration> results;
    for (const auto &lam : samples) {
        if (lam.size() != nlist.size()) throw StructuralError("sample has wrong length");
        QMat N(n, n);
        for (std::size_t j = 0; j < nlist.size(); ++j) {
            if (lam[j].sign() <= 0) throw StructuralError("cone samples must be strictly positive");
            N = N + nlist[j].scaled(lam[j]);
        }
        results.push_back(weight_filtration(N, w));
    }
    for (std::size_t s = 1; s < results.size(); ++s) {
        int lo = std::min(results[0].min_step(), results[s].min_step());
        int hi = std::max(results[0].max_step(), results[s].max_step());
        for (int l = lo; l <= hi; ++l)
            if (GSpace(results[0].at(l, n)) != GSpace(results[s].at(l, n))) return false;
    }
    return true;
}

H2GenReport h2_generation(const DecFiltration &flim, const std::vector<QMat> &nlist, std::size_t ambient) {
    flim.validate(ambient);
    int ptop = flim.max_step();
    while (ptop >= flim.min_step() && flim.at(ptop, ambient).dim() == 0) --ptop;
    GSpace top = flim.at(ptop, ambient);
    if (top.dim() != 1) throw RejectedInput("h2_generation requires dim F^w = 1");

    H2GenReport rep;
    rep.rank_hypothesis = flim.at(ptop - 1, ambient).dim() == 1 + nlist.size();

    std::vector<GMat> njg;
    for (const auto &nj : nlist) njg.push_back(lift(nj));
    // level s spans: words of length s applied to the generator
    std::vector<GMat> level{top.basis()};
    bool ok = true;
    for (int s = 1; ptop - s >= flim.min_step() - 1; ++s) {
        GSpace span(ambient);
        std::vector<GMat> next;
        for (const auto &prev : level)
            for (const auto &nj : njg) {
                GMat img = nj * prev;
                next.push_back(img);
                span = sum(span, GSpace(img));
            }
        // F^{ptop-s} must be contained in span + F^{ptop-s+1}
        GSpace target = flim.at(ptop - s, ambient);
        GSpace reach = sum(span, flim.at(ptop - s + 1, ambient));
        if (!reach.contains(target)) {
            ok = false;
            break;
        }
        level = std::move(next);
        if (flim.at(ptop - s, ambient).dim() == ambient) break;
    }
    rep.generated = ok;
    return rep;
}

namespace {

// Solves A(q) X(q) = 0 order by order: X(0) is the canonical kernel basis of
// A(0) and each layer's particular solution is the deterministic rref one.
GMatrixSeries layer_kernel(const GMatrixSeries &A) {
    auto vars = A.vars();
    auto bounds = A.bounds();
    GMat a0 = A.constant_term();
    GMat k0 = a0.kernel();
    std::size_t cols = k0.cols();
    GMatrixSeries X(A.cols(), cols, vars, bounds);
    for (std::size_t i = 0; i < A.cols(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            X(i, j) = TruncatedSeries<GaussianRational>::constant(vars, bounds, k0(i, j));

    // enumerate multi-indices by total degree
    long total = 0;
    for (int b : bounds) total += b;
    std::vector<Mono> monos;
    {
        Mono cur(bounds.size(), 0);
        // iterative multi-index enumeration within the bounds box
        while (true) {
            monos.push_back(cur);
            std::size_t v = 0;
            while (v < cur.size()) {
                if (cur[v] < bounds[v]) {
                    ++cur[v];
                    break;
                }
                cur[v] = 0;
                ++v;
            }
            if (v == cur.size()) break;
        }
        std::stable_sort(monos.begin(), monos.end(), [](const Mono &x, const Mono &y) {
            long dx = 0, dy = 0;
            for (int e : x) dx += e;
            for (int e : y) dy += e;
            if (dx != dy) return dx < dy;
            return x < y;
        });
    }
    for (const auto &mu : monos) {
        long deg = 0;
        for (int e : mu) deg += e;
        if (deg == 0) continue;
        // residual layer: coefficient of q^mu in A * X(current)
        GMatrixSeries AX = A * X;
        GMat r(A.rows(), cols);
        for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t j = 0; j < cols; ++j) r(i, j) = AX(i, j).coefficient(mu);
        if (r.is_zero()) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            std::vector<GaussianRational> rhs(A.rows());
            for (std::size_t i = 0; i < A.rows(); ++i) rhs[i] = -r(i, j);
            auto sol = a0.solve(rhs);
            if (!sol) throw NotOpposite("family does not intersect the opposite filtration transversally");
            for (std::size_t i = 0; i < A.cols(); ++i)
                if (!(*sol)[i].is_zero()) X(i, j).add_term(mu, (*sol)[i]);
        }
    }
    return X;
}

} // namespace

FTSData split_connection(const PMHSData &pm, const SplitConnectionOptions &opt) {
    pm.validate();
    std::size_t n = pm.space.dim;
    int w = pm.space.w;
    if (opt.qnames.size() != pm.nlist.size())
        throw StructuralError("one q variable per monodromy logarithm expected");
    if (opt.bounds.size() != opt.qnames.size()) throw StructuralError("bounds arity mismatch");

    std::vector<VarClass> classes(opt.qnames.size(), VarClass::log_);
    auto nv = make_vars(opt.qnames, classes);
    std::vector<int> nb = opt.bounds;

    IncFiltration U = opposite_filtration(pm);

    // blocks of F^p cap U_p, ordered by decreasing p
    std::vector<int> plist;
    std::vector<GMat> blocks;
    int pmin = pm.flim.min_step(), pmax = pm.flim.max_step();
    for (int p = pmax; p >= pmin; --p) {
        GMat block;
        if (!opt.family) {
            GSpace acc(n);
            for (const auto &[k, b] : pm.deligne.ipq)
                if (k.first == p) acc = sum(acc, GSpace(b));
            if (acc.dim() == 0) continue;
            block = acc.basis();
            plist.push_back(p);
            blocks.push_back(block);
        } else {
            auto it = opt.family->find(p);
            if (it == opt.family->end()) continue;
            // series family: columns F^p(q); solve (ann U_p) . F^p(q) . X = 0
            const auto &cols = it->second;
            std::size_t fdim = cols.size();
            GMatrixSeries Fp(n, fdim, nv, nb);
            for (std::size_t c = 0; c < fdim; ++c) {
                if (cols[c].size() != n) throw StructuralError("family column has wrong length");
                for (std::size_t r = 0; r < n; ++r) Fp(r, c) = cols[c][r].embedded(nv, nb);
            }
            // check the family restricts to F_lim at q = 0
            {
                GMat f0(n, fdim);
                for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t c = 0; c < fdim; ++c) f0(r, c) = Fp(r, c).constant_term();
                if (GSpace(f0) != pm.flim.at(p, n))
                    throw RejectedInput("family does not restrict to F_lim at q = 0");
            }
            GMat ub = U.at(p, n).basis();
            GMat ann = ub.transpose().kernel().transpose() /* rows annihilating U_p */;
            // ann: rows v with v . U_p = 0: kernel of ub^T as column space, transposed
            GMatrixSeries annS(ann.rows(), n, nv, nb);
            for (std::size_t r = 0; r < ann.rows(); ++r)
                for (std::size_t c = 0; c < n; ++c)
                    annS(r, c) = TruncatedSeries<GaussianRational>::constant(nv, nb, ann(r, c));
            GMatrixSeries X = layer_kernel(annS * Fp);
            GMatrixSeries Gp = Fp * X;
            // constant part defines the block; series part rides along in T
            plist.push_back(p);
            GMat gb(n, Gp.cols());
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < Gp.cols(); ++c) gb(r, c) = Gp(r, c).constant_term();
            blocks.push_back(gb);
            // store full series columns for T below via a side channel:
            // reuse blocks for constants; series handled by building T directly
            // (see below)
        }
    }

    // adapted frame T: for the canonical family the blocks are constant; the
    // explicit-family branch rebuilds T with its series columns
    GMatrixSeries T(n, 0, nv, nb);
    std::vector<std::size_t> block_sizes;
    {
        std::size_t total = 0;
        for (const auto &b : blocks) total += b.cols();
        if (total != n) throw NotOpposite("adapted blocks do not fill the fiber");
        GMatrixSeries Tm(n, n, nv, nb);
        std::size_t col = 0;
        if (!opt.family) {
            for (const auto &b : blocks) {
                for (std::size_t c = 0; c < b.cols(); ++c, ++col)
                    for (std::size_t r = 0; r < n; ++r)
                        Tm(r, col) = TruncatedSeries<GaussianRational>::constant(nv, nb, b(r, c));
                block_sizes.push_back(b.cols());
            }
        } else {
            // recompute the series columns (same loop as above)
            col = 0;
            for (std::size_t bi = 0; bi < plist.size(); ++bi) {
                int p = plist[bi];
                auto it = opt.family->find(p);
                const auto &colsv = it->second;
                std::size_t fdim = colsv.size();
                GMatrixSeries Fp(n, fdim, nv, nb);
                for (std::size_t c = 0; c < fdim; ++c)
                    for (std::size_t r = 0; r < n; ++r) Fp(r, c) = colsv[c][r].embedded(nv, nb);
                GMat ub = U.at(p, n).basis();
                GMat ann = ub.transpose().kernel().transpose();
                GMatrixSeries annS(ann.rows(), n, nv, nb);
                for (std::size_t r = 0; r < ann.rows(); ++r)
                    for (std::size_t c = 0; c < n; ++c)
                        annS(r, c) = TruncatedSeries<GaussianRational>::constant(nv, nb, ann(r, c));
                GMatrixSeries X = layer_kernel(annS * Fp);
                GMatrixSeries Gp = Fp * X;
                block_sizes.push_back(Gp.cols());
                for (std::size_t c = 0; c < Gp.cols(); ++c, ++col)
                    for (std::size_t r = 0; r < n; ++r) Tm(r, col) = Gp(r, c);
            }
        }
        T = Tm;
    }
    GMatrixSeries Tinv = T.invert_unit();

    // block index per frame column
    std::vector<int> block_of(n);
    {
        std::size_t col = 0;
        for (std::size_t bi = 0; bi < block_sizes.size(); ++bi)
            for (std::size_t c = 0; c < block_sizes[bi]; ++c, ++col) block_of[col] = static_cast<int>(bi);
    }

    FTSData fts;
    fts.rank = n;
    fts.vars = nv;
    fts.bounds = nb;
    fts.w = w;
    fts.d = Rational(2L * plist.front() - w);

    auto to_rational = [&](const GMatrixSeries &g) {
        RMatrixSeries r(g.rows(), g.cols(), nv, g.bounds());
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) {
                RSeries s(nv, g.bounds());
                for (const auto &[e, c] : g(i, j).terms()) {
                    if (!c.im().is_zero())
                        throw NotSplitOverQ("adapted frame data is not defined over Q");
                    s.add_term(e, c.re());
                }
                r(i, j) = s;
            }
        return r;
    };

    for (std::size_t j = 0; j < pm.nlist.size(); ++j) {
        GMat njg = lift(pm.nlist[j]);
        GMatrixSeries njs = GMatrixSeries::from_constant(njg, nv, nb);
        GMatrixSeries conn = Tinv * (T.log_derivative(j) - njs * T);
        // classify blocks
        GMatrixSeries diag(n, n, nv, nb), sub(n, n, nv, nb);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                if (conn(r, c).is_zero()) continue;
                int br = block_of[r], bc = block_of[c];
                if (br == bc)
                    diag(r, c) = conn(r, c);
                else if (br == bc + 1)
                    sub(r, c) = conn(r, c); // p decreases by one from column to row
                else if (br < bc)
                    throw NotOpposite("connection does not preserve the opposite filtration");
                else
                    throw NotGriffiths("family violates Griffiths transversality");
            }
        // nabla^r residues vanish (trivial monodromy of the residual connection)
        RMatrixSeries rdiag = to_rational(diag);
        RMatrixSeries rsub = to_rational(sub);
        QMat residue = rdiag.constant_term();
        if (!residue.is_zero())
            throw InternalConsistencyError("nabla^r residue does not vanish");
        fts.rconn.push_back(rdiag);
        fts.higgs.push_back(rsub);
    }

    fts.umat = RMatrixSeries(n, n, nv, nb);
    {
        RMatrixSeries V(n, n, nv, nb);
        std::size_t col = 0;
        for (std::size_t bi = 0; bi < block_sizes.size(); ++bi)
            for (std::size_t c = 0; c < block_sizes[bi]; ++c, ++col)
                V(col, col) = TruncatedSeries<Rational>::constant(nv, nb, Rational(plist[bi]) - Rational(w, 2));
        fts.vmat = V;
    }
    {
        GMatrixSeries Sg = GMatrixSeries::from_constant(lift(pm.space.S), nv, nb);
        GMatrixSeries Gm = T.transpose() * Sg * T;
        GMatrixSeries signed_g(n, n, nv, nb);
        for (std::size_t i = 0; i < n; ++i) {
            Rational sign = (plist[block_of[i]] % 2 == 0) ? Rational(1) : Rational(-1);
            for (std::size_t j = 0; j < n; ++j)
                signed_g(i, j) = Gm(i, j).scaled(GaussianRational(sign));
        }
        fts.gmat = to_rational(signed_g);
        if (!(fts.gmat - fts.gmat.transpose()).is_zero())
            throw InternalConsistencyError("pairing read off S is not symmetric");
    }
    for (std::size_t i = 0; i < n; ++i)
        fts.xi.push_back(TruncatedSeries<Rational>::constant(nv, nb, Rational(i == 0 ? 1 : 0)));
    return fts;
}

} // namespace forge
