#pragma once

// Brute-force weight-filtration oracle shared by the unit tests and the
// acceptance suite. Enumerates all increasing chains assembled from sums of
// ker N^a cap im N^b and returns every chain satisfying the two defining
// properties of the monodromy weight filtration; callers assert there is
// exactly one and compare it with the implementation.

#include <functional>
#include <map>
#include <vector>

#include "forge/linalg.hpp"

namespace forge_test {

using forge::QMat;
using forge::QSpace;
using forge::Rational;

inline std::vector<std::map<int, QSpace>> weight_chains(const QMat &N, int w) {
    std::size_t n = N.rows();
    auto pw = [&](long k) {
        QMat r = QMat::identity(n);
        for (long i = 0; i < k; ++i) r = r * N;
        return r;
    };
    std::vector<QSpace> cands;
    auto add = [&](const QSpace &s) {
        for (const auto &c : cands)
            if (c == s) return;
        cands.push_back(s);
    };
    for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = 0; b <= n; ++b) {
            QSpace ker(pw(a).kernel());
            QSpace im(pw(b) * QMat::identity(n));
            add(intersect(ker, im));
        }
    bool grew = true;
    while (grew) {
        grew = false;
        std::size_t sz = cands.size();
        for (std::size_t i = 0; i < sz; ++i)
            for (std::size_t j = i + 1; j < sz; ++j) {
                QSpace s = sum(cands[i], cands[j]);
                bool known = false;
                for (const auto &c : cands)
                    if (c == s) known = true;
                if (!known) {
                    cands.push_back(s);
                    grew = true;
                }
            }
    }

    int lo = w - static_cast<int>(n), hi = w + static_cast<int>(n);
    std::vector<QSpace> chain(hi - lo + 1, QSpace(n));
    std::vector<std::map<int, QSpace>> found;
    auto full = QSpace::full(n);
    std::function<void(int)> rec = [&](int idx) {
        if (found.size() >= 2) return;
        if (idx == static_cast<int>(chain.size())) {
            if (chain.back() != full) return;
            for (int l = 1; l <= static_cast<int>(n); ++l) {
                auto at = [&](int lvl) {
                    if (lvl < lo) return QSpace(n);
                    if (lvl > hi) return full;
                    return chain[lvl - lo];
                };
                std::size_t grt = at(w + l).dim() - at(w + l - 1).dim();
                std::size_t grb = at(w - l).dim() - at(w - l - 1).dim();
                if (grt != grb) return;
                QSpace img = at(w + l).map(pw(l));
                if (sum(img, at(w - l - 1)).dim() - at(w - l - 1).dim() != grt) return;
            }
            std::map<int, QSpace> result;
            for (int l = lo; l <= hi; ++l) result.emplace(l, chain[l - lo]);
            found.push_back(result);
            return;
        }
        for (const auto &cand : cands) {
            if (idx > 0 && !cand.contains(chain[idx - 1])) continue;
            QSpace target = (idx >= 2) ? chain[idx - 2] : QSpace(n);
            if (!target.contains(cand.map(N))) continue;
            chain[idx] = cand;
            rec(idx + 1);
            if (found.size() >= 2) return;
        }
    };
    rec(0);
    return found;
}

inline QMat jordan_nilpotent_blocks(const std::vector<int> &blocks) {
    int n = 0;
    for (int b : blocks) n += b;
    QMat N(n, n);
    int off = 0;
    for (int b : blocks) {
        for (int i = 0; i + 1 < b; ++i) N(off + i + 1, off + i) = Rational(1);
        off += b;
    }
    return N;
}

} // namespace forge_test
