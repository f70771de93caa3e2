#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "csl/common.hpp"
#include "csl/constraints.hpp"

namespace csl {

namespace detail {
constexpr double kSigma2Floor = 1e-12;
}

/// Gaussian BIC contribution of variable i with parent set pa, computed from
/// a covariance matrix:  -(n/2) log sigma2_i - (log n)/2 * (|pa|+1)
/// with sigma2_i the Schur complement S_ii - S_{i,pa} S_{pa,pa}^{-1} S_{pa,i}.
/// Higher is better. Singular regressions score -inf.
inline double bic_local(const Eigen::MatrixXd& S, double n, int i, const std::vector<int>& pa) {
    const int k = static_cast<int>(pa.size());
    double sigma2;
    if (k == 0) {
        sigma2 = S(i, i);
    } else {
        Eigen::MatrixXd spp(k, k);
        Eigen::VectorXd spi(k);
        for (int a = 0; a < k; ++a) {
            spi(a) = S(pa[static_cast<std::size_t>(a)], i);
            for (int b = 0; b < k; ++b)
                spp(a, b) = S(pa[static_cast<std::size_t>(a)], pa[static_cast<std::size_t>(b)]);
        }
        Eigen::LLT<Eigen::MatrixXd> llt(spp);
        if (llt.info() != Eigen::Success) {
            spp.diagonal().array() += 1e-10;
            llt.compute(spp);
            if (llt.info() != Eigen::Success) return kNegInf;
        }
        sigma2 = S(i, i) - spi.dot(llt.solve(spi));
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) sigma2 = detail::kSigma2Floor;
    sigma2 = std::max(sigma2, detail::kSigma2Floor);
    return -0.5 * n * std::log(sigma2) - 0.5 * std::log(n) * (k + 1);
}

// ---------------------------------------------------------------------------
// Per-variable table of candidate parent sets. Entries are pruned: a set is
// stored only when its score strictly exceeds the score of every stored
// subset, which keeps best-subset queries exact while dropping dominated
// sets. Entries are ordered by (size, lexicographic), so scanning keeps ties
// on the smallest set.

struct ParentEntry {
    VarSet set = 0;
    double score = kNegInf;
};

struct ParentGraph {
    int variable = -1;
    VarSet candidates = 0;
    VarSet required = 0;  // parents forced into every entry
    std::vector<ParentEntry> entries;
};

/// Best stored entry whose parent set is contained in `allowed`; nullopt when
/// no entry qualifies (a required parent is missing from `allowed`).
inline std::optional<ParentEntry> best_score_and_set(const ParentGraph& pg, VarSet allowed) {
    allowed &= pg.candidates;
    std::optional<ParentEntry> best;
    for (const auto& e : pg.entries)
        if (vs_subset(e.set, allowed) && (!best || e.score > best->score)) best = e;
    return best;
}

/// Enumerate subsets of the allowed candidates (respecting forbidden parents,
/// forbidden edges and required edges) up to max_parents, score them and keep
/// the pruned frontier. max_parents < 0 means unbounded.
inline ParentGraph build_parent_graph(const Eigen::MatrixXd& S, double n, int i,
                                      const SearchConstraints& constraints, int max_parents = -1) {
    const int d = static_cast<int>(S.rows());
    if (d > 64) throw TooLarge("parent graphs support at most 64 variables");
    ParentGraph pg;
    pg.variable = i;

    std::vector<int> cand;
    for (int j = 0; j < d; ++j)
        if (j != i && !constraints.parent_forbidden(j, i)) cand.push_back(j);
    for (int j : cand) pg.candidates = vs_with(pg.candidates, j);

    VarSet required = 0;
    for (int j : constraints.required_parents_of(i)) {
        if (!vs_contains(pg.candidates, j))
            throw std::invalid_argument("required parent is not an admissible candidate");
        required = vs_with(required, j);
    }
    pg.required = required;

    std::vector<int> free_cand;
    for (int j : cand)
        if (!vs_contains(required, j)) free_cand.push_back(j);

    const int req_size = vs_size(required);
    int cap = max_parents < 0 ? static_cast<int>(cand.size())
                              : std::min<int>(max_parents, static_cast<int>(cand.size()));
    if (req_size > cap) throw std::invalid_argument("required parents exceed max_parents");

    auto best_stored_subset = [&pg](VarSet t) {
        double best = kNegInf;
        for (const auto& e : pg.entries)
            if (vs_subset(e.set, t)) best = std::max(best, e.score);
        return best;
    };

    std::vector<int> pa_buffer;
    auto consider = [&](VarSet t) {
        pa_buffer = vs_to_vector(t);
        const double sc = bic_local(S, n, i, pa_buffer);
        if (sc > best_stored_subset(t)) pg.entries.push_back({t, sc});
    };

    // subsets in (size, lexicographic) order over the free candidates,
    // each unioned with the required block
    const int m = static_cast<int>(free_cand.size());
    const int max_free = cap - req_size;
    std::vector<int> idx;
    for (int s = 0; s <= std::min(max_free, m); ++s) {
        idx.assign(static_cast<std::size_t>(s), 0);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            VarSet t = required;
            for (int x : idx) t = vs_with(t, free_cand[static_cast<std::size_t>(x)]);
            consider(t);
            // next combination
            int pos = s - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - s + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int q = pos + 1; q < s; ++q)
                idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
        }
        if (s == 0 && m == 0) break;
    }
    return pg;
}

/// Cap on enumerated parent-set sizes: unconstrained search bounds memory via
/// min(d-1, 8); with a super-structure the candidate sets are already small.
inline int default_max_parents(int d, bool has_superstructure) {
    return has_superstructure ? -1 : std::min(d - 1, 8);
}

}  // namespace csl
