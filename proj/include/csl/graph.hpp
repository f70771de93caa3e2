#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "csl/common.hpp"
#include "csl/constraints.hpp"

namespace csl {

// ---------------------------------------------------------------------------
// Directed acyclic graph over variables 0..d-1, stored as parent sets.

class Dag {
public:
    Dag() = default;
    explicit Dag(int num_vars) : d_(num_vars), parents_(static_cast<std::size_t>(num_vars)) {}

    int num_vars() const { return d_; }

    const std::vector<int>& parents(int i) const { return parents_[static_cast<std::size_t>(i)]; }

    void add_edge(int from, int to) {
        check_index(from);
        check_index(to);
        if (from == to) throw std::invalid_argument("self-loop");
        auto& pa = parents_[static_cast<std::size_t>(to)];
        auto it = std::lower_bound(pa.begin(), pa.end(), from);
        if (it == pa.end() || *it != from) pa.insert(it, from);
    }

    bool has_edge(int from, int to) const {
        const auto& pa = parents_[static_cast<std::size_t>(to)];
        return std::binary_search(pa.begin(), pa.end(), from);
    }

    bool adjacent(int i, int j) const { return has_edge(i, j) || has_edge(j, i); }

    int num_edges() const {
        int m = 0;
        for (const auto& pa : parents_) m += static_cast<int>(pa.size());
        return m;
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < d_; ++i)
            for (int p : parents_[static_cast<std::size_t>(i)]) out.emplace_back(p, i);
        return out;
    }

    /// Kahn topological order; throws if the edge relation is cyclic.
    std::vector<int> topological_order() const {
        std::vector<int> indeg(static_cast<std::size_t>(d_), 0);
        std::vector<std::vector<int>> children(static_cast<std::size_t>(d_));
        for (int i = 0; i < d_; ++i) {
            indeg[static_cast<std::size_t>(i)] = static_cast<int>(parents(i).size());
            for (int p : parents(i)) children[static_cast<std::size_t>(p)].push_back(i);
        }
        std::vector<int> queue, order;
        for (int i = 0; i < d_; ++i)
            if (indeg[static_cast<std::size_t>(i)] == 0) queue.push_back(i);
        while (!queue.empty()) {
            // lowest index first keeps the order deterministic
            auto it = std::min_element(queue.begin(), queue.end());
            int v = *it;
            queue.erase(it);
            order.push_back(v);
            for (int c : children[static_cast<std::size_t>(v)])
                if (--indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
        }
        if (static_cast<int>(order.size()) != d_) throw std::invalid_argument("edge relation is cyclic");
        return order;
    }

    bool operator==(const Dag& o) const { return d_ == o.d_ && parents_ == o.parents_; }

private:
    void check_index(int i) const {
        if (i < 0 || i >= d_) throw std::out_of_range("variable index out of range");
    }

    int d_ = 0;
    std::vector<std::vector<int>> parents_;
};

inline bool is_acyclic(const Dag& g) {
    try {
        (void)g.topological_order();
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Simple undirected graph with dense adjacency for O(1) lookups.

class UndirectedGraph {
public:
    UndirectedGraph() = default;
    explicit UndirectedGraph(int num_vars)
        : d_(num_vars),
          adj_(static_cast<std::size_t>(num_vars)),
          dense_(static_cast<std::size_t>(num_vars) * static_cast<std::size_t>(num_vars), 0) {}

    int num_vars() const { return d_; }

    void add_edge(int i, int j) {
        check_index(i);
        check_index(j);
        if (i == j) throw std::invalid_argument("self-loop");
        if (has_edge(i, j)) return;
        insert_sorted(adj_[static_cast<std::size_t>(i)], j);
        insert_sorted(adj_[static_cast<std::size_t>(j)], i);
        dense_[cell(i, j)] = 1;
        dense_[cell(j, i)] = 1;
    }

    bool has_edge(int i, int j) const {
        check_index(i);
        check_index(j);
        return i != j && dense_[cell(i, j)] != 0;
    }

    const std::vector<int>& neighbors(int i) const {
        check_index(i);
        return adj_[static_cast<std::size_t>(i)];
    }

    int num_edges() const {
        int m = 0;
        for (const auto& ns : adj_) m += static_cast<int>(ns.size());
        return m / 2;
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < d_; ++i)
            for (int j : neighbors(i))
                if (i < j) out.emplace_back(i, j);
        return out;
    }

    bool operator==(const UndirectedGraph& o) const { return d_ == o.d_ && adj_ == o.adj_; }

private:
    static void insert_sorted(std::vector<int>& v, int x) {
        v.insert(std::lower_bound(v.begin(), v.end(), x), x);
    }
    std::size_t cell(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(j);
    }
    void check_index(int i) const {
        if (i < 0 || i >= d_) throw std::out_of_range("variable index out of range");
    }

    int d_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<std::uint8_t> dense_;
};

// ---------------------------------------------------------------------------
// CPDAG / partially directed graph as a dense mark matrix.

enum class Mark : std::uint8_t { None = 0, Arrow = 1, Line = 2 };

class Cpdag {
public:
    Cpdag() = default;
    explicit Cpdag(int num_vars)
        : d_(num_vars),
          marks_(static_cast<std::size_t>(num_vars) * static_cast<std::size_t>(num_vars), Mark::None) {}

    int num_vars() const { return d_; }

    Mark mark(int i, int j) const { return marks_[cell(i, j)]; }

    bool has_directed(int i, int j) const { return mark(i, j) == Mark::Arrow; }
    bool has_undirected(int i, int j) const { return mark(i, j) == Mark::Line; }
    bool adjacent(int i, int j) const {
        return i != j && (mark(i, j) != Mark::None || mark(j, i) != Mark::None);
    }

    void set_directed(int from, int to) {
        check_pair(from, to);
        marks_[cell(from, to)] = Mark::Arrow;
        marks_[cell(to, from)] = Mark::None;
    }

    void set_undirected(int i, int j) {
        check_pair(i, j);
        marks_[cell(i, j)] = Mark::Line;
        marks_[cell(j, i)] = Mark::Line;
    }

    void clear_pair(int i, int j) {
        check_pair(i, j);
        marks_[cell(i, j)] = Mark::None;
        marks_[cell(j, i)] = Mark::None;
    }

    int num_directed() const {
        int m = 0;
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                if (has_directed(i, j)) ++m;
        return m;
    }

    int num_undirected() const {
        int m = 0;
        for (int i = 0; i < d_; ++i)
            for (int j = i + 1; j < d_; ++j)
                if (has_undirected(i, j)) ++m;
        return m;
    }

    bool operator==(const Cpdag& o) const { return d_ == o.d_ && marks_ == o.marks_; }

private:
    std::size_t cell(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(j);
    }
    void check_pair(int i, int j) const {
        if (i < 0 || i >= d_ || j < 0 || j >= d_) throw std::out_of_range("variable index out of range");
        if (i == j) throw std::invalid_argument("self-loop");
    }

    int d_ = 0;
    std::vector<Mark> marks_;
};

// ---------------------------------------------------------------------------
// Structural operations.

inline UndirectedGraph skeleton(const Dag& g) {
    UndirectedGraph out(g.num_vars());
    for (auto [from, to] : g.edges()) out.add_edge(from, to);
    return out;
}

/// Skeleton plus an edge between every pair of variables sharing a child.
inline UndirectedGraph moralize(const Dag& g) {
    UndirectedGraph out = skeleton(g);
    for (int child = 0; child < g.num_vars(); ++child) {
        const auto& pa = g.parents(child);
        for (std::size_t a = 0; a < pa.size(); ++a)
            for (std::size_t b = a + 1; b < pa.size(); ++b) out.add_edge(pa[a], pa[b]);
    }
    return out;
}

/// N(i) together with the neighbors of each neighbor, excluding i itself.
inline std::vector<int> two_hop_neighbors(const UndirectedGraph& g, int i) {
    if (i < 0 || i >= g.num_vars()) throw std::out_of_range("variable index out of range");
    std::set<int> reach;
    for (int j : g.neighbors(i)) {
        reach.insert(j);
        for (int k : g.neighbors(j)) reach.insert(k);
    }
    reach.erase(i);
    return {reach.begin(), reach.end()};
}

/// Unshielded colliders of a DAG as (parent_a, collider, parent_b), a < b.
inline std::vector<std::array<int, 3>> v_structures(const Dag& g) {
    std::vector<std::array<int, 3>> out;
    for (int y = 0; y < g.num_vars(); ++y) {
        const auto& pa = g.parents(y);
        for (std::size_t a = 0; a < pa.size(); ++a)
            for (std::size_t b = a + 1; b < pa.size(); ++b)
                if (!g.adjacent(pa[a], pa[b])) out.push_back({pa[a], y, pa[b]});
    }
    return out;
}

/// Meek orientation rules R1-R3 applied to a fixpoint. Starting from a
/// pattern whose directed marks are exactly its unshielded colliders these
/// rules orient every compelled edge.
inline void meek_closure(Cpdag& g) {
    const int d = g.num_vars();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                if (!g.has_undirected(a, b) || a == b) continue;
                bool orient = false;
                // R1: c -> a, a - b, c and b non-adjacent  =>  a -> b
                for (int c = 0; c < d && !orient; ++c)
                    if (g.has_directed(c, a) && !g.adjacent(c, b) && c != b) orient = true;
                // R2: a -> c -> b with a - b  =>  a -> b
                for (int c = 0; c < d && !orient; ++c)
                    if (g.has_directed(a, c) && g.has_directed(c, b)) orient = true;
                // R3: a - c -> b, a - e -> b, c and e non-adjacent  =>  a -> b
                if (!orient) {
                    std::vector<int> spokes;
                    for (int c = 0; c < d; ++c)
                        if (g.has_undirected(a, c) && g.has_directed(c, b)) spokes.push_back(c);
                    for (std::size_t x = 0; x < spokes.size() && !orient; ++x)
                        for (std::size_t y = x + 1; y < spokes.size() && !orient; ++y)
                            if (!g.adjacent(spokes[x], spokes[y])) orient = true;
                }
                if (orient) {
                    g.set_directed(a, b);
                    changed = true;
                }
            }
        }
    }
}

/// CPDAG of the Markov equivalence class of a DAG: keep the skeleton, orient
/// unshielded colliders, close under the Meek rules.
inline Cpdag dag_to_cpdag(const Dag& g) {
    Cpdag out(g.num_vars());
    for (auto [from, to] : g.edges()) out.set_undirected(from, to);
    for (const auto& v : v_structures(g)) {
        out.set_directed(v[0], v[1]);
        out.set_directed(v[2], v[1]);
    }
    meek_closure(out);
    return out;
}

/// Dor-Tarsi consistent extension: orient every undirected mark without
/// creating a cycle or a new unshielded collider among the graph's edges.
/// Required edges in `fixed` pre-orient the corresponding undirected marks.
/// Throws NotExtendable when no valid orientation exists.
inline Dag consistent_extension(const Cpdag& cpdag, const SearchConstraints& fixed = {}) {
    const int d = cpdag.num_vars();
    Cpdag g = cpdag;

    for (const auto& [from, to] : fixed.required_edges) {
        if (g.has_directed(from, to)) continue;
        if (g.has_undirected(from, to)) {
            g.set_directed(from, to);
        } else if (g.has_directed(to, from)) {
            throw NotExtendable("required edge conflicts with a directed mark");
        } else {
            throw std::invalid_argument("required edge not present in graph");
        }
    }

    Cpdag work = g;
    Dag out(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (g.has_directed(i, j)) out.add_edge(i, j);

    std::vector<bool> active(static_cast<std::size_t>(d), true);
    int remaining = d;
    while (remaining > 0) {
        int found = -1;
        for (int x = 0; x < d && found < 0; ++x) {
            if (!active[static_cast<std::size_t>(x)]) continue;
            bool sink = true;
            for (int y = 0; y < d && sink; ++y)
                if (active[static_cast<std::size_t>(y)] && work.has_directed(x, y)) sink = false;
            if (!sink) continue;
            // every undirected neighbor of x must be adjacent to all other
            // active neighbors of x, otherwise orienting into x creates a
            // new unshielded collider
            bool ok = true;
            for (int y = 0; y < d && ok; ++y) {
                if (!active[static_cast<std::size_t>(y)] || !work.has_undirected(x, y)) continue;
                for (int z = 0; z < d && ok; ++z) {
                    if (z == y || !active[static_cast<std::size_t>(z)]) continue;
                    if (work.adjacent(x, z) && !work.adjacent(y, z)) ok = false;
                }
            }
            if (ok) found = x;
        }
        if (found < 0) throw NotExtendable("no consistent extension exists");
        for (int y = 0; y < d; ++y) {
            if (active[static_cast<std::size_t>(y)] && work.has_undirected(found, y)) {
                out.add_edge(y, found);
                work.clear_pair(found, y);
            }
        }
        active[static_cast<std::size_t>(found)] = false;
        --remaining;
    }
    return out;
}

inline SearchConstraints SearchConstraints::from_superstructure(const UndirectedGraph& g) {
    SearchConstraints c;
    const int d = g.num_vars();
    c.forbidden_parents.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const auto& nbrs = g.neighbors(i);
        for (int j = 0; j < d; ++j)
            if (j != i && !std::binary_search(nbrs.begin(), nbrs.end(), j))
                c.forbidden_parents[static_cast<std::size_t>(i)].push_back(j);
    }
    return c;
}

/// Markov equivalence = identical skeleton and identical v-structures.
inline bool markov_equivalent(const Dag& a, const Dag& b) {
    if (a.num_vars() != b.num_vars()) return false;
    if (!(skeleton(a) == skeleton(b))) return false;
    auto va = v_structures(a);
    auto vb = v_structures(b);
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    return va == vb;
}

}  // namespace csl
