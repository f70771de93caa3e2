#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace csl {

/// Structural side conditions threaded through scoring and exact search:
/// per-variable forbidden parents (typically the complement of a
/// super-structure neighborhood) plus a-priori fixed or excluded edges.
struct SearchConstraints {
    // forbidden_parents[i] = variables that must never be parents of i;
    // empty vector list means unconstrained.
    std::vector<std::vector<int>> forbidden_parents;
    std::vector<std::pair<int, int>> required_edges;   // (from, to)
    std::vector<std::pair<int, int>> forbidden_edges;  // (from, to)

    bool parent_forbidden(int parent, int child) const {
        if (!forbidden_parents.empty()) {
            const auto& f = forbidden_parents[static_cast<std::size_t>(child)];
            if (std::binary_search(f.begin(), f.end(), parent)) return true;
        }
        for (const auto& e : forbidden_edges)
            if (e.first == parent && e.second == child) return true;
        return false;
    }

    std::vector<int> required_parents_of(int child) const {
        std::vector<int> out;
        for (const auto& e : required_edges)
            if (e.second == child) out.push_back(e.first);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Required and forbidden sets must be disjoint and the required edges
    /// acyclic; throws std::invalid_argument otherwise.
    void validate(int num_vars) const {
        for (const auto& e : required_edges) {
            if (e.first < 0 || e.first >= num_vars || e.second < 0 || e.second >= num_vars ||
                e.first == e.second)
                throw std::invalid_argument("invalid required edge");
            if (parent_forbidden(e.first, e.second))
                throw std::invalid_argument("edge both required and forbidden");
        }
        // Kahn over the required edges only
        std::vector<int> indeg(static_cast<std::size_t>(num_vars), 0);
        for (const auto& e : required_edges) ++indeg[static_cast<std::size_t>(e.second)];
        std::vector<int> stack;
        for (int i = 0; i < num_vars; ++i)
            if (indeg[static_cast<std::size_t>(i)] == 0) stack.push_back(i);
        int seen = 0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            ++seen;
            for (const auto& e : required_edges)
                if (e.first == v && --indeg[static_cast<std::size_t>(e.second)] == 0)
                    stack.push_back(e.second);
        }
        if (seen != num_vars) throw std::invalid_argument("required edges form a cycle");
    }

    /// Constraints that restrict each variable's parents to its neighbors in
    /// the given super-structure.
    static SearchConstraints from_superstructure(const class UndirectedGraph& g);
};

}  // namespace csl
