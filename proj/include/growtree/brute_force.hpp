#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "growtree/tree.hpp"

// Reference implementations by direct re-rooting. Quadratic; meant for
// cross-checking the cached structure on small trees.
namespace growtree::brute {

// Size of the component of T \ u that contains the neighbor v.
inline std::int64_t component_size(const GrowingTree& t, VertexId u, VertexId v) {
    std::vector<VertexId> stack{v};
    std::vector<char> seen(t.n(), 0);
    seen[u] = 1;
    seen[v] = 1;
    std::int64_t count = 0;
    while (!stack.empty()) {
        const VertexId w = stack.back();
        stack.pop_back();
        ++count;
        auto visit = [&](VertexId y) {
            if (y != -1 && !seen[y]) {
                seen[y] = 1;
                stack.push_back(y);
            }
        };
        visit(t.parent(w));
        for (const VertexId c : t.children(w)) visit(c);
    }
    return count;
}

inline std::int64_t psi(const GrowingTree& t, VertexId u) {
    std::int64_t best = 0;
    if (t.parent(u) != -1) best = std::max(best, component_size(t, u, t.parent(u)));
    for (const VertexId c : t.children(u)) best = std::max(best, component_size(t, u, c));
    return best;
}

inline CentroidSet centroids(const GrowingTree& t) {
    CentroidSet out;
    if (t.n() == 1) {
        out.members = {0};
        out.psi_value = 0;
        return out;
    }
    std::int64_t best = t.n();
    for (VertexId u = 0; u < t.n(); ++u) {
        const std::int64_t value = psi(t, u);
        if (value < best) {
            best = value;
            out.members.clear();
        }
        if (value == best) out.members.push_back(u);
    }
    out.psi_value = best;
    return out;
}

inline TopKSet top_k(const GrowingTree& t, int k) {
    std::vector<std::pair<std::int64_t, VertexId>> keyed;
    keyed.reserve(t.n());
    for (VertexId u = 0; u < t.n(); ++u) keyed.emplace_back(psi(t, u), u);
    std::sort(keyed.begin(), keyed.end());
    TopKSet out;
    out.k = k;
    const int take = static_cast<int>(std::min<std::int64_t>(k, t.n()));
    for (int i = 0; i < take; ++i) out.ordered.emplace_back(keyed[i].second, keyed[i].first);
    out.boundary_tied = take < t.n() && keyed[take].first == keyed[take - 1].first;
    return out;
}

} // namespace growtree::brute
