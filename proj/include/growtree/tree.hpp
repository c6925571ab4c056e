#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "growtree/errors.hpp"

namespace growtree {

using VertexId = std::int32_t;
using Edge = std::pair<VertexId, VertexId>; // (child, parent), child born later

// Centrality of a vertex: the size of the largest component left by removing
// it. The centroid set holds the minimizers; it has one or two members, and
// two members are always adjacent.
struct CentroidSet {
    std::vector<VertexId> members; // sorted by birth order
    std::int64_t psi_value = 0;
};

struct TopKSet {
    int k = 0;
    // (vertex, psi) sorted by (psi ascending, birth order ascending)
    std::vector<std::pair<VertexId, std::int64_t>> ordered;
    // true when some excluded vertex ties the psi of the last included one
    bool boundary_tied = false;
};

// Tree built by successive leaf additions, ids assigned in birth order.
// The size cache is rooted at vertex 0 permanently; psi(u) is then
// max(n - size_down(u), max_child_size(u)) for any u, so queries are O(1)
// and add_leaf only touches the insertion path.
class GrowingTree {
  public:
    GrowingTree() { init_single(); }

    static GrowingTree from_edges(const std::vector<Edge>& edges) {
        GrowingTree t;
        const auto n = static_cast<VertexId>(edges.size()) + 1;
        for (VertexId i = 0; i + 1 < n; ++i) {
            if (edges[i].first != i + 1 || edges[i].second < 0 || edges[i].second >= i + 1) {
                throw NonTreeInput("edge " + std::to_string(i) + " is not a leaf addition");
            }
        }
        t.parent_.resize(n);
        t.children_.assign(n, {});
        t.size_down_.assign(n, 1);
        t.max_child_size_.assign(n, 0);
        t.heavy_child_.assign(n, -1);
        t.degree_.assign(n, 0);
        t.parent_[0] = -1;
        for (VertexId v = 1; v < n; ++v) {
            const VertexId p = edges[v - 1].second;
            t.parent_[v] = p;
            t.children_[p].push_back(v);
            ++t.degree_[p];
            ++t.degree_[v];
        }
        for (VertexId v = n - 1; v >= 1; --v) {
            const VertexId p = t.parent_[v];
            t.size_down_[p] += t.size_down_[v];
            if (t.size_down_[v] > t.max_child_size_[p]) {
                t.max_child_size_[p] = t.size_down_[v];
                t.heavy_child_[p] = v;
            }
        }
        t.n_ = n;
        return t;
    }

    VertexId add_leaf(VertexId parent) {
        check_vertex(parent);
        const VertexId x = n_++;
        parent_.push_back(parent);
        children_[parent].push_back(x);
        children_.emplace_back();
        size_down_.push_back(1);
        max_child_size_.push_back(0);
        heavy_child_.push_back(-1);
        degree_.push_back(1);
        ++degree_[parent];
        VertexId child = x;
        for (VertexId v = parent; v != -1; child = v, v = parent_[v]) {
            ++size_down_[v];
            if (size_down_[child] > max_child_size_[v]) {
                max_child_size_[v] = size_down_[child];
                heavy_child_[v] = child;
            }
        }
        return x;
    }

    VertexId n() const { return n_; }
    VertexId parent(VertexId v) const { check_vertex(v); return parent_[v]; }
    std::int32_t degree(VertexId v) const { check_vertex(v); return degree_[v]; }
    std::int32_t size_down(VertexId v) const { check_vertex(v); return size_down_[v]; }
    std::int32_t max_child_size(VertexId v) const { check_vertex(v); return max_child_size_[v]; }
    const std::vector<VertexId>& children(VertexId v) const { check_vertex(v); return children_[v]; }

    std::int64_t psi(VertexId u) const {
        check_vertex(u);
        if (n_ < 2) throw DomainError("psi is undefined on a single-vertex tree");
        return std::max<std::int64_t>(n_ - size_down_[u], max_child_size_[u]);
    }

    std::vector<std::int64_t> psi_all() const {
        if (n_ < 2) throw DomainError("psi is undefined on a single-vertex tree");
        std::vector<std::int64_t> out(n_);
        for (VertexId u = 0; u < n_; ++u) {
            out[u] = std::max<std::int64_t>(n_ - size_down_[u], max_child_size_[u]);
        }
        return out;
    }

    CentroidSet centroids() const {
        CentroidSet out;
        if (n_ == 1) {
            out.members = {0};
            out.psi_value = 0; // convention for the degenerate tree
            return out;
        }
        VertexId u = 0;
        while (2 * static_cast<std::int64_t>(max_child_size_[u]) > n_) u = heavy_child_[u];
        const std::int64_t best = psi(u);
        out.members.push_back(u);
        out.psi_value = best;
        // A co-centroid must be adjacent; only the parent or the heaviest
        // child can tie, and never both (two n/2 components cannot coexist).
        for (const VertexId cand : {parent_[u], heavy_child_[u]}) {
            if (cand != -1 && psi(cand) == best) out.members.push_back(cand);
        }
        std::sort(out.members.begin(), out.members.end());
        return out;
    }

    // Best-first expansion outward from the centroid, keyed by (psi, birth).
    // Relies on psi being non-decreasing away from the centroid; builds
    // without NDEBUG validate the result against the psi_all sort and fall
    // back to it on any disagreement.
    TopKSet top_k(int k) const {
        if (n_ < 2) throw DomainError("top_k needs at least two vertices");
        if (k < 1) throw DomainError("top_k needs k >= 1");
        TopKSet out;
        out.k = k;
        const int take = static_cast<int>(std::min<std::int64_t>(k, n_));
        using Entry = std::pair<std::int64_t, VertexId>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
        std::vector<char> seen(n_, 0);
        for (const VertexId m : centroids().members) {
            if (!seen[m]) {
                seen[m] = 1;
                frontier.emplace(psi(m), m);
            }
        }
        while (static_cast<int>(out.ordered.size()) < take && !frontier.empty()) {
            const auto [value, v] = frontier.top();
            frontier.pop();
            out.ordered.emplace_back(v, value);
            auto push = [&](VertexId w) {
                if (w != -1 && !seen[w]) {
                    seen[w] = 1;
                    frontier.emplace(psi(w), w);
                }
            };
            push(parent_[v]);
            for (const VertexId c : children_[v]) push(c);
        }
        out.boundary_tied =
            !frontier.empty() && frontier.top().first == out.ordered.back().second;
#ifndef NDEBUG
        TopKSet truth = top_k_by_sort(k);
        if (truth.ordered != out.ordered || truth.boundary_tied != out.boundary_tied) {
            return truth;
        }
#endif
        return out;
    }

    // Full psi_all sort; the frontier expansion must agree with this.
    TopKSet top_k_by_sort(int k) const {
        if (n_ < 2) throw DomainError("top_k needs at least two vertices");
        if (k < 1) throw DomainError("top_k needs k >= 1");
        const auto values = psi_all();
        std::vector<VertexId> order(n_);
        for (VertexId v = 0; v < n_; ++v) order[v] = v;
        std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
            return values[a] != values[b] ? values[a] < values[b] : a < b;
        });
        TopKSet out;
        out.k = k;
        const int take = static_cast<int>(std::min<std::int64_t>(k, n_));
        out.ordered.reserve(take);
        for (int i = 0; i < take; ++i) out.ordered.emplace_back(order[i], values[order[i]]);
        out.boundary_tied =
            take < n_ && values[order[take]] == out.ordered.back().second;
        return out;
    }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(static_cast<std::size_t>(n_) - 1);
        for (VertexId v = 1; v < n_; ++v) out.emplace_back(v, parent_[v]);
        return out;
    }

    // Text edge-list format: one "child parent" pair per line, birth order.
    // An empty document is the single-vertex tree.
    void write_edge_list(std::ostream& os) const {
        for (VertexId v = 1; v < n_; ++v) os << v << ' ' << parent_[v] << '\n';
    }

    static GrowingTree parse_edge_list(std::istream& is) {
        std::vector<Edge> edges;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            long long child = 0, parent = 0;
            if (!(ls >> child >> parent)) throw NonTreeInput("bad edge line: " + line);
            edges.emplace_back(static_cast<VertexId>(child), static_cast<VertexId>(parent));
        }
        return from_edges(edges);
    }

  private:
    void init_single() {
        n_ = 1;
        parent_ = {-1};
        children_ = {{}};
        size_down_ = {1};
        max_child_size_ = {0};
        heavy_child_ = {-1};
        degree_ = {0};
    }

    void check_vertex(VertexId v) const {
        if (v < 0 || v >= n_) throw UnknownVertex("vertex " + std::to_string(v));
    }

    VertexId n_ = 0;
    std::vector<VertexId> parent_;
    std::vector<std::vector<VertexId>> children_;
    std::vector<std::int32_t> size_down_;
    std::vector<std::int32_t> max_child_size_;
    std::vector<VertexId> heavy_child_;
    std::vector<std::int32_t> degree_;
};

} // namespace growtree
