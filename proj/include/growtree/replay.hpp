#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

#include "growtree/errors.hpp"
#include "growtree/tree.hpp"

namespace growtree {

// Replays a fully sampled attachment sequence and maintains the centroid set
// online. Vertices arrive in birth order, so the current tree is always a
// prefix of the final one; subtree sizes at the current time are range sums
// over the final Euler tour, one Fenwick update per insertion.
//
// The centroid update is O(log n) per step: the new leaf grows exactly one
// component around the current centroid, the centroid moves at most one edge
// (only into odd sizes), and a two-member set appears exactly when the grown
// component holds exactly half the vertices.
class TreeReplay {
  public:
    explicit TreeReplay(std::vector<VertexId> parents) : parent_(std::move(parents)) {
        const auto n = static_cast<VertexId>(parent_.size());
        if (n < 1 || parent_[0] != -1) throw DomainError("parents[0] must be the root");
        child_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (VertexId v = 1; v < n; ++v) {
            if (parent_[v] < 0 || parent_[v] >= v) throw NonTreeInput("bad parent order");
            ++child_offset_[static_cast<std::size_t>(parent_[v]) + 1];
        }
        for (std::size_t i = 1; i < child_offset_.size(); ++i) {
            child_offset_[i] += child_offset_[i - 1];
        }
        child_.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
        {
            std::vector<std::int32_t> cursor(child_offset_.begin(), child_offset_.end() - 1);
            for (VertexId v = 1; v < n; ++v) {
                child_[static_cast<std::size_t>(cursor[parent_[v]]++)] = v;
            }
        }
        tin_.assign(n, 0);
        tout_.assign(n, 0);
        std::vector<std::pair<VertexId, std::int32_t>> stack{{0, 0}};
        std::int32_t timer = 0;
        while (!stack.empty()) {
            auto& [v, idx] = stack.back();
            if (idx == 0) tin_[v] = timer++;
            const std::int32_t begin = child_offset_[v];
            const std::int32_t end = child_offset_[static_cast<std::size_t>(v) + 1];
            if (begin + idx < end) {
                const VertexId c = child_[static_cast<std::size_t>(begin + idx)];
                ++idx;
                stack.emplace_back(c, 0);
            } else {
                tout_[v] = timer;
                stack.pop_back();
            }
        }
        fenwick_.assign(static_cast<std::size_t>(n) + 1, 0);
    }

    struct Step {
        std::int64_t n = 0; // tree size after the insertion
        VertexId vertex = -1;
        VertexId parent = -1;
        bool centroid_changed = false;
        std::array<VertexId, 2> members{-1, -1};
        int member_count = 0;
        std::int64_t psi_value = 0;
        // size of the subtree hanging from the new leaf toward the previous
        // centroid, i.e. everything except the grown component
        std::int64_t toward_old_centroid = 0;
    };

    // Make the first seed_size vertices present and locate their centroid.
    void reset(std::int64_t seed_size) {
        if (seed_size < 1 || seed_size > static_cast<std::int64_t>(parent_.size())) {
            throw DomainError("bad seed size");
        }
        std::fill(fenwick_.begin(), fenwick_.end(), 0);
        n_now_ = 0;
        for (VertexId v = 0; v < seed_size; ++v) {
            bit_add(tin_[v]);
            ++n_now_;
        }
        VertexId u = 0;
        for (;;) {
            const VertexId heavy = heaviest_child(u);
            if (heavy == -1 || 2 * subtree_now(heavy) <= n_now_) break;
            u = heavy;
        }
        primary_ = u;
        psi_ = psi_now_full(u);
        members_ = {u, -1};
        member_count_ = 1;
        if (n_now_ >= 2 && 2 * psi_ == n_now_) {
            const VertexId co = co_centroid_direction(u);
            assert(co != -1);
            set_members(u, co);
        }
        if (n_now_ == 1) psi_ = 0;
    }

    // Insert the next vertex and refresh the centroid state.
    Step step() {
        const auto x = static_cast<VertexId>(n_now_);
        if (x >= static_cast<VertexId>(parent_.size())) throw DomainError("replay exhausted");
        Step out;
        out.vertex = x;
        out.parent = parent_[x];
        const std::array<VertexId, 2> before = members_;
        const int before_count = member_count_;

        bit_add(tin_[x]);
        ++n_now_;
        out.n = n_now_;

        // component of T \ primary that received the leaf
        const VertexId u = primary_;
        std::int64_t grown = 0;
        VertexId toward = -1;
        if (is_ancestor(u, x)) {
            const VertexId c = child_toward(u, x);
            grown = subtree_now(c);
            toward = c;
        } else {
            grown = n_now_ - subtree_now(u);
            toward = parent_[u];
        }
        out.toward_old_centroid = n_now_ - grown;

        if (2 * grown > n_now_) {
            // the grown side outweighs the rest; slide one edge into it
            primary_ = toward;
            psi_ = n_now_ - grown;
            members_ = {toward, -1};
            member_count_ = 1;
        } else {
            psi_ = std::max(psi_, grown);
            if (n_now_ % 2 == 0 && 2 * grown == n_now_) {
                set_members(u, toward);
            } else {
                members_ = {u, -1};
                member_count_ = 1;
            }
        }
        out.members = members_;
        out.member_count = member_count_;
        out.psi_value = psi_;
        out.centroid_changed =
            member_count_ != before_count || members_[0] != before[0] ||
            (member_count_ == 2 && members_[1] != before[1]);
        return out;
    }

    std::int64_t n_now() const { return n_now_; }
    VertexId primary() const { return primary_; }
    VertexId parent_of(VertexId v) const { return parent_[static_cast<std::size_t>(v)]; }
    std::int64_t psi_value() const { return psi_; }
    int member_count() const { return member_count_; }
    std::array<VertexId, 2> members() const { return members_; }

    bool contains_member(VertexId v) const {
        return members_[0] == v || (member_count_ == 2 && members_[1] == v);
    }

    // Size, at the current time, of the component of T \ v containing the
    // most recent vertex x (x must already be present and distinct from v).
    std::int64_t component_of_last(VertexId v, VertexId x) const {
        if (is_ancestor(v, x)) return subtree_now(child_toward(v, x));
        return n_now_ - subtree_now(v);
    }

    // psi of v at the current time by scanning its present components.
    std::int64_t psi_now_full(VertexId v) const {
        std::int64_t best = n_now_ - subtree_now(v);
        const std::int32_t begin = child_offset_[v];
        const std::int32_t end = child_offset_[static_cast<std::size_t>(v) + 1];
        for (std::int32_t i = begin; i < end; ++i) {
            const VertexId c = child_[static_cast<std::size_t>(i)];
            if (c >= n_now_) break; // children sorted by birth; later ones absent
            best = std::max(best, subtree_now(c));
        }
        return best;
    }

    // psi of every present vertex, computed from the parent prefix alone.
    // Does not touch the Fenwick structure, so it doubles as a cross-check.
    std::vector<std::int64_t> psi_all_snapshot() const {
        const auto n = static_cast<VertexId>(n_now_);
        std::vector<std::int32_t> size(n, 1), heaviest(n, 0);
        for (VertexId v = n - 1; v >= 1; --v) {
            const VertexId p = parent_[v];
            size[p] += size[v];
            heaviest[p] = std::max(heaviest[p], size[v]);
        }
        std::vector<std::int64_t> psi(n);
        for (VertexId v = 0; v < n; ++v) {
            psi[v] = std::max<std::int64_t>(n - size[v], heaviest[v]);
        }
        return psi;
    }

  private:
    void bit_add(std::int32_t pos) {
        for (std::int32_t i = pos + 1; i < static_cast<std::int32_t>(fenwick_.size()); i += i & -i) {
            ++fenwick_[static_cast<std::size_t>(i)];
        }
    }

    std::int64_t bit_prefix(std::int32_t count) const {
        std::int64_t sum = 0;
        for (std::int32_t i = count; i > 0; i -= i & -i) {
            sum += fenwick_[static_cast<std::size_t>(i)];
        }
        return sum;
    }

    std::int64_t subtree_now(VertexId v) const {
        return bit_prefix(tout_[v]) - bit_prefix(tin_[v]);
    }

    bool is_ancestor(VertexId a, VertexId x) const {
        return tin_[a] <= tin_[x] && tin_[x] < tout_[a];
    }

    // child of a on the path to the descendant x
    VertexId child_toward(VertexId a, VertexId x) const {
        const std::int32_t begin = child_offset_[a];
        const std::int32_t end = child_offset_[static_cast<std::size_t>(a) + 1];
        auto first = child_.begin() + begin;
        auto last = child_.begin() + end;
        // children are in DFS order, so tin is increasing across them
        auto it = std::upper_bound(first, last, tin_[x], [this](std::int32_t t, VertexId c) {
            return t < tin_[c];
        });
        assert(it != first);
        return *(it - 1);
    }

    VertexId heaviest_child(VertexId v) const {
        const std::int32_t begin = child_offset_[v];
        const std::int32_t end = child_offset_[static_cast<std::size_t>(v) + 1];
        VertexId best = -1;
        std::int64_t best_size = 0;
        for (std::int32_t i = begin; i < end; ++i) {
            const VertexId c = child_[static_cast<std::size_t>(i)];
            if (c >= n_now_) break;
            const std::int64_t s = subtree_now(c);
            if (s > best_size) {
                best_size = s;
                best = c;
            }
        }
        return best;
    }

    // neighbor of u whose component holds exactly half the vertices
    VertexId co_centroid_direction(VertexId u) const {
        if (parent_[u] != -1 && 2 * (n_now_ - subtree_now(u)) == n_now_) return parent_[u];
        const std::int32_t begin = child_offset_[u];
        const std::int32_t end = child_offset_[static_cast<std::size_t>(u) + 1];
        for (std::int32_t i = begin; i < end; ++i) {
            const VertexId c = child_[static_cast<std::size_t>(i)];
            if (c >= n_now_) break;
            if (2 * subtree_now(c) == n_now_) return c;
        }
        return -1;
    }

    void set_members(VertexId a, VertexId b) {
        if (a > b) std::swap(a, b);
        members_ = {a, b};
        member_count_ = 2;
    }

    std::vector<VertexId> parent_;
    std::vector<std::int32_t> child_offset_;
    std::vector<VertexId> child_;
    std::vector<std::int32_t> tin_, tout_;
    std::vector<std::int32_t> fenwick_;
    std::int64_t n_now_ = 0;
    VertexId primary_ = 0;
    std::int64_t psi_ = 0;
    int member_count_ = 1;
    std::array<VertexId, 2> members_{0, -1};
};

} // namespace growtree
