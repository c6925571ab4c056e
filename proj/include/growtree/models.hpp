#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "growtree/errors.hpp"
#include "growtree/rng.hpp"
#include "growtree/tree.hpp"

namespace growtree {

enum class ModelKind { UniformAttachment, PreferentialAttachment, DiffusionRegular };

struct SeedGraph {
    enum class Kind { SingleVertex, StarHub, RBall };
    Kind kind = Kind::SingleVertex;
    int k = 0; // StarHub leaf count
    int r = 0; // RBall radius
};

struct ModelSpec {
    ModelKind kind = ModelKind::UniformAttachment;
    int d = 0; // DiffusionRegular host degree, >= 2
    SeedGraph seed;

    void validate() const {
        if (kind == ModelKind::DiffusionRegular && d < 2) {
            throw DomainError("diffusion requires host degree d >= 2");
        }
        if (seed.kind == SeedGraph::Kind::RBall && kind != ModelKind::DiffusionRegular) {
            throw DomainError("r-ball seeds only apply to diffusion");
        }
        if (seed.kind == SeedGraph::Kind::StarHub && kind == ModelKind::DiffusionRegular) {
            throw DomainError("star hub seeds only apply to attachment models");
        }
        if (seed.kind == SeedGraph::Kind::StarHub && seed.k < 1) {
            throw DomainError("star hub needs k >= 1");
        }
        if (seed.kind == SeedGraph::Kind::RBall && seed.r < 0) {
            throw DomainError("r-ball needs r >= 0");
        }
    }

    static ModelSpec uniform() { return {ModelKind::UniformAttachment, 0, {}}; }
    static ModelSpec preferential() { return {ModelKind::PreferentialAttachment, 0, {}}; }
    static ModelSpec diffusion(int d) { return {ModelKind::DiffusionRegular, d, {}}; }
};

inline const char* model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::UniformAttachment: return "ua";
        case ModelKind::PreferentialAttachment: return "pa";
        case ModelKind::DiffusionRegular: return "diff";
    }
    return "?";
}

// Star with k leaves attached to vertex 0; k+1 vertices in total.
inline std::vector<Edge> make_star_hub(int k) {
    if (k < 1) throw DomainError("star hub needs k >= 1");
    std::vector<Edge> edges;
    edges.reserve(k);
    for (VertexId v = 1; v <= k; ++v) edges.emplace_back(v, 0);
    return edges;
}

// Number of host-tree vertices within distance r of a vertex:
// 1 + d((d-1)^r - 1)/(d-2).
inline std::int64_t rball_size(int d, int r) {
    if (d < 3) throw DomainError("r-ball needs d >= 3");
    if (r < 0) throw DomainError("r-ball needs r >= 0");
    std::int64_t size = 1, level = 1;
    for (int i = 0; i < r; ++i) {
        level *= (i == 0 ? d : d - 1);
        size += level;
        if (size > (1ll << 40)) throw OverflowError("r-ball size exceeds supported range");
    }
    return size;
}

// BFS-ordered ball of radius r in the d-regular host tree. Every vertex at
// distance < r ends with degree d; the level-r leaves keep degree 1.
inline std::vector<Edge> make_rball(int d, int r, std::int64_t max_vertices = 1 << 22) {
    const std::int64_t n = rball_size(d, r);
    if (n > max_vertices) throw OverflowError("r-ball size " + std::to_string(n) +
                                              " exceeds cap " + std::to_string(max_vertices));
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) - 1);
    VertexId next = 1;
    // frontier of the previous level, in birth order
    std::vector<VertexId> frontier{0};
    for (int level = 1; level <= r; ++level) {
        std::vector<VertexId> produced;
        for (const VertexId p : frontier) {
            const int fanout = (p == 0) ? d : d - 1;
            for (int i = 0; i < fanout; ++i) {
                edges.emplace_back(next, p);
                produced.push_back(next);
                ++next;
            }
        }
        frontier = std::move(produced);
    }
    assert(static_cast<std::int64_t>(edges.size()) + 1 == n);
    return edges;
}

inline std::vector<Edge> seed_edges(const ModelSpec& spec) {
    spec.validate();
    switch (spec.seed.kind) {
        case SeedGraph::Kind::SingleVertex: return {};
        case SeedGraph::Kind::StarHub: return make_star_hub(spec.seed.k);
        case SeedGraph::Kind::RBall: return make_rball(spec.d, spec.seed.r);
    }
    return {};
}

// Incremental attachment sampler. PA keeps the classic endpoint list (each
// vertex appears degree-many times); diffusion keeps one entry per free host
// slot, so a uniform pick over the list is exactly the model's law. Both are
// O(1) per step.
class ParentSampler {
  public:
    ParentSampler(const ModelSpec& spec, const std::vector<Edge>& seed)
        : kind_(spec.kind), d_(spec.d) {
        spec.validate();
        n_ = static_cast<VertexId>(seed.size()) + 1;
        if (kind_ == ModelKind::PreferentialAttachment) {
            endpoints_.reserve(2 * seed.size() + 16);
            for (const auto& [child, parent] : seed) {
                endpoints_.push_back(child);
                endpoints_.push_back(parent);
            }
        } else if (kind_ == ModelKind::DiffusionRegular) {
            std::vector<std::int32_t> degree(n_, 0);
            for (const auto& [child, parent] : seed) {
                ++degree[child];
                ++degree[parent];
            }
            slots_.reserve(static_cast<std::size_t>(d_) * n_);
            for (VertexId v = 0; v < n_; ++v) {
                if (degree[v] > d_) throw DegreeOverflow("seed vertex exceeds host degree");
                for (int i = degree[v]; i < d_; ++i) slots_.push_back(v);
            }
        }
    }

    VertexId n() const { return n_; }

    // Boundary of the infected set; equals (d-2)n + 2 at every step.
    std::int64_t free_slots() const { return static_cast<std::int64_t>(slots_.size()); }

    // Draw the parent for vertex n and update the bookkeeping.
    VertexId step(RngStream& rng) {
        VertexId parent = 0;
        switch (kind_) {
            case ModelKind::UniformAttachment:
                parent = static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n_)));
                break;
            case ModelKind::PreferentialAttachment:
                if (n_ == 1) {
                    parent = 0; // forced first attachment
                } else {
                    parent = endpoints_[rng.next_below(endpoints_.size())];
                }
                endpoints_.push_back(n_);
                endpoints_.push_back(parent);
                break;
            case ModelKind::DiffusionRegular: {
                const std::size_t pick = rng.next_below(slots_.size());
                parent = slots_[pick];
                slots_[pick] = slots_.back();
                slots_.pop_back();
                for (int i = 0; i < d_ - 1; ++i) slots_.push_back(n_);
                assert(free_slots() ==
                       static_cast<std::int64_t>(d_ - 2) * (n_ + 1) + 2);
                break;
            }
        }
        ++n_;
        return parent;
    }

  private:
    ModelKind kind_;
    int d_;
    VertexId n_ = 1;
    std::vector<VertexId> endpoints_; // PA
    std::vector<VertexId> slots_;     // diffusion
};

// Single-shot attachment draw from an explicit tree state. Same laws as the
// sampler; linear scan, intended for inspection and distribution tests.
inline VertexId choose_parent(const ModelSpec& spec, const GrowingTree& tree, RngStream& rng) {
    spec.validate();
    const VertexId n = tree.n();
    switch (spec.kind) {
        case ModelKind::UniformAttachment:
            return static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n)));
        case ModelKind::PreferentialAttachment: {
            if (n == 1) return 0;
            std::int64_t pick =
                static_cast<std::int64_t>(rng.next_below(2ull * (n - 1)));
            for (VertexId v = 0; v < n; ++v) {
                pick -= tree.degree(v);
                if (pick < 0) return v;
            }
            return n - 1; // unreachable
        }
        case ModelKind::DiffusionRegular: {
            std::int64_t total = 0;
            for (VertexId v = 0; v < n; ++v) {
                if (tree.degree(v) > spec.d) throw DegreeOverflow("vertex degree exceeds d");
                total += spec.d - tree.degree(v);
            }
            std::int64_t pick = static_cast<std::int64_t>(rng.next_below(total));
            for (VertexId v = 0; v < n; ++v) {
                pick -= spec.d - tree.degree(v);
                if (pick < 0) return v;
            }
            return n - 1; // unreachable
        }
    }
    throw DomainError("unknown model");
}

// Parent of every vertex in birth order, parents[0] == -1. Seed edges first,
// then sampled attachments up to n_target.
inline std::vector<VertexId> sample_parents(const ModelSpec& spec, std::int64_t n_target,
                                            RngStream& rng) {
    const auto seed = seed_edges(spec);
    const auto seed_n = static_cast<std::int64_t>(seed.size()) + 1;
    if (n_target < seed_n) throw DomainError("n_target smaller than the seed graph");
    std::vector<VertexId> parents(static_cast<std::size_t>(n_target), -1);
    for (const auto& [child, parent] : seed) parents[static_cast<std::size_t>(child)] = parent;
    ParentSampler sampler(spec, seed);
    for (std::int64_t v = seed_n; v < n_target; ++v) {
        parents[static_cast<std::size_t>(v)] = sampler.step(rng);
    }
    return parents;
}

struct StepEvent {
    std::int64_t step;  // tree size after the attachment
    VertexId new_vertex;
    VertexId parent;
    const CentroidSet* centroid; // non-null only when tracking is enabled
};

struct GrowHooks {
    std::function<void(const StepEvent&)> on_step;
    bool track_centroids = false;
};

// Grow a tree to n_target vertices. Without hooks the parents are sampled
// first and the tree is bulk-built, which avoids per-step path updates on
// deep trees; the RNG consumption is identical either way.
inline GrowingTree grow(const ModelSpec& spec, std::int64_t n_target, RngStream& rng,
                        const GrowHooks* hooks = nullptr) {
    if (!hooks || !hooks->on_step) {
        auto parents = sample_parents(spec, n_target, rng);
        std::vector<Edge> edges;
        edges.reserve(parents.size() - 1);
        for (std::size_t v = 1; v < parents.size(); ++v) {
            edges.emplace_back(static_cast<VertexId>(v), parents[v]);
        }
        return GrowingTree::from_edges(edges);
    }
    const auto seed = seed_edges(spec);
    const auto seed_n = static_cast<std::int64_t>(seed.size()) + 1;
    if (n_target < seed_n) throw DomainError("n_target smaller than the seed graph");
    GrowingTree tree = GrowingTree::from_edges(seed);
    ParentSampler sampler(spec, seed);
    for (std::int64_t step = seed_n + 1; step <= n_target; ++step) {
        const VertexId parent = sampler.step(rng);
        const VertexId v = tree.add_leaf(parent);
        CentroidSet centroid;
        if (hooks->track_centroids) centroid = tree.centroids();
        StepEvent event{step, v, parent, hooks->track_centroids ? &centroid : nullptr};
        hooks->on_step(event);
    }
    return tree;
}

} // namespace growtree
