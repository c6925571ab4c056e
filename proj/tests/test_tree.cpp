#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "growtree/brute_force.hpp"
#include "growtree/models.hpp"
#include "growtree/rng.hpp"
#include "growtree/tree.hpp"

using namespace growtree;

namespace {

GrowingTree chain(int n) {
    std::vector<Edge> edges;
    for (VertexId v = 1; v < n; ++v) edges.emplace_back(v, v - 1);
    return GrowingTree::from_edges(edges);
}

GrowingTree star(int n) {
    std::vector<Edge> edges;
    for (VertexId v = 1; v < n; ++v) edges.emplace_back(v, 0);
    return GrowingTree::from_edges(edges);
}

GrowingTree random_tree(ModelKind kind, int n, std::uint64_t seed, int d = 3) {
    ModelSpec spec;
    spec.kind = kind;
    spec.d = kind == ModelKind::DiffusionRegular ? d : 0;
    RngStream rng(seed, 0);
    return grow(spec, n, rng);
}

} // namespace

TEST_CASE("from_edges base cases") {
    const GrowingTree single = GrowingTree::from_edges({});
    CHECK(single.n() == 1);
    CHECK(single.parent(0) == -1);

    const GrowingTree s3 = star(3);
    CHECK(s3.n() == 3);
    CHECK(s3.size_down(0) == 3);
    CHECK(s3.degree(0) == 2);

    const GrowingTree p4 = chain(4);
    CHECK(p4.max_child_size(0) == 3);
}

TEST_CASE("from_edges rejects non-leaf-order input") {
    CHECK_THROWS_AS(GrowingTree::from_edges({{2, 0}}), NonTreeInput);
    CHECK_THROWS_AS(GrowingTree::from_edges({{1, 1}}), NonTreeInput);
    CHECK_THROWS_AS(GrowingTree::from_edges({{1, 0}, {2, 3}}), NonTreeInput);
    CHECK_THROWS_AS(GrowingTree::from_edges({{1, -1}}), NonTreeInput);
}

TEST_CASE("add_leaf updates the path caches") {
    GrowingTree t = star(3);
    const VertexId v = t.add_leaf(1);
    CHECK(v == 3);
    CHECK(t.n() == 4);
    CHECK(t.size_down(1) == 2);
    CHECK(t.size_down(0) == 4);
    CHECK(t.max_child_size(0) == 2);
    CHECK_THROWS_AS(t.add_leaf(99), UnknownVertex);

    GrowingTree p = chain(4);
    p.add_leaf(3);
    CHECK(p.n() == 5);
    CHECK(p.max_child_size(0) == 4);
}

TEST_CASE("degree sum is twice the edge count after every insertion") {
    RngStream rng(7, 0);
    GrowingTree t;
    for (int i = 0; i < 60; ++i) {
        t.add_leaf(static_cast<VertexId>(rng.next_below(t.n())));
        std::int64_t total = 0;
        for (VertexId v = 0; v < t.n(); ++v) total += t.degree(v);
        REQUIRE(total == 2 * (t.n() - 1));
    }
}

TEST_CASE("psi on small trees") {
    const GrowingTree p3 = chain(3);
    CHECK(p3.psi(1) == 1);
    const GrowingTree s5 = star(5);
    CHECK(s5.psi(0) == 1);
    CHECK(s5.psi(3) == 4);
    CHECK_THROWS_AS(s5.psi(9), UnknownVertex);
    CHECK_THROWS_AS(GrowingTree().psi(0), DomainError);
}

TEST_CASE("psi matches re-rooting brute force on a random tree") {
    const GrowingTree t = random_tree(ModelKind::UniformAttachment, 8, 42);
    for (VertexId u = 0; u < t.n(); ++u) CHECK(t.psi(u) == brute::psi(t, u));
}

TEST_CASE("centroids on fixed shapes") {
    const auto p4 = chain(4).centroids();
    CHECK(p4.members == std::vector<VertexId>{1, 2});
    CHECK(p4.psi_value == 2);

    const auto s6 = star(6).centroids();
    CHECK(s6.members == std::vector<VertexId>{0});
    CHECK(s6.psi_value == 1);

    const auto lone = GrowingTree().centroids();
    CHECK(lone.members == std::vector<VertexId>{0});
    CHECK(lone.psi_value == 0);
}

TEST_CASE("centroids match the exhaustive argmin on random trees") {
    const ModelKind kinds[] = {ModelKind::UniformAttachment, ModelKind::PreferentialAttachment,
                               ModelKind::DiffusionRegular};
    int two_centroid_cases = 0;
    for (const auto kind : kinds) {
        for (int trial = 0; trial < 170; ++trial) {
            RngStream rng(1000 + trial, static_cast<std::uint64_t>(kind));
            const int n = 2 + static_cast<int>(rng.next_below(11));
            const GrowingTree t = random_tree(kind, n, rng.next_u64());
            const auto fast = t.centroids();
            const auto truth = brute::centroids(t);
            REQUIRE(fast.members == truth.members);
            REQUIRE(fast.psi_value == truth.psi_value);
            REQUIRE(fast.members.size() >= 1);
            REQUIRE(fast.members.size() <= 2);
            REQUIRE(2 * fast.psi_value <= t.n());
            if (fast.members.size() == 2) {
                ++two_centroid_cases;
                const VertexId a = fast.members[0], b = fast.members[1];
                const bool adjacent = t.parent(a) == b || t.parent(b) == a;
                REQUIRE(adjacent);
                // each member's psi is the size of the component toward the other
                REQUIRE(brute::component_size(t, a, b) == t.psi(a));
                REQUIRE(brute::component_size(t, b, a) == t.psi(b));
            }
        }
    }
    CHECK(two_centroid_cases > 0);
}

TEST_CASE("psi_all equals per-vertex psi") {
    const GrowingTree p5 = chain(5);
    CHECK(p5.psi_all() == std::vector<std::int64_t>{4, 3, 2, 3, 4});

    const GrowingTree s4 = star(4);
    CHECK(s4.psi_all() == std::vector<std::int64_t>{1, 3, 3, 3});

    const GrowingTree t = random_tree(ModelKind::PreferentialAttachment, 200, 9001);
    const auto all = t.psi_all();
    for (VertexId u = 0; u < t.n(); ++u) REQUIRE(all[u] == t.psi(u));
}

TEST_CASE("top_k on fixed shapes") {
    const auto top = chain(5).top_k(3);
    REQUIRE(top.ordered.size() == 3);
    CHECK(top.ordered[0] == std::pair<VertexId, std::int64_t>{2, 2});
    CHECK(top.ordered[1] == std::pair<VertexId, std::int64_t>{1, 3});
    CHECK(top.ordered[2] == std::pair<VertexId, std::int64_t>{3, 3});
    CHECK_FALSE(top.boundary_tied);

    const auto all = chain(5).top_k(50);
    CHECK(all.ordered.size() == 5);
    CHECK_FALSE(all.boundary_tied);

    // ties at the boundary: star leaves share psi
    const auto tied = star(5).top_k(2);
    CHECK(tied.boundary_tied);

    CHECK_THROWS_AS(chain(5).top_k(0), DomainError);
    CHECK_THROWS_AS(GrowingTree().top_k(1), DomainError);
}

TEST_CASE("top_k equals the psi_all sort on random trees") {
    for (int trial = 0; trial < 120; ++trial) {
        RngStream rng(77 + trial, 3);
        const int n = 2 + static_cast<int>(rng.next_below(199));
        const int k = 1 + static_cast<int>(rng.next_below(10));
        const GrowingTree t =
            random_tree(trial % 2 ? ModelKind::UniformAttachment
                                  : ModelKind::PreferentialAttachment,
                        n, rng.next_u64());
        const auto fast = t.top_k(k);
        const auto truth = t.top_k_by_sort(k);
        REQUIRE(fast.ordered == truth.ordered);
        REQUIRE(fast.boundary_tied == truth.boundary_tied);
    }
}

TEST_CASE("psi moves by at most one per insertion and the centroid drifts by at most one edge") {
    RngStream rng(5150, 0);
    GrowingTree t;
    t.add_leaf(0);
    auto psi_before = t.psi_all();
    auto centroid_before = t.centroids();
    for (int i = 0; i < 200; ++i) {
        t.add_leaf(static_cast<VertexId>(rng.next_below(t.n())));
        const auto psi_after = t.psi_all();
        for (std::size_t u = 0; u < psi_before.size(); ++u) {
            const auto delta = psi_after[u] - psi_before[u];
            REQUIRE((delta == 0 || delta == 1));
        }
        const auto centroid_after = t.centroids();
        for (const VertexId m : centroid_after.members) {
            bool near = false;
            for (const VertexId old : centroid_before.members) {
                near = near || m == old || t.parent(m) == old || t.parent(old) == m;
            }
            REQUIRE(near);
        }
        psi_before = psi_after;
        centroid_before = centroid_after;
    }
}

TEST_CASE("edge list round trip") {
    const GrowingTree t = random_tree(ModelKind::UniformAttachment, 40, 31337);
    std::stringstream buffer;
    t.write_edge_list(buffer);
    const GrowingTree back = GrowingTree::parse_edge_list(buffer);
    REQUIRE(back.n() == t.n());
    for (VertexId v = 0; v < t.n(); ++v) REQUIRE(back.parent(v) == t.parent(v));

    std::stringstream empty;
    CHECK(GrowingTree::parse_edge_list(empty).n() == 1);
}
