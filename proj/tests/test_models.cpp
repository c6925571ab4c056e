#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "growtree/models.hpp"
#include "growtree/rng.hpp"
#include "growtree/tree.hpp"

using namespace growtree;

namespace {

std::vector<double> parent_frequencies(const ModelSpec& spec, const GrowingTree& tree,
                                       int trials, std::uint64_t seed) {
    std::vector<double> counts(tree.n(), 0.0);
    RngStream rng(seed, 0);
    for (int i = 0; i < trials; ++i) counts[choose_parent(spec, tree, rng)] += 1.0;
    for (double& c : counts) c /= trials;
    return counts;
}

void check_within_4_sigma(double observed, double expected, int trials) {
    const double sigma = std::sqrt(expected * (1.0 - expected) / trials);
    INFO("observed " << observed << " expected " << expected << " sigma " << sigma);
    CHECK(std::fabs(observed - expected) <= 4.0 * sigma);
}

} // namespace

TEST_CASE("uniform attachment picks every vertex equally") {
    const auto tree = GrowingTree::from_edges({{1, 0}, {2, 0}});
    const int trials = 100000;
    const auto freq = parent_frequencies(ModelSpec::uniform(), tree, trials, 11);
    for (VertexId v = 0; v < 3; ++v) check_within_4_sigma(freq[v], 1.0 / 3.0, trials);
}

TEST_CASE("preferential attachment weights by degree") {
    const auto tree = GrowingTree::from_edges({{1, 0}, {2, 0}});
    const int trials = 100000;
    const auto freq = parent_frequencies(ModelSpec::preferential(), tree, trials, 12);
    check_within_4_sigma(freq[0], 2.0 / 4.0, trials);
    check_within_4_sigma(freq[1], 1.0 / 4.0, trials);
    check_within_4_sigma(freq[2], 1.0 / 4.0, trials);
}

TEST_CASE("diffusion weights by free host slots") {
    const GrowingTree lone;
    RngStream rng(13, 0);
    CHECK(choose_parent(ModelSpec::diffusion(3), lone, rng) == 0);

    const auto star3 = GrowingTree::from_edges({{1, 0}, {2, 0}});
    const int trials = 100000;
    const auto freq = parent_frequencies(ModelSpec::diffusion(3), star3, trials, 14);
    check_within_4_sigma(freq[0], 1.0 / 5.0, trials);
    check_within_4_sigma(freq[1], 2.0 / 5.0, trials);

    // a vertex already at host degree is invalid input
    const auto star4 = GrowingTree::from_edges({{1, 0}, {2, 0}, {3, 0}});
    RngStream rng2(15, 0);
    CHECK_THROWS_AS(choose_parent(ModelSpec::diffusion(2), star4, rng2), DegreeOverflow);
}

TEST_CASE("sampler boundary equals (d-2)n + 2 at every step") {
    for (const int d : {2, 3, 5}) {
        ParentSampler sampler(ModelSpec::diffusion(d), {});
        RngStream rng(16, static_cast<std::uint64_t>(d));
        for (int i = 0; i < 400; ++i) {
            sampler.step(rng);
            REQUIRE(sampler.free_slots() ==
                    static_cast<std::int64_t>(d - 2) * sampler.n() + 2);
        }
    }
}

TEST_CASE("sampler and single-shot draw share one law") {
    // PA from the 3-star: compare frequencies over many one-step draws
    const auto seed = make_star_hub(2);
    const int trials = 100000;
    std::vector<double> freq(3, 0.0);
    for (int i = 0; i < trials; ++i) {
        ParentSampler sampler(ModelSpec::preferential(), seed);
        RngStream rng(17, static_cast<std::uint64_t>(i));
        freq[sampler.step(rng)] += 1.0;
    }
    for (double& f : freq) f /= trials;
    check_within_4_sigma(freq[0], 0.5, trials);
    check_within_4_sigma(freq[1], 0.25, trials);
}

TEST_CASE("star hub seeds") {
    CHECK(make_star_hub(1) == std::vector<Edge>{{1, 0}});
    const auto star4 = GrowingTree::from_edges(make_star_hub(3));
    CHECK(star4.n() == 4);
    CHECK(star4.degree(0) == 3);
    CHECK(star4.psi(0) == 1);
    const auto c = GrowingTree::from_edges(make_star_hub(5)).centroids();
    CHECK(c.members == std::vector<VertexId>{0});
    CHECK_THROWS_AS(make_star_hub(0), DomainError);
}

TEST_CASE("r-ball seeds") {
    CHECK(rball_size(3, 0) == 1);
    CHECK(rball_size(3, 1) == 4);
    CHECK(rball_size(3, 2) == 10);
    CHECK(make_rball(3, 0).empty());

    const auto ball = GrowingTree::from_edges(make_rball(3, 2));
    REQUIRE(ball.n() == 10);
    // interior vertices carry host degree, level-2 leaves degree 1
    std::vector<int> depth(ball.n(), 0);
    for (VertexId v = 1; v < ball.n(); ++v) depth[v] = depth[ball.parent(v)] + 1;
    for (VertexId v = 0; v < ball.n(); ++v) {
        if (depth[v] < 2) {
            REQUIRE(ball.degree(v) == 3);
        } else {
            REQUIRE(depth[v] == 2);
            REQUIRE(ball.degree(v) == 1);
        }
    }
    CHECK_THROWS_AS(make_rball(2, 1), DomainError);
    CHECK_THROWS_AS(make_rball(3, 2, 5), OverflowError);
}

TEST_CASE("seed graph compatibility is validated") {
    ModelSpec bad = ModelSpec::uniform();
    bad.seed = {SeedGraph::Kind::RBall, 0, 1};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    ModelSpec bad2 = ModelSpec::diffusion(3);
    bad2.seed = {SeedGraph::Kind::StarHub, 2, 0};
    CHECK_THROWS_AS(bad2.validate(), DomainError);
}

TEST_CASE("grow base cases and determinism") {
    RngStream rng(21, 0);
    const auto p2 = grow(ModelSpec::uniform(), 2, rng);
    CHECK(p2.n() == 2);
    CHECK(p2.parent(1) == 0);

    RngStream r1(99, 5), r2(99, 5);
    const auto a = grow(ModelSpec::preferential(), 20000, r1);
    const auto b = grow(ModelSpec::preferential(), 20000, r2);
    REQUIRE(a.n() == b.n());
    for (VertexId v = 1; v < a.n(); ++v) REQUIRE(a.parent(v) == b.parent(v));

    RngStream r3(99, 6);
    const auto c = grow(ModelSpec::preferential(), 20000, r3);
    bool identical = true;
    for (VertexId v = 1; v < a.n(); ++v) identical = identical && a.parent(v) == c.parent(v);
    CHECK_FALSE(identical);
}

TEST_CASE("grow with hooks consumes the rng identically") {
    ModelSpec spec = ModelSpec::preferential();
    spec.seed = {SeedGraph::Kind::StarHub, 3, 0};
    RngStream r1(31, 0), r2(31, 0);
    int events = 0;
    GrowHooks hooks;
    hooks.on_step = [&](const StepEvent& e) {
        ++events;
        CHECK(e.step == e.new_vertex + 1);
    };
    const auto with_hooks = grow(spec, 500, r1, &hooks);
    const auto bulk = grow(spec, 500, r2);
    CHECK(events == 496);
    for (VertexId v = 1; v < 500; ++v) REQUIRE(with_hooks.parent(v) == bulk.parent(v));
}

TEST_CASE("two-regular diffusion grows a path") {
    RngStream rng(7, 3);
    const auto t = grow(ModelSpec::diffusion(2), 100, rng);
    REQUIRE(t.n() == 100);
    int leaves = 0;
    for (VertexId v = 0; v < t.n(); ++v) {
        REQUIRE(t.degree(v) <= 2);
        leaves += t.degree(v) == 1;
    }
    CHECK(leaves == 2);
}

TEST_CASE("diffusion degrees never exceed the host degree") {
    for (const int d : {3, 4}) {
        RngStream rng(8, static_cast<std::uint64_t>(d));
        ModelSpec spec = ModelSpec::diffusion(d);
        spec.seed = {SeedGraph::Kind::RBall, 0, 1};
        const auto t = grow(spec, 2000, rng);
        for (VertexId v = 0; v < t.n(); ++v) REQUIRE(t.degree(v) <= d);
    }
}

TEST_CASE("n_target below the seed size is rejected") {
    ModelSpec spec = ModelSpec::preferential();
    spec.seed = {SeedGraph::Kind::StarHub, 5, 0};
    RngStream rng(1, 0);
    CHECK_THROWS_AS(grow(spec, 3, rng), DomainError);
}
