#include <catch2/catch_amalgamated.hpp>

#include <gmpxx.h>

#include "growtree/models.hpp"
#include "growtree/walk.hpp"

using namespace growtree;

namespace {

// Exhaustive walk over all monotone below-diagonal paths (A,B) -> (m,m),
// checking that each path's step-product equals the shared probability.
struct PathEnumerator {
    const WalkParams& params;
    long m;
    mpq_class shared;
    mpz_class count = 0;

    void dfs(long i, long j, const mpq_class& prob) {
        if (i == m && j == m) {
            REQUIRE(prob == shared);
            ++count;
            return;
        }
        if (i + 1 <= m) dfs(i + 1, j, prob * step_right_prob(params, i, j));
        if (j + 1 < i || (i == m && j + 1 == m)) {
            dfs(i, j + 1, prob * step_up_prob(params, i, j));
        }
    }
};

mpz_class enumerate_and_check(const WalkParams& params, long A, long B, long m) {
    PathEnumerator e{params, m, path_prob(params, A, B, m)};
    e.dfs(A, B, mpq_class(1));
    return e.count;
}

} // namespace

TEST_CASE("model parameterizations") {
    const auto pa = params_for_model(ModelSpec::preferential());
    CHECK(pa.alpha == 2);
    CHECK(pa.beta == -1);
    CHECK(pa.u_ceil == 0);
    CHECK(step_right_prob(pa, 2, 3) == mpq_class(3, 8));

    const auto ua = params_for_model(ModelSpec::uniform());
    CHECK(ua.alpha == 1);
    CHECK(ua.beta == 0);
    CHECK(step_right_prob(ua, 2, 2) == mpq_class(1, 2));

    const auto d3 = params_for_model(ModelSpec::diffusion(3));
    CHECK(d3.alpha == 1);
    CHECK(d3.beta == 1);
    CHECK(d3.u_ceil == 1);
    CHECK(step_right_prob(d3, 1, 1) == mpq_class(1, 2));

    CHECK_THROWS_AS(params_for_model(ModelSpec::diffusion(2)), UnsupportedModel);
    CHECK_THROWS_AS(make_walk_params(0, 1), DomainError);
    CHECK_THROWS_AS(make_walk_params(1, -2), DomainError);
}

TEST_CASE("right and up probabilities are a distribution at every state") {
    for (const auto& spec :
         {ModelSpec::uniform(), ModelSpec::preferential(), ModelSpec::diffusion(3),
          ModelSpec::diffusion(7)}) {
        const auto params = params_for_model(spec);
        for (long i = 1; i <= 9; ++i) {
            for (long j = 1; j <= 9; ++j) {
                REQUIRE(step_right_prob(params, i, j) + step_up_prob(params, i, j) == 1);
                REQUIRE(step_right_prob(params, i, j) >= 0);
            }
        }
    }
}

TEST_CASE("theta counts fixed cases") {
    for (long a = 2; a <= 9; ++a) CHECK(theta_paths(a, 1, a) == 1);
    CHECK(theta_paths(2, 1, 3) == 1);
    CHECK(theta_paths(3, 1, 4) == 2);
    CHECK_THROWS_AS(theta_paths(2, 2, 4), DomainError);
    CHECK_THROWS_AS(theta_paths(1, 2, 4), DomainError);
    CHECK_THROWS_AS(theta_paths(5, 1, 4), DomainError);
}

TEST_CASE("theta and path probability match exhaustive enumeration") {
    const auto ua = params_for_model(ModelSpec::uniform());
    const auto pa = params_for_model(ModelSpec::preferential());
    const auto d3 = params_for_model(ModelSpec::diffusion(3));
    for (const auto* params : {&ua, &pa, &d3}) {
        for (long A = 2; A <= 5; ++A) {
            for (long B = 1; B < A; ++B) {
                for (long m = A; m <= 7; ++m) {
                    REQUIRE(enumerate_and_check(*params, A, B, m) == theta_paths(A, B, m));
                }
            }
        }
    }
}

TEST_CASE("path probability fixed values") {
    const auto ua = params_for_model(ModelSpec::uniform());
    CHECK(path_prob(ua, 2, 1, 2) == mpq_class(1, 3));
    CHECK(path_prob(ua, 3, 1, 3) == mpq_class(1, 10));
    CHECK_THROWS_AS(path_prob(ua, 2, 2, 2), DomainError);
}

TEST_CASE("first-hit terms telescope for uniform attachment at A=2") {
    const auto ua = params_for_model(ModelSpec::uniform());
    for (long m = 2; m <= 10; ++m) {
        const mpq_class expected(1, (2 * m - 1) * (2 * m - 3));
        REQUIRE(hit_term_exact(ua, 2, m) == expected);
    }
}

TEST_CASE("series reaches the telescoped limit") {
    const auto ua = params_for_model(ModelSpec::uniform());
    const auto result = hit_prob_series(ua, 2, 10000);
    CHECK(std::fabs(result.value - 0.5) < 1e-4);
    CHECK(result.value < 0.5);
    CHECK(result.tail_bound > 0.0);

    // partial sums grow with the truncation and stay below 1
    double prev = 0.0;
    for (const long m : {4L, 16L, 64L, 256L}) {
        const double v = hit_prob_series(ua, 3, m).value;
        CHECK(v >= prev);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK_THROWS_AS(hit_prob_series(ua, 1, 100), DomainError);
}

TEST_CASE("series terms match the exact decomposition") {
    // the double-precision series reproduces the rational terms it sums
    const auto d3 = params_for_model(ModelSpec::diffusion(3));
    double direct = 0.0;
    for (long m = 4; m <= 40; ++m) direct += hit_term_exact(d3, 4, m).get_d();
    const double series = hit_prob_series(d3, 4, 40).value;
    CHECK(std::fabs(series - direct) < 1e-13);
}

TEST_CASE("dynamic program agrees with the series") {
    for (const auto& spec :
         {ModelSpec::uniform(), ModelSpec::preferential(), ModelSpec::diffusion(3)}) {
        const auto params = params_for_model(spec);
        for (long A = 2; A <= 8; ++A) {
            const auto series = hit_prob_series(params, A, 20000);
            const auto dp = hit_prob_dp(params, A, 3000);
            INFO(model_name(spec.kind) << " A=" << A);
            REQUIRE(std::fabs(series.value - dp.value) <=
                    1e-10 + series.tail_bound + dp.tail_bound);
        }
    }
    const auto ua = params_for_model(ModelSpec::uniform());
    CHECK(std::fabs(hit_prob_dp(ua, 2).value - 0.5) < 1e-3);
}

TEST_CASE("envelope decays and fits a small polynomial degree") {
    const auto ua = params_for_model(ModelSpec::uniform());
    const auto report = envelope_check(ua, 2, 16);
    CHECK(report.monotone);
    CHECK(report.gamma <= ua.u_ceil + 3);
    CHECK(report.values.front() <= 1.0);
    CHECK(report.values.back() > 0.0);
}
