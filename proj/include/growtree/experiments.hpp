#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "growtree/errors.hpp"
#include "growtree/models.hpp"
#include "growtree/replay.hpp"
#include "growtree/rng.hpp"
#include "growtree/tree.hpp"

namespace growtree {

struct ExperimentConfig {
    ModelSpec model;
    std::int64_t n_target = 10000;
    int top_k = 0; // 0 disables top-k tracking
    int replicates = 1000;
    std::uint64_t base_seed = 0;
    std::vector<std::int64_t> checkpoints; // empty selects a doubling schedule
    bool invariant_checks = true;
    bool topk_every_step = false;
    int jobs = 0; // 0 uses hardware concurrency

    void validate() const {
        model.validate();
        if (replicates < 1) throw ConfigError("replicates must be >= 1");
        if (n_target < 1) throw ConfigError("n_target must be >= 1");
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
            if (checkpoints[i] > n_target) throw ConfigError("checkpoint beyond n_target");
            if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
                throw ConfigError("checkpoints must be strictly increasing");
            }
        }
    }
};

struct ReplicateTrace {
    int replicate = 0;
    std::int64_t last_centroid_change = -1; // step of last centroid-set change, -1 if none
    std::int64_t last_root_flip = -1;       // last step the root's membership changed
    std::int64_t last_topk_change = -1;     // observed at checkpoint granularity
    std::int64_t centroid_change_count = 0;
    std::vector<VertexId> final_centroid;
    std::int64_t final_psi = 0;
    bool v1_is_final_centroid = false;
    bool v1_always_centroid = true;
    std::int64_t first_v1_loss = -1;
    std::vector<std::pair<VertexId, std::int64_t>> final_topk;
    bool final_topk_tied = false;
    std::vector<std::string> invariant_violations;
};

struct PersistenceSummary {
    std::int64_t n_target = 0;
    int replicates = 0;
    double frac_change_after_half = 0.0;    // centroid-set statistic
    double frac_root_flip_after_half = 0.0; // root-membership statistic
    double frac_v1_final = 0.0;
    double frac_v1_always = 0.0;
    double mean_change_count = 0.0;
    std::int64_t total_violations = 0;
};

struct PersistenceResult {
    std::vector<ReplicateTrace> traces;
    PersistenceSummary summary;
};

namespace detail {

inline void run_indexed(int count, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        jobs = hw > 0 ? static_cast<int>(hw) : 1;
    }
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count || failed.load()) break;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline std::vector<std::int64_t> default_checkpoints(std::int64_t seed_n, std::int64_t n_target) {
    std::vector<std::int64_t> out;
    for (std::int64_t c = std::max<std::int64_t>(seed_n + 1, 8); c < n_target; c *= 2) {
        out.push_back(c);
    }
    if (out.empty() || out.back() != n_target) out.push_back(n_target);
    return out;
}

// Top-k vertex set at the current replay time, by (psi, birth order).
inline std::vector<VertexId> topk_ids(const std::vector<std::int64_t>& psi, int k,
                                      std::vector<std::pair<VertexId, std::int64_t>>* ordered,
                                      bool* tied) {
    const auto n = static_cast<VertexId>(psi.size());
    std::vector<VertexId> order(n);
    for (VertexId v = 0; v < n; ++v) order[v] = v;
    const int take = static_cast<int>(std::min<std::int64_t>(k, n));
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&](VertexId a, VertexId b) {
                          return psi[a] != psi[b] ? psi[a] < psi[b] : a < b;
                      });
    std::vector<VertexId> ids(order.begin(), order.begin() + take);
    if (ordered) {
        ordered->clear();
        for (const VertexId v : ids) ordered->emplace_back(v, psi[v]);
    }
    if (tied) {
        *tied = false;
        if (take < n) {
            const std::int64_t kth = psi[ids.back()];
            std::int64_t not_above = 0;
            for (VertexId v = 0; v < n; ++v) not_above += (psi[v] <= kth);
            *tied = not_above > take;
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

// psi values of a fixed watched pair, advanced one insertion at a time; the
// gap between the two may move by at most one per step.
struct WatchedPair {
    VertexId a = -1, b = -1;
    std::int64_t psi_a = 0, psi_b = 0;
};

} // namespace detail

// Grow `replicates` trees to n_target and replay each one, recording when the
// centroid set changes, when the root's membership changes, and (at the
// checkpoints) when the top-k set changes. Replicates are independent streams
// of base_seed and are merged by index, so the aggregate does not depend on
// scheduling.
inline PersistenceResult run_persistence(const ExperimentConfig& config) {
    config.validate();
    const auto seed = seed_edges(config.model);
    const auto seed_n = static_cast<std::int64_t>(seed.size()) + 1;
    if (config.n_target < seed_n) throw ConfigError("n_target smaller than the seed graph");
    const auto checkpoints = config.checkpoints.empty()
                                 ? detail::default_checkpoints(seed_n, config.n_target)
                                 : config.checkpoints;

    PersistenceResult result;
    result.traces.assign(static_cast<std::size_t>(config.replicates), {});

    detail::run_indexed(config.replicates, config.jobs, [&](int rep) {
        RngStream rng(config.base_seed, static_cast<std::uint64_t>(rep));
        TreeReplay replay(sample_parents(config.model, config.n_target, rng));
        replay.reset(seed_n);

        ReplicateTrace trace;
        trace.replicate = rep;
        bool root_in = replay.contains_member(0);
        trace.v1_always_centroid = root_in;
        if (!root_in) trace.first_v1_loss = seed_n;

        std::vector<detail::WatchedPair> watched;
        std::int64_t next_watch = seed_n + 1;

        std::vector<VertexId> topk_prev;
        if (config.top_k > 0 && seed_n >= 2) {
            topk_prev = detail::topk_ids(replay.psi_all_snapshot(), config.top_k,
                                         nullptr, nullptr);
        }
        std::size_t checkpoint_at = 0;

        for (std::int64_t n = seed_n + 1; n <= config.n_target; ++n) {
            const std::int64_t psi_before = replay.psi_value();
            const VertexId primary_before = replay.primary();
            const auto step = replay.step();

            if (step.centroid_changed) {
                trace.last_centroid_change = step.n;
                ++trace.centroid_change_count;
            }
            const bool root_now = replay.contains_member(0);
            if (root_now != root_in) {
                trace.last_root_flip = step.n;
                root_in = root_now;
            }
            if (!root_now && trace.v1_always_centroid) {
                trace.v1_always_centroid = false;
                trace.first_v1_loss = step.n;
            }

            if (config.invariant_checks) {
                // the subtree hanging from the new leaf toward the previous
                // centroid spans at least half of the previous tree
                if (2 * step.toward_old_centroid < step.n - 1) {
                    trace.invariant_violations.push_back(
                        "half-bound at step " + std::to_string(step.n));
                }
                if (2 * step.psi_value > step.n) {
                    trace.invariant_violations.push_back(
                        "psi exceeds n/2 at step " + std::to_string(step.n));
                }
                const VertexId p_now = replay.primary();
                const bool drift_ok = p_now == primary_before ||
                                      replay.parent_of(p_now) == primary_before ||
                                      replay.parent_of(primary_before) == p_now;
                if (!drift_ok) {
                    trace.invariant_violations.push_back(
                        "centroid drift > 1 at step " + std::to_string(step.n));
                }
                const std::int64_t grown = step.n - step.toward_old_centroid;
                for (auto& pair : watched) {
                    const std::int64_t gap_before = pair.psi_a - pair.psi_b;
                    pair.psi_a = std::max(pair.psi_a,
                                          replay.component_of_last(pair.a, step.vertex));
                    pair.psi_b = std::max(pair.psi_b,
                                          replay.component_of_last(pair.b, step.vertex));
                    const std::int64_t jump = (pair.psi_a - pair.psi_b) - gap_before;
                    if (jump > 1 || jump < -1) {
                        trace.invariant_violations.push_back(
                            "psi gap jump at step " + std::to_string(step.n));
                    }
                }
                if (step.n == next_watch && watched.size() < 12) {
                    detail::WatchedPair pair;
                    pair.a = step.vertex;
                    pair.psi_a = step.n - 1;
                    pair.b = primary_before;
                    pair.psi_b = std::max(psi_before, grown);
                    watched.push_back(pair);
                    next_watch *= 2;
                }
            }

            const bool at_checkpoint =
                config.topk_every_step ||
                (checkpoint_at < checkpoints.size() && checkpoints[checkpoint_at] == step.n);
            if (checkpoint_at < checkpoints.size() && checkpoints[checkpoint_at] == step.n) {
                ++checkpoint_at;
            }
            if (config.top_k > 0 && at_checkpoint && step.n >= 2) {
                auto ids = detail::topk_ids(replay.psi_all_snapshot(), config.top_k,
                                            nullptr, nullptr);
                if (ids != topk_prev) {
                    trace.last_topk_change = step.n;
                    topk_prev = std::move(ids);
                }
            }
        }

        const auto members = replay.members();
        for (int i = 0; i < replay.member_count(); ++i) trace.final_centroid.push_back(members[i]);
        trace.final_psi = replay.psi_value();
        trace.v1_is_final_centroid = replay.contains_member(0);
        if (config.top_k > 0 && config.n_target >= 2) {
            detail::topk_ids(replay.psi_all_snapshot(), config.top_k, &trace.final_topk,
                             &trace.final_topk_tied);
        }
        result.traces[static_cast<std::size_t>(rep)] = std::move(trace);
    });

    auto& s = result.summary;
    s.n_target = config.n_target;
    s.replicates = config.replicates;
    const std::int64_t half = config.n_target / 2;
    for (const auto& t : result.traces) {
        s.frac_change_after_half += (t.last_centroid_change > half);
        s.frac_root_flip_after_half += (t.last_root_flip > half);
        s.frac_v1_final += t.v1_is_final_centroid;
        s.frac_v1_always += t.v1_always_centroid;
        s.mean_change_count += static_cast<double>(t.centroid_change_count);
        s.total_violations += static_cast<std::int64_t>(t.invariant_violations.size());
    }
    const auto r = static_cast<double>(config.replicates);
    s.frac_change_after_half /= r;
    s.frac_root_flip_after_half /= r;
    s.frac_v1_final /= r;
    s.frac_v1_always /= r;
    s.mean_change_count /= r;
    return result;
}

struct HubPoint {
    int hub_k = 0;  // star leaves (attachment models)
    int ball_r = 0; // ball radius (diffusion)
    int replicates = 0;
    double frac_v1_final = 0.0;
    double frac_v1_always = 0.0;
    double frac_not_always = 0.0;
    std::int64_t total_violations = 0;
};

// Seed-size sweep: each grid entry grows replicated trees from a star hub
// (attachment models) or an r-ball (diffusion) and reports how often the
// root stayed central. Streams are offset per grid entry so points are
// independent.
inline std::vector<HubPoint> run_hub(const ExperimentConfig& base, const std::vector<int>& grid) {
    if (grid.empty()) throw ConfigError("hub experiment needs a non-empty grid");
    std::vector<HubPoint> out;
    out.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        ExperimentConfig config = base;
        if (base.model.kind == ModelKind::DiffusionRegular) {
            config.model.seed = {SeedGraph::Kind::RBall, 0, grid[g]};
        } else {
            config.model.seed = {SeedGraph::Kind::StarHub, grid[g], 0};
        }
        config.base_seed = base.base_seed + 0x51ed2701ull * (g + 1);
        const auto result = run_persistence(config);
        HubPoint point;
        if (base.model.kind == ModelKind::DiffusionRegular) {
            point.ball_r = grid[g];
        } else {
            point.hub_k = grid[g];
        }
        point.replicates = config.replicates;
        point.frac_v1_final = result.summary.frac_v1_final;
        point.frac_v1_always = result.summary.frac_v1_always;
        point.frac_not_always = 1.0 - result.summary.frac_v1_always;
        point.total_violations = result.summary.total_violations;
        out.push_back(point);
    }
    return out;
}

// Probability that the first k-1 arrivals after a k-star seed all attach to
// the same fixed leaf, preferential attachment:
//   P_k = 1 / (2^{k-1} binom(2k-2, k-1))
inline mpq_class symmetry_prob_pa(int k) {
    if (k < 2) throw DomainError("symmetry probability needs k >= 2");
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(2 * k - 2),
                 static_cast<unsigned long>(k - 1));
    mpq_class out(mpz_class(1), mpz_class(binom << (k - 1)));
    out.canonicalize();
    return out;
}

// Same event under uniform attachment: P_k = k! / (2k-1)!
inline mpq_class symmetry_prob_ua(int k) {
    if (k < 2) throw DomainError("symmetry probability needs k >= 2");
    mpz_class num, den;
    mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(k));
    mpz_fac_ui(den.get_mpz_t(), static_cast<unsigned long>(2 * k - 1));
    mpq_class out(num, den);
    out.canonicalize();
    return out;
}

// Probability that diffusion from an r-ball fills the whole r-th level on
// one fixed side: with L = (d-1)^r,
//   P = L! / prod_{i=0}^{L-1} (d L + i (d-2))
inline mpq_class symmetry_prob_diffusion(int d, int r, std::int64_t max_level = 1 << 20) {
    if (d < 3) throw DomainError("diffusion symmetry needs d >= 3");
    if (r < 1) throw DomainError("diffusion symmetry needs r >= 1");
    std::int64_t level = 1;
    for (int i = 0; i < r; ++i) {
        level *= d - 1;
        if (level > max_level) throw OverflowError("level size exceeds cap");
    }
    mpz_class num;
    mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(level));
    mpz_class den = 1;
    for (std::int64_t i = 0; i < level; ++i) {
        den *= mpz_class(static_cast<long>(d) * level + i * (d - 2));
    }
    mpq_class out(num, den);
    out.canonicalize();
    return out;
}

// Smallest K with 5 * 2^{-K/4} strictly below epsilon. The bound behind it
// is only proved for K beyond an unspecified constant, so small outputs are
// a formula value, not a guarantee.
inline int sufficient_hub_size(double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw DomainError("epsilon must be in (0, 1)");
    int k = static_cast<int>(std::floor(4.0 * std::log2(5.0 / epsilon))) + 1;
    while (k > 1 && 5.0 * std::exp2(-(k - 1) / 4.0) < epsilon) --k;
    while (5.0 * std::exp2(-k / 4.0) >= epsilon) ++k;
    return k;
}

struct NecessaryReport {
    ModelKind model = ModelKind::UniformAttachment;
    int d = 0;
    double epsilon = 0.0;
    int necessary = 0;  // hub size k, or radius r for diffusion
    int sufficient = 0; // matching sufficient hub size (or radius)
    bool used_exact = false;
};

// Smallest seed at which the lower-bound chain becomes satisfiable:
//   pa:   2 eps >= 2^{-(3k-3)}
//   ua:   2 eps >= k!/(2k-1)!
//   diff: exact level-fill probability while the level is small, otherwise
//         the relaxed logarithmic chain.
inline NecessaryReport necessary_bound_report(const ModelSpec& spec, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw DomainError("epsilon must be in (0, 1/2)");
    NecessaryReport rep;
    rep.model = spec.kind;
    rep.d = spec.d;
    rep.epsilon = epsilon;
    const mpq_class two_eps = mpq_class(2 * epsilon); // dyadic doubles convert exactly
    switch (spec.kind) {
        case ModelKind::PreferentialAttachment: {
            int k = 2;
            for (;; ++k) {
                mpq_class rhs(mpz_class(1), mpz_class(1) << (3 * k - 3));
                rhs.canonicalize();
                if (two_eps >= rhs) break;
            }
            rep.necessary = k;
            rep.sufficient = sufficient_hub_size(epsilon);
            break;
        }
        case ModelKind::UniformAttachment: {
            int k = 2;
            while (symmetry_prob_ua(k) > two_eps) ++k;
            rep.necessary = k;
            rep.sufficient = sufficient_hub_size(epsilon);
            break;
        }
        case ModelKind::DiffusionRegular: {
            if (spec.d < 3) throw UnsupportedModel("necessary bound needs d >= 3");
            constexpr std::int64_t exact_cap = 4096;
            int r = 1;
            for (;; ++r) {
                std::int64_t level = 1;
                bool too_big = false;
                for (int i = 0; i < r; ++i) {
                    level *= spec.d - 1;
                    if (level > exact_cap) {
                        too_big = true;
                        break;
                    }
                }
                if (!too_big) {
                    if (symmetry_prob_diffusion(spec.d, r) <= two_eps) {
                        rep.used_exact = true;
                        break;
                    }
                    continue;
                }
                const double lhs = std::pow(spec.d - 1, r) * std::log(spec.d - 2.0) +
                                   (std::pow(spec.d, r + 1) + std::pow(spec.d - 1, r)) *
                                       std::log(2.0);
                if (lhs >= std::log(1.0 / (2 * epsilon))) {
                    rep.used_exact = false;
                    break;
                }
            }
            rep.necessary = r;
            const int k_needed = sufficient_hub_size(epsilon);
            int rs = 0;
            while ((std::pow(spec.d - 1, rs + 1) - 1) / (spec.d - 2) < k_needed) ++rs;
            rep.sufficient = rs;
            break;
        }
    }
    return rep;
}

} // namespace growtree
