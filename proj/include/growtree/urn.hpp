#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "growtree/errors.hpp"
#include "growtree/models.hpp"
#include "growtree/rng.hpp"
#include "growtree/walk.hpp"

namespace growtree {

// Reinforced urn: a color is drawn with probability proportional to
// count + offset and its count grows by the reinforcement. Counts stay
// integral; offsets carry the affine part of the attachment law.
struct UrnSpec {
    std::vector<std::int64_t> start;
    std::int64_t reinforcement = 1;
    std::vector<double> offset;

    void validate() const {
        if (start.size() < 2) throw DomainError("urn needs at least two colors");
        if (offset.size() != start.size()) throw DomainError("offset size mismatch");
        if (reinforcement < 1) throw DomainError("reinforcement must be positive");
        for (std::size_t i = 0; i < start.size(); ++i) {
            if (start[i] < 1) throw DomainError("start counts must be >= 1");
            if (static_cast<double>(start[i]) + offset[i] <= 0.0) {
                throw DomainError("start + offset must be positive per color");
            }
        }
    }
};

struct LimitLaw {
    enum class Kind { Beta, Dirichlet };
    Kind kind = Kind::Beta;
    std::vector<double> params;
};

// Two-color limit of the subtree-pair walk started from sizes (A, 1):
// fraction of the first color tends to Beta(A + q, 1 + q), q = beta/alpha.
inline LimitLaw limit_law_two(const WalkParams& p, long A) {
    if (A < 1) throw DomainError("limit_law_two needs A >= 1");
    const double a = static_cast<double>(A) + p.q;
    const double b = 1.0 + p.q;
    if (a <= 0.0 || b <= 0.0) throw DomainError("Beta parameters must be positive");
    return {LimitLaw::Kind::Beta, {a, b}};
}

// Limit of the K-component split when the first K vertices anchor the
// forest: Dirichlet with per-vertex weights determined by the model.
inline LimitLaw limit_law_k(const ModelSpec& spec, int K, const std::vector<int>& degrees) {
    if (K < 2 || static_cast<int>(degrees.size()) != K) {
        throw DomainError("limit_law_k needs K >= 2 degrees");
    }
    const int degree_sum = std::accumulate(degrees.begin(), degrees.end(), 0);
    if (degree_sum != 2 * K - 2) throw DomainError("degrees do not sum to 2K-2");
    LimitLaw law;
    law.kind = LimitLaw::Kind::Dirichlet;
    law.params.reserve(degrees.size());
    switch (spec.kind) {
        case ModelKind::UniformAttachment:
            law.params.assign(degrees.size(), 1.0);
            break;
        case ModelKind::PreferentialAttachment:
            for (const int deg : degrees) {
                if (deg < 1) throw DomainError("tree degrees must be >= 1");
                law.params.push_back(deg / 2.0);
            }
            break;
        case ModelKind::DiffusionRegular:
            if (spec.d < 3) throw UnsupportedModel("Dirichlet limit needs d >= 3");
            for (const int deg : degrees) {
                if (deg < 1 || deg >= spec.d) {
                    throw DomainError("diffusion degrees must lie in [1, d)");
                }
                law.params.push_back(static_cast<double>(spec.d - deg) / (spec.d - 2));
            }
            break;
    }
    return law;
}

inline std::vector<std::int64_t> simulate_urn_counts(const UrnSpec& spec, std::int64_t steps,
                                                     RngStream& rng) {
    spec.validate();
    if (steps < 0) throw DomainError("steps must be >= 0");
    std::vector<std::int64_t> counts = spec.start;
    double offset_total = 0.0;
    for (const double o : spec.offset) offset_total += o;
    std::int64_t count_total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    for (std::int64_t s = 0; s < steps; ++s) {
        double u = rng.next_unit() * (static_cast<double>(count_total) + offset_total);
        std::size_t drawn = counts.size() - 1;
        for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
            u -= static_cast<double>(counts[i]) + spec.offset[i];
            if (u < 0.0) {
                drawn = i;
                break;
            }
        }
        counts[drawn] += spec.reinforcement;
        count_total += spec.reinforcement;
    }
    return counts;
}

inline std::vector<double> simulate_urn(const UrnSpec& spec, std::int64_t steps,
                                        RngStream& rng) {
    const auto counts = simulate_urn_counts(spec, steps, rng);
    const auto total = static_cast<double>(
        std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
    std::vector<double> fractions;
    fractions.reserve(counts.size());
    for (const auto c : counts) fractions.push_back(static_cast<double>(c) / total);
    return fractions;
}

// Per-model urn that realizes the K-component split on its natural scale:
// component sizes for uniform attachment, degree sums for preferential
// attachment, free host slots for diffusion. Also converts a final urn
// state back to component sizes.
struct ComponentUrn {
    UrnSpec urn;
    ModelKind kind;
    int d = 0;
    std::vector<int> degrees;

    static ComponentUrn for_model(const ModelSpec& spec, const std::vector<int>& degrees) {
        ComponentUrn out;
        out.kind = spec.kind;
        out.d = spec.d;
        out.degrees = degrees;
        const auto k = degrees.size();
        switch (spec.kind) {
            case ModelKind::UniformAttachment:
                out.urn.start.assign(k, 1);
                out.urn.reinforcement = 1;
                break;
            case ModelKind::PreferentialAttachment:
                for (const int deg : degrees) out.urn.start.push_back(deg);
                out.urn.reinforcement = 2;
                break;
            case ModelKind::DiffusionRegular:
                if (spec.d < 3) throw UnsupportedModel("component urn needs d >= 3");
                for (const int deg : degrees) {
                    if (deg >= spec.d) throw DomainError("diffusion degree must be < d");
                    out.urn.start.push_back(spec.d - deg);
                }
                out.urn.reinforcement = spec.d - 2;
                break;
        }
        out.urn.offset.assign(k, 0.0);
        return out;
    }

    // Component sizes recovered from the urn state:
    //   ua:   size = count
    //   pa:   degree sum S = 2(size - 1) + deg
    //   diff: free slots U = (d-2)(size - 1) + (d - deg)
    std::vector<double> component_sizes(const std::vector<std::int64_t>& counts) const {
        std::vector<double> sizes(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            switch (kind) {
                case ModelKind::UniformAttachment:
                    sizes[i] = static_cast<double>(counts[i]);
                    break;
                case ModelKind::PreferentialAttachment:
                    sizes[i] = (static_cast<double>(counts[i]) - degrees[i]) / 2.0 + 1.0;
                    break;
                case ModelKind::DiffusionRegular:
                    sizes[i] = (static_cast<double>(counts[i]) - (d - degrees[i])) / (d - 2) + 1.0;
                    break;
            }
        }
        return sizes;
    }

    std::vector<double> size_fractions(const std::vector<std::int64_t>& counts) const {
        auto sizes = component_sizes(counts);
        double total = 0.0;
        for (const double s : sizes) total += s;
        for (double& s : sizes) s /= total;
        return sizes;
    }
};

} // namespace growtree
