#pragma once

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "growtree/errors.hpp"
#include "growtree/experiments.hpp"
#include "growtree/models.hpp"

namespace growtree {

inline std::string format_double(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

inline ModelSpec parse_model_string(const std::string& text) {
    if (text == "ua") return ModelSpec::uniform();
    if (text == "pa") return ModelSpec::preferential();
    if (text.rfind("diff:", 0) == 0) {
        const int d = std::stoi(text.substr(5));
        return ModelSpec::diffusion(d);
    }
    if (text == "diff") throw ConfigError("diffusion model needs a degree, e.g. diff:3");
    throw ConfigError("unknown model '" + text + "' (expected ua, pa, or diff:d)");
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    if (!j.contains("model")) throw ConfigError("config needs a \"model\" field");
    std::string model = j.at("model").get<std::string>();
    if (model == "diff" && j.contains("d")) {
        model += ":" + std::to_string(j.at("d").get<int>());
    }
    config.model = parse_model_string(model);
    if (j.contains("seed_graph")) {
        const auto& sg = j.at("seed_graph");
        const std::string kind = sg.value("kind", "single");
        if (kind == "single") {
            config.model.seed = {SeedGraph::Kind::SingleVertex, 0, 0};
        } else if (kind == "hub") {
            config.model.seed = {SeedGraph::Kind::StarHub, sg.value("k", 1), 0};
        } else if (kind == "ball") {
            config.model.seed = {SeedGraph::Kind::RBall, 0, sg.value("r", 0)};
        } else {
            throw ConfigError("unknown seed_graph kind '" + kind + "'");
        }
    }
    config.n_target = j.value("n_target", std::int64_t{10000});
    config.top_k = j.value("k", 0);
    config.replicates = j.value("replicates", 1000);
    if (!j.contains("base_seed")) throw ConfigError("config needs a \"base_seed\" field");
    config.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("checkpoints")) {
        config.checkpoints = j.at("checkpoints").get<std::vector<std::int64_t>>();
    }
    config.invariant_checks = j.value("invariant_checks", true);
    config.topk_every_step = j.value("topk_every_step", false);
    try {
        config.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return config;
}

inline nlohmann::json trace_to_json(const ReplicateTrace& t) {
    nlohmann::json j;
    j["replicate"] = t.replicate;
    j["last_centroid_change"] = t.last_centroid_change;
    j["last_root_flip"] = t.last_root_flip;
    j["last_topk_change"] = t.last_topk_change;
    j["centroid_change_count"] = t.centroid_change_count;
    j["final_centroid"] = t.final_centroid;
    j["final_psi"] = t.final_psi;
    j["v1_is_final_centroid"] = t.v1_is_final_centroid;
    j["v1_always_centroid"] = t.v1_always_centroid;
    j["first_v1_loss"] = t.first_v1_loss;
    if (!t.final_topk.empty()) {
        auto topk = nlohmann::json::array();
        for (const auto& [v, psi] : t.final_topk) topk.push_back({v, psi});
        j["final_topk"] = std::move(topk);
        j["final_topk_tied"] = t.final_topk_tied;
    }
    j["invariant_violations"] = t.invariant_violations;
    return j;
}

inline void write_traces_jsonl(std::ostream& os, const std::vector<ReplicateTrace>& traces) {
    for (const auto& t : traces) os << trace_to_json(t).dump() << '\n';
}

inline void write_persistence_csv(std::ostream& os, const PersistenceSummary& s) {
    os << "n_target,replicates,frac_change_after_half,frac_root_flip_after_half,"
          "frac_v1_final,frac_v1_always,mean_change_count,total_violations\n";
    os << s.n_target << ',' << s.replicates << ',' << format_double(s.frac_change_after_half)
       << ',' << format_double(s.frac_root_flip_after_half) << ','
       << format_double(s.frac_v1_final) << ',' << format_double(s.frac_v1_always) << ','
       << format_double(s.mean_change_count) << ',' << s.total_violations << '\n';
}

inline void write_hub_csv(std::ostream& os, const std::vector<HubPoint>& points,
                          bool diffusion) {
    os << (diffusion ? "ball_r" : "hub_k")
       << ",replicates,frac_v1_final,frac_v1_always,frac_not_always,total_violations\n";
    for (const auto& p : points) {
        os << (diffusion ? p.ball_r : p.hub_k) << ',' << p.replicates << ','
           << format_double(p.frac_v1_final) << ',' << format_double(p.frac_v1_always) << ','
           << format_double(p.frac_not_always) << ',' << p.total_violations << '\n';
    }
}

} // namespace growtree
