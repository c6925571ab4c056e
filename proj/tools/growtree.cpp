#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "growtree/brute_force.hpp"
#include "growtree/experiments.hpp"
#include "growtree/formats.hpp"
#include "growtree/models.hpp"
#include "growtree/stats.hpp"
#include "growtree/tree.hpp"
#include "growtree/urn.hpp"
#include "growtree/walk.hpp"

namespace {

using namespace growtree;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInvariant = 4;

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw ConfigError("cannot open output file " + path);
    return file;
}

GrowingTree load_tree(const std::string& path) {
    if (path.empty() || path == "-") return GrowingTree::parse_edge_list(std::cin);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file " + path);
    return GrowingTree::parse_edge_list(in);
}

nlohmann::json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
}

void apply_seed_flags(ModelSpec& spec, int hub_k, int ball_r) {
    if (hub_k > 0 && ball_r >= 0) throw ConfigError("--hub and --ball are exclusive");
    if (hub_k > 0) spec.seed = {SeedGraph::Kind::StarHub, hub_k, 0};
    if (ball_r >= 0) spec.seed = {SeedGraph::Kind::RBall, 0, ball_r};
}

int cmd_grow(const std::string& model, std::int64_t n, std::uint64_t seed, int hub_k,
             int ball_r, const std::string& out_path, const std::string& events_path) {
    ModelSpec spec = parse_model_string(model);
    apply_seed_flags(spec, hub_k, ball_r);
    RngStream rng(seed, 0);
    std::ofstream out_file;
    std::ostream& out = open_sink(out_path, out_file);
    if (events_path.empty()) {
        grow(spec, n, rng).write_edge_list(out);
        return kExitOk;
    }
    std::ofstream events(events_path);
    if (!events) throw ConfigError("cannot open events file " + events_path);
    GrowHooks hooks;
    hooks.on_step = [&](const StepEvent& e) {
        nlohmann::json j;
        j["step"] = e.step;
        j["new_vertex"] = e.new_vertex;
        j["parent"] = e.parent;
        events << j.dump() << '\n';
    };
    grow(spec, n, rng, &hooks).write_edge_list(out);
    return kExitOk;
}

nlohmann::json centroid_json(const GrowingTree& tree) {
    const auto c = tree.centroids();
    nlohmann::json j;
    j["n"] = tree.n();
    j["centroids"] = c.members;
    j["psi"] = c.psi_value;
    return j;
}

int cmd_centroid(const std::string& in_path) {
    const auto tree = load_tree(in_path);
    std::cout << centroid_json(tree).dump(2) << '\n';
    return kExitOk;
}

int cmd_topk(const std::string& in_path, int k) {
    const auto tree = load_tree(in_path);
    auto j = centroid_json(tree);
    const auto top = tree.top_k(k);
    auto list = nlohmann::json::array();
    for (const auto& [v, psi] : top.ordered) list.push_back({v, psi});
    j["k"] = k;
    j["topk"] = std::move(list);
    j["boundary_tied"] = top.boundary_tied;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_walk(const std::string& model, const std::string& a_range, long m_max, long dp_m_max,
             const std::string& out_path) {
    const ModelSpec spec = parse_model_string(model);
    const WalkParams params = params_for_model(spec);
    const auto colon = a_range.find(':');
    if (colon == std::string::npos) throw ConfigError("--a-range expects LO:HI");
    const long a_lo = std::stol(a_range.substr(0, colon));
    const long a_hi = std::stol(a_range.substr(colon + 1));
    if (a_lo < 2 || a_hi < a_lo) throw ConfigError("--a-range needs 2 <= LO <= HI");
    std::ofstream out_file;
    std::ostream& out = open_sink(out_path, out_file);
    out << "A,f_series,f_dp,tail_series,tail_dp,ratio_2A\n";
    for (long a = a_lo; a <= a_hi; ++a) {
        const auto series = hit_prob_series(params, a, m_max);
        const auto dp = hit_prob_dp(params, a, dp_m_max);
        out << a << ',' << format_double(series.value) << ',' << format_double(dp.value)
            << ',' << format_double(series.tail_bound) << ',' << format_double(dp.tail_bound)
            << ',' << format_double(series.value * std::exp2(static_cast<double>(a))) << '\n';
    }
    return kExitOk;
}

int cmd_urn(const std::string& model, long a, int k, std::int64_t steps, int reps,
            std::uint64_t seed, const std::string& csv_path) {
    const ModelSpec spec = parse_model_string(model);
    if ((a > 0) == (k > 0)) throw ConfigError("urn needs exactly one of --a or --k");
    LimitLaw law;
    std::vector<double> first_fraction(static_cast<std::size_t>(reps));
    std::vector<std::vector<double>> fractions(static_cast<std::size_t>(reps));
    if (a > 0) {
        const WalkParams params = params_for_model(spec);
        law = limit_law_two(params, a);
        UrnSpec urn;
        urn.start = {a, 1};
        urn.reinforcement = 1;
        urn.offset = {params.q, params.q};
        for (int rep = 0; rep < reps; ++rep) {
            RngStream rng(seed, static_cast<std::uint64_t>(rep));
            auto f = simulate_urn(urn, steps, rng);
            first_fraction[static_cast<std::size_t>(rep)] = f[0];
            fractions[static_cast<std::size_t>(rep)] = std::move(f);
        }
    } else {
        // canonical star T_K: the root carries degree K-1, the leaves 1
        std::vector<int> degrees(static_cast<std::size_t>(k), 1);
        degrees[0] = k - 1;
        law = limit_law_k(spec, k, degrees);
        const auto urn = ComponentUrn::for_model(spec, degrees);
        for (int rep = 0; rep < reps; ++rep) {
            RngStream rng(seed, static_cast<std::uint64_t>(rep));
            const auto counts = simulate_urn_counts(urn.urn, steps, rng);
            auto f = urn.size_fractions(counts);
            first_fraction[static_cast<std::size_t>(rep)] = f[0];
            fractions[static_cast<std::size_t>(rep)] = std::move(f);
        }
    }
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw ConfigError("cannot open csv file " + csv_path);
        csv << "replicate";
        for (std::size_t c = 0; c < fractions[0].size(); ++c) csv << ",frac" << c;
        csv << '\n';
        for (int rep = 0; rep < reps; ++rep) {
            csv << rep;
            for (const double f : fractions[static_cast<std::size_t>(rep)]) {
                csv << ',' << format_double(f);
            }
            csv << '\n';
        }
    }
    double alpha0 = law.params[0];
    double rest = 0.0;
    for (std::size_t i = 1; i < law.params.size(); ++i) rest += law.params[i];
    const auto ks = ks_statistic(first_fraction,
                                 [&](double x) { return beta_cdf(alpha0, rest, x); });
    nlohmann::json j;
    j["model"] = model;
    if (a > 0) j["a"] = a; else j["k"] = k;
    j["steps"] = steps;
    j["replicates"] = reps;
    j["law"] = (law.kind == LimitLaw::Kind::Beta) ? "beta" : "dirichlet";
    j["law_params"] = law.params;
    j["marginal"] = {alpha0, rest};
    j["ks_D"] = ks.d;
    j["ks_p"] = ks.p;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_persist(const std::string& config_path, const std::string& traces_path,
                const std::string& aggregate_path, int jobs) {
    auto config = experiment_config_from_json(load_config_json(config_path));
    config.jobs = jobs;
    const auto result = run_persistence(config);
    {
        std::ofstream traces(traces_path);
        if (!traces) throw ConfigError("cannot open traces file " + traces_path);
        write_traces_jsonl(traces, result.traces);
    }
    {
        std::ofstream aggregate(aggregate_path);
        if (!aggregate) throw ConfigError("cannot open aggregate file " + aggregate_path);
        write_persistence_csv(aggregate, result.summary);
    }
    std::ostringstream summary;
    write_persistence_csv(summary, result.summary);
    std::cout << summary.str();
    return result.summary.total_violations == 0 ? kExitOk : kExitInvariant;
}

int cmd_hub(const std::string& config_path, const std::string& out_path, int jobs) {
    const auto j = load_config_json(config_path);
    auto config = experiment_config_from_json(j);
    config.jobs = jobs;
    std::vector<int> grid;
    if (j.contains("hub_sizes")) grid = j.at("hub_sizes").get<std::vector<int>>();
    if (j.contains("ball_radii")) {
        if (!grid.empty()) throw ConfigError("config has both hub_sizes and ball_radii");
        grid = j.at("ball_radii").get<std::vector<int>>();
    }
    if (grid.empty()) throw ConfigError("hub config needs hub_sizes or ball_radii");
    const auto points = run_hub(config, grid);
    std::ofstream out_file;
    std::ostream& out = open_sink(out_path, out_file);
    write_hub_csv(out, points, config.model.kind == ModelKind::DiffusionRegular);
    std::int64_t violations = 0;
    for (const auto& p : points) violations += p.total_violations;
    return violations == 0 ? kExitOk : kExitInvariant;
}

void print_rational(const mpq_class& q) {
    std::cout << q.get_str() << ' ' << format_double(q.get_d()) << '\n';
}

int cmd_calc(const CLI::App& calc) {
    if (calc.count("--pk-pa")) {
        print_rational(symmetry_prob_pa(calc.get_option("--pk-pa")->as<int>()));
    } else if (calc.count("--pk-ua")) {
        print_rational(symmetry_prob_ua(calc.get_option("--pk-ua")->as<int>()));
    } else if (calc.count("--pk-diff")) {
        const auto dr = calc.get_option("--pk-diff")->as<std::vector<int>>();
        print_rational(symmetry_prob_diffusion(dr[0], dr[1]));
    } else if (calc.count("--suff-k")) {
        std::cout << sufficient_hub_size(calc.get_option("--suff-k")->as<double>()) << '\n';
    } else if (calc.count("--necessary")) {
        const auto args = calc.get_option("--necessary")->as<std::vector<std::string>>();
        const ModelSpec spec = parse_model_string(args[0]);
        const auto rep = necessary_bound_report(spec, std::stod(args[1]));
        nlohmann::json j;
        j["model"] = args[0];
        j["epsilon"] = rep.epsilon;
        j[rep.model == ModelKind::DiffusionRegular ? "necessary_r" : "necessary_k"] =
            rep.necessary;
        j[rep.model == ModelKind::DiffusionRegular ? "sufficient_r" : "sufficient_k"] =
            rep.sufficient;
        j["used_exact"] = rep.used_exact;
        std::cout << j.dump(2) << '\n';
    } else {
        throw ConfigError("calc needs one of --pk-pa, --pk-ua, --pk-diff, --suff-k, --necessary");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random growing trees: centroid tracking, lattice walks, urns, experiments"};
    app.require_subcommand(1);

    std::string model = "ua", in_path, out_path, events_path, csv_path, config_path;
    std::string a_range = "2:20";
    std::string traces_path = "traces.jsonl", aggregate_path = "aggregate.csv";
    std::int64_t n = 100, steps = 100000;
    std::uint64_t seed = 0;
    int hub_k = 0, ball_r = -1, k = 1, reps = 1000, jobs = 0;
    long urn_a = 0, m_max = 10000, dp_m_max = -1;

    auto* grow_cmd = app.add_subcommand("grow", "grow a tree and emit its edge list");
    grow_cmd->add_option("--model", model, "ua | pa | diff:d")->required();
    grow_cmd->add_option("--n", n, "target vertex count")->required();
    grow_cmd->add_option("--seed", seed, "rng seed")->required();
    grow_cmd->add_option("--hub", hub_k, "star hub seed with k leaves");
    grow_cmd->add_option("--ball", ball_r, "r-ball seed (diffusion)");
    grow_cmd->add_option("--out", out_path, "edge list output (default stdout)");
    grow_cmd->add_option("--events", events_path, "per-step JSONL event stream");

    auto* centroid_cmd = app.add_subcommand("centroid", "centroid set of an edge-list tree");
    centroid_cmd->add_option("--in", in_path, "edge list input (default stdin)");

    auto* topk_cmd = app.add_subcommand("topk", "top-k central vertices of an edge-list tree");
    topk_cmd->add_option("--in", in_path, "edge list input (default stdin)");
    topk_cmd->add_option("--k", k, "set size")->required();

    auto* walk_cmd = app.add_subcommand("walk", "diagonal hitting probabilities as CSV");
    walk_cmd->add_option("--model", model, "ua | pa | diff:d")->required();
    walk_cmd->add_option("--a-range", a_range, "start offsets LO:HI");
    walk_cmd->add_option("--m-max", m_max, "series truncation");
    walk_cmd->add_option("--dp-m-max", dp_m_max, "dp truncation (default policy)");
    walk_cmd->add_option("--out", out_path, "CSV output (default stdout)");

    auto* urn_cmd = app.add_subcommand("urn", "urn replicates and a KS fit summary");
    urn_cmd->add_option("--model", model, "ua | pa | diff:d")->required();
    urn_cmd->add_option("--a", urn_a, "two-color urn started from (A, 1)");
    urn_cmd->add_option("--k", k, "K-component urn on the star seed");
    urn_cmd->add_option("--steps", steps, "urn steps per replicate");
    urn_cmd->add_option("--reps", reps, "replicates");
    urn_cmd->add_option("--seed", seed, "rng seed")->required();
    urn_cmd->add_option("--csv", csv_path, "per-replicate fractions CSV");

    auto* persist_cmd = app.add_subcommand("persist", "centroid persistence experiment");
    persist_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    persist_cmd->add_option("--traces", traces_path, "JSONL trace output");
    persist_cmd->add_option("--aggregate", aggregate_path, "CSV aggregate output");
    persist_cmd->add_option("--jobs", jobs, "worker threads (default: hardware)");

    auto* hub_cmd = app.add_subcommand("hub", "seed-size sweep for root persistence");
    hub_cmd->add_option("--config", config_path, "experiment config JSON with a grid")
        ->required();
    hub_cmd->add_option("--out", out_path, "CSV output (default stdout)");
    hub_cmd->add_option("--jobs", jobs, "worker threads (default: hardware)");

    auto* calc_cmd = app.add_subcommand("calc", "exact seed-symmetry values and bounds");
    calc_cmd->add_option("--pk-pa", "symmetry probability, preferential attachment")
        ->type_name("K");
    calc_cmd->add_option("--pk-ua", "symmetry probability, uniform attachment")->type_name("K");
    calc_cmd->add_option("--pk-diff", "symmetry probability, diffusion")
        ->type_name("D R")
        ->expected(2);
    calc_cmd->add_option("--suff-k", "smallest sufficient hub size for epsilon")
        ->type_name("EPS");
    calc_cmd->add_option("--necessary", "lower-bound seed size: MODEL EPS")
        ->type_name("MODEL EPS")
        ->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (grow_cmd->parsed()) {
            return cmd_grow(model, n, seed, hub_k, ball_r, out_path, events_path);
        }
        if (centroid_cmd->parsed()) return cmd_centroid(in_path);
        if (topk_cmd->parsed()) return cmd_topk(in_path, k);
        if (walk_cmd->parsed()) return cmd_walk(model, a_range, m_max, dp_m_max, out_path);
        if (urn_cmd->parsed()) {
            return cmd_urn(model, urn_a, urn_cmd->count("--k") ? k : 0, steps, reps, seed,
                           csv_path);
        }
        if (persist_cmd->parsed()) {
            return cmd_persist(config_path, traces_path, aggregate_path, jobs);
        }
        if (hub_cmd->parsed()) return cmd_hub(config_path, out_path, jobs);
        if (calc_cmd->parsed()) return cmd_calc(*calc_cmd);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
