#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctxlab/agents.hpp"
#include "ctxlab/bench.hpp"
#include "ctxlab/embedding.hpp"
#include "ctxlab/monkey.hpp"
#include "ctxlab/remote.hpp"
#include "ctxlab/report.hpp"
#include "ctxlab/semantic_dynamics.hpp"
#include "ctxlab/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int workers = 0;  // 0 = host parallelism
    std::string embedder = "offline";
    std::string session = "scripted";
};

std::unique_ptr<ctxlab::Embedder> make_embedder(const GlobalOptions& options) {
    if (options.embedder == "offline")
        return std::make_unique<ctxlab::OfflineEmbedder>();
    if (options.embedder == "remote")
        return std::make_unique<ctxlab::RemoteEmbedder>(
            ctxlab::embed_config_from_env());
    throw std::runtime_error("unknown embedder kind: " + options.embedder);
}

/// Queue-of-replies session from a JSON Lines script ({"reply": "..."} per
/// line); plain text lines are accepted as raw replies.
std::unique_ptr<ctxlab::ScriptedSession> session_from_script(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read script: " + path);
    auto session = std::make_unique<ctxlab::ScriptedSession>();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '{') {
            auto obj = nlohmann::json::parse(line);
            session->push_reply(obj.at("reply").get<std::string>());
        } else {
            session->push_reply(line);
        }
    }
    session->set_fallback("action: abandon");
    return session;
}

int run_analyze(const GlobalOptions& options, const std::string& prompt_file,
                double z, std::size_t min_gap, double p1, double p2) {
    std::ifstream in(prompt_file);
    if (!in) {
        std::cerr << "error: cannot read prompt file: " << prompt_file << "\n";
        return kExitConfig;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string prompt = buffer.str();
    if (prompt.empty()) {
        std::cerr << "error: prompt file is empty\n";
        return kExitConfig;
    }

    auto embedder = make_embedder(options);
    auto tokens = ctxlab::tokenize(prompt);
    auto trace = ctxlab::trace(tokens, *embedder);
    ctxlab::SegmentPolicy policy;
    policy.z = z;
    policy.min_gap = min_gap;
    auto segmentation = ctxlab::segment(trace, policy);
    auto candidates = ctxlab::parameter_candidates(
        trace, segmentation, {p1, p2});
    auto paths = ctxlab::emit_report(trace, segmentation, candidates,
                                     options.out_dir);

    std::cout << "tokens: " << trace.size() << "\n"
              << "segments: " << segmentation.segments.size() << "\n"
              << "candidates: " << candidates.size() << "\n"
              << "wrote " << paths.trace_csv.string() << ", "
              << paths.segments_json.string() << ", "
              << paths.chart_svg.string() << "\n";
    return kExitOk;
}

int run_simulate(const GlobalOptions& options, int scene_id,
                 const std::string& agent_name, const std::string& script,
                 const std::string& export_scene) {
    auto kind = ctxlab::agents::agent_kind_from_name(agent_name);
    if (!kind) {
        std::cerr << "error: unknown agent kind: " << agent_name << "\n";
        return kExitConfig;
    }
    const ctxlab::sim::Scene* scene = nullptr;
    try {
        scene = &ctxlab::sim::scene_by_id(scene_id);
    } catch (const std::exception&) {
        std::cerr << "error: unknown scene: " << scene_id << "\n";
        return kExitConfig;
    }

    if (!export_scene.empty()) {
        ctxlab::sim::write_scene(*scene, export_scene);
        std::cout << "wrote " << export_scene << "\n";
    }

    std::unique_ptr<ctxlab::SessionFn> session;
    if (options.session == "remote") {
        session = std::make_unique<ctxlab::RemoteSession>(
            ctxlab::llm_config_from_env());
    } else if (options.session == "scripted") {
        if (!script.empty()) {
            session = session_from_script(script);
        } else {
            // No script given: replay the search plan for the scene.
            auto solved = ctxlab::sim::bfs_solve(
                *scene, ctxlab::sim::CrushRealization::zero_crush(*scene));
            auto scripted = std::make_unique<ctxlab::ScriptedSession>();
            for (auto& reply : ctxlab::agents::plan_replies(solved.plan))
                scripted->push_reply(std::move(reply));
            scripted->set_fallback("action: abandon");
            session = std::move(scripted);
        }
    } else {
        std::cerr << "error: unknown session kind: " << options.session << "\n";
        return kExitConfig;
    }

    auto config = ctxlab::agents::monkey_agent_config(*kind);
    auto episode =
        ctxlab::agents::run_episode(config, *scene, options.seed, *session);

    std::filesystem::create_directories(options.out_dir);
    const auto transcript_path =
        std::filesystem::path(options.out_dir) /
        ("transcript_scene" + std::to_string(scene_id) + "_" + agent_name +
         ".jsonl");
    ctxlab::write_transcript(episode.log.exchanges, transcript_path);

    std::cout << "terminal: " << ctxlab::sim::to_string(episode.terminal) << "\n"
              << "steps: " << episode.steps << "\n"
              << "tokens: " << episode.tokens << "\n"
              << "transcript: " << transcript_path.string() << "\n";
    return kExitOk;
}

std::vector<int> parse_scene_selector(const std::string& selector) {
    std::vector<int> ids;
    std::stringstream ss(selector);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto dash = part.find('-');
        if (dash == std::string::npos) {
            ids.push_back(std::stoi(part));
        } else {
            int lo = std::stoi(part.substr(0, dash));
            int hi = std::stoi(part.substr(dash + 1));
            for (int i = lo; i <= hi; ++i) ids.push_back(i);
        }
    }
    return ids;
}

int run_bench(const GlobalOptions& options, const std::string& agent_selector,
              const std::string& scene_selector, int n,
              const std::string& fixtures, bool rank_only) {
    std::vector<ctxlab::bench::MetricsRow> rows;

    if (!fixtures.empty()) {
        rows = ctxlab::bench::read_results_csv(fixtures);
    } else {
        std::vector<ctxlab::agents::AgentKind> kinds;
        std::stringstream ss(agent_selector);
        std::string name;
        while (std::getline(ss, name, ',')) {
            auto kind = ctxlab::agents::agent_kind_from_name(name);
            if (!kind) {
                std::cerr << "error: unknown agent kind: " << name << "\n";
                return kExitConfig;
            }
            kinds.push_back(*kind);
        }
        std::vector<int> scene_ids = parse_scene_selector(scene_selector);
        for (int id : scene_ids) {
            try {
                ctxlab::sim::scene_by_id(id);
            } catch (const std::exception&) {
                std::cerr << "error: unknown scene: " << id << "\n";
                return kExitConfig;
            }
        }
        ctxlab::bench::SessionFactory factory;
        if (options.session == "scripted") {
            factory = ctxlab::bench::plan_replay_factory();
        } else if (options.session == "remote") {
            const auto config = ctxlab::llm_config_from_env();
            factory = [config](ctxlab::agents::AgentKind, const ctxlab::sim::Scene&,
                               std::uint64_t) {
                return std::make_unique<ctxlab::RemoteSession>(config);
            };
        } else {
            std::cerr << "error: unknown session kind: " << options.session
                      << "\n";
            return kExitConfig;
        }

        auto records = ctxlab::bench::run_matrix(kinds, scene_ids, n,
                                                 options.seed, factory,
                                                 options.workers);
        int errors = 0;
        for (const auto& record : records)
            if (record.terminal.rfind("error", 0) == 0) ++errors;
        if (errors > 0)
            std::cerr << "warning: " << errors
                      << " trial(s) recorded as errors\n";
        rows = ctxlab::bench::aggregate_all(records);
    }

    if (!rank_only) {
        auto paths = ctxlab::bench::emit_tables(rows, options.out_dir);
        std::cout << "wrote " << paths.results_csv.string() << " and "
                  << paths.tables_md.string() << "\n";
    }

    auto order = ctxlab::bench::rank_difficulty(rows);
    std::filesystem::create_directories(options.out_dir);
    const auto ranking_path =
        std::filesystem::path(options.out_dir) / "ranking.txt";
    std::ofstream ranking(ranking_path);
    std::cout << "scenes easiest to hardest:";
    for (int id : order) {
        std::cout << " " << id;
        ranking << id << "\n";
    }
    std::cout << "\nwrote " << ranking_path.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-pattern workbench: prompt analysis, monkey-banana "
                 "simulation and agent benchmarking"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions options;
    app.add_option("--seed", options.seed, "Seed for all randomized behavior");
    app.add_option("--out", options.out_dir, "Output directory");
    app.add_option("--workers", options.workers,
                   "Worker threads (0 = host parallelism)");
    app.add_option("--embedder", options.embedder, "offline | remote");
    app.add_option("--session", options.session, "scripted | remote");

    // analyze
    std::string prompt_file;
    double z = 2.0;
    std::size_t min_gap = 5;
    double p1 = 90.0, p2 = 90.0;
    auto* analyze = app.add_subcommand(
        "analyze", "Token-level semantic analysis of a prompt file");
    analyze->add_option("prompt", prompt_file, "Prompt text file")->required();
    analyze->add_option("--z", z, "Peak threshold in standard deviations");
    analyze->add_option("--min-gap", min_gap, "Minimum tokens between peaks");
    analyze->add_option("--p1", p1, "Within-segment percentile threshold");
    analyze->add_option("--p2", p2, "Global percentile threshold");

    // simulate
    int scene_id = 1;
    std::string agent_name = "basic";
    std::string script;
    std::string export_scene;
    auto* simulate =
        app.add_subcommand("simulate", "Run one agent episode on a scene");
    simulate->add_option("scene", scene_id, "Scene id (1-15)")->required();
    simulate->add_option("agent", agent_name,
                         "basic | react | mldt | or | orn | planorn")
        ->required();
    simulate->add_option("--script", script,
                         "JSON Lines reply script for the scripted session");
    simulate->add_option("--export-scene", export_scene,
                         "Also write the scene as JSON to this path");

    // bench
    std::string agent_selector = "basic,react,mldt,or,orn,planorn";
    std::string scene_selector = "1-15";
    int n = 100;
    std::string fixtures;
    bool rank_only = false;
    auto* bench = app.add_subcommand(
        "bench", "Run a trial matrix and aggregate the metrics");
    bench->add_option("--agents", agent_selector, "Comma-separated agent kinds");
    bench->add_option("--scenes", scene_selector,
                      "Scene selector, e.g. 1-3 or 1,4,7");
    bench->add_option("--n", n, "Trials per (agent, scene) cell");
    bench->add_option("--fixtures", fixtures,
                      "Aggregate a results CSV instead of running trials");
    bench->add_flag("--rank-only", rank_only,
                    "Only compute the difficulty ranking");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand(analyze))
            return run_analyze(options, prompt_file, z, min_gap, p1, p2);
        if (app.got_subcommand(simulate))
            return run_simulate(options, scene_id, agent_name, script,
                                export_scene);
        if (app.got_subcommand(bench))
            return run_bench(options, agent_selector, scene_selector, n,
                             fixtures, rank_only);
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        // Missing configuration (environment variables, files) is a usage
        // problem; anything else is a runtime failure.
        if (what.find("environment variable") != std::string::npos ||
            what.find("cannot read") != std::string::npos)
            return kExitConfig;
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
