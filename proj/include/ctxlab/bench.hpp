#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ctxlab/agents.hpp"
#include "ctxlab/monkey.hpp"

namespace ctxlab::bench {

struct TrialRecord {
    agents::AgentKind agent = agents::AgentKind::Basic;
    int scene_id = 0;
    std::uint64_t seed = 0;
    bool success = false;
    double steps = 0.0;
    double wall_time_s = 0.0;
    double tokens = 0.0;
    std::string terminal;  // success | step_limit | abandoned | error
};

struct MetricsRow {
    agents::AgentKind agent = agents::AgentKind::Basic;
    int scene_id = 0;
    int n_trials = 0;
    double success_rate = 0.0;
    double avg_steps = 0.0;    // over all trials, failures included
    double avg_time_s = 0.0;
    double avg_tokens = 0.0;
    double time_to_success = 0.0;    // infinity when no trial succeeded
    double tokens_to_success = 0.0;
};

/// Builds a fresh session per trial; sessions must not be shared between
/// concurrent episodes.
using SessionFactory = std::function<std::unique_ptr<SessionFn>(
    agents::AgentKind kind, const sim::Scene& scene, std::uint64_t seed)>;

/// Session factory that replays the zero-crush search plan for the scene and
/// abandons once the plan runs out.
SessionFactory plan_replay_factory();

/// Runs n trials per (agent, scene) cell; trial t of a cell uses seed0 + t.
/// Trials that throw are captured as failure records with terminal "error".
/// Records come back in deterministic (agent, scene, trial) order regardless
/// of the worker count.
std::vector<TrialRecord> run_matrix(const std::vector<agents::AgentKind>& kinds,
                                    const std::vector<int>& scene_ids, int n,
                                    std::uint64_t seed0,
                                    const SessionFactory& factory,
                                    int workers = 0);

/// Folds one (agent, scene) cell. The cost-to-success metrics follow
/// mean_success + (1/rate - 1) * mean_failure and render as infinity when
/// nothing succeeded.
MetricsRow aggregate(const std::vector<TrialRecord>& cell);

/// All cells of a record set, in (agent, scene) order.
std::vector<MetricsRow> aggregate_all(const std::vector<TrialRecord>& records);

/// Scene ids ordered easiest first: by mean success rate across agents
/// (descending), ties broken by mean steps (ascending). Throws when some
/// (agent, scene) cell is missing, listing the gaps.
std::vector<int> rank_difficulty(const std::vector<MetricsRow>& rows);

struct TablePaths {
    std::filesystem::path results_csv;
    std::filesystem::path tables_md;
};

/// results.csv with a fixed column set, plus Markdown tables (one per scene,
/// best value per metric underlined, infinity rendered as the symbol).
TablePaths emit_tables(const std::vector<MetricsRow>& rows,
                       const std::filesystem::path& directory);

void write_results_csv(const std::vector<MetricsRow>& rows,
                       const std::filesystem::path& path);
std::vector<MetricsRow> read_results_csv(const std::filesystem::path& path);

}  // namespace ctxlab::bench
