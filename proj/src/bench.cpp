#include "ctxlab/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ctxlab/solver.hpp"

namespace ctxlab::bench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double value) {
    if (std::isinf(value)) return "inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "0";
    return std::string(buf, ptr);
}

}  // namespace

SessionFactory plan_replay_factory() {
    struct PlanCache {
        std::mutex mutex;
        std::map<int, std::vector<sim::Action>> plans;
    };
    auto cache = std::make_shared<PlanCache>();
    return [cache](agents::AgentKind kind, const sim::Scene& scene,
                   std::uint64_t) {
        std::vector<sim::Action> plan;
        {
            std::lock_guard<std::mutex> lock(cache->mutex);
            auto it = cache->plans.find(scene.id);
            if (it == cache->plans.end()) {
                it = cache->plans
                         .emplace(scene.id,
                                  sim::bfs_solve(
                                      scene,
                                      sim::CrushRealization::zero_crush(scene))
                                      .plan)
                         .first;
            }
            plan = it->second;
        }
        const sim::SolveResult solved{true, std::move(plan), 0};
        auto session = std::make_unique<ScriptedSession>();
        // Kinds with built-in sub-sessions consume extra replies: one plan
        // up front for the decomposing agent, one reasoning turn per step
        // for the reflective one.
        if (kind == agents::AgentKind::MLDT)
            session->push_reply("follow the shortest route to the banana");
        for (auto& reply : agents::plan_replies(solved.plan)) {
            if (kind == agents::AgentKind::ReAct)
                session->push_reply("the route looks clear, continue");
            session->push_reply(std::move(reply));
        }
        session->set_fallback("action: abandon");
        return session;
    };
}

std::vector<TrialRecord> run_matrix(const std::vector<agents::AgentKind>& kinds,
                                    const std::vector<int>& scene_ids, int n,
                                    std::uint64_t seed0,
                                    const SessionFactory& factory,
                                    int workers) {
    if (n < 1) throw std::invalid_argument("need at least one trial per cell");

    struct Task {
        agents::AgentKind kind;
        int scene_id;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (auto kind : kinds)
        for (int scene_id : scene_ids)
            for (int t = 0; t < n; ++t)
                tasks.push_back({kind, scene_id, seed0 + static_cast<std::uint64_t>(t)});

    std::vector<TrialRecord> records(tasks.size());
    std::atomic<std::size_t> cursor{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t index = cursor.fetch_add(1);
            if (index >= tasks.size()) return;
            const Task& task = tasks[index];
            TrialRecord record;
            record.agent = task.kind;
            record.scene_id = task.scene_id;
            record.seed = task.seed;
            try {
                const sim::Scene& scene = sim::scene_by_id(task.scene_id);
                auto session = factory(task.kind, scene, task.seed);
                auto episode = agents::run_episode(
                    agents::monkey_agent_config(task.kind), scene, task.seed,
                    *session);
                record.success = episode.success;
                record.steps = episode.steps;
                record.wall_time_s = episode.wall_time_s;
                record.tokens = static_cast<double>(episode.tokens);
                record.terminal = sim::to_string(episode.terminal);
            } catch (const std::exception& e) {
                record.success = false;
                record.terminal = std::string("error: ") + e.what();
            }
            records[index] = std::move(record);
        }
    };

    int thread_count = workers > 0
                           ? workers
                           : static_cast<int>(std::max(
                                 1u, std::thread::hardware_concurrency()));
    thread_count = std::min<int>(thread_count, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

namespace {

double x_to_success(double rate, double success_mean, double failure_mean,
                    bool any_failure) {
    if (rate <= 0.0) return kInf;
    if (!any_failure) return success_mean;
    return success_mean + (1.0 / rate - 1.0) * failure_mean;
}

}  // namespace

MetricsRow aggregate(const std::vector<TrialRecord>& cell) {
    if (cell.empty()) throw std::invalid_argument("empty metrics cell");

    MetricsRow row;
    row.agent = cell.front().agent;
    row.scene_id = cell.front().scene_id;
    row.n_trials = static_cast<int>(cell.size());

    double successes = 0;
    double steps = 0, time = 0, tokens = 0;
    double time_s = 0, time_f = 0, tokens_s = 0, tokens_f = 0;
    for (const auto& r : cell) {
        if (r.agent != row.agent || r.scene_id != row.scene_id)
            throw std::invalid_argument("metrics cell mixes agents or scenes");
        steps += r.steps;
        time += r.wall_time_s;
        tokens += r.tokens;
        if (r.success) {
            successes += 1;
            time_s += r.wall_time_s;
            tokens_s += r.tokens;
        } else {
            time_f += r.wall_time_s;
            tokens_f += r.tokens;
        }
    }
    const double n = static_cast<double>(cell.size());
    const double failures = n - successes;
    row.success_rate = successes / n;
    row.avg_steps = steps / n;
    row.avg_time_s = time / n;
    row.avg_tokens = tokens / n;

    const double mean_time_s = successes > 0 ? time_s / successes : 0.0;
    const double mean_time_f = failures > 0 ? time_f / failures : 0.0;
    const double mean_tokens_s = successes > 0 ? tokens_s / successes : 0.0;
    const double mean_tokens_f = failures > 0 ? tokens_f / failures : 0.0;
    row.time_to_success =
        x_to_success(row.success_rate, mean_time_s, mean_time_f, failures > 0);
    row.tokens_to_success = x_to_success(row.success_rate, mean_tokens_s,
                                         mean_tokens_f, failures > 0);
    return row;
}

std::vector<MetricsRow> aggregate_all(const std::vector<TrialRecord>& records) {
    std::map<std::pair<std::string, int>, std::vector<TrialRecord>> cells;
    for (const auto& r : records)
        cells[{agents::to_string(r.agent), r.scene_id}].push_back(r);
    std::vector<MetricsRow> rows;
    rows.reserve(cells.size());
    for (const auto& [key, cell] : cells) rows.push_back(aggregate(cell));
    return rows;
}

std::vector<int> rank_difficulty(const std::vector<MetricsRow>& rows) {
    std::set<std::string> agent_names;
    std::set<int> scene_ids;
    std::map<std::pair<std::string, int>, const MetricsRow*> by_cell;
    for (const auto& row : rows) {
        agent_names.insert(agents::to_string(row.agent));
        scene_ids.insert(row.scene_id);
        by_cell[{agents::to_string(row.agent), row.scene_id}] = &row;
    }

    std::vector<std::string> gaps;
    for (const auto& agent : agent_names)
        for (int scene : scene_ids)
            if (!by_cell.count({agent, scene}))
                gaps.push_back(agent + "/scene " + std::to_string(scene));
    if (!gaps.empty()) {
        std::string message = "ranking needs every (agent, scene) cell; missing:";
        for (const auto& gap : gaps) message += " " + gap;
        throw std::invalid_argument(message);
    }

    struct SceneScore {
        int scene_id;
        double mean_rate;
        double mean_steps;
    };
    std::vector<SceneScore> scores;
    for (int scene : scene_ids) {
        double rate = 0, steps = 0;
        for (const auto& agent : agent_names) {
            const MetricsRow* row = by_cell[{agent, scene}];
            rate += row->success_rate;
            steps += row->avg_steps;
        }
        const double count = static_cast<double>(agent_names.size());
        scores.push_back({scene, rate / count, steps / count});
    }
    std::sort(scores.begin(), scores.end(),
              [](const SceneScore& a, const SceneScore& b) {
                  if (a.mean_rate != b.mean_rate) return a.mean_rate > b.mean_rate;
                  if (a.mean_steps != b.mean_steps)
                      return a.mean_steps < b.mean_steps;
                  return a.scene_id < b.scene_id;
              });

    std::vector<int> order;
    order.reserve(scores.size());
    for (const auto& s : scores) order.push_back(s.scene_id);
    return order;
}

void write_results_csv(const std::vector<MetricsRow>& rows,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "agent,scene,n_trials,success_rate,avg_steps,avg_time_s,avg_tokens,"
           "time_to_success,tokens_to_success\n";
    for (const auto& row : rows) {
        out << agents::to_string(row.agent) << ',' << row.scene_id << ','
            << row.n_trials << ',' << format_double(row.success_rate) << ','
            << format_double(row.avg_steps) << ','
            << format_double(row.avg_time_s) << ','
            << format_double(row.avg_tokens) << ','
            << format_double(row.time_to_success) << ','
            << format_double(row.tokens_to_success) << '\n';
    }
}

std::vector<MetricsRow> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<MetricsRow> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw std::runtime_error("malformed results row: " + line);
        MetricsRow row;
        auto kind = agents::agent_kind_from_name(fields[0]);
        if (!kind) throw std::runtime_error("unknown agent: " + fields[0]);
        row.agent = *kind;
        row.scene_id = std::stoi(fields[1]);
        row.n_trials = std::stoi(fields[2]);
        row.success_rate = std::stod(fields[3]);
        row.avg_steps = std::stod(fields[4]);
        row.avg_time_s = std::stod(fields[5]);
        row.avg_tokens = std::stod(fields[6]);
        row.time_to_success = std::stod(fields[7]);
        row.tokens_to_success = std::stod(fields[8]);
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string humanize_tokens(double value) {
    if (std::isinf(value)) return "∞";
    char buf[64];
    if (value >= 1e6)
        std::snprintf(buf, sizeof(buf), "%.1fM", value / 1e6);
    else if (value >= 1e3)
        std::snprintf(buf, sizeof(buf), "%.1fK", value / 1e3);
    else
        std::snprintf(buf, sizeof(buf), "%.0f", value);
    return buf;
}

std::string fixed(double value, int digits) {
    if (std::isinf(value)) return "∞";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

}  // namespace

TablePaths emit_tables(const std::vector<MetricsRow>& rows,
                       const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    TablePaths paths{directory / "results.csv", directory / "tables.md"};
    write_results_csv(rows, paths.results_csv);

    std::map<int, std::vector<const MetricsRow*>> by_scene;
    for (const auto& row : rows) by_scene[row.scene_id].push_back(&row);

    std::ofstream md(paths.tables_md);
    if (!md) throw std::runtime_error("cannot write " + paths.tables_md.string());
    md << "# Benchmark results\n";
    for (auto& [scene_id, scene_rows] : by_scene) {
        md << "\n## Scene " << scene_id << "\n\n";
        md << "| Agent | SR. | Avg. Steps | Avg. Time(s) | Avg. Tokens | "
              "Time-to-S | Tokens-to-S |\n";
        md << "|---|---|---|---|---|---|---|\n";

        // Highest rate wins; lowest everything else. Infinite bests are not
        // underlined.
        auto best = [&](auto getter, bool maximize) {
            double value = maximize ? -kInf : kInf;
            for (const auto* row : scene_rows)
                value = maximize ? std::max(value, getter(*row))
                                 : std::min(value, getter(*row));
            return value;
        };
        auto cell = [&](double value, double best_value, std::string text) {
            if (!std::isinf(best_value) && value == best_value)
                return "<u>" + text + "</u>";
            return text;
        };
        const double best_rate =
            best([](const MetricsRow& r) { return r.success_rate; }, true);
        const double best_steps =
            best([](const MetricsRow& r) { return r.avg_steps; }, false);
        const double best_time =
            best([](const MetricsRow& r) { return r.avg_time_s; }, false);
        const double best_tokens =
            best([](const MetricsRow& r) { return r.avg_tokens; }, false);
        const double best_tts =
            best([](const MetricsRow& r) { return r.time_to_success; }, false);
        const double best_kts =
            best([](const MetricsRow& r) { return r.tokens_to_success; }, false);

        for (const auto* row : scene_rows) {
            md << "| " << agents::to_string(row->agent) << " | "
               << cell(row->success_rate, best_rate, fixed(row->success_rate, 2))
               << " | "
               << cell(row->avg_steps, best_steps, fixed(row->avg_steps, 1))
               << " | "
               << cell(row->avg_time_s, best_time, fixed(row->avg_time_s, 2))
               << " | "
               << cell(row->avg_tokens, best_tokens,
                       humanize_tokens(row->avg_tokens))
               << " | "
               << cell(row->time_to_success, best_tts,
                       fixed(row->time_to_success, 2))
               << " | "
               << cell(row->tokens_to_success, best_kts,
                       humanize_tokens(row->tokens_to_success))
               << " |\n";
        }
    }
    return paths;
}

}  // namespace ctxlab::bench
