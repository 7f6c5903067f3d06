#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ctxlab/bench.hpp"

using namespace ctxlab;
using namespace ctxlab::bench;

namespace {

TrialRecord make_record(agents::AgentKind agent, int scene, bool success,
                        double steps, double time, double tokens) {
    TrialRecord r;
    r.agent = agent;
    r.scene_id = scene;
    r.success = success;
    r.steps = steps;
    r.wall_time_s = time;
    r.tokens = tokens;
    r.terminal = success ? "success" : "step_limit";
    return r;
}

MetricsRow make_row(agents::AgentKind agent, int scene, double rate,
                    double steps) {
    MetricsRow row;
    row.agent = agent;
    row.scene_id = scene;
    row.n_trials = 100;
    row.success_rate = rate;
    row.avg_steps = steps;
    return row;
}

}  // namespace

TEST_CASE("run_matrix produces one record per agent, scene and trial") {
    const std::vector<agents::AgentKind> kinds = {agents::AgentKind::Basic,
                                                  agents::AgentKind::ReAct};
    const std::vector<int> scenes = {1, 4, 7};
    const auto records =
        run_matrix(kinds, scenes, 5, 0, plan_replay_factory(), 2);
    CHECK(records.size() == 2 * 3 * 5);

    // Scripted runs on crush-free scenes all succeed.
    for (const auto& r : records) {
        CAPTURE(r.scene_id);
        CHECK(r.success);
    }
}

TEST_CASE("rerunning the matrix with the same seed gives identical records") {
    const std::vector<agents::AgentKind> kinds = {agents::AgentKind::Basic};
    const std::vector<int> scenes = {10, 11};  // stochastic crush scenes
    auto run = [&]() {
        return run_matrix(kinds, scenes, 8, 42, plan_replay_factory(), 4);
    };
    const auto first = run();
    const auto second = run();
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].success == second[i].success);
        CHECK(first[i].steps == second[i].steps);
        CHECK(first[i].tokens == second[i].tokens);
        CHECK(first[i].seed == second[i].seed);
    }
}

TEST_CASE("aggregate implements the cost-to-success formula") {
    SUBCASE("full success keeps the success mean") {
        std::vector<TrialRecord> cell = {
            make_record(agents::AgentKind::Basic, 1, true, 7, 10.0, 100),
            make_record(agents::AgentKind::Basic, 1, true, 7, 14.0, 120),
        };
        const MetricsRow row = aggregate(cell);
        CHECK(row.success_rate == 1.0);
        CHECK(row.time_to_success == doctest::Approx(12.0));
        CHECK(row.tokens_to_success == doctest::Approx(110.0));
    }

    SUBCASE("the r=0.5, 10s/20s example equals 30") {
        std::vector<TrialRecord> cell = {
            make_record(agents::AgentKind::Basic, 1, true, 7, 10.0, 100),
            make_record(agents::AgentKind::Basic, 1, false, 300, 20.0, 900),
        };
        const MetricsRow row = aggregate(cell);
        CHECK(row.success_rate == 0.5);
        CHECK(row.time_to_success == doctest::Approx(30.0).epsilon(1e-12));
    }

    SUBCASE("monte carlo: repeat-until-success cost converges to the formula") {
        // Expected cumulative time until first success at r=0.5 with a fixed
        // 10s success cost and 20s failure cost.
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double rate = 0.5, cost_success = 10.0, cost_failure = 20.0;
        const std::size_t samples = 1'000'000;
        long double total = 0.0L;
        for (std::size_t i = 0; i < samples; ++i) {
            double cost = 0.0;
            while (uniform(rng) >= rate) cost += cost_failure;
            cost += cost_success;
            total += cost;
        }
        const double simulated =
            static_cast<double>(total / static_cast<long double>(samples));
        const double formula =
            cost_success + (1.0 / rate - 1.0) * cost_failure;  // 30
        CHECK(formula == doctest::Approx(30.0));
        CHECK(std::abs(simulated - formula) / formula < 0.01);
    }

    SUBCASE("zero successes renders as infinity") {
        std::vector<TrialRecord> cell = {
            make_record(agents::AgentKind::Basic, 1, false, 300, 20.0, 900),
            make_record(agents::AgentKind::Basic, 1, false, 300, 22.0, 950),
        };
        const MetricsRow row = aggregate(cell);
        CHECK(row.success_rate == 0.0);
        CHECK(std::isinf(row.time_to_success));
        CHECK(std::isinf(row.tokens_to_success));
    }
}

TEST_CASE("all-trial averages decompose into the success/failure mixture") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> value(1.0, 500.0);
    std::bernoulli_distribution success(0.6);
    for (int trial_set = 0; trial_set < 50; ++trial_set) {
        std::vector<TrialRecord> cell;
        double sum_s = 0, sum_f = 0;
        int n_s = 0, n_f = 0;
        for (int i = 0; i < 40; ++i) {
            const bool ok = success(rng);
            const double time = value(rng);
            cell.push_back(make_record(agents::AgentKind::OR, 3, ok, 10, time,
                                       time * 100));
            if (ok) {
                sum_s += time;
                ++n_s;
            } else {
                sum_f += time;
                ++n_f;
            }
        }
        const MetricsRow row = aggregate(cell);
        const double r = row.success_rate;
        const double x_s = n_s ? sum_s / n_s : 0.0;
        const double x_f = n_f ? sum_f / n_f : 0.0;
        CHECK(std::abs(row.avg_time_s - (r * x_s + (1 - r) * x_f)) < 1e-12);

        // The expected cost is never below the success mean.
        if (n_s > 0) CHECK(row.time_to_success >= x_s - 1e-12);
    }
}

TEST_CASE("aggregate is permutation-invariant") {
    std::vector<TrialRecord> cell;
    for (int i = 0; i < 20; ++i)
        cell.push_back(make_record(agents::AgentKind::MLDT, 2, i % 3 != 0,
                                   10.0 + i, 5.0 + i, 100.0 * i));
    const MetricsRow forward = aggregate(cell);
    std::reverse(cell.begin(), cell.end());
    const MetricsRow backward = aggregate(cell);
    CHECK(forward.success_rate == backward.success_rate);
    CHECK(forward.avg_steps == backward.avg_steps);
    CHECK(forward.avg_time_s == doctest::Approx(backward.avg_time_s).epsilon(1e-12));
    CHECK(forward.time_to_success ==
          doctest::Approx(backward.time_to_success).epsilon(1e-12));
}

TEST_CASE("difficulty ranking orders by mean success rate, then steps") {
    SUBCASE("higher mean success rate ranks easier") {
        std::vector<MetricsRow> rows = {
            make_row(agents::AgentKind::Basic, 1, 0.9, 10),
            make_row(agents::AgentKind::ReAct, 1, 0.8, 12),
            make_row(agents::AgentKind::Basic, 2, 0.3, 10),
            make_row(agents::AgentKind::ReAct, 2, 0.4, 12),
        };
        CHECK(rank_difficulty(rows) == std::vector<int>{1, 2});
    }

    SUBCASE("equal rates fall back to fewer average steps") {
        std::vector<MetricsRow> rows = {
            make_row(agents::AgentKind::Basic, 1, 0.5, 9.0),
            make_row(agents::AgentKind::Basic, 2, 0.5, 7.0),
        };
        CHECK(rank_difficulty(rows) == std::vector<int>{2, 1});
    }

    SUBCASE("missing cells are reported by name") {
        std::vector<MetricsRow> rows = {
            make_row(agents::AgentKind::Basic, 1, 0.5, 9.0),
            make_row(agents::AgentKind::ReAct, 1, 0.5, 9.0),
            make_row(agents::AgentKind::Basic, 2, 0.5, 9.0),
        };
        try {
            rank_difficulty(rows);
            FAIL("expected an error about missing cells");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("react/scene 2") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("the reference fixture reproduces the hardest-five ordering") {
    const auto rows = read_results_csv(
        std::filesystem::path(CTXLAB_DATA_DIR) / "reference_results.csv");
    REQUIRE(rows.size() == 90);

    const auto order = rank_difficulty(rows);
    REQUIRE(order.size() == 15);
    const std::vector<int> hardest_five(order.end() - 5, order.end());
    CHECK(hardest_five == std::vector<int>{14, 3, 9, 12, 15});
}

TEST_CASE("tables render fixed columns with infinity spelled out") {
    const auto dir = std::filesystem::temp_directory_path() / "ctxlab_tables";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    SUBCASE("a single cell emits a single data row") {
        std::vector<MetricsRow> rows = {make_row(agents::AgentKind::Basic, 1,
                                                 0.75, 9.0)};
        rows[0].time_to_success = 12.5;
        rows[0].tokens_to_success = 1500;
        const auto paths = emit_tables(rows, dir);

        std::ifstream csv(paths.results_csv);
        std::string line;
        int data_rows = 0;
        std::getline(csv, line);
        CHECK(line ==
              "agent,scene,n_trials,success_rate,avg_steps,avg_time_s,"
              "avg_tokens,time_to_success,tokens_to_success");
        while (std::getline(csv, line))
            if (!line.empty()) ++data_rows;
        CHECK(data_rows == 1);
    }

    SUBCASE("infinity appears literally in the markdown") {
        std::vector<MetricsRow> rows = {make_row(agents::AgentKind::Basic, 3,
                                                 0.0, 27.1)};
        rows[0].time_to_success = std::numeric_limits<double>::infinity();
        rows[0].tokens_to_success = std::numeric_limits<double>::infinity();
        const auto paths = emit_tables(rows, dir);
        std::ifstream md(paths.tables_md);
        std::stringstream buffer;
        buffer << md.rdbuf();
        CHECK(buffer.str().find("∞") != std::string::npos);
        CHECK(buffer.str().find("| Agent | SR. | Avg. Steps | Avg. Time(s) | "
                                "Avg. Tokens | Time-to-S | Tokens-to-S |") !=
              std::string::npos);
    }

    SUBCASE("the csv reparses to the in-memory rows exactly") {
        std::vector<MetricsRow> rows;
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> value(0.0, 1000.0);
        for (int scene = 1; scene <= 3; ++scene) {
            MetricsRow row = make_row(agents::AgentKind::PlanORN, scene,
                                      value(rng) / 1000.0, value(rng));
            row.avg_time_s = value(rng);
            row.avg_tokens = value(rng);
            row.time_to_success =
                scene == 2 ? std::numeric_limits<double>::infinity()
                           : value(rng);
            row.tokens_to_success = value(rng);
            rows.push_back(row);
        }
        write_results_csv(rows, dir / "roundtrip.csv");
        const auto round = read_results_csv(dir / "roundtrip.csv");
        REQUIRE(round.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(round[i].agent == rows[i].agent);
            CHECK(round[i].scene_id == rows[i].scene_id);
            CHECK(round[i].n_trials == rows[i].n_trials);
            CHECK(round[i].success_rate == rows[i].success_rate);
            CHECK(round[i].avg_steps == rows[i].avg_steps);
            CHECK(round[i].avg_time_s == rows[i].avg_time_s);
            CHECK(round[i].avg_tokens == rows[i].avg_tokens);
            CHECK(round[i].time_to_success == rows[i].time_to_success);
            CHECK(round[i].tokens_to_success == rows[i].tokens_to_success);
        }
    }

    std::filesystem::remove_all(dir);
}

TEST_CASE("crush scenes produce mixed outcomes under plan replay") {
    // The replayed zero-crush plan derails when a box actually crushes, so
    // stochastic scenes yield a saturating mix of successes and failures and
    // exercise the infinity-free aggregation path end to end.
    const auto records = run_matrix({agents::AgentKind::Basic}, {11}, 30, 7,
                                    plan_replay_factory(), 4);
    const auto rows = aggregate_all(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_trials == 30);
    CHECK(rows[0].success_rate > 0.0);
    CHECK(rows[0].success_rate < 1.0);
}
