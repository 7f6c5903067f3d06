#include "ctxlab/solver.hpp"

#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ctxlab::sim {

CrushRealization CrushRealization::zero_crush(const Scene& scene) {
    CrushRealization r;
    for (const auto& b : scene.boxes) r.crushes[b.id] = false;
    return r;
}

CrushRealization CrushRealization::all_crush(const Scene& scene,
                                             double retention) {
    CrushRealization r;
    r.retention = retention;
    for (const auto& b : scene.boxes) r.crushes[b.id] = true;
    return r;
}

Scene apply_realization(const Scene& scene,
                        const CrushRealization& realization) {
    Scene out = scene;
    out.crush.clear();
    for (const auto& b : scene.boxes) {
        auto it = realization.crushes.find(b.id);
        const bool crushes = it != realization.crushes.end() && it->second;
        if (crushes) out.crush[b.id] = 1.0;
    }
    out.retention_min = realization.retention;
    out.retention_max = realization.retention;
    return out;
}

std::vector<CrushRealization> enumerate_realizations(const Scene& scene,
                                                     double retention) {
    const std::size_t n = scene.boxes.size();
    std::vector<CrushRealization> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        CrushRealization r;
        r.retention = retention;
        for (std::size_t i = 0; i < n; ++i)
            r.crushes[scene.boxes[i].id] = (mask >> i) & 1;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

/// Candidate actions worth searching from a state. Illegal ones are filtered
/// by the caller via legality(); abandoning never shortens a plan.
std::vector<Action> candidate_actions(const WorldState& state) {
    std::vector<Action> actions;
    actions.push_back(Action::move_left());
    actions.push_back(Action::move_right());
    for (const auto& b : state.boxes()) {
        actions.push_back(Action::climb_up(b.id));
        actions.push_back(Action::grab(b.id));
    }
    for (const auto& p : state.scene().platforms)
        actions.push_back(Action::climb_up(p.id));
    actions.push_back(Action::climb_down());
    if (state.carried_box()) {
        const int cell = state.monkey_cell();
        for (int c = cell - 1; c <= cell + 1; ++c)
            if (c >= 0 && c < state.scene().width)
                actions.push_back(Action::place_at(c));
    }
    return actions;
}

}  // namespace

SolveResult bfs_solve(const Scene& scene, const CrushRealization& realization,
                      std::size_t state_cap) {
    const Scene determinized = apply_realization(scene, realization);
    WorldState start = WorldState::reset(determinized, 0);

    struct Node {
        WorldState state;
        std::size_t parent;  // index into nodes; npos for the root
        Action action;
    };
    constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<Node> nodes;
    nodes.push_back({start, npos, Action::abandon()});
    std::deque<std::size_t> frontier{0};
    std::unordered_set<std::string> seen{start.key()};
    std::vector<std::size_t> depth{0};

    SolveResult result;
    while (!frontier.empty()) {
        const std::size_t index = frontier.front();
        frontier.pop_front();
        result.explored += 1;

        // Plans beyond the step cap would terminate as step-limit failures.
        if (depth[index] >= static_cast<std::size_t>(determinized.step_cap))
            continue;

        const WorldState current = nodes[index].state;
        for (const Action& action : candidate_actions(current)) {
            if (current.legality(action)) continue;
            auto [next, events] = step(current, action);
            (void)events;
            if (next.terminal() == Terminal::Success) {
                std::vector<Action> plan{action};
                for (std::size_t at = index; at != 0; at = nodes[at].parent)
                    plan.insert(plan.begin(), nodes[at].action);
                result.solvable = true;
                result.plan = std::move(plan);
                return result;
            }
            if (next.terminal() != Terminal::Running) continue;
            std::string key = next.key();
            if (!seen.insert(std::move(key)).second) continue;
            nodes.push_back({std::move(next), index, action});
            depth.push_back(depth[index] + 1);
            frontier.push_back(nodes.size() - 1);
            if (nodes.size() > state_cap)
                throw std::runtime_error(
                    "state-space cap exceeded: " + std::to_string(state_cap));
        }
    }
    return result;
}

}  // namespace ctxlab::sim
