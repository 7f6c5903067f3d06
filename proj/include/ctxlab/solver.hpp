#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ctxlab/monkey.hpp"

namespace ctxlab::sim {

/// Fixed crush outcome per box: whether it crushes on first climb and the
/// height fraction it retains when it does. Determinizes the world for
/// search and replay.
struct CrushRealization {
    std::map<std::string, bool> crushes;
    double retention = 0.7;

    static CrushRealization zero_crush(const Scene& scene);
    static CrushRealization all_crush(const Scene& scene,
                                      double retention = 0.7);
};

/// Scene with crush probabilities forced to 0/1 and degenerate retention
/// bounds, so step() becomes deterministic.
Scene apply_realization(const Scene& scene,
                        const CrushRealization& realization);

struct SolveResult {
    bool solvable = false;
    std::vector<Action> plan;    // minimal-step plan when solvable
    std::size_t explored = 0;    // states expanded
};

/// Breadth-first search over the determinized state space. Plans longer than
/// the scene's step cap are not considered. Throws std::runtime_error when
/// the explored-state cap is exceeded.
SolveResult bfs_solve(const Scene& scene, const CrushRealization& realization,
                      std::size_t state_cap = 2'000'000);

/// All 2^boxes crush-flag combinations at the given retention.
std::vector<CrushRealization> enumerate_realizations(const Scene& scene,
                                                     double retention = 0.7);

}  // namespace ctxlab::sim
