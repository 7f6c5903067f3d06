#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctxlab/rng.hpp"

namespace ctxlab::sim {

enum class SceneCategory { Classic, DualBananas, Shortsighted, Overweight, Comprehensive };
enum class Difficulty { Easy, Medium, Hard };
enum class BoxSize { Small, Large };

std::string to_string(SceneCategory category);
std::string to_string(Difficulty difficulty);

constexpr double kSmallBoxHeight = 1.0;
constexpr double kLargeBoxHeight = 2.0;

/// Height of a box before any crushing.
double nominal_height(BoxSize size);

struct BoxSpec {
    std::string id;
    int cell = 0;
    BoxSize size = BoxSize::Small;
    std::string base;  // "" = ground, otherwise the platform id it starts on
};

struct PlatformSpec {
    std::string id;
    int cell = 0;
    double height = 0.0;
};

/// Immutable scene description. Built-in scenes come in five categories of
/// three difficulty levels each, IDs 1..15 in category order.
struct Scene {
    int id = 0;
    SceneCategory category = SceneCategory::Classic;
    Difficulty difficulty = Difficulty::Easy;
    int width = 12;
    std::optional<int> interaction_range;  // nullopt = unlimited
    int step_cap = 300;
    int monkey_cell = 0;
    std::vector<BoxSpec> boxes;
    std::vector<PlatformSpec> platforms;
    std::vector<std::string> bananas;       // platform ids holding a banana
    std::map<std::string, double> crush;    // box id -> crush probability
    double retention_min = 0.5;             // crushed height fraction bounds
    double retention_max = 0.7;

    double crush_probability(const std::string& box_id) const;
    const PlatformSpec* platform(const std::string& id) const;

    /// Throws std::invalid_argument on inconsistent layouts.
    void validate() const;
};

const std::vector<Scene>& builtin_scenes();
const Scene& scene_by_id(int id);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
void write_scene(const Scene& scene, const std::filesystem::path& path);
Scene read_scene(const std::filesystem::path& path);

struct Action {
    enum class Kind {
        MoveLeft,
        MoveRight,
        ClimbUp,
        ClimbDown,
        Grab,
        Place,
        Abandon
    };

    Kind kind = Kind::Abandon;
    std::string target;  // entity id for ClimbUp/Grab, optionally for Place
    int cell = -1;       // Place target cell when >= 0

    static Action move_left() { return {Kind::MoveLeft, {}, -1}; }
    static Action move_right() { return {Kind::MoveRight, {}, -1}; }
    static Action climb_up(std::string id) { return {Kind::ClimbUp, std::move(id), -1}; }
    static Action climb_down() { return {Kind::ClimbDown, {}, -1}; }
    static Action grab(std::string id) { return {Kind::Grab, std::move(id), -1}; }
    static Action place_at(int cell) { return {Kind::Place, {}, cell}; }
    static Action place_on(std::string id) { return {Kind::Place, std::move(id), -1}; }
    static Action abandon() { return {Kind::Abandon, {}, -1}; }

    friend bool operator==(const Action&, const Action&) = default;
};

/// Line format used across plans, scripts and agent replies, e.g.
/// "move_left", "climb_up b1", "grab b2", "place 6", "place p1", "abandon".
std::string format_action(const Action& action);
std::optional<Action> parse_action(const std::string& text);

enum class Terminal { Running, Success, StepLimit, Abandoned };
std::string to_string(Terminal terminal);

struct Event {
    enum class Kind { Rejected, Crushed, Finished };
    Kind kind = Kind::Rejected;
    std::string detail;
};

struct BoxState {
    std::string id;
    BoxSize size = BoxSize::Small;
    double height = kSmallBoxHeight;  // current height, never increases
    bool crushed = false;
    bool carried = false;
    int cell = 0;       // meaningful when not carried
    std::string base;   // "" = ground; else the platform/box it rests on
};

/// A value: stepping produces a new state, copies are independent.
class WorldState {
  public:
    static WorldState reset(const Scene& scene, std::uint64_t seed);

    const Scene& scene() const { return *scene_; }
    Terminal terminal() const { return terminal_; }
    int step_count() const { return step_count_; }

    int monkey_cell() const { return monkey_cell_; }
    /// "" when on the ground, otherwise the supporting entity id.
    const std::string& monkey_support() const { return monkey_support_; }
    const std::optional<std::string>& carried_box() const { return carried_; }
    double monkey_elevation() const;

    const std::vector<BoxState>& boxes() const { return boxes_; }
    const BoxState* box(const std::string& id) const;

    /// Top surface height of a box (its resting elevation plus its height).
    double box_top(const std::string& id) const;
    /// Elevation a box rests at (0 on the ground).
    double box_bottom(const std::string& id) const;
    /// Id of the box resting directly on `base_id`, if any.
    std::optional<std::string> box_on(const std::string& base_id) const;
    /// Topmost box of the pile at a cell (ground piles and platform piles).
    std::optional<std::string> pile_top_at(int cell) const;
    /// Height of the surface a placed box would land on at `cell`.
    double surface_top_at(int cell) const;

    /// Pure legality predicate: empty result means legal, otherwise the
    /// rejection reason.
    std::optional<std::string> legality(const Action& action) const;

    /// State key for search and determinism checks (ignores the rng stream).
    std::string key() const;

  private:
    std::shared_ptr<const Scene> scene_;
    int monkey_cell_ = 0;
    std::string monkey_support_;
    std::optional<std::string> carried_;
    std::vector<BoxState> boxes_;
    int step_count_ = 0;
    Terminal terminal_ = Terminal::Running;
    SplitMix64 rng_;

    BoxState* box_mut(const std::string& id);
    friend std::pair<WorldState, std::vector<Event>> step(const WorldState&,
                                                          const Action&);
};

/// Applies one action. Illegal actions consume the step and emit a rejection
/// event; stepping a terminal state throws std::logic_error.
std::pair<WorldState, std::vector<Event>> step(const WorldState& state,
                                               const Action& action);

/// Structured text rendering of the state. Boxes farther than the
/// interaction range render size/height/crushed as "unknown"; unmasked
/// fields always equal ground truth. Field order is fixed.
std::string observe(const WorldState& state);

}  // namespace ctxlab::sim
