#include "ctxlab/monkey.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ctxlab::sim {

using nlohmann::json;

std::string to_string(SceneCategory category) {
    switch (category) {
        case SceneCategory::Classic: return "classic";
        case SceneCategory::DualBananas: return "dual_bananas";
        case SceneCategory::Shortsighted: return "shortsighted";
        case SceneCategory::Overweight: return "overweight";
        case SceneCategory::Comprehensive: return "comprehensive";
    }
    return "classic";
}

std::string to_string(Difficulty difficulty) {
    switch (difficulty) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "easy";
}

std::string to_string(Terminal terminal) {
    switch (terminal) {
        case Terminal::Running: return "running";
        case Terminal::Success: return "success";
        case Terminal::StepLimit: return "step_limit";
        case Terminal::Abandoned: return "abandoned";
    }
    return "running";
}

double nominal_height(BoxSize size) {
    return size == BoxSize::Small ? kSmallBoxHeight : kLargeBoxHeight;
}

double Scene::crush_probability(const std::string& box_id) const {
    auto it = crush.find(box_id);
    return it == crush.end() ? 0.0 : it->second;
}

const PlatformSpec* Scene::platform(const std::string& pid) const {
    for (const auto& p : platforms)
        if (p.id == pid) return &p;
    return nullptr;
}

void Scene::validate() const {
    if (width <= 0) throw std::invalid_argument("scene width must be positive");
    if (bananas.empty()) throw std::invalid_argument("scene needs a banana");
    if (monkey_cell < 0 || monkey_cell >= width)
        throw std::invalid_argument("monkey cell out of range");

    std::set<std::string> ids;
    std::set<int> platform_cells;
    for (const auto& p : platforms) {
        if (!ids.insert(p.id).second)
            throw std::invalid_argument("duplicate entity id: " + p.id);
        if (p.cell < 0 || p.cell >= width)
            throw std::invalid_argument("platform cell out of range: " + p.id);
        if (!platform_cells.insert(p.cell).second)
            throw std::invalid_argument("two platforms share a cell");
        if (p.height <= 0)
            throw std::invalid_argument("platform height must be positive");
    }
    for (const auto& b : boxes) {
        if (!ids.insert(b.id).second)
            throw std::invalid_argument("duplicate entity id: " + b.id);
        if (b.cell < 0 || b.cell >= width)
            throw std::invalid_argument("box cell out of range: " + b.id);
        if (!b.base.empty()) {
            const PlatformSpec* p = platform(b.base);
            if (!p)
                throw std::invalid_argument("box " + b.id +
                                            " rests on unknown platform");
            if (p->cell != b.cell)
                throw std::invalid_argument("box " + b.id +
                                            " cell disagrees with its platform");
        } else if (platform_cells.count(b.cell)) {
            throw std::invalid_argument("ground box " + b.id +
                                        " shares a cell with a platform");
        }
    }
    for (const auto& banana : bananas)
        if (!platform(banana))
            throw std::invalid_argument("banana on unknown platform: " + banana);
    for (const auto& [box_id, p] : crush) {
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("crush probability out of [0,1]");
        bool found = false;
        for (const auto& b : boxes) found |= (b.id == box_id);
        if (!found)
            throw std::invalid_argument("crush entry for unknown box: " + box_id);
    }
    if (retention_min > retention_max || retention_min <= 0.0 ||
        retention_max > 1.0)
        throw std::invalid_argument("bad crush retention bounds");
}

namespace {

Scene make_scene(int id, SceneCategory category, Difficulty difficulty,
                 std::optional<int> range, int monkey,
                 std::vector<BoxSpec> boxes, std::vector<PlatformSpec> platforms,
                 std::vector<std::string> bananas,
                 std::map<std::string, double> crush) {
    Scene s;
    s.id = id;
    s.category = category;
    s.difficulty = difficulty;
    s.interaction_range = range;
    s.monkey_cell = monkey;
    s.boxes = std::move(boxes);
    s.platforms = std::move(platforms);
    s.bananas = std::move(bananas);
    s.crush = std::move(crush);
    s.validate();
    return s;
}

std::vector<Scene> build_scenes() {
    // Heights: small box 1, large box 2; platforms 2 (easy), 3 (medium),
    // 3 + 5 (hard). The hard variants of the crush categories lower the top
    // platform to 4.5 and stage a spare small box on the first platform so
    // every crush realization stays solvable; the search oracle verifies all
    // of this in the test suite.
    std::vector<Scene> scenes;
    const auto none = std::optional<int>{};
    const auto near = std::optional<int>{2};

    auto classic_easy = [&](int id, SceneCategory cat, std::optional<int> range,
                            bool spare, std::map<std::string, double> crush) {
        std::vector<BoxSpec> boxes = {{"b1", 5, BoxSize::Small, ""}};
        if (spare) boxes.push_back({"b2", 1, BoxSize::Small, ""});
        return make_scene(id, cat, Difficulty::Easy, range, 3, std::move(boxes),
                          {{"p1", 8, 2.0}}, {"p1"}, std::move(crush));
    };
    auto classic_medium = [&](int id, SceneCategory cat,
                              std::optional<int> range, bool spare,
                              std::map<std::string, double> crush) {
        std::vector<BoxSpec> boxes = {{"b1", 5, BoxSize::Small, ""},
                                      {"b2", 7, BoxSize::Large, ""}};
        if (spare) boxes.push_back({"b3", 1, BoxSize::Small, ""});
        return make_scene(id, cat, Difficulty::Medium, range, 3,
                          std::move(boxes), {{"p1", 8, 3.0}}, {"p1"},
                          std::move(crush));
    };
    auto classic_hard = [&](int id, SceneCategory cat,
                            std::optional<int> range) {
        return make_scene(id, cat, Difficulty::Hard, range, 3,
                          {{"b1", 4, BoxSize::Small, ""},
                           {"b2", 6, BoxSize::Small, ""},
                           {"b3", 7, BoxSize::Large, ""}},
                          {{"p1", 8, 3.0}, {"p2", 9, 5.0}}, {"p2"}, {});
    };
    auto crush_hard = [&](int id, SceneCategory cat, std::optional<int> range) {
        return make_scene(id, cat, Difficulty::Hard, range, 3,
                          {{"b1", 4, BoxSize::Small, ""},
                           {"b2", 6, BoxSize::Small, ""},
                           {"b3", 7, BoxSize::Large, ""},
                           {"b4", 8, BoxSize::Small, "p1"}},
                          {{"p1", 8, 3.0}, {"p2", 9, 4.5}}, {"p2"},
                          {{"b1", 0.3}, {"b2", 0.3}, {"b3", 0.5}, {"b4", 0.3}});
    };

    // 1-3 classic
    scenes.push_back(classic_easy(1, SceneCategory::Classic, none, false, {}));
    scenes.push_back(classic_medium(2, SceneCategory::Classic, none, false, {}));
    scenes.push_back(classic_hard(3, SceneCategory::Classic, none));

    // 4-6 dual bananas
    scenes.push_back(make_scene(4, SceneCategory::DualBananas, Difficulty::Easy,
                                none, 3, {{"b1", 5, BoxSize::Small, ""}},
                                {{"p1", 8, 2.0}, {"p2", 1, 2.0}}, {"p1", "p2"},
                                {}));
    scenes.push_back(make_scene(
        5, SceneCategory::DualBananas, Difficulty::Medium, none, 6,
        {{"b1", 5, BoxSize::Small, ""},
         {"b2", 3, BoxSize::Large, ""},
         {"b3", 7, BoxSize::Small, ""},
         {"b4", 9, BoxSize::Large, ""}},
        {{"p1", 2, 3.0}, {"p2", 10, 3.0}}, {"p1", "p2"}, {}));
    scenes.push_back(make_scene(6, SceneCategory::DualBananas, Difficulty::Hard,
                                none, 3,
                                {{"b1", 5, BoxSize::Small, ""},
                                 {"b2", 1, BoxSize::Large, ""}},
                                {{"p1", 8, 2.0}, {"p2", 0, 3.0}}, {"p1", "p2"},
                                {}));

    // 7-9 shortsighted: classic layouts under a finite interaction range
    scenes.push_back(classic_easy(7, SceneCategory::Shortsighted, near, false, {}));
    scenes.push_back(classic_medium(8, SceneCategory::Shortsighted, near, false, {}));
    scenes.push_back(classic_hard(9, SceneCategory::Shortsighted, near));

    // 10-12 overweight: crush probabilities plus a spare small box
    scenes.push_back(classic_easy(10, SceneCategory::Overweight, none, true,
                                  {{"b1", 0.3}, {"b2", 0.3}}));
    scenes.push_back(classic_medium(11, SceneCategory::Overweight, none, true,
                                    {{"b1", 0.3}, {"b2", 0.5}, {"b3", 0.3}}));
    scenes.push_back(crush_hard(12, SceneCategory::Overweight, none));

    // 13-15 comprehensive: both dynamic elements at once
    scenes.push_back(classic_easy(13, SceneCategory::Comprehensive, near, true,
                                  {{"b1", 0.3}, {"b2", 0.3}}));
    scenes.push_back(classic_medium(14, SceneCategory::Comprehensive, near,
                                    true,
                                    {{"b1", 0.3}, {"b2", 0.5}, {"b3", 0.3}}));
    scenes.push_back(crush_hard(15, SceneCategory::Comprehensive, near));
    return scenes;
}

}  // namespace

const std::vector<Scene>& builtin_scenes() {
    static const std::vector<Scene> scenes = build_scenes();
    return scenes;
}

const Scene& scene_by_id(int id) {
    for (const auto& scene : builtin_scenes())
        if (scene.id == id) return scene;
    throw std::invalid_argument("unknown scene: " + std::to_string(id));
}

// --- scene JSON -------------------------------------------------------------

namespace {

SceneCategory category_from_string(const std::string& s) {
    for (auto c : {SceneCategory::Classic, SceneCategory::DualBananas,
                   SceneCategory::Shortsighted, SceneCategory::Overweight,
                   SceneCategory::Comprehensive})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown scene category: " + s);
}

Difficulty difficulty_from_string(const std::string& s) {
    for (auto d : {Difficulty::Easy, Difficulty::Medium, Difficulty::Hard})
        if (to_string(d) == s) return d;
    throw std::invalid_argument("unknown difficulty: " + s);
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
    json doc;
    doc["id"] = scene.id;
    doc["category"] = to_string(scene.category);
    doc["difficulty"] = to_string(scene.difficulty);
    doc["width"] = scene.width;
    if (scene.interaction_range)
        doc["interaction_range"] = *scene.interaction_range;
    else
        doc["interaction_range"] = nullptr;
    doc["step_cap"] = scene.step_cap;
    doc["entities"] = json::array();
    doc["entities"].push_back({{"type", "monkey"}, {"cell", scene.monkey_cell}});
    for (const auto& b : scene.boxes) {
        json e = {{"type", "box"},
                  {"id", b.id},
                  {"cell", b.cell},
                  {"size", b.size == BoxSize::Small ? "small" : "large"}};
        if (!b.base.empty()) e["on"] = b.base;
        doc["entities"].push_back(std::move(e));
    }
    for (const auto& p : scene.platforms)
        doc["entities"].push_back({{"type", "platform"},
                                   {"id", p.id},
                                   {"cell", p.cell},
                                   {"height", p.height}});
    for (const auto& banana : scene.bananas)
        doc["entities"].push_back({{"type", "banana"}, {"platform", banana}});
    doc["crush"] = scene.crush;
    doc["crush_retention"] = {scene.retention_min, scene.retention_max};
    return doc.dump(2);
}

Scene scene_from_json(const std::string& text) {
    json doc = json::parse(text);
    Scene scene;
    scene.id = doc.at("id").get<int>();
    scene.category = category_from_string(doc.at("category").get<std::string>());
    scene.difficulty =
        difficulty_from_string(doc.at("difficulty").get<std::string>());
    scene.width = doc.at("width").get<int>();
    if (!doc.at("interaction_range").is_null())
        scene.interaction_range = doc.at("interaction_range").get<int>();
    scene.step_cap = doc.at("step_cap").get<int>();
    for (const auto& e : doc.at("entities")) {
        const std::string type = e.at("type").get<std::string>();
        if (type == "monkey") {
            scene.monkey_cell = e.at("cell").get<int>();
        } else if (type == "box") {
            BoxSpec b;
            b.id = e.at("id").get<std::string>();
            b.cell = e.at("cell").get<int>();
            b.size = e.at("size").get<std::string>() == "small"
                         ? BoxSize::Small
                         : BoxSize::Large;
            if (e.contains("on")) b.base = e.at("on").get<std::string>();
            scene.boxes.push_back(std::move(b));
        } else if (type == "platform") {
            scene.platforms.push_back({e.at("id").get<std::string>(),
                                       e.at("cell").get<int>(),
                                       e.at("height").get<double>()});
        } else if (type == "banana") {
            scene.bananas.push_back(e.at("platform").get<std::string>());
        } else {
            throw std::invalid_argument("unknown entity type: " + type);
        }
    }
    if (doc.contains("crush"))
        scene.crush = doc.at("crush").get<std::map<std::string, double>>();
    if (doc.contains("crush_retention")) {
        scene.retention_min = doc.at("crush_retention").at(0).get<double>();
        scene.retention_max = doc.at("crush_retention").at(1).get<double>();
    }
    scene.validate();
    return scene;
}

void write_scene(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << scene_to_json(scene) << '\n';
}

Scene read_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return scene_from_json(buffer.str());
}

// --- actions ----------------------------------------------------------------

std::string format_action(const Action& action) {
    switch (action.kind) {
        case Action::Kind::MoveLeft: return "move_left";
        case Action::Kind::MoveRight: return "move_right";
        case Action::Kind::ClimbUp: return "climb_up " + action.target;
        case Action::Kind::ClimbDown: return "climb_down";
        case Action::Kind::Grab: return "grab " + action.target;
        case Action::Kind::Place:
            if (action.cell >= 0) return "place " + std::to_string(action.cell);
            return "place " + action.target;
        case Action::Kind::Abandon: return "abandon";
    }
    return "abandon";
}

std::optional<Action> parse_action(const std::string& text) {
    std::istringstream in(text);
    std::string verb, arg;
    in >> verb >> arg;
    if (verb == "move_left") return Action::move_left();
    if (verb == "move_right") return Action::move_right();
    if (verb == "climb_down") return Action::climb_down();
    if (verb == "abandon") return Action::abandon();
    if (verb == "climb_up" && !arg.empty()) return Action::climb_up(arg);
    if (verb == "grab" && !arg.empty()) return Action::grab(arg);
    if (verb == "place" && !arg.empty()) {
        if (std::all_of(arg.begin(), arg.end(),
                        [](unsigned char c) { return std::isdigit(c); }))
            return Action::place_at(std::stoi(arg));
        return Action::place_on(arg);
    }
    return std::nullopt;
}

// --- world state ------------------------------------------------------------

WorldState WorldState::reset(const Scene& scene, std::uint64_t seed) {
    scene.validate();
    WorldState state;
    state.scene_ = std::make_shared<Scene>(scene);
    state.monkey_cell_ = scene.monkey_cell;
    state.rng_ = SplitMix64(seed);
    for (const auto& spec : scene.boxes) {
        BoxState b;
        b.id = spec.id;
        b.size = spec.size;
        b.height = nominal_height(spec.size);
        b.cell = spec.cell;
        b.base = spec.base;
        state.boxes_.push_back(std::move(b));
    }
    return state;
}

const BoxState* WorldState::box(const std::string& id) const {
    for (const auto& b : boxes_)
        if (b.id == id) return &b;
    return nullptr;
}

BoxState* WorldState::box_mut(const std::string& id) {
    for (auto& b : boxes_)
        if (b.id == id) return &b;
    return nullptr;
}

double WorldState::box_bottom(const std::string& id) const {
    const BoxState* b = box(id);
    if (!b) throw std::invalid_argument("unknown box: " + id);
    if (b->base.empty()) return 0.0;
    if (const PlatformSpec* p = scene_->platform(b->base)) return p->height;
    return box_top(b->base);
}

double WorldState::box_top(const std::string& id) const {
    const BoxState* b = box(id);
    if (!b) throw std::invalid_argument("unknown box: " + id);
    return box_bottom(id) + b->height;
}

std::optional<std::string> WorldState::box_on(const std::string& base_id) const {
    for (const auto& b : boxes_)
        if (!b.carried && b.base == base_id) return b.id;
    return std::nullopt;
}

std::optional<std::string> WorldState::pile_top_at(int cell) const {
    // Walk up from the cell's ground box or platform.
    std::string current;
    for (const auto& b : boxes_)
        if (!b.carried && b.cell == cell && b.base.empty()) current = b.id;
    if (current.empty()) {
        for (const auto& p : scene_->platforms)
            if (p.cell == cell) {
                if (auto on = box_on(p.id)) current = *on;
            }
    }
    if (current.empty()) return std::nullopt;
    while (auto above = box_on(current)) current = *above;
    return current;
}

double WorldState::surface_top_at(int cell) const {
    if (auto top = pile_top_at(cell)) return box_top(*top);
    for (const auto& p : scene_->platforms)
        if (p.cell == cell) return p.height;
    return 0.0;
}

double WorldState::monkey_elevation() const {
    if (monkey_support_.empty()) return 0.0;
    if (const PlatformSpec* p = scene_->platform(monkey_support_))
        return p->height;
    return box_top(monkey_support_);
}

namespace {

bool within_interaction_range(const Scene& scene, int a, int b) {
    if (!scene.interaction_range) return true;
    return std::abs(a - b) <= *scene.interaction_range;
}

// Climb, grab and place operate on targets at most one cell away; the
// interaction range additionally caps them in shortsighted scenes.
bool reachable(const Scene& scene, int monkey, int target) {
    return std::abs(monkey - target) <= 1 &&
           within_interaction_range(scene, monkey, target);
}

constexpr double kClimbStep = 1.0;   // maximum climb rise per action
constexpr double kReachDown = 1.0;   // highest box bottom grabbable from ground
constexpr double kHoist = 1.0;       // how far above the hands a box can land

}  // namespace

std::optional<std::string> WorldState::legality(const Action& action) const {
    const double elevation = monkey_elevation();
    switch (action.kind) {
        case Action::Kind::MoveLeft:
        case Action::Kind::MoveRight: {
            if (elevation > 0.0) return "must climb down first";
            const int dest =
                monkey_cell_ + (action.kind == Action::Kind::MoveRight ? 1 : -1);
            if (dest < 0 || dest >= scene_->width) return "edge of the world";
            return std::nullopt;
        }
        case Action::Kind::ClimbUp: {
            double target_top = 0.0;
            int target_cell = 0;
            if (const PlatformSpec* p = scene_->platform(action.target)) {
                // Boxes resting on a platform do not block climbing its edge.
                target_top = p->height;
                target_cell = p->cell;
            } else if (const BoxState* b = box(action.target)) {
                if (b->carried) return "cannot climb a carried box";
                if (box_on(b->id)) return "target is buried under another box";
                target_top = box_top(b->id);
                target_cell = b->cell;
            } else {
                return "unknown climb target: " + action.target;
            }
            if (!reachable(*scene_, monkey_cell_, target_cell))
                return "out of reach";
            const double rise = target_top - elevation;
            if (rise <= 0.0) return "target is not above the monkey";
            if (rise > kClimbStep) return "step too high";
            return std::nullopt;
        }
        case Action::Kind::ClimbDown:
            if (elevation <= 0.0) return "already on the ground";
            return std::nullopt;
        case Action::Kind::Grab: {
            const BoxState* b = box(action.target);
            if (!b) return "unknown box: " + action.target;
            if (elevation > 0.0) return "must climb down first";
            if (carried_) return "already carrying a box";
            if (b->carried) return "box already carried";
            if (b->size != BoxSize::Small) return "only small boxes portable";
            if (box_on(b->id)) return "box is buried under another box";
            if (!reachable(*scene_, monkey_cell_, b->cell)) return "out of reach";
            if (box_bottom(b->id) > kReachDown) return "box is too high to reach";
            return std::nullopt;
        }
        case Action::Kind::Place: {
            if (!carried_) return "not carrying a box";
            int target_cell = action.cell;
            if (target_cell < 0) {
                if (const PlatformSpec* p = scene_->platform(action.target))
                    target_cell = p->cell;
                else
                    return "unknown place target: " + action.target;
            }
            if (target_cell < 0 || target_cell >= scene_->width)
                return "cell out of range";
            if (!reachable(*scene_, monkey_cell_, target_cell))
                return "out of reach";
            const double surface = surface_top_at(target_cell);
            if (surface > elevation + kHoist) return "target surface too high";
            return std::nullopt;
        }
        case Action::Kind::Abandon:
            return std::nullopt;
    }
    return "unknown action";
}

std::string WorldState::key() const {
    std::ostringstream os;
    os << monkey_cell_ << '|' << monkey_support_ << '|'
       << (carried_ ? *carried_ : std::string("-"));
    for (const auto& b : boxes_) {
        os << '|' << b.id << ':';
        if (b.carried)
            os << "carried";
        else
            os << b.cell << ',' << (b.base.empty() ? "ground" : b.base);
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",%.4f", b.height);
        os << buf;
    }
    return os.str();
}

std::pair<WorldState, std::vector<Event>> step(const WorldState& state,
                                               const Action& action) {
    if (state.terminal_ != Terminal::Running)
        throw std::logic_error("cannot step a terminal state");

    WorldState next = state;
    std::vector<Event> events;

    const auto rejection = state.legality(action);
    if (rejection) {
        events.push_back({Event::Kind::Rejected, *rejection});
    } else {
        switch (action.kind) {
            case Action::Kind::MoveLeft: next.monkey_cell_ -= 1; break;
            case Action::Kind::MoveRight: next.monkey_cell_ += 1; break;
            case Action::Kind::ClimbUp: {
                if (BoxState* b = next.box_mut(action.target)) {
                    const double p = next.scene_->crush_probability(b->id);
                    if (!b->crushed && p > 0.0) {
                        const bool crushes =
                            p >= 1.0 || next.rng_.uniform01() < p;
                        if (crushes) {
                            double retention = next.scene_->retention_min;
                            if (next.scene_->retention_max >
                                next.scene_->retention_min)
                                retention = next.rng_.uniform(
                                    next.scene_->retention_min,
                                    next.scene_->retention_max);
                            b->height = nominal_height(b->size) * retention;
                            b->crushed = true;
                            char buf[64];
                            std::snprintf(buf, sizeof(buf), "%s %.4f",
                                          b->id.c_str(), b->height);
                            events.push_back({Event::Kind::Crushed, buf});
                        }
                    }
                    next.monkey_cell_ = b->cell;
                } else {
                    next.monkey_cell_ =
                        next.scene_->platform(action.target)->cell;
                }
                next.monkey_support_ = action.target;
                break;
            }
            case Action::Kind::ClimbDown: next.monkey_support_.clear(); break;
            case Action::Kind::Grab: {
                BoxState* b = next.box_mut(action.target);
                b->carried = true;
                b->base.clear();
                next.carried_ = b->id;
                break;
            }
            case Action::Kind::Place: {
                int target_cell = action.cell;
                if (target_cell < 0)
                    target_cell = next.scene_->platform(action.target)->cell;
                std::string base;
                if (auto top = next.pile_top_at(target_cell)) {
                    base = *top;
                } else {
                    for (const auto& p : next.scene_->platforms)
                        if (p.cell == target_cell) base = p.id;
                }
                BoxState* b = next.box_mut(*next.carried_);
                b->carried = false;
                b->cell = target_cell;
                b->base = base;
                next.carried_.reset();
                break;
            }
            case Action::Kind::Abandon:
                next.terminal_ = Terminal::Abandoned;
                events.push_back({Event::Kind::Finished, "abandoned"});
                break;
        }
    }

    next.step_count_ += 1;

    if (next.terminal_ == Terminal::Running) {
        for (const auto& banana : next.scene_->bananas) {
            if (next.monkey_support_ == banana) {
                next.terminal_ = Terminal::Success;
                events.push_back({Event::Kind::Finished, "success"});
                break;
            }
        }
    }
    if (next.terminal_ == Terminal::Running &&
        next.step_count_ >= next.scene_->step_cap) {
        next.terminal_ = Terminal::StepLimit;
        events.push_back({Event::Kind::Finished, "step limit reached"});
    }

    return {std::move(next), std::move(events)};
}

// --- observation ------------------------------------------------------------

namespace {

std::string format_height(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

}  // namespace

std::string observe(const WorldState& state) {
    const Scene& scene = state.scene();
    std::ostringstream os;
    os << "step: " << state.step_count() << '\n';
    os << "monkey: cell=" << state.monkey_cell()
       << " elevation=" << format_height(state.monkey_elevation())
       << " standing_on="
       << (state.monkey_support().empty() ? "ground" : state.monkey_support())
       << " carrying="
       << (state.carried_box() ? *state.carried_box() : std::string("none"))
       << '\n';
    for (const auto& b : state.boxes()) {
        const int distance =
            b.carried ? 0 : std::abs(b.cell - state.monkey_cell());
        const bool masked = scene.interaction_range &&
                            distance > *scene.interaction_range;
        os << "box " << b.id << ": cell=" << b.cell;
        if (masked) {
            os << " size=unknown height=unknown crushed=unknown";
        } else {
            os << " size=" << (b.size == BoxSize::Small ? "small" : "large")
               << " height=" << format_height(b.height)
               << " crushed=" << (b.crushed ? "yes" : "no");
        }
        if (b.carried) os << " carried=yes";
        if (!b.carried && !b.base.empty()) os << " on=" << b.base;
        os << '\n';
    }
    for (const auto& p : scene.platforms)
        os << "platform " << p.id << ": cell=" << p.cell
           << " height=" << format_height(p.height) << '\n';
    for (const auto& banana : scene.bananas)
        os << "banana: platform=" << banana << '\n';
    os << "interaction_range: "
       << (scene.interaction_range ? std::to_string(*scene.interaction_range)
                                   : std::string("unlimited"))
       << '\n';
    return os.str();
}

}  // namespace ctxlab::sim
