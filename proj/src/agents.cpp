#include "ctxlab/agents.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "ctxlab/errors.hpp"

namespace ctxlab::agents {

using nlohmann::json;

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::Basic: return "basic";
        case AgentKind::ReAct: return "react";
        case AgentKind::MLDT: return "mldt";
        case AgentKind::OR: return "or";
        case AgentKind::ORN: return "orn";
        case AgentKind::PlanORN: return "planorn";
    }
    return "basic";
}

std::optional<AgentKind> agent_kind_from_name(const std::string& name) {
    for (auto kind : {AgentKind::Basic, AgentKind::ReAct, AgentKind::MLDT,
                      AgentKind::OR, AgentKind::ORN, AgentKind::PlanORN})
        if (to_string(kind) == name) return kind;
    return std::nullopt;
}

namespace {

bool kind_has_reasoning_tool(AgentKind kind) {
    return kind == AgentKind::OR || kind == AgentKind::ORN ||
           kind == AgentKind::PlanORN;
}

bool kind_has_notes(AgentKind kind) {
    return kind == AgentKind::ORN || kind == AgentKind::PlanORN;
}

}  // namespace

AgentConfig monkey_agent_config(AgentKind kind) {
    AgentConfig config;
    config.kind = kind;

    config.rules = ContextItem(
        "You control a monkey in a one-dimensional world of numbered cells.\n"
        "Reach the platform that holds a banana by standing on it.\n"
        "Rules: you can move along the ground; you can climb a box pile or a\n"
        "platform whose top is at most one unit above you and at most one\n"
        "cell away; climbing onto a box may crush it; small boxes can be\n"
        "grabbed from the ground, carried (one at a time, climbing allowed)\n"
        "and placed on a surface at most one unit above you; large boxes\n"
        "cannot be moved. Every command costs one step and the step budget\n"
        "is limited.",
        Role::System);

    std::string actions =
        "Commands:\n"
        "action: move_left\n"
        "action: move_right\n"
        "action: climb_up <id>\n"
        "action: climb_down\n"
        "action: grab <box-id>\n"
        "action: place <cell-or-platform-id>\n"
        "action: abandon\n";
    if (kind_has_reasoning_tool(kind))
        actions += "tool: reasoning {\"question\": \"...\"}\n";
    if (kind_has_notes(kind))
        actions +=
            "tool: add_note {\"note\": \"...\"}\n"
            "tool: remove_note {\"note\": \"...\"}\n";
    if (kind == AgentKind::PlanORN)
        actions += "tool: plan {\"goal\": \"...\"}\n";
    actions += "Reply with exactly one command line.";
    config.action_list = ContextItem(std::move(actions), Role::System);
    return config;
}

ContextItem assemble_context(const AgentConfig& config, const AgentState& state,
                             const ContextItem& status) {
    ContextItem ctx = config.rules + config.action_list;

    // Memory: the agent's own prior replies.
    for (const auto& s : state.activity.sessions()) {
        ctx.append(s.input);
        ctx.append(s.output);
    }

    if (config.kind == AgentKind::MLDT) ctx.append(state.plan);

    for (const auto& past : state.statuses) ctx.append(past);
    ctx.append(status);

    ctx.append(ContextItem(std::string(framing::kPerformAction)));

    switch (config.kind) {
        case AgentKind::Basic:
        case AgentKind::MLDT:
            break;
        case AgentKind::ReAct:
            if (state.step_reasoning) ctx.append(state.step_reasoning->answer);
            break;
        case AgentKind::OR:
        case AgentKind::ORN:
        case AgentKind::PlanORN:
            if (config.kind == AgentKind::PlanORN) ctx.append(state.plan);
            if (state.step_reasoning) {
                ctx.append(state.step_reasoning->question);
                ctx.append(state.step_reasoning->answer);
            }
            break;
    }

    if (kind_has_notes(config.kind))
        for (const auto& note : state.notes) ctx.append(note);

    return ctx;
}

TokenUsage TrialLog::usage() const {
    TokenUsage total;
    for (const auto& s : exchanges.sessions()) total += s.usage;
    return total;
}

double TrialLog::wall_time_s() const {
    double total = 0.0;
    for (const auto& s : exchanges.sessions()) total += s.wall_time_s;
    return total;
}

namespace {

struct ToolCall {
    std::string name;
    json args;
};

struct ParsedReply {
    std::optional<sim::Action> action;
    std::optional<ToolCall> tool;
};

std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

/// First line of the form `action: ...` or `tool: <name> {...}` wins.
ParsedReply parse_reply(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim_copy(line);
        if (line.rfind("action:", 0) == 0) {
            auto action = sim::parse_action(trim_copy(line.substr(7)));
            if (action) return {action, std::nullopt};
            return {};
        }
        if (line.rfind("tool:", 0) == 0) {
            std::string rest = trim_copy(line.substr(5));
            auto space = rest.find_first_of(" \t{");
            std::string name =
                space == std::string::npos ? rest : rest.substr(0, space);
            std::string args_text =
                space == std::string::npos ? "" : trim_copy(rest.substr(space));
            if (name.empty()) return {};
            json args = json::object();
            if (!args_text.empty()) {
                try {
                    args = json::parse(args_text);
                } catch (const json::parse_error&) {
                    return {};
                }
            }
            return {std::nullopt, ToolCall{name, std::move(args)}};
        }
    }
    return {};
}

/// Calls the session, stamps roles, and records the exchange twice: the full
/// exchange into the trial log, and a memory record (empty input, raw reply)
/// into the agent's activity when `remember` is set.
ContextItem call_main_session(SessionFn& session, const ContextItem& input,
                              AgentState& state, TrialLog& log, bool remember) {
    ContextItem reply = run_session(session, input, log.exchanges);
    if (remember) {
        const Session& recorded = log.exchanges.sessions().back();
        state.activity.append(
            {ContextItem(), reply, recorded.usage, recorded.wall_time_s});
    }
    return reply;
}

/// Context-isolated sub-session: rules·actions·status·instruction(+extra).
ContextItem run_sub_session(const AgentConfig& config, SessionFn& session,
                            const ContextItem& status,
                            std::string_view instruction,
                            const ContextItem& extra, TrialLog& log) {
    ContextItem input = config.rules + config.action_list + status +
                        ContextItem(std::string(instruction)) + extra;
    return run_session(session, input, log.exchanges);
}

ContextItem as_tool_item(const ContextItem& item) {
    ContextItem out;
    for (Fragment f : item.fragments()) {
        f.role = Role::Tool;
        out.append(std::move(f));
    }
    return out;
}

}  // namespace

namespace {
sim::Action decide_impl(const AgentConfig& config, AgentState& state,
                        SessionFn& session, const ContextItem& status,
                        TrialLog& log);
}

sim::Action decide(const AgentConfig& config, AgentState& state,
                   SessionFn& session, const ContextItem& status,
                   TrialLog& log) {
    sim::Action action = decide_impl(config, state, session, status, log);
    // The per-step reasoning answer joins the memory for later steps; during
    // the step itself it renders only at the context tail.
    if (config.kind == AgentKind::ReAct && state.step_reasoning)
        state.activity.append(
            {ContextItem(), state.step_reasoning->answer, {}, 0.0});
    return action;
}

namespace {

sim::Action decide_impl(const AgentConfig& config, AgentState& state,
                        SessionFn& session, const ContextItem& status,
                        TrialLog& log) {
    state.step_reasoning.reset();

    // MLDT plans exactly once, from the initial status.
    if (config.kind == AgentKind::MLDT && state.plan_calls == 0 &&
        state.statuses.empty()) {
        ContextItem reply = run_sub_session(
            config, session, status, framing::kPlanInstruction, {}, log);
        state.plan = reply;
        state.plan_calls += 1;
    }

    // ReAct reasons in a fresh sub-session before every action.
    if (config.kind == AgentKind::ReAct) {
        ContextItem reply = run_sub_session(
            config, session, status, framing::kReasoningInstruction, {}, log);
        state.reasoning_calls += 1;
        state.step_reasoning = ReasoningExchange{ContextItem(), reply};
    }

    int reprompts = 0;
    int tool_calls = 0;
    ContextItem correction;  // bad reply + instruction, re-sent on reprompt

    while (true) {
        ContextItem input = assemble_context(config, state, status) + correction;
        ContextItem reply =
            call_main_session(session, input, state, log, /*remember=*/true);
        ParsedReply parsed = parse_reply(reply.text());

        if (parsed.action) return *parsed.action;

        if (parsed.tool && tool_calls < config.max_tool_calls_per_step) {
            const ToolCall& call = *parsed.tool;
            ++tool_calls;
            correction = ContextItem();

            if (call.name == "abandon") return sim::Action::abandon();

            if (call.name == "reasoning" &&
                kind_has_reasoning_tool(config.kind) && !state.step_reasoning &&
                call.args.contains("question") &&
                call.args.at("question").is_string()) {
                ContextItem question(
                    call.args.at("question").get<std::string>(), Role::Agent);
                ContextItem answer = run_sub_session(
                    config, session, status, framing::kAnswerQuestion, question,
                    log);
                state.reasoning_calls += 1;
                state.step_reasoning =
                    ReasoningExchange{question, as_tool_item(answer)};
                continue;
            }
            if (call.name == "add_note" && kind_has_notes(config.kind) &&
                call.args.contains("note") && call.args.at("note").is_string()) {
                ContextItem note(call.args.at("note").get<std::string>(),
                                 Role::Tool);
                const std::string text = note.text();
                bool duplicate = false;
                for (const auto& n : state.notes) duplicate |= (n.text() == text);
                if (!duplicate) state.notes.push_back(note);
                log.events.push_back("note added: " + text);
                continue;
            }
            if (call.name == "remove_note" && kind_has_notes(config.kind) &&
                call.args.contains("note") && call.args.at("note").is_string()) {
                const std::string text = call.args.at("note").get<std::string>();
                auto it = std::find_if(
                    state.notes.begin(), state.notes.end(),
                    [&](const ContextItem& n) { return n.text() == text; });
                if (it != state.notes.end()) {
                    state.notes.erase(it);
                    log.events.push_back("note removed: " + text);
                } else {
                    log.events.push_back("note absent, remove ignored: " + text);
                }
                continue;
            }
            if (call.name == "plan" && config.kind == AgentKind::PlanORN &&
                call.args.contains("goal") && call.args.at("goal").is_string()) {
                ContextItem goal(call.args.at("goal").get<std::string>(),
                                 Role::Agent);
                ContextItem reply_plan = run_sub_session(
                    config, session, status, framing::kGeneratePlan, goal, log);
                state.plan = as_tool_item(reply_plan);
                state.plan_calls += 1;
                continue;
            }
            // Unknown tool, bad arguments, or a second reasoning call this
            // step: fall through to the correction path.
        }

        if (reprompts >= config.max_reprompts) {
            state.last_failure = "unparseable reply: " + reply.text();
            log.events.push_back("reprompt budget exhausted, abandoning");
            return sim::Action::abandon();
        }
        ++reprompts;
        correction =
            reply + ContextItem(std::string(framing::kCorrection), Role::User);
    }
}

}  // namespace

EpisodeResult run_episode(const AgentConfig& config, const sim::Scene& scene,
                          std::uint64_t seed, SessionFn& session) {
    EpisodeResult result;
    result.kind = config.kind;
    result.scene_id = scene.id;
    result.seed = seed;

    sim::WorldState world = sim::WorldState::reset(scene, seed);
    AgentState state;

    while (world.terminal() == sim::Terminal::Running) {
        ContextItem status(observe(world));
        sim::Action action = decide(config, state, session, status, result.log);
        state.statuses.push_back(status);
        auto [next, events] = sim::step(world, action);
        for (const auto& event : events) {
            switch (event.kind) {
                case sim::Event::Kind::Rejected:
                    result.log.events.push_back("rejected: " + event.detail);
                    break;
                case sim::Event::Kind::Crushed:
                    result.log.events.push_back("crushed: " + event.detail);
                    break;
                case sim::Event::Kind::Finished:
                    result.log.events.push_back(event.detail);
                    break;
            }
        }
        world = std::move(next);
    }

    result.terminal = world.terminal();
    result.success = world.terminal() == sim::Terminal::Success;
    result.steps = world.step_count();
    result.tokens = result.log.usage().total();
    result.wall_time_s = result.log.wall_time_s();
    return result;
}

std::vector<std::string> plan_replies(const std::vector<sim::Action>& plan) {
    std::vector<std::string> replies;
    replies.reserve(plan.size());
    for (const auto& action : plan)
        replies.push_back("action: " + sim::format_action(action));
    return replies;
}

}  // namespace ctxlab::agents
