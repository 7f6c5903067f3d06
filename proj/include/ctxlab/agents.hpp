#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxlab/context.hpp"
#include "ctxlab/monkey.hpp"
#include "ctxlab/session.hpp"

namespace ctxlab::agents {

enum class AgentKind { Basic, ReAct, MLDT, OR, ORN, PlanORN };

std::string to_string(AgentKind kind);
std::optional<AgentKind> agent_kind_from_name(const std::string& name);

/// Framing strings shared by every assembly; pinned here so structural tests
/// and transcripts agree byte for byte. The OR-family action framing reuses
/// the plain action instruction, so an OR step without a reasoning exchange
/// assembles exactly the Basic context.
namespace framing {
inline constexpr std::string_view kPerformAction = "Perform an action.";
inline constexpr std::string_view kReasoningInstruction =
    "Analyze the current situation and recommend the next action.";
inline constexpr std::string_view kAnswerQuestion =
    "Use the current status to answer the question:";
inline constexpr std::string_view kPlanInstruction =
    "Break down the task into three hierarchies: goals, subtasks and actions. "
    "Write out the resulting plan.";
inline constexpr std::string_view kGeneratePlan =
    "Generate a plan. Take this feedback into account:";
inline constexpr std::string_view kCorrection =
    "Reply with exactly one line: `action: <name> [argument]` or `tool: "
    "<name> {json-args}`.";
}  // namespace framing

struct AgentConfig {
    AgentKind kind = AgentKind::Basic;
    ContextItem rules;        // problem description and rules
    ContextItem action_list;  // available actions (and tools, by kind)
    int max_reprompts = 2;
    int max_tool_calls_per_step = 8;
};

/// Rules/action-list config for the monkey world, with the tool lines each
/// kind actually exposes (Basic: actions and abandon only).
AgentConfig monkey_agent_config(AgentKind kind);

struct ReasoningExchange {
    ContextItem question;  // empty for the built-in per-step reasoning
    ContextItem answer;
};

struct AgentState {
    /// Main-session memory. Each exchange is recorded with an empty input and
    /// the raw reply as output, so the memory pattern renders the agent's own
    /// prior messages without duplicating statuses or instructions.
    Activity activity;
    std::vector<ContextItem> statuses;       // past statuses, oldest first
    std::vector<ContextItem> notes;          // ordered, unique by text
    ContextItem plan;                        // empty until a plan sub-session ran
    std::optional<ReasoningExchange> step_reasoning;  // this step's exchange

    int plan_calls = 0;
    int reasoning_calls = 0;
    std::string last_failure;
};

/// Assembles the context for the current step per the agent kind:
///   Basic:   rules·actions·memory·statuses·instruction
///   ReAct:   Basic plus this step's reasoning answer at the tail
///   MLDT:    rules·actions·memory·plan·statuses·instruction
///   OR:      Basic plus {question·answer} when reasoning ran this step
///   ORN:     OR plus the notes as the final fragments
///   PlanORN: ORN with the plan inserted before the reasoning block
/// `status` is the current status; state.statuses holds the earlier ones.
ContextItem assemble_context(const AgentConfig& config, const AgentState& state,
                             const ContextItem& status);

/// One full exchange log for a trial: every session the episode ran, main
/// and sub, in call order.
struct TrialLog {
    Activity exchanges;
    std::vector<std::string> events;

    TokenUsage usage() const;
    /// Total time spent in sessions (the model side of the loop).
    double wall_time_s() const;
};

/// Runs the kind's sub-sessions and main session for one step and parses an
/// action from the reply. Unparseable replies earn corrections up to the
/// reprompt budget, then the step falls back to abandoning.
sim::Action decide(const AgentConfig& config, AgentState& state,
                   SessionFn& session, const ContextItem& status,
                   TrialLog& log);

struct EpisodeResult {
    AgentKind kind = AgentKind::Basic;
    int scene_id = 0;
    std::uint64_t seed = 0;
    bool success = false;
    int steps = 0;
    double wall_time_s = 0.0;
    std::uint64_t tokens = 0;
    sim::Terminal terminal = sim::Terminal::Running;
    TrialLog log;
};

/// observe -> decide -> step loop until the world terminates.
EpisodeResult run_episode(const AgentConfig& config, const sim::Scene& scene,
                          std::uint64_t seed, SessionFn& session);

/// Scripted replies that drive an episode along a fixed action plan.
std::vector<std::string> plan_replies(const std::vector<sim::Action>& plan);

}  // namespace ctxlab::agents
