#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctxlab/context.hpp"

namespace ctxlab {

struct TokenUsage {
    std::uint64_t prompt = 0;
    std::uint64_t completion = 0;

    std::uint64_t total() const { return prompt + completion; }
    TokenUsage& operator+=(const TokenUsage& other) {
        prompt += other.prompt;
        completion += other.completion;
        return *this;
    }
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

/// One request/response exchange. Output fragments carry the Agent role.
struct Session {
    ContextItem input;
    ContextItem output;
    TokenUsage usage;
    double wall_time_s = 0.0;
};

/// Append-only ordered list of sessions. Indices are 1-based.
class Activity {
  public:
    void append(Session session) { sessions_.push_back(std::move(session)); }
    std::size_t size() const { return sessions_.size(); }
    bool empty() const { return sessions_.empty(); }
    const std::vector<Session>& sessions() const { return sessions_; }

    /// 1-based access.
    const Session& session(std::size_t index) const {
        return sessions_.at(index - 1);
    }

  private:
    std::vector<Session> sessions_;
};

struct SessionReply {
    ContextItem output;
    TokenUsage usage;
    /// Providers that know their own timing report it here (a scripted
    /// session takes no time by definition); otherwise the caller measures.
    std::optional<double> wall_time_s;
};

/// The program-to-model boundary: takes a context, returns the reply.
class SessionFn {
  public:
    virtual ~SessionFn() = default;
    virtual SessionReply respond(const ContextItem& input) = 0;
};

/// Character-count token estimate used by offline providers: ceil(chars / 4).
std::uint64_t estimate_tokens(const ContextItem& item);

/// Deterministic session for tests and offline runs. Replies come from an
/// exact-match lookup table when one is configured, otherwise from a queue
/// consumed in order. A missing entry raises ProtocolError.
class ScriptedSession : public SessionFn {
  public:
    ScriptedSession() = default;

    static ScriptedSession with_replies(std::vector<std::string> replies);
    static ScriptedSession with_table(std::map<std::string, std::string> table);

    void push_reply(std::string reply) { queue_.push_back(std::move(reply)); }
    void map_reply(std::string input_text, std::string reply) {
        table_[std::move(input_text)] = std::move(reply);
    }
    /// Reply used once the queue runs dry, instead of erroring.
    void set_fallback(std::string reply) { fallback_ = std::move(reply); }

    std::size_t pending() const { return queue_.size(); }
    std::size_t calls() const { return calls_; }

    SessionReply respond(const ContextItem& input) override;

  private:
    std::deque<std::string> queue_;
    std::map<std::string, std::string> table_;
    std::optional<std::string> fallback_;
    std::size_t calls_ = 0;
};

/// Runs one session: calls `fn`, stamps the output with the Agent role,
/// records the exchange (with usage and wall time) into `activity`, and
/// returns the output item.
ContextItem run_session(SessionFn& fn, const ContextItem& input,
                        Activity& activity);

/// JSON Lines transcript: one session per line with fields
/// {index, input_fragments[], output_fragments[], usage, wall_time_s}.
void write_transcript(const Activity& activity,
                      const std::filesystem::path& path);
Activity read_transcript(const std::filesystem::path& path);

}  // namespace ctxlab
