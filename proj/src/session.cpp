#include "ctxlab/session.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "ctxlab/errors.hpp"

namespace ctxlab {

using nlohmann::json;

std::uint64_t estimate_tokens(const ContextItem& item) {
    std::size_t chars = item.text().size();
    return static_cast<std::uint64_t>((chars + 3) / 4);
}

ScriptedSession ScriptedSession::with_replies(std::vector<std::string> replies) {
    ScriptedSession s;
    for (auto& r : replies) s.queue_.push_back(std::move(r));
    return s;
}

ScriptedSession ScriptedSession::with_table(
    std::map<std::string, std::string> table) {
    ScriptedSession s;
    s.table_ = std::move(table);
    return s;
}

SessionReply ScriptedSession::respond(const ContextItem& input) {
    ++calls_;
    std::string reply;
    if (!table_.empty()) {
        auto it = table_.find(input.text());
        if (it == table_.end())
            throw ProtocolError("scripted session has no reply for input: " +
                                input.text());
        reply = it->second;
    } else if (!queue_.empty()) {
        reply = std::move(queue_.front());
        queue_.pop_front();
    } else if (fallback_) {
        reply = *fallback_;
    } else {
        throw ProtocolError("scripted session reply queue exhausted");
    }
    ContextItem output(std::move(reply), Role::Agent);
    return {output, {estimate_tokens(input), estimate_tokens(output)}, 0.0};
}

ContextItem run_session(SessionFn& fn, const ContextItem& input,
                        Activity& activity) {
    const auto start = std::chrono::steady_clock::now();
    SessionReply reply = fn.respond(input);

    // Force Agent role on every output fragment.
    ContextItem output;
    for (Fragment f : reply.output.fragments()) {
        f.role = Role::Agent;
        output.append(std::move(f));
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    activity.append(
        {input, output, reply.usage, reply.wall_time_s.value_or(elapsed)});
    return output;
}

namespace {

json fragments_to_json(const ContextItem& item) {
    json arr = json::array();
    for (const auto& f : item.fragments()) {
        json obj = {{"role", std::string(role_name(f.role))}, {"text", f.text}};
        if (!f.media_type.empty()) obj["media_type"] = f.media_type;
        arr.push_back(std::move(obj));
    }
    return arr;
}

ContextItem fragments_from_json(const json& arr) {
    ContextItem item;
    for (const auto& obj : arr) {
        Fragment f;
        f.role = role_from_name(obj.at("role").get<std::string>());
        f.text = obj.at("text").get<std::string>();
        if (obj.contains("media_type"))
            f.media_type = obj.at("media_type").get<std::string>();
        item.append(std::move(f));
    }
    return item;
}

}  // namespace

void write_transcript(const Activity& activity,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open transcript file: " +
                                 path.string());
    std::size_t index = 1;
    for (const auto& s : activity.sessions()) {
        json line = {
            {"index", index++},
            {"input_fragments", fragments_to_json(s.input)},
            {"output_fragments", fragments_to_json(s.output)},
            {"usage", {{"prompt", s.usage.prompt}, {"completion", s.usage.completion}}},
            {"wall_time_s", s.wall_time_s},
        };
        out << line.dump() << '\n';
    }
}

Activity read_transcript(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open transcript file: " +
                                 path.string());
    Activity activity;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj = json::parse(line);
        Session s;
        s.input = fragments_from_json(obj.at("input_fragments"));
        s.output = fragments_from_json(obj.at("output_fragments"));
        s.usage.prompt = obj.at("usage").at("prompt").get<std::uint64_t>();
        s.usage.completion = obj.at("usage").at("completion").get<std::uint64_t>();
        s.wall_time_s = obj.at("wall_time_s").get<double>();
        activity.append(std::move(s));
    }
    return activity;
}

}  // namespace ctxlab
