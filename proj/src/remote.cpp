#include "ctxlab/remote.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ctxlab/errors.hpp"

namespace ctxlab {

using nlohmann::json;

namespace {

std::string require_env(const char* name) {
    const char* value = std::getenv(name);
    if (!value || !*value)
        throw std::runtime_error(std::string("missing environment variable: ") +
                                 name);
    return value;
}

RemoteConfig config_from_env(const char* base, const char* key,
                             const char* model) {
    RemoteConfig config;
    config.base_url = require_env(base);
    config.api_key = require_env(key);
    config.model = require_env(model);
    return config;
}

/// Splits scheme://host[:port][/prefix] into the client origin and the path
/// prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

/// POSTs a JSON body, retrying transport-level failures. 4xx/5xx and
/// malformed replies raise ProtocolError; connection failures exhaust the
/// attempt budget and raise TransportError.
json post_json(const RemoteConfig& config, const std::string& path,
               const json& body) {
    auto [origin, prefix] = split_base_url(config.base_url);
    httplib::Client client(origin);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);

    httplib::Headers headers;
    if (!config.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config.api_key);

    const std::string payload = body.dump();
    int attempts = 0;
    for (; attempts < config.max_attempts; ++attempts) {
        auto result = client.Post(prefix + path, headers, payload,
                                  "application/json");
        if (!result) continue;  // transport failure, retry
        if (result->status >= 500) continue;
        if (result->status != 200)
            throw ProtocolError("endpoint " + path + " replied " +
                                std::to_string(result->status) + ": " +
                                result->body);
        try {
            return json::parse(result->body);
        } catch (const json::parse_error& e) {
            throw ProtocolError(std::string("reply is not JSON: ") + e.what());
        }
    }
    throw TransportError("no usable reply from " + config.base_url + path,
                         attempts);
}

}  // namespace

RemoteConfig embed_config_from_env() {
    return config_from_env("EMBED_BASE_URL", "EMBED_API_KEY", "EMBED_MODEL");
}

RemoteConfig llm_config_from_env() {
    return config_from_env("LLM_BASE_URL", "LLM_API_KEY", "LLM_MODEL");
}

RemoteEmbedder::RemoteEmbedder(RemoteConfig config)
    : config_(std::move(config)) {}

EmbeddingVector RemoteEmbedder::embed(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("cannot embed empty text");
    json body = {{"model", config_.model}, {"input", json::array({text})}};
    json reply = post_json(config_, "/embeddings", body);
    if (!reply.contains("data") || !reply["data"].is_array() ||
        reply["data"].empty())
        throw ProtocolError("embeddings reply has no data array");
    const json& entry = reply["data"].front();
    if (!entry.contains("embedding"))
        throw ProtocolError("embeddings entry lacks an embedding");
    std::vector<double> components =
        entry.at("embedding").get<std::vector<double>>();
    EmbeddingVector vector(std::move(components));
    dimension_ = vector.dimension();
    return vector;
}

std::vector<BatchItem> RemoteEmbedder::embed_batch(
    const std::vector<std::string>& inputs) {
    std::vector<BatchItem> results(inputs.size(), std::string("not attempted"));
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t index = cursor.fetch_add(1);
            if (index >= inputs.size()) return;
            try {
                results[index] = embed(inputs[index]);
            } catch (const std::exception& e) {
                results[index] = std::string(e.what());
            }
        }
    };
    const int threads = std::max(
        1, std::min<int>(config_.max_in_flight,
                         static_cast<int>(inputs.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

RemoteSession::RemoteSession(RemoteConfig config) : config_(std::move(config)) {}

SessionReply RemoteSession::respond(const ContextItem& input) {
    json messages = json::array();
    for (const auto& fragment : input.transcript()) {
        if (!fragment.is_text()) continue;  // payloads are not sent upstream
        std::string role;
        std::string content = fragment.text;
        switch (fragment.role) {
            case Role::User: role = "user"; break;
            case Role::Agent: role = "assistant"; break;
            case Role::System: role = "system"; break;
            case Role::Tool:
                role = "user";
                content = "Tool result:\n" + content;
                break;
        }
        messages.push_back({{"role", role}, {"content", content}});
    }
    json body = {{"model", config_.model}, {"messages", std::move(messages)}};
    json reply = post_json(config_, "/chat/completions", body);

    if (!reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty())
        throw ProtocolError("chat reply has no choices");
    const json& message = reply["choices"].front().value("message", json());
    if (!message.contains("content") || !message["content"].is_string())
        throw ProtocolError("chat reply has no message content");

    ContextItem output(message["content"].get<std::string>(), Role::Agent);
    TokenUsage usage{estimate_tokens(input), estimate_tokens(output)};
    if (reply.contains("usage")) {
        const json& u = reply["usage"];
        if (u.contains("prompt_tokens"))
            usage.prompt = u["prompt_tokens"].get<std::uint64_t>();
        if (u.contains("completion_tokens"))
            usage.completion = u["completion_tokens"].get<std::uint64_t>();
    }
    return {std::move(output), usage, std::nullopt};
}

}  // namespace ctxlab
