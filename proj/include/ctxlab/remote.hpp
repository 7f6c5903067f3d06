#pragma once

#include <atomic>
#include <string>
#include <variant>
#include <vector>

#include "ctxlab/embedding.hpp"
#include "ctxlab/session.hpp"

namespace ctxlab {

struct RemoteConfig {
    std::string base_url;  // scheme://host[:port][/path-prefix]
    std::string api_key;
    std::string model;
    int max_attempts = 3;
    int max_in_flight = 4;
};

/// Reads EMBED_BASE_URL, EMBED_API_KEY, EMBED_MODEL; throws naming the first
/// missing variable.
RemoteConfig embed_config_from_env();

/// Reads LLM_BASE_URL, LLM_API_KEY, LLM_MODEL.
RemoteConfig llm_config_from_env();

/// Either an embedding or the per-item failure message.
using BatchItem = std::variant<EmbeddingVector, std::string>;

/// Embeddings over an HTTP JSON endpoint: POST {model, input[]} to
/// /embeddings, response {data: [{index, embedding[]}]}. Vectors are
/// re-normalized on arrival. Transport failures retry up to max_attempts.
class RemoteEmbedder : public Embedder {
  public:
    explicit RemoteEmbedder(RemoteConfig config);

    EmbeddingVector embed(const std::string& text) override;
    std::size_t dimension() const override { return dimension_; }

    /// One request per item, at most max_in_flight concurrently; failures are
    /// reported per item instead of aborting the batch.
    std::vector<BatchItem> embed_batch(const std::vector<std::string>& inputs);

  private:
    RemoteConfig config_;
    std::atomic<std::size_t> dimension_{0};  // learned from the first reply
};

/// Chat-completions-style session. Fragments are merged by role into
/// messages; tool fragments travel as user messages with a marker prefix.
class RemoteSession : public SessionFn {
  public:
    explicit RemoteSession(RemoteConfig config);

    SessionReply respond(const ContextItem& input) override;

  private:
    RemoteConfig config_;
};

}  // namespace ctxlab
