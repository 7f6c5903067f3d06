#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ctxlab/context.hpp"
#include "ctxlab/embedding.hpp"
#include "ctxlab/session.hpp"

namespace ctxlab {

using PatternBindings = std::map<std::string, ContextItem>;

/// A named function from parameter bindings (and its own mutable state
/// slots) to a context item. Instantiating with concrete parameters yields
/// an item; bodies may invoke other patterns, and composition evaluates left
/// to right like any C++ expression. State lives in the instance; two
/// instances never share it.
class ContextPattern {
  public:
    using Body = std::function<ContextItem(const PatternBindings& parameters,
                                           PatternBindings& state)>;

    ContextPattern(std::string name, std::vector<std::string> parameters,
                   Body body)
        : name_(std::move(name)),
          parameters_(std::move(parameters)),
          body_(std::move(body)) {}

    const std::string& name() const { return name_; }
    const std::vector<std::string>& parameters() const { return parameters_; }
    PatternBindings& state() { return state_; }
    const PatternBindings& state() const { return state_; }

    /// Throws std::invalid_argument when a declared parameter is missing.
    ContextItem instantiate(const PatternBindings& bindings = {});

  private:
    std::string name_;
    std::vector<std::string> parameters_;
    Body body_;
    PatternBindings state_;
};

/// Special case: maps an item sequence to an item sequence.
using TransformPattern =
    std::function<std::vector<ContextItem>(std::vector<ContextItem>)>;

/// Memory of an activity: I1·O1·I2·O2 ... In·On with roles preserved.
ContextItem memory_pattern(const Activity& activity);

/// Chat pattern: memory followed by the user's turn.
ContextItem chatbot_pattern(const Activity& activity,
                            const ContextItem& user_text);

/// Question/answer example pair for in-context learning.
struct Example {
    ContextItem question;
    ContextItem answer;
    friend bool operator==(const Example&, const Example&) = default;
};

/// Ordered set of distinct examples; iteration follows insertion order. A
/// bounded buffer refuses inserts at capacity (replacement still works).
class ExampleBuffer {
  public:
    ExampleBuffer() = default;
    explicit ExampleBuffer(std::size_t capacity) : capacity_(capacity) {}

    bool insert(Example example);
    bool contains(const Example& example) const;
    std::size_t size() const { return examples_.size(); }
    bool empty() const { return examples_.empty(); }
    std::optional<std::size_t> capacity() const { return capacity_; }
    const std::vector<Example>& examples() const { return examples_; }
    Example& at(std::size_t index) { return examples_[index]; }

  private:
    std::vector<Example> examples_;
    std::optional<std::size_t> capacity_;
};

/// Example injection: Q1·A1 ... Qn·An·query. Question fragments are restamped
/// with the User role and answers with the Agent role.
ContextItem icl_pattern(const ExampleBuffer& buffer, const ContextItem& query);

using CorrectFn = std::function<ContextItem(const ContextItem&)>;

/// Example-buffer update. If the offered answer matches the correct one, a
/// uniformly chosen existing example is replaced by the pair (insert on an
/// empty buffer, where no pick exists); otherwise the corrected pair joins
/// the buffer. Answer comparison is on rendered text.
void icl_update(ExampleBuffer& buffer, const Example& qa,
                const CorrectFn& correct_fn, std::mt19937_64& rng);

/// In-memory knowledge base of text materials with precomputed unit vectors.
class KnowledgeBase {
  public:
    explicit KnowledgeBase(Embedder& embedder) : embedder_(&embedder) {}

    void add(std::string material);
    std::size_t size() const { return materials_.size(); }
    bool empty() const { return materials_.empty(); }
    const std::string& material(std::size_t index) const {
        return materials_[index];
    }
    const EmbeddingVector& vector(std::size_t index) const {
        return vectors_[index];
    }

    /// Index of the material with maximal cosine similarity to the query;
    /// ties break toward the lowest index.
    std::size_t best_match(const std::string& query) const;

  private:
    Embedder* embedder_;
    std::vector<std::string> materials_;
    std::vector<EmbeddingVector> vectors_;
};

/// Retrieval pattern: query · "Supplementary material:" · best match.
ContextItem rag_pattern(const KnowledgeBase& kb, const std::string& query);

struct RouteResult {
    int branch = 0;
    int reprompts = 0;
};

/// Runs the session on router_prompt·query and parses a branch index in
/// {0, 1} from the reply. A non-branch reply earns one reprompt with a
/// correction suffix; a second failure raises RoutingError.
RouteResult route(const ContextItem& router_prompt, const ContextItem& query,
                  SessionFn& session, Activity& activity);

}  // namespace ctxlab
