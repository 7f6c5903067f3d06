#include "ctxlab/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "ctxlab/errors.hpp"

namespace ctxlab {

ContextItem memory_pattern(const Activity& activity) {
    ContextItem out;
    for (const auto& s : activity.sessions()) {
        out.append(s.input);
        out.append(s.output);
    }
    return out;
}

ContextItem chatbot_pattern(const Activity& activity,
                            const ContextItem& user_text) {
    return memory_pattern(activity) + user_text;
}

bool ExampleBuffer::insert(Example example) {
    if (contains(example)) return false;
    if (capacity_ && examples_.size() >= *capacity_) return false;
    examples_.push_back(std::move(example));
    return true;
}

bool ExampleBuffer::contains(const Example& example) const {
    return std::find(examples_.begin(), examples_.end(), example) !=
           examples_.end();
}

namespace {

ContextItem restamp(const ContextItem& item, Role role) {
    ContextItem out;
    for (Fragment f : item.fragments()) {
        f.role = role;
        out.append(std::move(f));
    }
    return out;
}

}  // namespace

ContextItem icl_pattern(const ExampleBuffer& buffer, const ContextItem& query) {
    ContextItem out;
    for (const auto& ex : buffer.examples()) {
        out.append(restamp(ex.question, Role::User));
        out.append(restamp(ex.answer, Role::Agent));
    }
    out.append(query);
    return out;
}

void icl_update(ExampleBuffer& buffer, const Example& qa,
                const CorrectFn& correct_fn, std::mt19937_64& rng) {
    const ContextItem correct = correct_fn(qa.question);
    if (qa.answer.text() == correct.text()) {
        if (buffer.empty()) {
            buffer.insert(qa);
            return;
        }
        if (buffer.contains(qa)) return;
        std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
        buffer.at(pick(rng)) = qa;
    } else {
        buffer.insert({qa.question, correct});
    }
}

void KnowledgeBase::add(std::string material) {
    vectors_.push_back(embedder_->embed(material));
    materials_.push_back(std::move(material));
}

std::size_t KnowledgeBase::best_match(const std::string& query) const {
    if (empty()) throw std::runtime_error("empty knowledge base");
    const EmbeddingVector q = embedder_->embed(query);
    std::size_t best = 0;
    double best_score = cossim(q, vectors_[0]);
    for (std::size_t i = 1; i < vectors_.size(); ++i) {
        const double score = cossim(q, vectors_[i]);
        if (score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

ContextItem rag_pattern(const KnowledgeBase& kb, const std::string& query) {
    const std::size_t best = kb.best_match(query);
    return ContextItem(query) + ContextItem("Supplementary material:") +
           ContextItem(kb.material(best));
}

namespace {

/// First whitespace/punctuation-delimited token equal to "0" or "1", if any.
std::optional<int> parse_branch(const std::string& text) {
    std::string token;
    auto flush = [&]() -> std::optional<int> {
        if (token == "0") return 0;
        if (token == "1") return 1;
        token.clear();
        return std::nullopt;
    };
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            token += ch;
        } else {
            if (auto b = flush()) return b;
        }
    }
    return flush();
}

}  // namespace

RouteResult route(const ContextItem& router_prompt, const ContextItem& query,
                  SessionFn& session, Activity& activity) {
    const ContextItem input = router_prompt + query;
    ContextItem reply = run_session(session, input, activity);
    if (auto branch = parse_branch(reply.text())) return {*branch, 0};

    const ContextItem correction("Reply with a single digit: 0 or 1.");
    ContextItem retry_input = input + reply + correction;
    reply = run_session(session, retry_input, activity);
    if (auto branch = parse_branch(reply.text())) return {*branch, 1};

    throw RoutingError("router produced no branch in {0,1} after reprompt: \"" +
                       reply.text() + "\"");
}

}  // namespace ctxlab
