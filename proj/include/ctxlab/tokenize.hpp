#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxlab {

struct TokenSpan {
    std::size_t begin = 0;  // byte offset into the source
    std::size_t end = 0;    // one past the last byte
};

/// Lossless token sequence over a source text: spans plus the original bytes,
/// so splicing spans with their inter-token gaps reconstructs the source
/// exactly.
class TokenSequence {
  public:
    TokenSequence(std::string source, std::vector<TokenSpan> spans)
        : source_(std::move(source)), spans_(std::move(spans)) {}

    std::size_t size() const { return spans_.size(); }
    const std::string& source() const { return source_; }
    const std::vector<TokenSpan>& spans() const { return spans_; }

    /// 1-based token text.
    std::string_view token(std::size_t index) const {
        const TokenSpan& s = spans_.at(index - 1);
        return std::string_view(source_).substr(s.begin, s.end - s.begin);
    }

    /// 1-based prefix: the source up to and including token `index`
    /// (inter-token bytes preserved). Index 0 yields the empty string.
    std::string prefix(std::size_t index) const {
        if (index == 0) return {};
        return source_.substr(0, spans_.at(index - 1).end);
    }

    /// Source reassembled from the spans and their gaps; equals source().
    std::string reconstruct() const;

  private:
    std::string source_;
    std::vector<TokenSpan> spans_;
};

using Tokenizer = std::function<std::vector<TokenSpan>(std::string_view)>;

/// Default rule: alphanumeric runs are tokens, every other non-whitespace
/// byte is a single-character token, whitespace separates.
std::vector<TokenSpan> default_token_spans(std::string_view text);

/// Tokenizes non-empty text with the default rule (or a custom tokenizer).
TokenSequence tokenize(const std::string& text);
TokenSequence tokenize(const std::string& text, const Tokenizer& tokenizer);

}  // namespace ctxlab
