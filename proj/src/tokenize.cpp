#include "ctxlab/tokenize.hpp"

#include <cctype>
#include <stdexcept>

namespace ctxlab {

std::string TokenSequence::reconstruct() const {
    std::string out;
    std::size_t cursor = 0;
    for (const auto& span : spans_) {
        out += source_.substr(cursor, span.end - cursor);
        cursor = span.end;
    }
    out += source_.substr(cursor);
    return out;
}

std::vector<TokenSpan> default_token_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char ch = static_cast<unsigned char>(text[i]);
        if (std::isspace(ch)) {
            ++i;
            continue;
        }
        if (std::isalnum(ch)) {
            std::size_t begin = i;
            while (i < text.size() &&
                   std::isalnum(static_cast<unsigned char>(text[i])))
                ++i;
            spans.push_back({begin, i});
        } else {
            spans.push_back({i, i + 1});
            ++i;
        }
    }
    return spans;
}

TokenSequence tokenize(const std::string& text) {
    return tokenize(text, default_token_spans);
}

TokenSequence tokenize(const std::string& text, const Tokenizer& tokenizer) {
    if (text.empty()) throw std::invalid_argument("cannot tokenize empty text");
    return TokenSequence(text, tokenizer(text));
}

}  // namespace ctxlab
