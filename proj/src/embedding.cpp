#include "ctxlab/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "ctxlab/context.hpp"

namespace ctxlab {

EmbeddingVector::EmbeddingVector(std::vector<double> components)
    : components_(std::move(components)) {
    double norm_sq = 0.0;
    for (double c : components_) {
        if (!std::isfinite(c))
            throw std::invalid_argument("embedding component is not finite");
        norm_sq += c * c;
    }
    if (norm_sq <= 0.0)
        throw std::invalid_argument("cannot normalize a zero vector");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& c : components_) c *= inv;
}

double cossim(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dimension() != v.dimension())
        throw std::invalid_argument("embedding dimension mismatch");
    // Equal vectors are exactly self-similar; the accumulated dot product of
    // a normalized vector with itself can fall a few ulps short of 1.
    if (u.components() == v.components()) return 1.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < u.dimension(); ++i) dot += u[i] * v[i];
    return std::clamp(dot, -1.0, 1.0);
}

OfflineEmbedder::OfflineEmbedder(std::size_t dimension)
    : dimension_(dimension) {
    if (dimension_ == 0)
        throw std::invalid_argument("embedder dimension must be positive");
}

std::vector<std::string> OfflineEmbedder::words(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            current += static_cast<char>(
                std::tolower(static_cast<unsigned char>(ch)));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    if (out.empty()) out.emplace_back(text);
    return out;
}

namespace {

// FNV-1a, 64-bit, standard basis.
std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (char ch : data) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 1099511628211ULL;
    }
    return hash;
}

}  // namespace

std::size_t OfflineEmbedder::bucket(std::string_view word) const {
    return static_cast<std::size_t>(fnv1a(word) % dimension_);
}

EmbeddingVector OfflineEmbedder::embed(const std::string& text) {
    if (text.empty())
        throw std::invalid_argument("cannot embed empty text");
    std::vector<double> counts(dimension_, 0.0);
    for (const auto& word : words(text)) counts[bucket(word)] += 1.0;
    return EmbeddingVector(std::move(counts));
}

double semdist(Embedder& embedder, const std::string& a, const std::string& b) {
    return 1.0 - cossim(embedder.embed(a), embedder.embed(b));
}

EmbeddingVector embed_item(Embedder& embedder, const ContextItem& item) {
    if (item.has_payload())
        throw std::invalid_argument("cannot embed an item with opaque payloads");
    return embedder.embed(item.text());
}

}  // namespace ctxlab
