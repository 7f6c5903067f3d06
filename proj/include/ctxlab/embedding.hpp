#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ctxlab {

/// Unit-length real vector on the embedding hyper-sphere.
class EmbeddingVector {
  public:
    EmbeddingVector() = default;
    /// Normalizes to unit length. Throws on zero or non-finite input.
    explicit EmbeddingVector(std::vector<double> components);

    std::size_t dimension() const { return components_.size(); }
    const std::vector<double>& components() const { return components_; }
    double operator[](std::size_t i) const { return components_[i]; }

    friend bool operator==(const EmbeddingVector&,
                           const EmbeddingVector&) = default;

  private:
    std::vector<double> components_;
};

/// Cosine similarity, clamped to [-1, 1] against rounding. Dimensions must
/// match.
double cossim(const EmbeddingVector& u, const EmbeddingVector& v);

class Embedder {
  public:
    virtual ~Embedder() = default;

    /// Unit embedding of non-empty text. Empty text is an error.
    virtual EmbeddingVector embed(const std::string& text) = 0;

    virtual std::size_t dimension() const = 0;
};

/// Deterministic reference embedder: lowercase word unigrams hashed into
/// `dimension` buckets (FNV-1a, fixed basis), counts L2-normalized. The same
/// text yields a bit-identical vector in every process. Bag-of-words, so the
/// vector is invariant under word reordering.
class OfflineEmbedder : public Embedder {
  public:
    static constexpr std::size_t kDefaultDimension = 256;

    explicit OfflineEmbedder(std::size_t dimension = kDefaultDimension);

    EmbeddingVector embed(const std::string& text) override;
    std::size_t dimension() const override { return dimension_; }

    /// Bucket assignment for one lowercase word; exposed so tests can build
    /// vocabularies with provably disjoint buckets.
    std::size_t bucket(std::string_view word) const;

    /// Lowercase alphanumeric word split used before hashing. A text with no
    /// alphanumeric runs hashes as one single token.
    static std::vector<std::string> words(std::string_view text);

  private:
    std::size_t dimension_;
};

/// Semantic distance 1 - cossim(embed(a), embed(b)), in [0, 2].
double semdist(Embedder& embedder, const std::string& a, const std::string& b);

class ContextItem;

/// Embeds an item's rendered text. Items carrying an opaque payload have no
/// embedding; asking for one is an error.
EmbeddingVector embed_item(Embedder& embedder, const ContextItem& item);

}  // namespace ctxlab
