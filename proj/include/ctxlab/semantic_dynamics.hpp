#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxlab/embedding.hpp"
#include "ctxlab/tokenize.hpp"

namespace ctxlab {

/// Per-token indicator series over a token sequence, all 1-based. Index 1
/// carries the zero conventions (no prior prefix); drift at the last index is
/// zero by construction.
struct SemanticTrace {
    std::vector<std::string> tokens;             // token text, 1-based at [i-1]
    std::vector<double> delta_semantics;         // distance between prefixes i-1, i
    std::vector<double> global_drift;            // distance from prefix i to full text
    std::vector<double> global_delta_drift;      // drift decrease at step i

    std::size_t size() const { return tokens.size(); }
};

/// Cache of prefix embeddings keyed by prefix byte length, shared across
/// repeated trace computations over the same source.
using PrefixCache = std::unordered_map<std::size_t, EmbeddingVector>;

SemanticTrace trace(const TokenSequence& tokens, Embedder& embedder);
SemanticTrace trace(const TokenSequence& tokens, Embedder& embedder,
                    PrefixCache& cache);

/// Contribution of a span against an explicit base text:
/// semdist(base·span, base). Text operands are joined with a single space so
/// word boundaries survive concatenation. Empty base is an error; measure the
/// span alone with semdist instead.
double delta_semantics_span(Embedder& embedder, const std::string& base,
                            const std::string& span);

/// Space-joined concatenation used for span operands.
std::string join_spans(const std::string& a, const std::string& b);

struct SegmentPolicy {
    double z = 2.0;       // peak threshold: mean + z * stddev over drift deltas
    std::size_t min_gap = 5;  // peaks closer than this merge (larger peak wins)
};

struct Segment {
    std::size_t start = 1;  // first token of the segment, 1-based
    std::size_t end = 1;    // last token, inclusive
};

struct Segmentation {
    std::vector<std::size_t> boundaries;  // segment starts, ascending, in (1, n]
    std::vector<Segment> segments;        // tile [1..n] exactly
    SegmentPolicy policy;
};

/// Splits a trace at abnormally high drift-delta peaks. With no peaks the
/// whole sequence is one segment.
Segmentation segment(const SemanticTrace& trace, SegmentPolicy policy = {});

struct PropositionReport {
    int proposition = 0;  // 1 inclusion, 2 orthogonality, 3 idempotence, 4 order
    std::string alpha;
    std::string beta;   // empty for proposition 3
    std::string base;   // gamma
    int repetitions = 0;      // k, proposition 3 only
    double tolerance = 0.0;   // eta, propositions 3-4
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    std::string notes;
};

/// Sub-additivity check: delta of alpha·beta vs the sum of the parts.
PropositionReport check_inclusion(Embedder& embedder, const std::string& alpha,
                                  const std::string& beta,
                                  const std::string& base);

/// Super-additivity check; flags order-dependent verdicts in the notes.
PropositionReport check_orthogonality(Embedder& embedder,
                                      const std::string& alpha,
                                      const std::string& beta,
                                      const std::string& base);

/// |delta(alpha^k) - delta(alpha)| < eta, k >= 2.
PropositionReport check_idempotence(Embedder& embedder,
                                    const std::string& alpha,
                                    const std::string& base, int k, double eta);

/// |delta(alpha·beta) - delta(beta·alpha)| < eta.
PropositionReport check_order_invariance(Embedder& embedder,
                                         const std::string& alpha,
                                         const std::string& beta,
                                         const std::string& base, double eta);

/// Upper-triangular matrix M[i][j] = delta(seg_i·seg_j | base) for i < j;
/// unused cells hold NaN.
struct PairwiseOrderTable {
    std::vector<std::string> segments;
    std::vector<std::vector<double>> values;

    std::string to_markdown() const;
};

PairwiseOrderTable pairwise_order_table(Embedder& embedder,
                                        const std::vector<std::string>& segments,
                                        const std::string& base);

struct CandidateThresholds {
    double segment_percentile = 90.0;  // delta-semantics rank within segment
    double global_percentile = 90.0;   // drift-delta rank across the trace
};

struct CandidateSpan {
    std::size_t start = 1;  // token indices, inclusive, 1-based
    std::size_t end = 1;
    double score = 0.0;     // sum of per-token delta * drift-delta
};

/// Token spans that are influential both locally (within their segment) and
/// globally, ranked by score descending. Spans never cross segment
/// boundaries. Percentile ranks use the strict-less convention, so a uniform
/// trace yields no candidates.
std::vector<CandidateSpan> parameter_candidates(
    const SemanticTrace& trace, const Segmentation& segmentation,
    CandidateThresholds thresholds = {});

}  // namespace ctxlab
