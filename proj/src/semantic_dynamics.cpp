#include "ctxlab/semantic_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ctxlab {

namespace {

const EmbeddingVector& prefix_embedding(const TokenSequence& tokens,
                                        Embedder& embedder, PrefixCache& cache,
                                        std::size_t index) {
    const std::size_t key = tokens.spans().at(index - 1).end;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    try {
        return cache.emplace(key, embedder.embed(tokens.prefix(index)))
            .first->second;
    } catch (const std::exception& e) {
        throw std::runtime_error("embedding failed at prefix " +
                                 std::to_string(index) + ": " + e.what());
    }
}

}  // namespace

SemanticTrace trace(const TokenSequence& tokens, Embedder& embedder) {
    PrefixCache cache;
    return trace(tokens, embedder, cache);
}

SemanticTrace trace(const TokenSequence& tokens, Embedder& embedder,
                    PrefixCache& cache) {
    const std::size_t n = tokens.size();
    if (n == 0) throw std::invalid_argument("cannot trace an empty sequence");

    SemanticTrace out;
    out.tokens.reserve(n);
    for (std::size_t i = 1; i <= n; ++i)
        out.tokens.emplace_back(tokens.token(i));

    out.delta_semantics.assign(n, 0.0);
    out.global_drift.assign(n, 0.0);
    out.global_delta_drift.assign(n, 0.0);

    const EmbeddingVector& full = prefix_embedding(tokens, embedder, cache, n);
    for (std::size_t i = 1; i <= n; ++i) {
        const EmbeddingVector& current =
            prefix_embedding(tokens, embedder, cache, i);
        out.global_drift[i - 1] = 1.0 - cossim(current, full);
        if (i >= 2) {
            const EmbeddingVector& previous =
                prefix_embedding(tokens, embedder, cache, i - 1);
            out.delta_semantics[i - 1] = 1.0 - cossim(current, previous);
            out.global_delta_drift[i - 1] =
                out.global_drift[i - 2] - out.global_drift[i - 1];
        }
    }
    return out;
}

std::string join_spans(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + " " + b;
}

double delta_semantics_span(Embedder& embedder, const std::string& base,
                            const std::string& span) {
    if (base.empty())
        throw std::invalid_argument(
            "empty base text: measure the span alone with semdist");
    return semdist(embedder, join_spans(base, span), base);
}

Segmentation segment(const SemanticTrace& trace, SegmentPolicy policy) {
    const std::size_t n = trace.size();
    if (n < 2) throw std::invalid_argument("segmentation needs two tokens");

    // Peak rule over the drift deltas at indices 2..n.
    double mean = 0.0;
    for (std::size_t i = 2; i <= n; ++i) mean += trace.global_delta_drift[i - 1];
    mean /= static_cast<double>(n - 1);
    double var = 0.0;
    for (std::size_t i = 2; i <= n; ++i) {
        const double d = trace.global_delta_drift[i - 1] - mean;
        var += d * d;
    }
    const double sigma = std::sqrt(var / static_cast<double>(n - 1));
    const double threshold = mean + policy.z * sigma;

    std::vector<std::size_t> peaks;
    for (std::size_t i = 2; i <= n; ++i)
        if (trace.global_delta_drift[i - 1] > threshold) peaks.push_back(i);

    // Merge peaks closer than min_gap, keeping the larger one.
    std::vector<std::size_t> boundaries;
    for (std::size_t peak : peaks) {
        if (!boundaries.empty() && peak - boundaries.back() < policy.min_gap) {
            if (trace.global_delta_drift[peak - 1] >
                trace.global_delta_drift[boundaries.back() - 1])
                boundaries.back() = peak;
        } else {
            boundaries.push_back(peak);
        }
    }

    Segmentation out;
    out.policy = policy;
    out.boundaries = boundaries;
    std::size_t start = 1;
    for (std::size_t b : boundaries) {
        out.segments.push_back({start, b - 1});
        start = b;
    }
    out.segments.push_back({start, n});
    return out;
}

PropositionReport check_inclusion(Embedder& embedder, const std::string& alpha,
                                  const std::string& beta,
                                  const std::string& base) {
    PropositionReport report;
    report.proposition = 1;
    report.alpha = alpha;
    report.beta = beta;
    report.base = base;
    report.lhs = delta_semantics_span(embedder, base, join_spans(alpha, beta));
    report.rhs = delta_semantics_span(embedder, base, alpha) +
                 delta_semantics_span(embedder, base, beta);
    report.holds = report.lhs <= report.rhs;
    return report;
}

PropositionReport check_orthogonality(Embedder& embedder,
                                      const std::string& alpha,
                                      const std::string& beta,
                                      const std::string& base) {
    PropositionReport report;
    report.proposition = 2;
    report.alpha = alpha;
    report.beta = beta;
    report.base = base;
    report.lhs = delta_semantics_span(embedder, base, join_spans(alpha, beta));
    report.rhs = delta_semantics_span(embedder, base, alpha) +
                 delta_semantics_span(embedder, base, beta);
    report.holds = report.lhs >= report.rhs;

    // The inequality should not depend on operand order; flag when it does.
    const double swapped =
        delta_semantics_span(embedder, base, join_spans(beta, alpha));
    const bool swapped_holds = swapped >= report.rhs;
    if (swapped_holds != report.holds)
        report.notes = "order-dependent verdict: swapped operands disagree";
    return report;
}

PropositionReport check_idempotence(Embedder& embedder,
                                    const std::string& alpha,
                                    const std::string& base, int k,
                                    double eta) {
    if (k < 2) throw std::invalid_argument("idempotence requires k >= 2");
    if (eta <= 0.0) throw std::invalid_argument("tolerance must be positive");
    std::string repeated = alpha;
    for (int i = 1; i < k; ++i) repeated = join_spans(repeated, alpha);

    PropositionReport report;
    report.proposition = 3;
    report.alpha = alpha;
    report.base = base;
    report.repetitions = k;
    report.tolerance = eta;
    report.lhs = delta_semantics_span(embedder, base, repeated);
    report.rhs = delta_semantics_span(embedder, base, alpha);
    report.holds = std::abs(report.lhs - report.rhs) < eta;
    return report;
}

PropositionReport check_order_invariance(Embedder& embedder,
                                         const std::string& alpha,
                                         const std::string& beta,
                                         const std::string& base, double eta) {
    if (eta < 0.0) throw std::invalid_argument("tolerance must be non-negative");
    PropositionReport report;
    report.proposition = 4;
    report.alpha = alpha;
    report.beta = beta;
    report.base = base;
    report.tolerance = eta;
    report.lhs = delta_semantics_span(embedder, base, join_spans(alpha, beta));
    report.rhs = delta_semantics_span(embedder, base, join_spans(beta, alpha));
    report.holds = std::abs(report.lhs - report.rhs) < eta;
    return report;
}

PairwiseOrderTable pairwise_order_table(
    Embedder& embedder, const std::vector<std::string>& segments,
    const std::string& base) {
    if (segments.size() < 2)
        throw std::invalid_argument("pairwise table needs at least 2 segments");
    const std::size_t n = segments.size();
    PairwiseOrderTable table;
    table.segments = segments;
    table.values.assign(
        n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            table.values[i][j] = delta_semantics_span(
                embedder, base, join_spans(segments[i], segments[j]));
    return table;
}

std::string PairwiseOrderTable::to_markdown() const {
    const std::size_t n = segments.size();
    std::ostringstream os;
    os << "| ID |";
    for (std::size_t j = 1; j < n; ++j) os << " Segment " << (j + 1) << " |";
    os << "\n|----|";
    for (std::size_t j = 1; j < n; ++j) os << "----|";
    os << "\n";
    os.setf(std::ios::fixed);
    os.precision(4);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        os << "| Segment " << (i + 1) << " |";
        for (std::size_t j = 1; j < n; ++j) {
            if (j > i)
                os << " " << values[i][j] << " |";
            else
                os << " - |";
        }
        os << "\n";
    }
    return os.str();
}

namespace {

/// Percentile rank with the strict-less convention, in [0, 100).
double percentile_rank(const std::vector<double>& values, double x) {
    std::size_t less = 0;
    for (double v : values)
        if (v < x) ++less;
    return 100.0 * static_cast<double>(less) /
           static_cast<double>(values.size());
}

}  // namespace

std::vector<CandidateSpan> parameter_candidates(
    const SemanticTrace& trace, const Segmentation& segmentation,
    CandidateThresholds thresholds) {
    const std::size_t n = trace.size();
    const std::vector<double>& global = trace.global_delta_drift;

    std::vector<bool> qualifies(n + 1, false);
    for (const Segment& seg : segmentation.segments) {
        std::vector<double> local(trace.delta_semantics.begin() + seg.start - 1,
                                  trace.delta_semantics.begin() + seg.end);
        for (std::size_t i = seg.start; i <= seg.end; ++i) {
            const double local_rank =
                percentile_rank(local, trace.delta_semantics[i - 1]);
            const double global_rank = percentile_rank(global, global[i - 1]);
            qualifies[i] = local_rank >= thresholds.segment_percentile &&
                           global_rank >= thresholds.global_percentile;
        }
    }

    // Maximal qualifying runs within each segment.
    std::vector<CandidateSpan> spans;
    for (const Segment& seg : segmentation.segments) {
        std::size_t i = seg.start;
        while (i <= seg.end) {
            if (!qualifies[i]) {
                ++i;
                continue;
            }
            CandidateSpan span;
            span.start = i;
            while (i <= seg.end && qualifies[i]) {
                span.score += trace.delta_semantics[i - 1] * global[i - 1];
                span.end = i;
                ++i;
            }
            spans.push_back(span);
        }
    }
    std::stable_sort(spans.begin(), spans.end(),
                     [](const CandidateSpan& a, const CandidateSpan& b) {
                         return a.score > b.score;
                     });
    return spans;
}

}  // namespace ctxlab
