#pragma once

#include <filesystem>
#include <vector>

#include "ctxlab/semantic_dynamics.hpp"

namespace ctxlab {

struct ReportPaths {
    std::filesystem::path trace_csv;
    std::filesystem::path segments_json;
    std::filesystem::path chart_svg;
};

/// Writes trace.csv (index, token, delta_semantics, global_drift,
/// global_delta_drift; 6-decimal fixed point), segments.json and chart.svg
/// under `directory`. Output bytes are deterministic for fixed inputs.
ReportPaths emit_report(const SemanticTrace& trace,
                        const Segmentation& segmentation,
                        const std::vector<CandidateSpan>& candidates,
                        const std::filesystem::path& directory);

/// Parses a trace.csv written by emit_report.
SemanticTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace ctxlab
