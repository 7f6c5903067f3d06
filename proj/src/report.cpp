#include "ctxlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ctxlab {

using nlohmann::json;

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string fixed6(double value) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << value;
    return os.str();
}

void write_trace_csv(const SemanticTrace& trace,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "index,token,delta_semantics,global_drift,global_delta_drift\n";
    for (std::size_t i = 1; i <= trace.size(); ++i) {
        out << i << ',' << csv_quote(trace.tokens[i - 1]) << ','
            << fixed6(trace.delta_semantics[i - 1]) << ','
            << fixed6(trace.global_drift[i - 1]) << ','
            << fixed6(trace.global_delta_drift[i - 1]) << '\n';
    }
}

void write_segments_json(const SemanticTrace& trace,
                         const Segmentation& segmentation,
                         const std::vector<CandidateSpan>& candidates,
                         const std::filesystem::path& path) {
    json doc;
    doc["boundaries"] = segmentation.boundaries;
    doc["segments"] = json::array();
    for (const Segment& seg : segmentation.segments) {
        std::string text;
        for (std::size_t i = seg.start; i <= seg.end; ++i) {
            if (!text.empty()) text += ' ';
            text += trace.tokens[i - 1];
        }
        doc["segments"].push_back(
            {{"start", seg.start}, {"end", seg.end}, {"text", text}});
    }
    doc["candidates"] = json::array();
    for (const CandidateSpan& span : candidates)
        doc["candidates"].push_back({{"start", span.start},
                                     {"end", span.end},
                                     {"score", span.score}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

// Static chart: drift as a line, per-token deltas as paired bars, one circle
// per segment boundary. No scripts, no timestamps.
void write_chart_svg(const SemanticTrace& trace,
                     const Segmentation& segmentation,
                     const std::filesystem::path& path) {
    const std::size_t n = trace.size();
    const double width = 960.0, height = 320.0;
    const double left = 40.0, right = 10.0, top = 10.0, bottom = 30.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double max_value = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        max_value = std::max(max_value, trace.global_drift[i]);
        max_value = std::max(max_value, std::abs(trace.delta_semantics[i]));
        max_value = std::max(max_value, std::abs(trace.global_delta_drift[i]));
    }

    auto x_at = [&](std::size_t index) {
        if (n == 1) return left + plot_w / 2.0;
        return left + plot_w * static_cast<double>(index - 1) /
                          static_cast<double>(n - 1);
    };
    auto y_at = [&](double value) {
        return top + plot_h * (1.0 - value / max_value);
    };

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    const double bar_w = std::max(1.0, plot_w / static_cast<double>(n) / 3.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double ds = std::abs(trace.delta_semantics[i - 1]);
        const double dd = std::abs(trace.global_delta_drift[i - 1]);
        svg << "<rect class=\"delta-semantics\" x=\"" << (x_at(i) - bar_w)
            << "\" y=\"" << y_at(ds) << "\" width=\"" << bar_w << "\" height=\""
            << (plot_h - (y_at(ds) - top)) << "\" fill=\"#7aa6d6\"/>\n";
        svg << "<rect class=\"delta-drift\" x=\"" << x_at(i) << "\" y=\""
            << y_at(dd) << "\" width=\"" << bar_w << "\" height=\""
            << (plot_h - (y_at(dd) - top)) << "\" fill=\"#e8a33d\"/>\n";
    }

    svg << "<polyline class=\"drift\" fill=\"none\" stroke=\"#2457a0\" "
           "stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 1; i <= n; ++i) {
        if (i > 1) svg << ' ';
        svg << x_at(i) << ',' << y_at(trace.global_drift[i - 1]);
    }
    svg << "\"/>\n";

    for (std::size_t b : segmentation.boundaries)
        svg << "<circle class=\"boundary\" cx=\"" << x_at(b) << "\" cy=\""
            << y_at(trace.global_delta_drift[b - 1]) << "\" r=\"5\" "
               "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";

    svg << "<line x1=\"" << left << "\" y1=\"" << (top + plot_h) << "\" x2=\""
        << (left + plot_w) << "\" y2=\"" << (top + plot_h)
        << "\" stroke=\"#444\"/>\n";
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << svg.str();
}

}  // namespace

ReportPaths emit_report(const SemanticTrace& trace,
                        const Segmentation& segmentation,
                        const std::vector<CandidateSpan>& candidates,
                        const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    ReportPaths paths{directory / "trace.csv", directory / "segments.json",
                      directory / "chart.svg"};
    write_trace_csv(trace, paths.trace_csv);
    write_segments_json(trace, segmentation, candidates, paths.segments_json);
    write_chart_svg(trace, segmentation, paths.chart_svg);
    return paths;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

SemanticTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    SemanticTrace trace;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw std::runtime_error("malformed trace row: " + line);
        trace.tokens.push_back(fields[1]);
        trace.delta_semantics.push_back(std::stod(fields[2]));
        trace.global_drift.push_back(std::stod(fields[3]));
        trace.global_delta_drift.push_back(std::stod(fields[4]));
    }
    return trace;
}

}  // namespace ctxlab
