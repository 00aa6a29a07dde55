#ifndef NGRAMLR_REPORT_HPP
#define NGRAMLR_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ngramlr/counts.hpp"
#include "ngramlr/errors.hpp"
#include "ngramlr/evaluation.hpp"

namespace ngramlr {

inline std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

/// Quotes a CSV field only when it needs it.
inline std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write output file: " + path.string());
    return out;
}

inline std::string estimate_cell(const Estimate& e) {
    switch (e.kind) {
        case EstimateKind::finite: return format_double(e.value);
        case EstimateKind::infinite: return "inf";
        case EstimateKind::undefined: return "undef";
        case EstimateKind::oov: return "oov";
    }
    return "undef";
}

inline void write_ranked_csv(const std::filesystem::path& path, const RankedList& ranked) {
    auto out = open_output(path);
    out << "rank,ngram,estimate,r_item,t_d,truth\n";
    for (std::size_t r = 0; r < ranked.entries.size(); ++r) {
        const auto& entry = ranked.entries[r];
        out << (r + 1) << ',' << csv_field(detail::join_items(entry.ngram)) << ','
            << estimate_cell(entry.estimate) << ','
            << (entry.estimate.itemized_part ? format_double(*entry.estimate.itemized_part) : "")
            << ','
            << (entry.estimate.dependency_part ? format_double(*entry.estimate.dependency_part) : "")
            << ',' << (entry.truth ? "true" : "false") << '\n';
    }
}

inline void write_curve_csv(const std::filesystem::path& path, const CurveSeries& curve,
                            const std::string& x_name, const std::string& y_name) {
    auto out = open_output(path);
    out << x_name << ',' << y_name << '\n';
    for (const auto& point : curve.points) {
        out << format_double(point.x) << ',' << format_double(point.y) << '\n';
    }
}

/// Marker rows at ranks 1000, 2000, ... up to the cutoff.
inline void write_marker_csv(const std::filesystem::path& path, const CurveSeries& pr_curve) {
    auto out = open_output(path);
    out << "rank,recall,precision\n";
    for (std::size_t rank = 1000; rank <= pr_curve.cutoff; rank += 1000) {
        if (rank > pr_curve.points.size()) break;
        const auto& point = pr_curve.points[rank - 1];
        out << rank << ',' << format_double(point.x) << ',' << format_double(point.y) << '\n';
    }
}

/// FNV-1a over a file's bytes; used for manifest checksums.
inline std::string fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file for checksum: " + path.string());
    std::uint64_t hash = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

/// Minimal multi-series line plot for the curve CSVs.
inline void write_svg_curves(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, CurveSeries>>& series,
                             const std::string& x_label, const std::string& y_label) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    const double width = 640, height = 420, margin = 56;
    double x_max = 1.0, y_max = 1.0;
    for (const auto& [name, curve] : series) {
        for (const auto& p : curve.points) {
            x_max = std::max(x_max, p.x);
            y_max = std::max(y_max, p.y);
        }
    }
    auto sx = [&](double x) { return margin + (width - 2 * margin) * x / x_max; };
    auto sy = [&](double y) { return height - margin - (height - 2 * margin) * y / y_max; };

    auto out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(x_max) << "\" y2=\""
        << sy(0) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(0) << "\" y2=\""
        << sy(y_max) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
        << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
        << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
    std::size_t index = 0;
    for (const auto& [name, curve] : series) {
        const char* color = kColors[index % 5];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : curve.points) out << sx(p.x) << ',' << sy(p.y) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16 * static_cast<double>(index)
            << "\" fill=\"" << color << "\">" << name << "</text>\n";
        ++index;
    }
    out << "</svg>\n";
}

} // namespace ngramlr

#endif
