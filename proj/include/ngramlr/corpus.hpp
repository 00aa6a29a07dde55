#ifndef NGRAMLR_CORPUS_HPP
#define NGRAMLR_CORPUS_HPP

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ngramlr/errors.hpp"

namespace ngramlr {

/// Half-open token range [start, end) carrying an entity type tag.
struct EntitySpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string label;

    friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

/// A flat token sequence with non-overlapping entity spans sorted by start.
struct Document {
    std::vector<std::string> tokens;
    std::vector<EntitySpan> spans;

    friend bool operator==(const Document&, const Document&) = default;
};

struct SplitSet {
    std::vector<Document> train;
    std::vector<Document> valid;
    std::vector<Document> test;
};

inline bool valid_token(std::string_view token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return false;
    }
    return true;
}

/// Throws precondition_error if tokens or spans violate their invariants.
inline void validate_document(const Document& doc) {
    for (const auto& token : doc.tokens) {
        if (!valid_token(token)) {
            throw precondition_error("invalid token: \"" + token + "\"");
        }
    }
    std::size_t previous_end = 0;
    for (const auto& span : doc.spans) {
        if (span.label.empty()) throw precondition_error("entity span with empty label");
        if (span.start >= span.end || span.end > doc.tokens.size()) {
            throw precondition_error("entity span [" + std::to_string(span.start) + "," +
                                     std::to_string(span.end) + ") out of range");
        }
        if (span.start < previous_end) {
            throw precondition_error("entity spans overlap or are unsorted");
        }
        previous_end = span.end;
    }
}

namespace detail {

inline void close_open_span(Document& doc, std::size_t& open_start, std::string& open_label,
                            std::size_t position) {
    if (!open_label.empty()) {
        doc.spans.push_back(EntitySpan{open_start, position, open_label});
        open_label.clear();
    }
}

} // namespace detail

/// Parses the two-column annotated format: one `token<TAB>tag` per line with
/// tags in {O, B-<LABEL>, I-<LABEL>}, documents separated by a blank line.
/// Spans are rebuilt from contiguous B/I runs. An I tag without a preceding
/// B/I of the same label is a parse error naming the offending line.
inline std::vector<Document> parse_annotated(std::istream& in) {
    std::vector<Document> docs;
    Document current;
    std::size_t open_start = 0;
    std::string open_label;
    std::string line;
    std::size_t line_no = 0;

    auto flush_document = [&] {
        detail::close_open_span(current, open_start, open_label, current.tokens.size());
        if (!current.tokens.empty()) {
            validate_document(current);
            docs.push_back(std::move(current));
        }
        current = Document{};
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush_document();
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw parse_error("expected exactly one tab between token and tag", line_no);
        }
        std::string token = line.substr(0, tab);
        std::string tag = line.substr(tab + 1);
        if (!valid_token(token)) {
            throw parse_error("empty or whitespace-bearing token", line_no);
        }
        const std::size_t position = current.tokens.size();
        if (tag == "O") {
            detail::close_open_span(current, open_start, open_label, position);
        } else if (tag.rfind("B-", 0) == 0 && tag.size() > 2) {
            detail::close_open_span(current, open_start, open_label, position);
            open_label = tag.substr(2);
            open_start = position;
        } else if (tag.rfind("I-", 0) == 0 && tag.size() > 2) {
            const std::string label = tag.substr(2);
            if (open_label != label) {
                throw parse_error("I-" + label + " without preceding B-" + label + " or I-" + label,
                                  line_no);
            }
        } else {
            throw parse_error("unknown tag \"" + tag + "\"", line_no);
        }
        current.tokens.push_back(std::move(token));
    }
    flush_document();
    return docs;
}

inline std::vector<Document> parse_annotated(const std::string& text) {
    std::istringstream in(text);
    return parse_annotated(in);
}

inline std::vector<Document> parse_annotated_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open corpus file: " + path.string());
    return parse_annotated(in);
}

inline void write_annotated(std::ostream& out, const Document& doc) {
    validate_document(doc);
    std::size_t span_index = 0;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        while (span_index < doc.spans.size() && doc.spans[span_index].end <= i) ++span_index;
        std::string tag = "O";
        if (span_index < doc.spans.size()) {
            const auto& span = doc.spans[span_index];
            if (i == span.start) {
                tag = "B-" + span.label;
            } else if (i > span.start && i < span.end) {
                tag = "I-" + span.label;
            }
        }
        out << doc.tokens[i] << '\t' << tag << '\n';
    }
}

inline void write_annotated(std::ostream& out, const std::vector<Document>& docs) {
    bool first = true;
    for (const auto& doc : docs) {
        if (!first) out << '\n';
        write_annotated(out, doc);
        first = false;
    }
}

inline std::string to_annotated(const std::vector<Document>& docs) {
    std::ostringstream out;
    write_annotated(out, docs);
    return out.str();
}

inline void write_annotated_file(const std::filesystem::path& path,
                                 const std::vector<Document>& docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write corpus file: " + path.string());
    write_annotated(out, docs);
}

} // namespace ngramlr

#endif
