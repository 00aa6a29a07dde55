#ifndef NGRAMLR_COUNTS_HPP
#define NGRAMLR_COUNTS_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ngramlr/corpus.hpp"
#include "ngramlr/errors.hpp"

namespace ngramlr {

/// An N-gram is an ordered sequence of items; comparisons are lexicographic.
using NGram = std::vector<std::string>;

/// The wildcard itemization of an N-gram: everything is a wildcard except the
/// item at `position` (1-based). Two patterns of the same order are the same
/// key iff position and item agree.
struct UnitPattern {
    std::size_t position = 1;
    std::string item;
    std::size_t order = 1;

    friend bool operator==(const UnitPattern&, const UnitPattern&) = default;
};

using UnitKey = std::pair<std::size_t, std::string>;

struct EntityTypeFilter {
    std::string label;
};

/// All counts the estimators consume. `de` tables count N-grams at any
/// position; `nu` tables count N-grams whose last token immediately precedes
/// an entity span of the filter label. Unit tables aggregate the same two
/// multisets per (position, item). `lower[m-1]` holds order-m window counts
/// for m < order, which the smoothed-ratio baseline consumes; the order-N
/// tables are `de_counts`/`nu_counts` themselves.
struct FrequencyModel {
    std::size_t order = 0;
    std::string filter_label;
    std::map<NGram, std::uint64_t> de_counts;
    std::map<NGram, std::uint64_t> nu_counts;
    std::map<UnitKey, std::uint64_t> de_unit_counts;
    std::map<UnitKey, std::uint64_t> nu_unit_counts;
    std::uint64_t n_de = 0;
    std::uint64_t n_nu = 0;
    std::set<std::string> vocab;
    std::vector<std::map<NGram, std::uint64_t>> de_lower;
    std::vector<std::map<NGram, std::uint64_t>> nu_lower;

    std::uint64_t de_count(const NGram& w) const { return lookup(de_counts, w); }
    std::uint64_t nu_count(const NGram& w) const { return lookup(nu_counts, w); }
    std::uint64_t de_unit(std::size_t position, const std::string& item) const {
        return lookup(de_unit_counts, UnitKey{position, item});
    }
    std::uint64_t nu_unit(std::size_t position, const std::string& item) const {
        return lookup(nu_unit_counts, UnitKey{position, item});
    }

    /// Order-m window table for one side; m must be in [1, order].
    const std::map<NGram, std::uint64_t>& window_table(bool numerator, std::size_t m) const {
        if (m == 0 || m > order) throw precondition_error("window table order out of range");
        if (m == order) return numerator ? nu_counts : de_counts;
        return numerator ? nu_lower[m - 1] : de_lower[m - 1];
    }

private:
    template <typename Map, typename Key>
    static std::uint64_t lookup(const Map& map, const Key& key) {
        auto it = map.find(key);
        return it == map.end() ? 0 : it->second;
    }
};

/// All contiguous windows of length `order`, in document order. Documents
/// shorter than the order yield no windows.
inline std::vector<NGram> extract_ngrams(const Document& doc, std::size_t order) {
    if (order == 0) throw precondition_error("order must be at least 1");
    std::vector<NGram> windows;
    if (doc.tokens.size() < order) return windows;
    windows.reserve(doc.tokens.size() - order + 1);
    for (std::size_t i = 0; i + order <= doc.tokens.size(); ++i) {
        windows.emplace_back(doc.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                             doc.tokens.begin() + static_cast<std::ptrdiff_t>(i + order));
    }
    return windows;
}

/// The N unit patterns of an N-gram: the k-th keeps the item at position k.
inline std::vector<UnitPattern> itemize(const NGram& w) {
    std::vector<UnitPattern> units;
    units.reserve(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        units.push_back(UnitPattern{k + 1, w[k], w.size()});
    }
    return units;
}

namespace detail {

inline void count_window_tables(const Document& doc, std::size_t order,
                                std::vector<std::map<NGram, std::uint64_t>>& lower) {
    for (std::size_t m = 1; m < order; ++m) {
        if (doc.tokens.size() < m) break;
        auto& table = lower[m - 1];
        for (std::size_t i = 0; i + m <= doc.tokens.size(); ++i) {
            table[NGram(doc.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                        doc.tokens.begin() + static_cast<std::ptrdiff_t>(i + m))] += 1;
        }
    }
}

} // namespace detail

/// Counts one corpus into a FrequencyModel. The numerator window for a span
/// is the N-gram occupying [start-N, start); spans with fewer than N tokens
/// before them contribute nothing. Unit counts aggregate only complete
/// windows, so every per-position unit sum equals the corresponding total.
inline FrequencyModel build_model(const std::vector<Document>& docs, std::size_t order,
                                  const EntityTypeFilter& filter) {
    if (order == 0) throw precondition_error("order must be at least 1");
    FrequencyModel model;
    model.order = order;
    model.filter_label = filter.label;
    model.de_lower.resize(order - 1);
    model.nu_lower.resize(order - 1);

    for (const auto& doc : docs) {
        for (const auto& token : doc.tokens) model.vocab.insert(token);

        const auto windows = extract_ngrams(doc, order);
        for (const auto& w : windows) {
            model.de_counts[w] += 1;
            model.n_de += 1;
            for (std::size_t k = 0; k < order; ++k) {
                model.de_unit_counts[UnitKey{k + 1, w[k]}] += 1;
            }
        }
        for (const auto& span : doc.spans) {
            if (span.label != filter.label || span.start < order) continue;
            const auto& w = windows[span.start - order];
            model.nu_counts[w] += 1;
            model.n_nu += 1;
            for (std::size_t k = 0; k < order; ++k) {
                model.nu_unit_counts[UnitKey{k + 1, w[k]}] += 1;
            }
            for (std::size_t m = 1; m < order; ++m) {
                for (std::size_t i = 0; i + m <= order; ++i) {
                    model.nu_lower[m - 1][NGram(w.begin() + static_cast<std::ptrdiff_t>(i),
                                                w.begin() + static_cast<std::ptrdiff_t>(i + m))] += 1;
                }
            }
        }
        detail::count_window_tables(doc, order, model.de_lower);
    }
    return model;
}

/// Pointwise sum of two models over the same order and filter label.
/// Commutative and associative; the default-constructed model of equal order
/// and label is the identity.
inline FrequencyModel merge(const FrequencyModel& a, const FrequencyModel& b) {
    if (a.order != b.order) throw precondition_error("cannot merge models of different order");
    if (a.filter_label != b.filter_label) {
        throw precondition_error("cannot merge models built with different entity filters");
    }
    FrequencyModel out = a;
    for (const auto& [key, count] : b.de_counts) out.de_counts[key] += count;
    for (const auto& [key, count] : b.nu_counts) out.nu_counts[key] += count;
    for (const auto& [key, count] : b.de_unit_counts) out.de_unit_counts[key] += count;
    for (const auto& [key, count] : b.nu_unit_counts) out.nu_unit_counts[key] += count;
    out.n_de += b.n_de;
    out.n_nu += b.n_nu;
    out.vocab.insert(b.vocab.begin(), b.vocab.end());
    out.de_lower.resize(std::max(out.de_lower.size(), b.de_lower.size()));
    out.nu_lower.resize(std::max(out.nu_lower.size(), b.nu_lower.size()));
    for (std::size_t m = 0; m < b.de_lower.size(); ++m) {
        for (const auto& [key, count] : b.de_lower[m]) out.de_lower[m][key] += count;
    }
    for (std::size_t m = 0; m < b.nu_lower.size(); ++m) {
        for (const auto& [key, count] : b.nu_lower[m]) out.nu_lower[m][key] += count;
    }
    return out;
}

/// Shards the corpus, counts shards concurrently, and merges in shard order.
/// Equals the sequential build for any thread count.
inline FrequencyModel build_model_parallel(const std::vector<Document>& docs, std::size_t order,
                                           const EntityTypeFilter& filter, unsigned threads) {
    if (threads <= 1 || docs.size() < 2) return build_model(docs, order, filter);
    const std::size_t n_shards = std::min<std::size_t>(threads, docs.size());
    const std::size_t shard_size = (docs.size() + n_shards - 1) / n_shards;
    std::vector<std::future<FrequencyModel>> futures;
    for (std::size_t s = 0; s < n_shards; ++s) {
        const std::size_t begin = s * shard_size;
        const std::size_t end = std::min(docs.size(), begin + shard_size);
        if (begin >= end) break;
        futures.push_back(std::async(std::launch::async, [&docs, begin, end, order, &filter] {
            std::vector<Document> shard(docs.begin() + static_cast<std::ptrdiff_t>(begin),
                                        docs.begin() + static_cast<std::ptrdiff_t>(end));
            return build_model(shard, order, filter);
        }));
    }
    FrequencyModel model = futures.front().get();
    for (std::size_t s = 1; s < futures.size(); ++s) {
        model = merge(model, futures[s].get());
    }
    return model;
}

// ---------------------------------------------------------------------------
// Serialization: versioned, sorted, line-oriented `kind<TAB>key<TAB>count`.
// Two builds of the same corpus serialize byte-identically.

namespace detail {

inline std::string join_items(const NGram& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += w[i];
    }
    return out;
}

inline NGram split_items(const std::string& text) {
    NGram items;
    std::istringstream in(text);
    std::string item;
    while (in >> item) items.push_back(std::move(item));
    return items;
}

} // namespace detail

inline void save_model(const FrequencyModel& model, std::ostream& out) {
    out << "ngramlr-model\tversion\t1\n";
    out << "meta\torder\t" << model.order << '\n';
    out << "label\t" << (model.filter_label.empty() ? "-" : model.filter_label) << "\t1\n";
    out << "total\tde\t" << model.n_de << '\n';
    out << "total\tnu\t" << model.n_nu << '\n';
    for (const auto& token : model.vocab) out << "vocab\t" << token << "\t1\n";
    for (const auto& [w, c] : model.de_counts) out << "de\t" << detail::join_items(w) << '\t' << c << '\n';
    for (const auto& [w, c] : model.nu_counts) out << "nu\t" << detail::join_items(w) << '\t' << c << '\n';
    for (const auto& [key, c] : model.de_unit_counts) {
        out << "de_unit\t" << key.first << ' ' << key.second << '\t' << c << '\n';
    }
    for (const auto& [key, c] : model.nu_unit_counts) {
        out << "nu_unit\t" << key.first << ' ' << key.second << '\t' << c << '\n';
    }
    for (std::size_t m = 0; m < model.de_lower.size(); ++m) {
        for (const auto& [w, c] : model.de_lower[m]) {
            out << "de_lower\t" << (m + 1) << ' ' << detail::join_items(w) << '\t' << c << '\n';
        }
    }
    for (std::size_t m = 0; m < model.nu_lower.size(); ++m) {
        for (const auto& [w, c] : model.nu_lower[m]) {
            out << "nu_lower\t" << (m + 1) << ' ' << detail::join_items(w) << '\t' << c << '\n';
        }
    }
}

inline std::string save_model_text(const FrequencyModel& model) {
    std::ostringstream out;
    save_model(model, out);
    return out.str();
}

inline void save_model_file(const FrequencyModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write model file: " + path.string());
    save_model(model, out);
}

inline FrequencyModel load_model(std::istream& in) {
    FrequencyModel model;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) throw parse_error("expected kind<TAB>key<TAB>count", line_no);
        const std::string kind = line.substr(0, tab1);
        const std::string key = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const std::string count_text = line.substr(tab2 + 1);
        std::uint64_t count = 0;
        try {
            count = std::stoull(count_text);
        } catch (const std::exception&) {
            throw parse_error("bad count \"" + count_text + "\"", line_no);
        }
        if (kind == "ngramlr-model") {
            if (key != "version" || count != 1) throw parse_error("unsupported model version", line_no);
            saw_header = true;
            continue;
        }
        if (!saw_header) throw parse_error("missing model header", line_no);
        if (kind == "meta" && key == "order") {
            model.order = count;
            model.de_lower.resize(model.order ? model.order - 1 : 0);
            model.nu_lower.resize(model.order ? model.order - 1 : 0);
        } else if (kind == "label") {
            model.filter_label = key == "-" ? std::string{} : key;
        } else if (kind == "total") {
            (key == "nu" ? model.n_nu : model.n_de) = count;
        } else if (kind == "vocab") {
            model.vocab.insert(key);
        } else if (kind == "de" || kind == "nu") {
            auto items = detail::split_items(key);
            if (items.size() != model.order) throw parse_error("ngram of wrong order", line_no);
            (kind == "de" ? model.de_counts : model.nu_counts)[std::move(items)] = count;
        } else if (kind == "de_unit" || kind == "nu_unit") {
            auto items = detail::split_items(key);
            if (items.size() != 2) throw parse_error("unit key must be `position item`", line_no);
            const std::size_t position = std::stoull(items[0]);
            if (position == 0 || position > model.order) throw parse_error("unit position out of range", line_no);
            (kind == "de_unit" ? model.de_unit_counts
                               : model.nu_unit_counts)[UnitKey{position, items[1]}] = count;
        } else if (kind == "de_lower" || kind == "nu_lower") {
            auto items = detail::split_items(key);
            if (items.size() < 2) throw parse_error("lower key must be `order items...`", line_no);
            const std::size_t m = std::stoull(items[0]);
            if (m == 0 || m >= model.order) throw parse_error("lower order out of range", line_no);
            NGram w(items.begin() + 1, items.end());
            if (w.size() != m) throw parse_error("lower-order ngram of wrong length", line_no);
            (kind == "de_lower" ? model.de_lower : model.nu_lower)[m - 1][std::move(w)] = count;
        } else {
            throw parse_error("unknown record kind \"" + kind + "\"", line_no);
        }
    }
    if (!saw_header) throw data_error("empty model stream");
    return model;
}

inline FrequencyModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open model file: " + path.string());
    return load_model(in);
}

} // namespace ngramlr

#endif
