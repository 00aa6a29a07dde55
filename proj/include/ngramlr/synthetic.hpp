#ifndef NGRAMLR_SYNTHETIC_HPP
#define NGRAMLR_SYNTHETIC_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ngramlr/corpus.hpp"
#include "ngramlr/errors.hpp"

namespace ngramlr {

/// An N-gram to insert into generated text; with probability `rate` each
/// occurrence is immediately followed by an entity span of `label`.
struct PlantedContext {
    std::vector<std::string> items;
    std::string label;
    double rate = 1.0;
};

struct GeneratorOptions {
    std::uint64_t seed = 0;
    std::size_t vocab_size = 0;
    std::size_t n_docs = 0;
    std::vector<PlantedContext> planted;

    std::size_t min_doc_len = 30;
    std::size_t max_doc_len = 70;
    /// Chance that a given planted context occurs in a given document,
    /// and that an occurring one repeats.
    double plant_prob = 0.7;
    double repeat_prob = 0.3;
    /// Chance that a background token is followed by a spontaneous entity.
    double spontaneous_entity_rate = 0.005;
    /// Distinct entity surfaces per label.
    std::size_t entity_surfaces = 12;
    double two_token_entity_prob = 0.2;
    double train_frac = 0.8;
    double valid_frac = 0.1;
};

namespace detail {

// Deterministic draws straight off mt19937_64. The std:: distributions are
// implementation-defined, which would break byte-identical regeneration.
inline double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t below(std::mt19937_64& rng, std::size_t bound) {
    return static_cast<std::size_t>(rng() % bound);
}

/// Cumulative-weight sampler over ranks 0..n-1 with weight 1/(rank+1).
class ZipfSampler {
public:
    explicit ZipfSampler(std::size_t n) : cumulative_(n) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += 1.0 / static_cast<double>(i + 1);
            cumulative_[i] = total;
        }
        for (auto& c : cumulative_) c /= total;
    }

    std::size_t draw(std::mt19937_64& rng) const {
        const double u = unit_real(rng);
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) return cumulative_.size() - 1;
        return static_cast<std::size_t>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

} // namespace detail

/// Generates a long-tailed synthetic corpus with planted entity contexts.
/// Pure function of its options: the same options yield byte-identical
/// splits. Background tokens are named "w<rank>" and entity surfaces
/// "<LABEL>_<k>", so planted contexts using other names never collide with
/// generated text; planted occurrences are always separated by at least one
/// background token, so a planted N-gram occurs only where it was planted.
inline SplitSet generate_synthetic(const GeneratorOptions& opt) {
    if (opt.vocab_size == 0) throw precondition_error("vocab_size must be positive");
    if (opt.n_docs == 0) throw precondition_error("n_docs must be positive");
    if (opt.min_doc_len == 0 || opt.max_doc_len < opt.min_doc_len) {
        throw precondition_error("bad document length range");
    }
    for (const auto& planted : opt.planted) {
        if (planted.items.empty()) throw precondition_error("planted context is empty");
        if (planted.items.size() > opt.vocab_size) {
            throw precondition_error("vocab_size smaller than a planted context's order");
        }
        if (planted.label.empty()) throw precondition_error("planted context with empty label");
        if (!(planted.rate > 0.0) || planted.rate > 1.0) {
            throw precondition_error("planted rate must lie in (0,1]");
        }
        for (const auto& item : planted.items) {
            if (!valid_token(item)) throw precondition_error("planted context has invalid token");
        }
    }

    std::mt19937_64 rng(opt.seed);
    detail::ZipfSampler background(opt.vocab_size);

    std::vector<std::string> labels;
    for (const auto& planted : opt.planted) {
        if (std::find(labels.begin(), labels.end(), planted.label) == labels.end()) {
            labels.push_back(planted.label);
        }
    }

    auto emit_background = [&](Document& doc) {
        doc.tokens.push_back("w" + std::to_string(background.draw(rng)));
    };
    auto emit_entity = [&](Document& doc, const std::string& label) {
        const std::size_t start = doc.tokens.size();
        const std::size_t surfaces = std::max<std::size_t>(1, opt.entity_surfaces);
        doc.tokens.push_back(label + "_" + std::to_string(detail::below(rng, surfaces)));
        if (detail::unit_real(rng) < opt.two_token_entity_prob) {
            doc.tokens.push_back(label + "_" + std::to_string(detail::below(rng, surfaces)));
        }
        doc.spans.push_back(EntitySpan{start, doc.tokens.size(), label});
    };

    std::vector<Document> docs;
    docs.reserve(opt.n_docs);
    for (std::size_t d = 0; d < opt.n_docs; ++d) {
        Document doc;
        const std::size_t target_len =
            opt.min_doc_len + detail::below(rng, opt.max_doc_len - opt.min_doc_len + 1);

        // Which planted contexts occur in this document, and how often.
        std::vector<std::size_t> events;
        for (std::size_t p = 0; p < opt.planted.size(); ++p) {
            if (detail::unit_real(rng) < opt.plant_prob) {
                events.push_back(p);
                if (detail::unit_real(rng) < opt.repeat_prob) events.push_back(p);
            }
        }
        for (std::size_t i = events.size(); i > 1; --i) {
            std::swap(events[i - 1], events[detail::below(rng, i)]);
        }

        const std::size_t gap =
            std::max<std::size_t>(1, events.empty() ? target_len : target_len / (events.size() + 1));
        for (std::size_t event : events) {
            const std::size_t run = 1 + detail::below(rng, gap);
            for (std::size_t i = 0; i < run; ++i) {
                emit_background(doc);
                if (detail::unit_real(rng) < opt.spontaneous_entity_rate && !labels.empty()) {
                    emit_entity(doc, labels[detail::below(rng, labels.size())]);
                }
            }
            const auto& planted = opt.planted[event];
            doc.tokens.insert(doc.tokens.end(), planted.items.begin(), planted.items.end());
            if (detail::unit_real(rng) < planted.rate) {
                emit_entity(doc, planted.label);
            } else {
                emit_background(doc);
            }
        }
        while (doc.tokens.size() < target_len) {
            emit_background(doc);
            if (detail::unit_real(rng) < opt.spontaneous_entity_rate && !labels.empty()) {
                emit_entity(doc, labels[detail::below(rng, labels.size())]);
            }
        }
        validate_document(doc);
        docs.push_back(std::move(doc));
    }

    SplitSet split;
    const std::size_t n_train = static_cast<std::size_t>(static_cast<double>(opt.n_docs) * opt.train_frac);
    const std::size_t n_valid = static_cast<std::size_t>(static_cast<double>(opt.n_docs) * opt.valid_frac);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i < n_train) {
            split.train.push_back(std::move(docs[i]));
        } else if (i < n_train + n_valid) {
            split.valid.push_back(std::move(docs[i]));
        } else {
            split.test.push_back(std::move(docs[i]));
        }
    }
    return split;
}

inline SplitSet generate_synthetic(std::uint64_t seed, std::size_t vocab_size, std::size_t n_docs,
                                   const std::vector<PlantedContext>& planted) {
    GeneratorOptions opt;
    opt.seed = seed;
    opt.vocab_size = vocab_size;
    opt.n_docs = n_docs;
    opt.planted = planted;
    return generate_synthetic(opt);
}

} // namespace ngramlr

#endif
