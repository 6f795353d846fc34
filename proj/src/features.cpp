#include "prodcat/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "prodcat/binary_io.hpp"

namespace prodcat {

void Vocabulary::save(BinaryWriter& w) const {
    w.u64(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        w.str(terms[i]);
        w.u32(doc_freq[i]);
    }
    w.u64(doc_count);
    w.i32(max_ngram);
    w.u64(max_features);
}

Vocabulary Vocabulary::load(BinaryReader& r) {
    Vocabulary v;
    std::uint64_t n = r.u64();
    v.terms.resize(n);
    v.doc_freq.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        v.terms[i] = r.str();
        v.doc_freq[i] = r.u32();
        v.term_index.emplace(v.terms[i], static_cast<std::uint32_t>(i));
    }
    v.doc_count = r.u64();
    v.max_ngram = r.i32();
    v.max_features = r.u64();
    return v;
}

Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs, std::size_t max_features,
                            int max_ngram) {
    if (docs.empty()) throw ValidationError("build_vocabulary: empty corpus");
    if (max_features < 1) throw ValidationError("build_vocabulary: max_features must be >= 1");

    struct TermStats {
        std::uint64_t total = 0;
        std::uint32_t docs = 0;
        std::uint64_t last_doc = UINT64_MAX;
    };
    std::unordered_map<std::string, TermStats> stats;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (auto& term : word_ngrams(docs[d].tokens, max_ngram)) {
            TermStats& s = stats[std::move(term)];
            ++s.total;
            if (s.last_doc != d) {
                s.last_doc = d;
                ++s.docs;
            }
        }
    }

    std::vector<std::pair<const std::string*, const TermStats*>> order;
    order.reserve(stats.size());
    for (const auto& [term, s] : stats) order.emplace_back(&term, &s);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second->total != b.second->total) return a.second->total > b.second->total;
        return *a.first < *b.first;
    });
    if (order.size() > max_features) order.resize(max_features);

    Vocabulary vocab;
    vocab.doc_count = docs.size();
    vocab.max_ngram = max_ngram;
    vocab.max_features = max_features;
    vocab.terms.reserve(order.size());
    vocab.doc_freq.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        vocab.terms.push_back(*order[i].first);
        vocab.doc_freq.push_back(order[i].second->docs);
        vocab.term_index.emplace(vocab.terms.back(), static_cast<std::uint32_t>(i));
    }
    return vocab;
}

FeatureVector count_vectorize(const TokenizedDoc& doc, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for (const auto& term : word_ngrams(doc.tokens, vocab.max_ngram)) {
        auto it = vocab.term_index.find(term);
        if (it != vocab.term_index.end()) counts[it->second] += 1.0;
    }
    FeatureVector v;
    v.dim = vocab.size();
    for (const auto& [idx, c] : counts) v.push(idx, c);
    return v;
}

double term_frequency(const std::string& term, const std::vector<std::string>& expanded) {
    if (expanded.empty()) throw ValidationError("term_frequency: empty term list");
    std::size_t n = 0;
    for (const auto& t : expanded) {
        if (t == term) ++n;
    }
    return static_cast<double>(n) / static_cast<double>(expanded.size());
}

double inverse_doc_frequency(const std::string& term, const Vocabulary& vocab) {
    auto it = vocab.term_index.find(term);
    if (it == vocab.term_index.end()) {
        throw ValidationError("inverse_doc_frequency: term not in vocabulary: " + term);
    }
    return std::log(static_cast<double>(vocab.doc_count) /
                    static_cast<double>(vocab.doc_freq[it->second]));
}

FeatureVector tfidf_vectorize(const TokenizedDoc& doc, const Vocabulary& vocab) {
    std::vector<std::string> expanded = word_ngrams(doc.tokens, vocab.max_ngram);
    // tf denominator counts every expanded term, in-vocabulary or not.
    std::map<std::uint32_t, double> counts;
    for (const auto& term : expanded) {
        auto it = vocab.term_index.find(term);
        if (it != vocab.term_index.end()) counts[it->second] += 1.0;
    }
    FeatureVector v;
    v.dim = vocab.size();
    if (expanded.empty()) return v;
    const double total = static_cast<double>(expanded.size());
    for (const auto& [idx, c] : counts) {
        double idf = std::log(static_cast<double>(vocab.doc_count) /
                              static_cast<double>(vocab.doc_freq[idx]));
        v.push(idx, (c / total) * idf);
    }
    return v;
}

}  // namespace prodcat
