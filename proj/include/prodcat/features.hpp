#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "prodcat/common.hpp"
#include "prodcat/corpus.hpp"

namespace prodcat {

class BinaryReader;
class BinaryWriter;

struct Vocabulary {
    std::vector<std::string> terms;  // index -> term
    std::unordered_map<std::string, std::uint32_t> term_index;
    std::vector<std::uint32_t> doc_freq;  // docs containing the term
    std::uint64_t doc_count = 0;
    int max_ngram = 1;
    std::size_t max_features = 0;

    std::size_t size() const { return terms.size(); }
    bool contains(const std::string& term) const { return term_index.count(term) != 0; }

    void save(BinaryWriter& w) const;
    static Vocabulary load(BinaryReader& r);
};

// Collects all word n-grams (n <= max_ngram) over the corpus. When distinct
// terms exceed max_features, keeps the top max_features by total corpus
// frequency, ties broken lexicographically. Term indices are assigned in
// (frequency desc, term asc) order.
Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs, std::size_t max_features,
                            int max_ngram);

// Occurrence counts of in-vocabulary terms among the doc's n-grams.
FeatureVector count_vectorize(const TokenizedDoc& doc, const Vocabulary& vocab);

// Share of `term` among all terms of the expanded list; the denominator counts
// every term, in or out of vocabulary.
double term_frequency(const std::string& term, const std::vector<std::string>& expanded);

// ln(N / df(term)). The term must be in the vocabulary.
double inverse_doc_frequency(const std::string& term, const Vocabulary& vocab);

FeatureVector tfidf_vectorize(const TokenizedDoc& doc, const Vocabulary& vocab);

}  // namespace prodcat
