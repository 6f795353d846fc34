#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace prodcat {

// Synthetic product-name corpus: category-specific keyword pools plus brand,
// size and filler tokens, with a controllable share of cross-category noise
// words. Deterministic per seed.
struct CorpusSpec {
    int classes = 15;
    int size = 2500;
    std::uint64_t seed = 0;
    double noise_rate = 0.0;          // chance of appending a word from another category
    std::vector<double> imbalance;    // per-class weights; empty = mild built-in profile
};

// Exact per-class record counts (largest-remainder apportionment of size).
std::vector<int> corpus_class_counts(const CorpusSpec& spec);

const std::vector<std::string>& corpus_category_names();

void generate_corpus(const CorpusSpec& spec, std::ostream& out);
void generate_corpus_file(const CorpusSpec& spec, const std::string& path);

}  // namespace prodcat
