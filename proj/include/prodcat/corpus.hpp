#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace prodcat {

struct RawRecord {
    std::string text;
    std::string label;
};

struct CsvSchema {
    std::string text_column;
    std::string label_column;
};

struct LoadResult {
    std::vector<RawRecord> records;
    std::size_t skipped_rows = 0;
    std::vector<std::string> diagnostics;
};

// Loads labeled records from a CSV file. Rows with an empty (after trimming)
// text or label field are skipped and counted.
LoadResult load_csv(const std::string& path, const CsvSchema& schema);

struct TokenizerConfig {
    bool fold_diacritics = false;
};

// Lowercases and splits on whitespace and any non-alphanumeric codepoint.
// Digits stay inside tokens ("500g"). Non-ASCII letters are kept as-is unless
// fold_diacritics maps them to their base letter.
std::vector<std::string> tokenize(const std::string& text, const TokenizerConfig& config = {});

// Joins n-gram constituents with a unit separator, which tokenize can never
// produce, so n-gram terms cannot collide with real tokens.
inline constexpr char kNgramSeparator = '\x1f';

// All contiguous word n-grams for n = 1..max_n, grouped by n, left to right.
std::vector<std::string> word_ngrams(const std::vector<std::string>& tokens, int max_n);

struct LabelDictionary {
    std::vector<std::string> names;  // class index -> label string
    std::unordered_map<std::string, int> index;

    int add(const std::string& label);
    // Returns -1 when the label is unknown.
    int find(const std::string& label) const;
    int size() const { return static_cast<int>(names.size()); }
};

struct TokenizedDoc {
    std::vector<std::string> tokens;
    int label = -1;
};

struct IngestResult {
    std::vector<TokenizedDoc> docs;
    LabelDictionary labels;
    std::size_t empty_docs = 0;
    std::vector<std::string> diagnostics;
};

// Tokenizes records and assigns class indices in first-occurrence order.
// Records that tokenize to nothing are rejected with a diagnostic.
IngestResult ingest(const std::vector<RawRecord>& records, const TokenizerConfig& config);

struct SplitResult {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Deterministic per seed. Stratified mode keeps each class's test share
// within one record of test_fraction and requires >= 2 records per class.
SplitResult split(const std::vector<TokenizedDoc>& docs, double test_fraction, std::uint64_t seed,
                  bool stratified);

struct FoldPlan {
    int k = 0;
    std::vector<int> assignment;  // per-record fold index
    std::uint64_t seed = 0;
};

// Fold sizes differ by at most one; stratified mode additionally spreads each
// class across folds with per-fold class counts differing by at most one.
FoldPlan make_folds(const std::vector<TokenizedDoc>& docs, int k, std::uint64_t seed,
                    bool stratified);

}  // namespace prodcat
