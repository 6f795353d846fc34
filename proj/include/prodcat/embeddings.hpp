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

enum class EmbeddingMode { kCbow, kSkipGram };

struct EmbeddingConfig {
    EmbeddingMode mode = EmbeddingMode::kCbow;
    int dim = 50;
    int window = 4;  // max distance between center and context word
    int epochs = 5;
    double learning_rate = 0.05;
    int min_count = 1;
    int negative = 0;  // 0 = full softmax output, otherwise negative-sampling count
    std::uint64_t seed = 0;
};

struct SubwordConfig {
    int n_min = 3;
    int n_max = 6;
    std::uint32_t buckets = 1u << 18;
};

struct GloveConfig {
    int dim = 50;
    int epochs = 50;
    double learning_rate = 0.05;
    double x_max = 100.0;
    double alpha = 0.75;
    bool adaptive = true;  // per-parameter adaptive steps; false = fixed step
    std::uint64_t seed = 0;
};

// Learned word vectors. For FastText tables the effective vector of a word is
// the stored word vector plus the mean of its hashed character-n-gram bucket
// vectors; unknown words compose from buckets alone, so lookup is total.
class EmbeddingTable {
public:
    int dim() const { return dim_; }
    std::size_t word_count() const { return words_.size(); }
    bool has_subwords() const { return subwords_; }
    const std::vector<std::string>& words() const { return words_; }

    int word_id(const std::string& word) const {
        auto it = index_.find(word);
        return it == index_.end() ? -1 : it->second;
    }

    // Fills `out` with the word's effective vector. Returns false only for
    // out-of-vocabulary words of a table without subwords.
    bool lookup(const std::string& word, DenseVector& out) const;

    const double* word_vector(int id) const { return vectors_.data() + static_cast<std::size_t>(id) * dim_; }

    std::vector<double> epoch_losses;

    void save(BinaryWriter& w) const;
    static EmbeddingTable load(BinaryReader& r);

    // Trainer-side construction.
    void init(int dim, std::vector<std::string> words);
    void init_subwords(const SubwordConfig& sub);
    std::vector<double>& raw_vectors() { return vectors_; }
    std::vector<double>& raw_buckets() { return bucket_vectors_; }
    const SubwordConfig& subword_config() const { return subword_config_; }

private:
    int dim_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> index_;
    std::vector<double> vectors_;  // word_count x dim
    bool subwords_ = false;
    SubwordConfig subword_config_;
    std::vector<double> bucket_vectors_;  // buckets x dim
};

EmbeddingTable train_word2vec(const std::vector<TokenizedDoc>& docs, const EmbeddingConfig& config);
EmbeddingTable train_fasttext(const std::vector<TokenizedDoc>& docs, const EmbeddingConfig& config,
                              const SubwordConfig& subword);

struct CooccurrenceCounts {
    std::vector<std::string> words;  // id -> word, first-occurrence order
    std::unordered_map<std::string, int> word_index;
    // Directed (i,j) -> weight; populated symmetrically so at(i,j) == at(j,i).
    std::unordered_map<std::uint64_t, double> counts;

    static std::uint64_t key(int i, int j) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
               static_cast<std::uint32_t>(j);
    }
    void add(int i, int j, double w);
    double at(int i, int j) const;
    std::size_t entry_count() const { return counts.size(); }
};

// One pass over the corpus; co-occurrence at token distance k contributes 1/k.
CooccurrenceCounts build_cooccurrence(const std::vector<TokenizedDoc>& docs, int window);

EmbeddingTable train_glove(const CooccurrenceCounts& cooc, const GloveConfig& config);

// Document aggregation rules. Sum and average skip words the table cannot
// resolve; the FastText rule averages direction vectors v/|v| of component
// words whose norm exceeds a small threshold.
DenseVector embed_doc_sum(const TokenizedDoc& doc, const EmbeddingTable& table);
DenseVector embed_doc_avg(const TokenizedDoc& doc, const EmbeddingTable& table);
DenseVector embed_doc_fasttext(const TokenizedDoc& doc, const EmbeddingTable& table);

inline constexpr double kZeroNormThreshold = 1e-12;

// --- training building blocks (also used by the gradient checks) ---

// Cross-entropy of softmax(output_weights * hidden) against `target`.
// Fills coef[V] with (softmax - one_hot(target)) and grad_hidden[dim] with the
// loss gradient w.r.t. hidden; the gradient w.r.t. output row r is
// coef[r] * hidden. Returns the loss.
double softmax_pair_loss_grad(const double* output_weights, std::size_t vocab, int dim,
                              const double* hidden, int target, double* coef, double* grad_hidden);

// Negative-sampling loss for one (hidden, target) prediction with the given
// negative rows. coef has n_negatives + 1 slots (target first); the gradient
// w.r.t. output row rows[k] is coef[k] * hidden. Returns the loss.
double negative_pair_loss_grad(const double* output_weights, int dim, const double* hidden,
                               int target, const int* negatives, int n_negatives, double* coef,
                               double* grad_hidden);

double glove_weight(double x, double x_max, double alpha);

// Weighted squared residual f(x) * (w_i . w_j~ + b_i + b_j~ - ln x)^2 of one
// co-occurrence pair, and its gradient w.r.t. both vectors and biases.
double glove_pair_loss(const double* wi, const double* wj, double bi, double bj, double x, int dim,
                       double x_max, double alpha);
double glove_pair_grad(const double* wi, const double* wj, double bi, double bj, double x, int dim,
                       double x_max, double alpha, double* grad_wi, double* grad_wj,
                       double* grad_bi, double* grad_bj);

// Character n-grams of "<word>" (boundary markers added), codepoint-aware.
std::vector<std::string> char_ngrams(const std::string& word, int n_min, int n_max);

// FNV-1a hash of the n-gram bytes, reduced modulo the bucket count.
std::uint32_t subword_bucket(const std::string& gram, std::uint32_t buckets);

}  // namespace prodcat
