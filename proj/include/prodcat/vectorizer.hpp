#pragma once

#include <optional>
#include <string>

#include "prodcat/common.hpp"
#include "prodcat/corpus.hpp"
#include "prodcat/embeddings.hpp"
#include "prodcat/features.hpp"

namespace prodcat {

// The nine document vectorizations: counts, TF-IDF, Word2Vec in two modes
// with sum/average aggregation, FastText in two modes with the
// normalized-average rule, and GloVe with sum aggregation.
enum class VectorizationKind {
    kCount,
    kTfidf,
    kW2vCbowSum,
    kW2vCbowAvg,
    kW2vSgSum,
    kW2vSgAvg,
    kFasttextCbow,
    kFasttextSg,
    kGloveSum,
};

inline constexpr VectorizationKind kAllVectorizations[] = {
    VectorizationKind::kCount,        VectorizationKind::kTfidf,
    VectorizationKind::kW2vCbowSum,   VectorizationKind::kW2vCbowAvg,
    VectorizationKind::kW2vSgSum,     VectorizationKind::kW2vSgAvg,
    VectorizationKind::kFasttextCbow, VectorizationKind::kFasttextSg,
    VectorizationKind::kGloveSum,
};

const char* to_string(VectorizationKind kind);
std::optional<VectorizationKind> vectorization_from_string(const std::string& name);
bool is_embedding_kind(VectorizationKind kind);

struct VectorizationConfig {
    VectorizationKind kind = VectorizationKind::kTfidf;
    // count / tf-idf
    std::size_t max_features = 3000;
    int max_ngram = 3;
    // embedding kinds (mode is implied by the kind)
    EmbeddingConfig embedding;
    SubwordConfig subword;
    GloveConfig glove;
};

class BinaryReader;
class BinaryWriter;

class FittedVectorizer {
public:
    FittedVectorizer() = default;

    static FittedVectorizer fit(const std::vector<TokenizedDoc>& docs,
                                const VectorizationConfig& config);

    FeatureVector transform(const TokenizedDoc& doc) const;

    bool fitted() const { return fitted_; }
    VectorizationKind kind() const { return kind_; }
    std::size_t dim() const;
    const Vocabulary& vocabulary() const { return vocab_; }
    const EmbeddingTable& table() const { return table_; }

    void save(BinaryWriter& w) const;
    static FittedVectorizer load(BinaryReader& r);

private:
    bool fitted_ = false;
    VectorizationKind kind_ = VectorizationKind::kTfidf;
    Vocabulary vocab_;
    EmbeddingTable table_;
};

// Dispatches a document through a fitted artifact; unfitted artifacts are an
// error naming the kind.
FeatureVector vectorize(const TokenizedDoc& doc, const FittedVectorizer& fitted);

}  // namespace prodcat
