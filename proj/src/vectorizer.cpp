#include "prodcat/vectorizer.hpp"

#include "prodcat/binary_io.hpp"

namespace prodcat {

const char* to_string(VectorizationKind kind) {
    switch (kind) {
        case VectorizationKind::kCount: return "count";
        case VectorizationKind::kTfidf: return "tfidf";
        case VectorizationKind::kW2vCbowSum: return "w2v-cbow-sum";
        case VectorizationKind::kW2vCbowAvg: return "w2v-cbow-avg";
        case VectorizationKind::kW2vSgSum: return "w2v-sg-sum";
        case VectorizationKind::kW2vSgAvg: return "w2v-sg-avg";
        case VectorizationKind::kFasttextCbow: return "fasttext-cbow";
        case VectorizationKind::kFasttextSg: return "fasttext-sg";
        case VectorizationKind::kGloveSum: return "glove-sum";
    }
    return "?";
}

std::optional<VectorizationKind> vectorization_from_string(const std::string& name) {
    for (VectorizationKind kind : kAllVectorizations) {
        if (name == to_string(kind)) return kind;
    }
    return std::nullopt;
}

bool is_embedding_kind(VectorizationKind kind) {
    return kind != VectorizationKind::kCount && kind != VectorizationKind::kTfidf;
}

FittedVectorizer FittedVectorizer::fit(const std::vector<TokenizedDoc>& docs,
                                       const VectorizationConfig& config) {
    FittedVectorizer fv;
    fv.kind_ = config.kind;
    EmbeddingConfig emb = config.embedding;
    switch (config.kind) {
        case VectorizationKind::kCount:
        case VectorizationKind::kTfidf:
            fv.vocab_ = build_vocabulary(docs, config.max_features, config.max_ngram);
            break;
        case VectorizationKind::kW2vCbowSum:
        case VectorizationKind::kW2vCbowAvg:
            emb.mode = EmbeddingMode::kCbow;
            fv.table_ = train_word2vec(docs, emb);
            break;
        case VectorizationKind::kW2vSgSum:
        case VectorizationKind::kW2vSgAvg:
            emb.mode = EmbeddingMode::kSkipGram;
            fv.table_ = train_word2vec(docs, emb);
            break;
        case VectorizationKind::kFasttextCbow:
            emb.mode = EmbeddingMode::kCbow;
            fv.table_ = train_fasttext(docs, emb, config.subword);
            break;
        case VectorizationKind::kFasttextSg:
            emb.mode = EmbeddingMode::kSkipGram;
            fv.table_ = train_fasttext(docs, emb, config.subword);
            break;
        case VectorizationKind::kGloveSum: {
            GloveConfig glove = config.glove;
            glove.dim = config.embedding.dim;
            glove.seed = config.embedding.seed;
            auto cooc = build_cooccurrence(docs, config.embedding.window);
            fv.table_ = train_glove(cooc, glove);
            break;
        }
    }
    fv.fitted_ = true;
    return fv;
}

std::size_t FittedVectorizer::dim() const {
    if (!fitted_) return 0;
    if (is_embedding_kind(kind_)) return static_cast<std::size_t>(table_.dim());
    return vocab_.size();
}

FeatureVector FittedVectorizer::transform(const TokenizedDoc& doc) const {
    if (!fitted_) {
        throw ValidationError(std::string("vectorizer '") + to_string(kind_) +
                              "' has not been fitted");
    }
    switch (kind_) {
        case VectorizationKind::kCount: return count_vectorize(doc, vocab_);
        case VectorizationKind::kTfidf: return tfidf_vectorize(doc, vocab_);
        case VectorizationKind::kW2vCbowSum:
        case VectorizationKind::kW2vSgSum:
        case VectorizationKind::kGloveSum: return to_feature(embed_doc_sum(doc, table_));
        case VectorizationKind::kW2vCbowAvg:
        case VectorizationKind::kW2vSgAvg: return to_feature(embed_doc_avg(doc, table_));
        case VectorizationKind::kFasttextCbow:
        case VectorizationKind::kFasttextSg: return to_feature(embed_doc_fasttext(doc, table_));
    }
    throw ValidationError("unknown vectorization kind");
}

FeatureVector vectorize(const TokenizedDoc& doc, const FittedVectorizer& fitted) {
    return fitted.transform(doc);
}

void FittedVectorizer::save(BinaryWriter& w) const {
    w.str(to_string(kind_));
    w.u8(fitted_ ? 1 : 0);
    if (!fitted_) return;
    if (is_embedding_kind(kind_)) {
        table_.save(w);
    } else {
        vocab_.save(w);
    }
}

FittedVectorizer FittedVectorizer::load(BinaryReader& r) {
    FittedVectorizer fv;
    std::string name = r.str();
    auto kind = vectorization_from_string(name);
    if (!kind) throw DataError("archive names unknown vectorization kind '" + name + "'");
    fv.kind_ = *kind;
    if (!r.u8()) return fv;
    if (is_embedding_kind(fv.kind_)) {
        fv.table_ = EmbeddingTable::load(r);
    } else {
        fv.vocab_ = Vocabulary::load(r);
    }
    fv.fitted_ = true;
    return fv;
}

}  // namespace prodcat
