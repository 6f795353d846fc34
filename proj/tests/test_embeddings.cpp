#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "prodcat/binary_io.hpp"
#include "prodcat/embeddings.hpp"
#include "prodcat/rng.hpp"
#include "prodcat/vectorizer.hpp"

using namespace prodcat;

namespace {

TokenizedDoc doc(std::vector<std::string> tokens) { return {std::move(tokens), 0}; }

double cosine(const DenseVector& a, const DenseVector& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double norm(const DenseVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Central finite differences over a parameter vector.
template <typename LossFn>
std::vector<double> finite_diff(std::vector<double>& params, LossFn&& loss, double h = 1e-6) {
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        double saved = params[i];
        params[i] = saved + h;
        double up = loss();
        params[i] = saved - h;
        double down = loss();
        params[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double rel_tol) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        double scale = std::max({std::abs(got[i]), std::abs(want[i]), 1e-8});
        CHECK(std::abs(got[i] - want[i]) / scale < rel_tol);
    }
}

}  // namespace

TEST_CASE("char_ngrams of <ab> with n 2..3") {
    auto grams = char_ngrams("ab", 2, 3);
    std::set<std::string> got(grams.begin(), grams.end());
    std::set<std::string> want = {"<a", "ab", "b>", "<ab", "ab>"};
    CHECK(got == want);
}

TEST_CASE("char_ngrams treats multibyte codepoints as single units") {
    auto grams = char_ngrams("și", 2, 2);  // wrapped: < ș i >
    std::set<std::string> got(grams.begin(), grams.end());
    std::set<std::string> want = {"<ș", "și", "i>"};
    CHECK(got == want);
}

TEST_CASE("softmax pair loss at zero weights is ln V") {
    const std::size_t vocab = 17;
    const int dim = 5;
    std::vector<double> weights(vocab * dim, 0.0);
    std::vector<double> hidden(dim, 0.3);
    std::vector<double> coef(vocab), grad_h(dim);
    double loss = softmax_pair_loss_grad(weights.data(), vocab, dim, hidden.data(), 3, coef.data(),
                                         grad_h.data());
    CHECK(loss == doctest::Approx(std::log(static_cast<double>(vocab))).epsilon(1e-12));
}

TEST_CASE("word2vec softmax pair gradient matches finite differences") {
    Rng rng(31);
    const std::size_t vocab = 7;
    const int dim = 4;
    for (int draw = 0; draw < 10; ++draw) {
        std::vector<double> weights(vocab * dim);
        std::vector<double> hidden(dim);
        for (auto& x : weights) x = rng.uniform(-1.0, 1.0);
        for (auto& x : hidden) x = rng.uniform(-1.0, 1.0);
        int target = static_cast<int>(rng.below(vocab));

        std::vector<double> coef(vocab), grad_h(dim);
        softmax_pair_loss_grad(weights.data(), vocab, dim, hidden.data(), target, coef.data(),
                               grad_h.data());
        // analytic gradient w.r.t. weights row r is coef[r] * hidden
        std::vector<double> analytic;
        for (std::size_t r = 0; r < vocab; ++r) {
            for (int d = 0; d < dim; ++d) analytic.push_back(coef[r] * hidden[static_cast<std::size_t>(d)]);
        }
        for (double g : grad_h) analytic.push_back(g);

        std::vector<double> dump_coef(vocab), dump_grad(dim);
        auto loss_at = [&]() {
            return softmax_pair_loss_grad(weights.data(), vocab, dim, hidden.data(), target,
                                          dump_coef.data(), dump_grad.data());
        };
        std::vector<double> numeric;
        auto gw = finite_diff(weights, loss_at);
        auto gh = finite_diff(hidden, loss_at);
        numeric.insert(numeric.end(), gw.begin(), gw.end());
        numeric.insert(numeric.end(), gh.begin(), gh.end());
        check_close(analytic, numeric, 1e-5);
    }
}

TEST_CASE("skip-gram with no pairs leaves vectors at initialization") {
    std::vector<TokenizedDoc> docs = {doc({"a"}), doc({"b"}), doc({"c"})};
    EmbeddingConfig cfg;
    cfg.mode = EmbeddingMode::kSkipGram;
    cfg.dim = 8;
    cfg.window = 4;
    cfg.seed = 5;
    cfg.epochs = 1;
    auto one = train_word2vec(docs, cfg);
    cfg.epochs = 5;
    auto five = train_word2vec(docs, cfg);
    CHECK(one.raw_vectors() == five.raw_vectors());
    for (double l : one.epoch_losses) CHECK(l == 0.0);
}

TEST_CASE("word2vec training is deterministic per seed") {
    std::vector<TokenizedDoc> docs = {doc({"lapte", "zuzu", "1l"}), doc({"lapte", "fulga", "1l"}),
                                      doc({"iaurt", "zuzu", "mare"}), doc({"iaurt", "fulga"})};
    EmbeddingConfig cfg;
    cfg.mode = EmbeddingMode::kCbow;
    cfg.dim = 10;
    cfg.epochs = 3;
    cfg.seed = 42;
    auto a = train_word2vec(docs, cfg);
    auto b = train_word2vec(docs, cfg);
    CHECK(a.raw_vectors() == b.raw_vectors());
    CHECK(a.epoch_losses == b.epoch_losses);
    cfg.seed = 43;
    auto c = train_word2vec(docs, cfg);
    CHECK(a.raw_vectors() != c.raw_vectors());
}

TEST_CASE("word2vec epoch losses are finite and recorded per epoch") {
    std::vector<TokenizedDoc> docs = {doc({"a", "b", "c"}), doc({"a", "c"}), doc({"b", "c", "a"})};
    for (int negative : {0, 3}) {
        EmbeddingConfig cfg;
        cfg.mode = EmbeddingMode::kSkipGram;
        cfg.dim = 6;
        cfg.epochs = 4;
        cfg.negative = negative;
        cfg.seed = 9;
        auto table = train_word2vec(docs, cfg);
        REQUIRE(table.epoch_losses.size() == 4);
        for (double l : table.epoch_losses) CHECK(std::isfinite(l));
    }
}

TEST_CASE("words with identical contexts get similar skip-gram vectors") {
    // u and v appear in exactly the same contexts, built from rotating frames.
    std::vector<TokenizedDoc> docs;
    for (int i = 0; i < 12; ++i) {
        std::string left = "l" + std::to_string(i);
        std::string right = "r" + std::to_string(i);
        for (int rep = 0; rep < 3; ++rep) {
            docs.push_back(doc({left, "u", right}));
            docs.push_back(doc({left, "v", right}));
        }
    }
    EmbeddingConfig cfg;
    cfg.mode = EmbeddingMode::kSkipGram;
    cfg.dim = 16;
    cfg.window = 2;
    cfg.epochs = 40;
    cfg.learning_rate = 0.1;
    cfg.seed = 7;
    auto table = train_word2vec(docs, cfg);
    DenseVector u, v;
    REQUIRE(table.lookup("u", u));
    REQUIRE(table.lookup("v", v));
    CHECK(cosine(u, v) > 0.9);
}

TEST_CASE("word2vec all-words-filtered is an error") {
    std::vector<TokenizedDoc> docs = {doc({"a"}), doc({"b"})};
    EmbeddingConfig cfg;
    cfg.min_count = 5;
    CHECK_THROWS_AS(train_word2vec(docs, cfg), ValidationError);
}

TEST_CASE("fasttext identical n-gram sets give identical subword contribution") {
    std::vector<TokenizedDoc> docs = {doc({"lapte", "dulce"}), doc({"lapte", "batut"})};
    EmbeddingConfig cfg;
    cfg.dim = 12;
    cfg.epochs = 2;
    cfg.seed = 3;
    SubwordConfig sub;
    sub.buckets = 1024;
    auto table = train_fasttext(docs, cfg, sub);

    DenseVector in_vocab, again;
    REQUIRE(table.lookup("lapte", in_vocab));
    REQUIRE(table.lookup("lapte", again));
    CHECK(in_vocab == again);

    // OOV word: composed purely from its buckets, finite, dim-length.
    DenseVector oov;
    CHECK(table.lookup("xyzqw", oov));
    REQUIRE(oov.size() == 12);
    for (double x : oov) CHECK(std::isfinite(x));
}

TEST_CASE("fasttext lookup is total over random strings") {
    std::vector<TokenizedDoc> docs = {doc({"ab", "cd"}), doc({"ab", "ef"})};
    EmbeddingConfig cfg;
    cfg.dim = 6;
    cfg.epochs = 1;
    SubwordConfig sub;
    sub.buckets = 64;
    auto table = train_fasttext(docs, cfg, sub);
    Rng rng(1);
    DenseVector out;
    for (int i = 0; i < 1000; ++i) {
        std::string s;
        std::size_t len = rng.below(12);
        for (std::size_t j = 0; j < len; ++j) s.push_back(static_cast<char>('a' + rng.below(26)));
        CHECK(table.lookup(s, out));
        REQUIRE(out.size() == 6);
        for (double x : out) CHECK(std::isfinite(x));
    }
}

TEST_CASE("fasttext training is deterministic per seed") {
    std::vector<TokenizedDoc> docs = {doc({"rosii", "cherry"}), doc({"rosii", "vrac"})};
    EmbeddingConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 3;
    cfg.seed = 11;
    SubwordConfig sub;
    sub.buckets = 256;
    auto a = train_fasttext(docs, cfg, sub);
    auto b = train_fasttext(docs, cfg, sub);
    CHECK(a.raw_vectors() == b.raw_vectors());
    CHECK(a.raw_buckets() == b.raw_buckets());
}

TEST_CASE("co-occurrence window and distance weighting") {
    auto cooc1 = build_cooccurrence({doc({"a", "b"})}, 4);
    CHECK(cooc1.at(cooc1.word_index.at("a"), cooc1.word_index.at("b")) == 1.0);
    CHECK(cooc1.at(cooc1.word_index.at("b"), cooc1.word_index.at("a")) == 1.0);

    auto cooc2 = build_cooccurrence({doc({"a", "b", "c"})}, 1);
    CHECK(cooc2.at(cooc2.word_index.at("a"), cooc2.word_index.at("c")) == 0.0);

    auto cooc3 = build_cooccurrence({doc({"a", "b", "c"})}, 4);
    CHECK(cooc3.at(cooc3.word_index.at("a"), cooc3.word_index.at("c")) == 0.5);
}

TEST_CASE("glove weighting function shape") {
    CHECK(glove_weight(100.0, 100.0, 0.75) == 1.0);
    CHECK(glove_weight(250.0, 100.0, 0.75) == 1.0);
    double prev = 0.0;
    for (double x = 1.0; x < 100.0; x += 7.0) {
        double fx = glove_weight(x, 100.0, 0.75);
        CHECK(fx > prev);
        CHECK(fx <= 1.0);
        prev = fx;
    }
}

TEST_CASE("glove single pair converges to zero objective") {
    CooccurrenceCounts cooc;
    cooc.words = {"a", "b"};
    cooc.word_index = {{"a", 0}, {"b", 1}};
    cooc.add(0, 1, 1.0);
    GloveConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 1500;
    cfg.learning_rate = 0.1;
    cfg.seed = 13;
    auto table = train_glove(cooc, cfg);
    REQUIRE(table.epoch_losses.size() == 1500);
    CHECK(table.epoch_losses.back() < 1e-6);
}

TEST_CASE("glove pair gradient matches finite differences") {
    Rng rng(17);
    const int dim = 5;
    for (int draw = 0; draw < 10; ++draw) {
        std::vector<double> params(2 * dim + 2);
        for (auto& x : params) x = rng.uniform(-0.8, 0.8);
        double x_count = 0.5 + rng.uniform() * 20.0;

        double* wi = params.data();
        double* wj = params.data() + dim;
        std::vector<double> gwi(dim), gwj(dim);
        double gbi, gbj;
        glove_pair_grad(wi, wj, params[2 * dim], params[2 * dim + 1], x_count, dim, 100.0, 0.75,
                        gwi.data(), gwj.data(), &gbi, &gbj);
        std::vector<double> analytic;
        analytic.insert(analytic.end(), gwi.begin(), gwi.end());
        analytic.insert(analytic.end(), gwj.begin(), gwj.end());
        analytic.push_back(gbi);
        analytic.push_back(gbj);

        auto loss_at = [&]() {
            return glove_pair_loss(params.data(), params.data() + dim, params[2 * dim],
                                   params[2 * dim + 1], x_count, dim, 100.0, 0.75);
        };
        auto numeric = finite_diff(params, loss_at);
        check_close(analytic, numeric, 1e-5);
    }
}

TEST_CASE("glove objective non-increasing with a small fixed step") {
    // <= 10 distinct pairs
    std::vector<TokenizedDoc> docs = {doc({"a", "b", "c"}), doc({"b", "c", "d"}), doc({"a", "d"})};
    auto cooc = build_cooccurrence(docs, 2);
    GloveConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 100;
    cfg.learning_rate = 0.005;
    cfg.adaptive = false;
    cfg.seed = 21;
    auto table = train_glove(cooc, cfg);
    REQUIRE(table.epoch_losses.size() == 100);
    for (std::size_t e = 1; e < table.epoch_losses.size(); ++e) {
        CHECK(table.epoch_losses[e] <= table.epoch_losses[e - 1] + 1e-12);
    }
}

TEST_CASE("aggregation rules") {
    // Hand-built table: a -> (1,2), b -> (3,-2), z -> (0,0)
    EmbeddingTable table;
    table.init(2, {"a", "b", "z"});
    table.raw_vectors() = {1.0, 2.0, 3.0, -2.0, 0.0, 0.0};

    auto sum_aa = embed_doc_sum(doc({"a", "a"}), table);
    CHECK(sum_aa == DenseVector{2.0, 4.0});

    auto sum_oov = embed_doc_sum(doc({"q", "w"}), table);
    CHECK(sum_oov == DenseVector{0.0, 0.0});

    auto ab = embed_doc_sum(doc({"a", "b"}), table);
    auto ba = embed_doc_sum(doc({"b", "a"}), table);
    CHECK(ab == ba);
    CHECK(ab == DenseVector{4.0, 0.0});

    CHECK(embed_doc_avg(doc({"a"}), table) == DenseVector{1.0, 2.0});
    auto aab = embed_doc_avg(doc({"a", "a", "b"}), table);
    CHECK(aab[0] == doctest::Approx(5.0 / 3.0));
    CHECK(aab[1] == doctest::Approx(2.0 / 3.0));

    // avg of opposite vectors cancels
    EmbeddingTable opp;
    opp.init(2, {"a", "b"});
    opp.raw_vectors() = {1.0, 2.0, -1.0, -2.0};
    CHECK(embed_doc_avg(doc({"a", "b"}), opp) == DenseVector{0.0, 0.0});
}

TEST_CASE("fasttext aggregation normalizes and excludes zero-norm words") {
    EmbeddingTable table;
    table.init(2, {"a", "z"});
    table.raw_vectors() = {3.0, 4.0, 0.0, 0.0};
    SubwordConfig sub;
    sub.buckets = 8;
    table.init_subwords(sub);  // buckets stay zero: OOV words compose to zero

    auto one = embed_doc_fasttext(doc({"a"}), table);
    CHECK(one[0] == doctest::Approx(0.6));
    CHECK(one[1] == doctest::Approx(0.8));

    // z has a zero vector and zero buckets: excluded
    auto with_zero = embed_doc_fasttext(doc({"a", "z"}), table);
    CHECK(with_zero[0] == doctest::Approx(0.6));
    CHECK(with_zero[1] == doctest::Approx(0.8));

    auto none = embed_doc_fasttext(doc({"z"}), table);
    CHECK(none == DenseVector{0.0, 0.0});
}

TEST_CASE("fasttext aggregation norm is at most one") {
    std::vector<TokenizedDoc> docs = {doc({"rosii", "cherry", "bio"}), doc({"rosii", "vrac"}),
                                      doc({"cherry", "bio"})};
    EmbeddingConfig cfg;
    cfg.dim = 6;
    cfg.epochs = 2;
    cfg.seed = 2;
    SubwordConfig sub;
    sub.buckets = 128;
    auto table = train_fasttext(docs, cfg, sub);
    for (const auto& d : docs) {
        CHECK(norm(embed_doc_fasttext(d, table)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("permutation invariance and concatenation additivity of sum") {
    std::vector<TokenizedDoc> docs = {doc({"a", "b", "c", "d"})};
    EmbeddingConfig cfg;
    cfg.dim = 5;
    cfg.epochs = 2;
    cfg.seed = 4;
    auto table = train_word2vec(docs, cfg);
    auto v1 = embed_doc_sum(doc({"a", "b", "c"}), table);
    auto v2 = embed_doc_sum(doc({"c", "a", "b"}), table);
    for (std::size_t i = 0; i < v1.size(); ++i) {
        CHECK(v1[i] == doctest::Approx(v2[i]).epsilon(1e-12));
    }
    auto left = embed_doc_sum(doc({"a", "b"}), table);
    auto right = embed_doc_sum(doc({"c", "d"}), table);
    auto both = embed_doc_sum(doc({"a", "b", "c", "d"}), table);
    for (std::size_t i = 0; i < both.size(); ++i) {
        CHECK(both[i] == doctest::Approx(left[i] + right[i]).epsilon(1e-12));
    }
}

TEST_CASE("vectorize dispatch identities and dimensions") {
    std::vector<TokenizedDoc> docs = {doc({"lapte", "zuzu"}), doc({"rosii", "cherry"}),
                                      doc({"lapte", "alpin"}), doc({"rosii", "bio"})};
    VectorizationConfig cfg;
    cfg.kind = VectorizationKind::kTfidf;
    cfg.max_features = 3000;
    cfg.max_ngram = 3;
    auto tfidf = FittedVectorizer::fit(docs, cfg);
    CHECK(tfidf.transform(docs[0]) == tfidf_vectorize(docs[0], tfidf.vocabulary()));

    VectorizationConfig gcfg;
    gcfg.kind = VectorizationKind::kGloveSum;
    gcfg.embedding.dim = 7;
    gcfg.glove.epochs = 3;
    auto glove = FittedVectorizer::fit(docs, gcfg);
    auto direct = to_feature(embed_doc_sum(docs[0], glove.table()));
    CHECK(glove.transform(docs[0]) == direct);

    // all nine kinds on one corpus: sparse kinds capped at 3000, dense at dim
    for (VectorizationKind kind : kAllVectorizations) {
        VectorizationConfig c;
        c.kind = kind;
        c.max_features = 3000;
        c.embedding.dim = 50;
        c.embedding.epochs = 1;
        c.subword.buckets = 512;
        c.glove.epochs = 1;
        auto fitted = FittedVectorizer::fit(docs, c);
        if (is_embedding_kind(kind)) {
            CHECK(fitted.dim() == 50);
        } else {
            CHECK(fitted.dim() <= 3000);
        }
        auto fv = fitted.transform(docs[1]);
        CHECK(fv.dim == fitted.dim());
    }
}

TEST_CASE("unfitted vectorizer raises an error naming the kind") {
    FittedVectorizer empty;
    CHECK_THROWS_WITH_AS(empty.transform(doc({"a"})), doctest::Contains("tfidf"),
                         ValidationError);
}

TEST_CASE("embedding table serialization round trip") {
    std::vector<TokenizedDoc> docs = {doc({"ab", "cd", "ef"}), doc({"ab", "ef"})};
    EmbeddingConfig cfg;
    cfg.dim = 9;
    cfg.epochs = 2;
    cfg.seed = 8;
    SubwordConfig sub;
    sub.buckets = 64;
    auto table = train_fasttext(docs, cfg, sub);

    std::stringstream buf;
    BinaryWriter w(buf);
    table.save(w);
    BinaryReader r(buf);
    auto loaded = EmbeddingTable::load(r);
    CHECK(loaded.raw_vectors() == table.raw_vectors());
    CHECK(loaded.raw_buckets() == table.raw_buckets());
    CHECK(loaded.words() == table.words());
    DenseVector a, b;
    loaded.lookup("unseen-word", a);
    table.lookup("unseen-word", b);
    CHECK(a == b);
}
