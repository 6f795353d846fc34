#include "prodcat/embeddings.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/binary_io.hpp"
#include "prodcat/rng.hpp"
#include "prodcat/utf8.hpp"

namespace prodcat {

namespace {

void validate_embedding_config(const EmbeddingConfig& c) {
    if (c.dim < 1) throw ValidationError("embedding dim must be >= 1");
    if (c.window < 1) throw ValidationError("embedding window must be >= 1");
    if (c.epochs < 1) throw ValidationError("embedding epochs must be >= 1");
    if (!(c.learning_rate > 0.0)) throw ValidationError("embedding learning_rate must be > 0");
    if (c.negative < 0) throw ValidationError("embedding negative count must be >= 0");
}

// Corpus as word-id streams, filtered by min_count. Word ids follow first
// occurrence order in the stream.
struct EmbCorpus {
    std::vector<std::string> words;
    std::unordered_map<std::string, int> index;
    std::vector<std::uint64_t> counts;
    std::vector<std::vector<int>> docs;
};

EmbCorpus build_emb_corpus(const std::vector<TokenizedDoc>& docs, int min_count) {
    std::unordered_map<std::string, std::uint64_t> freq;
    std::vector<const std::string*> first_seen;
    for (const auto& doc : docs) {
        for (const auto& tok : doc.tokens) {
            auto [it, inserted] = freq.emplace(tok, 0);
            if (inserted) first_seen.push_back(&it->first);
            ++it->second;
        }
    }
    EmbCorpus corpus;
    for (const std::string* w : first_seen) {
        if (freq[*w] >= static_cast<std::uint64_t>(min_count)) {
            corpus.index.emplace(*w, static_cast<int>(corpus.words.size()));
            corpus.words.push_back(*w);
            corpus.counts.push_back(freq[*w]);
        }
    }
    if (corpus.words.empty()) {
        throw ValidationError("embedding training: every word fell below min_count");
    }
    corpus.docs.reserve(docs.size());
    for (const auto& doc : docs) {
        std::vector<int> ids;
        for (const auto& tok : doc.tokens) {
            auto it = corpus.index.find(tok);
            if (it != corpus.index.end()) ids.push_back(it->second);
        }
        corpus.docs.push_back(std::move(ids));
    }
    return corpus;
}

// Unigram^0.75 noise distribution sampled by inverse CDF.
struct NoiseTable {
    std::vector<double> cumulative;

    explicit NoiseTable(const std::vector<std::uint64_t>& counts) {
        cumulative.reserve(counts.size());
        double total = 0.0;
        for (std::uint64_t c : counts) {
            total += std::pow(static_cast<double>(c), 0.75);
            cumulative.push_back(total);
        }
    }

    int sample(Rng& rng) const {
        double u = rng.uniform() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        return static_cast<int>(it - cumulative.begin());
    }
};

void init_uniform(std::vector<double>& v, int dim, Rng& rng) {
    const double half = 0.5 / dim;
    for (auto& x : v) x = rng.uniform(-half, half);
}

}  // namespace

double softmax_pair_loss_grad(const double* output_weights, std::size_t vocab, int dim,
                              const double* hidden, int target, double* coef,
                              double* grad_hidden) {
    double max_score = -HUGE_VAL;
    for (std::size_t r = 0; r < vocab; ++r) {
        const double* row = output_weights + r * static_cast<std::size_t>(dim);
        double u = 0.0;
        for (int d = 0; d < dim; ++d) u += row[d] * hidden[d];
        coef[r] = u;
        max_score = std::max(max_score, u);
    }
    double z = 0.0;
    for (std::size_t r = 0; r < vocab; ++r) {
        coef[r] = std::exp(coef[r] - max_score);
        z += coef[r];
    }
    const double target_prob = coef[static_cast<std::size_t>(target)] / z;
    double loss = -std::log(target_prob);
    std::fill(grad_hidden, grad_hidden + dim, 0.0);
    for (std::size_t r = 0; r < vocab; ++r) {
        double c = coef[r] / z - (static_cast<int>(r) == target ? 1.0 : 0.0);
        coef[r] = c;
        const double* row = output_weights + r * static_cast<std::size_t>(dim);
        for (int d = 0; d < dim; ++d) grad_hidden[d] += c * row[d];
    }
    return loss;
}

double negative_pair_loss_grad(const double* output_weights, int dim, const double* hidden,
                               int target, const int* negatives, int n_negatives, double* coef,
                               double* grad_hidden) {
    auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    std::fill(grad_hidden, grad_hidden + dim, 0.0);
    double loss = 0.0;
    for (int k = 0; k <= n_negatives; ++k) {
        int row_id = k == 0 ? target : negatives[k - 1];
        const double* row = output_weights + static_cast<std::size_t>(row_id) * dim;
        double u = 0.0;
        for (int d = 0; d < dim; ++d) u += row[d] * hidden[d];
        double s = sigmoid(u);
        if (k == 0) {
            loss -= std::log(std::max(s, 1e-300));
            coef[k] = s - 1.0;
        } else {
            loss -= std::log(std::max(1.0 - s, 1e-300));
            coef[k] = s;
        }
        for (int d = 0; d < dim; ++d) grad_hidden[d] += coef[k] * row[d];
    }
    return loss;
}

namespace {

// Shared word2vec/fasttext training loop. ComposeFn(word_id, out) builds the
// input representation; ApplyFn(word_id, grad, scale) distributes the input
// gradient. Output weights live over vocabulary words and start at zero.
template <typename ComposeFn, typename ApplyFn>
std::vector<double> run_sgns_training(const EmbCorpus& corpus, const EmbeddingConfig& config,
                                      Rng& rng, std::vector<double>& output_weights,
                                      ComposeFn&& compose, ApplyFn&& apply_input_grad) {
    const std::size_t vocab = corpus.words.size();
    const int dim = config.dim;
    const double lr = config.learning_rate;

    NoiseTable noise(corpus.counts);
    std::vector<double> hidden(static_cast<std::size_t>(dim));
    std::vector<double> word_buf(static_cast<std::size_t>(dim));
    std::vector<double> grad_hidden(static_cast<std::size_t>(dim));
    std::vector<double> coef(config.negative > 0 ? static_cast<std::size_t>(config.negative) + 1
                                                 : vocab);
    std::vector<int> negatives(static_cast<std::size_t>(std::max(config.negative, 1)));
    std::vector<double> epoch_losses;

    auto predict_and_update = [&](int target) {
        double loss;
        if (config.negative == 0) {
            loss = softmax_pair_loss_grad(output_weights.data(), vocab, dim, hidden.data(), target,
                                          coef.data(), grad_hidden.data());
            for (std::size_t r = 0; r < vocab; ++r) {
                double step = lr * coef[r];
                if (step == 0.0) continue;
                double* row = output_weights.data() + r * static_cast<std::size_t>(dim);
                for (int d = 0; d < dim; ++d) row[d] -= step * hidden[d];
            }
        } else {
            int n_drawn = 0;
            for (int k = 0; k < config.negative; ++k) {
                int neg = noise.sample(rng);
                if (neg == target) continue;  // skipped draw, fewer negatives this pair
                negatives[static_cast<std::size_t>(n_drawn++)] = neg;
            }
            loss = negative_pair_loss_grad(output_weights.data(), dim, hidden.data(), target,
                                           negatives.data(), n_drawn, coef.data(),
                                           grad_hidden.data());
            for (int k = 0; k <= n_drawn; ++k) {
                int row_id = k == 0 ? target : negatives[static_cast<std::size_t>(k - 1)];
                double* row = output_weights.data() + static_cast<std::size_t>(row_id) * dim;
                double step = lr * coef[static_cast<std::size_t>(k)];
                for (int d = 0; d < dim; ++d) row[d] -= step * hidden[d];
            }
        }
        return loss;
    };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t predictions = 0;
        for (const auto& doc : corpus.docs) {
            const int len = static_cast<int>(doc.size());
            for (int t = 0; t < len; ++t) {
                const int lo = std::max(0, t - config.window);
                const int hi = std::min(len - 1, t + config.window);
                if (config.mode == EmbeddingMode::kCbow) {
                    int m = hi - lo;  // context size, excluding the center itself
                    if (m <= 0) continue;
                    std::fill(hidden.begin(), hidden.end(), 0.0);
                    for (int c = lo; c <= hi; ++c) {
                        if (c == t) continue;
                        compose(doc[static_cast<std::size_t>(c)], word_buf.data());
                        for (int d = 0; d < dim; ++d) hidden[static_cast<std::size_t>(d)] += word_buf[static_cast<std::size_t>(d)];
                    }
                    for (auto& h : hidden) h /= m;
                    loss_sum += predict_and_update(doc[static_cast<std::size_t>(t)]);
                    ++predictions;
                    for (int c = lo; c <= hi; ++c) {
                        if (c == t) continue;
                        apply_input_grad(doc[static_cast<std::size_t>(c)], grad_hidden.data(),
                                         lr / m);
                    }
                } else {
                    for (int c = lo; c <= hi; ++c) {
                        if (c == t) continue;
                        compose(doc[static_cast<std::size_t>(t)], hidden.data());
                        loss_sum += predict_and_update(doc[static_cast<std::size_t>(c)]);
                        ++predictions;
                        apply_input_grad(doc[static_cast<std::size_t>(t)], grad_hidden.data(), lr);
                    }
                }
            }
        }
        double mean_loss = predictions ? loss_sum / static_cast<double>(predictions) : 0.0;
        if (!std::isfinite(mean_loss)) {
            throw NumericError("embedding training diverged; reduce the learning rate");
        }
        epoch_losses.push_back(mean_loss);
    }
    return epoch_losses;
}

}  // namespace

EmbeddingTable train_word2vec(const std::vector<TokenizedDoc>& docs,
                              const EmbeddingConfig& config) {
    validate_embedding_config(config);
    EmbCorpus corpus = build_emb_corpus(docs, config.min_count);

    EmbeddingTable table;
    table.init(config.dim, corpus.words);
    Rng rng(config.seed);
    init_uniform(table.raw_vectors(), config.dim, rng);
    std::vector<double> output_weights(corpus.words.size() * static_cast<std::size_t>(config.dim),
                                       0.0);

    std::vector<double>& input = table.raw_vectors();
    const int dim = config.dim;
    auto compose = [&](int word, double* out) {
        const double* v = input.data() + static_cast<std::size_t>(word) * dim;
        std::copy(v, v + dim, out);
    };
    auto apply = [&](int word, const double* grad, double scale) {
        double* v = input.data() + static_cast<std::size_t>(word) * dim;
        for (int d = 0; d < dim; ++d) v[d] -= scale * grad[d];
    };
    table.epoch_losses = run_sgns_training(corpus, config, rng, output_weights, compose, apply);
    return table;
}

EmbeddingTable train_fasttext(const std::vector<TokenizedDoc>& docs, const EmbeddingConfig& config,
                              const SubwordConfig& subword) {
    validate_embedding_config(config);
    if (subword.n_min > subword.n_max) throw ValidationError("subword n_min must be <= n_max");
    if (subword.n_min < 1) throw ValidationError("subword n_min must be >= 1");
    if (subword.buckets < 1) throw ValidationError("subword buckets must be >= 1");
    EmbCorpus corpus = build_emb_corpus(docs, config.min_count);

    EmbeddingTable table;
    table.init(config.dim, corpus.words);
    table.init_subwords(subword);
    Rng rng(config.seed);
    init_uniform(table.raw_vectors(), config.dim, rng);
    init_uniform(table.raw_buckets(), config.dim, rng);
    std::vector<double> output_weights(corpus.words.size() * static_cast<std::size_t>(config.dim),
                                       0.0);

    // Bucket ids per vocabulary word, fixed for the whole run.
    std::vector<std::vector<std::uint32_t>> grams(corpus.words.size());
    for (std::size_t w = 0; w < corpus.words.size(); ++w) {
        for (const auto& g : char_ngrams(corpus.words[w], subword.n_min, subword.n_max)) {
            grams[w].push_back(subword_bucket(g, subword.buckets));
        }
    }

    std::vector<double>& input = table.raw_vectors();
    std::vector<double>& buckets = table.raw_buckets();
    const int dim = config.dim;
    auto compose = [&](int word, double* out) {
        const double* v = input.data() + static_cast<std::size_t>(word) * dim;
        std::copy(v, v + dim, out);
        const auto& g = grams[static_cast<std::size_t>(word)];
        if (g.empty()) return;
        const double inv = 1.0 / static_cast<double>(g.size());
        for (std::uint32_t b : g) {
            const double* bv = buckets.data() + static_cast<std::size_t>(b) * dim;
            for (int d = 0; d < dim; ++d) out[d] += inv * bv[d];
        }
    };
    auto apply = [&](int word, const double* grad, double scale) {
        double* v = input.data() + static_cast<std::size_t>(word) * dim;
        for (int d = 0; d < dim; ++d) v[d] -= scale * grad[d];
        const auto& g = grams[static_cast<std::size_t>(word)];
        if (g.empty()) return;
        const double bucket_scale = scale / static_cast<double>(g.size());
        for (std::uint32_t b : g) {
            double* bv = buckets.data() + static_cast<std::size_t>(b) * dim;
            for (int d = 0; d < dim; ++d) bv[d] -= bucket_scale * grad[d];
        }
    };
    table.epoch_losses = run_sgns_training(corpus, config, rng, output_weights, compose, apply);
    return table;
}

void CooccurrenceCounts::add(int i, int j, double w) {
    counts[key(i, j)] += w;
    if (i != j) counts[key(j, i)] += w;
}

double CooccurrenceCounts::at(int i, int j) const {
    auto it = counts.find(key(i, j));
    return it == counts.end() ? 0.0 : it->second;
}

CooccurrenceCounts build_cooccurrence(const std::vector<TokenizedDoc>& docs, int window) {
    if (window < 1) throw ValidationError("co-occurrence window must be >= 1");
    CooccurrenceCounts cooc;
    for (const auto& doc : docs) {
        std::vector<int> ids;
        ids.reserve(doc.tokens.size());
        for (const auto& tok : doc.tokens) {
            auto it = cooc.word_index.find(tok);
            if (it == cooc.word_index.end()) {
                it = cooc.word_index.emplace(tok, static_cast<int>(cooc.words.size())).first;
                cooc.words.push_back(tok);
            }
            ids.push_back(it->second);
        }
        const int len = static_cast<int>(ids.size());
        for (int t = 0; t < len; ++t) {
            for (int k = 1; k <= window && t + k < len; ++k) {
                cooc.add(ids[static_cast<std::size_t>(t)], ids[static_cast<std::size_t>(t + k)],
                         1.0 / k);
            }
        }
    }
    return cooc;
}

double glove_weight(double x, double x_max, double alpha) {
    if (x >= x_max) return 1.0;
    return std::pow(x / x_max, alpha);
}

double glove_pair_loss(const double* wi, const double* wj, double bi, double bj, double x, int dim,
                       double x_max, double alpha) {
    double diff = bi + bj - std::log(x);
    for (int d = 0; d < dim; ++d) diff += wi[d] * wj[d];
    return glove_weight(x, x_max, alpha) * diff * diff;
}

double glove_pair_grad(const double* wi, const double* wj, double bi, double bj, double x, int dim,
                       double x_max, double alpha, double* grad_wi, double* grad_wj,
                       double* grad_bi, double* grad_bj) {
    double diff = bi + bj - std::log(x);
    for (int d = 0; d < dim; ++d) diff += wi[d] * wj[d];
    const double fx = glove_weight(x, x_max, alpha);
    const double c = 2.0 * fx * diff;
    for (int d = 0; d < dim; ++d) {
        grad_wi[d] = c * wj[d];
        grad_wj[d] = c * wi[d];
    }
    *grad_bi = c;
    *grad_bj = c;
    return fx * diff * diff;
}

EmbeddingTable train_glove(const CooccurrenceCounts& cooc, const GloveConfig& config) {
    if (config.dim < 1) throw ValidationError("glove dim must be >= 1");
    if (config.epochs < 1) throw ValidationError("glove epochs must be >= 1");
    if (!(config.learning_rate > 0.0)) throw ValidationError("glove learning_rate must be > 0");
    if (cooc.counts.empty()) throw ValidationError("glove: empty co-occurrence counts");

    const std::size_t vocab = cooc.words.size();
    const int dim = config.dim;

    struct Pair {
        int i, j;
        double x;
    };
    std::vector<Pair> pairs;
    pairs.reserve(cooc.counts.size());
    {
        std::vector<std::uint64_t> keys;
        keys.reserve(cooc.counts.size());
        for (const auto& [k, _] : cooc.counts) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        for (std::uint64_t k : keys) {
            pairs.push_back({static_cast<int>(k >> 32), static_cast<int>(k & 0xffffffffu),
                             cooc.counts.at(k)});
        }
    }

    Rng rng(config.seed);
    std::vector<double> w_main(vocab * static_cast<std::size_t>(dim));
    std::vector<double> w_ctx(vocab * static_cast<std::size_t>(dim));
    std::vector<double> b_main(vocab);
    std::vector<double> b_ctx(vocab);
    init_uniform(w_main, dim, rng);
    init_uniform(w_ctx, dim, rng);
    init_uniform(b_main, dim, rng);
    init_uniform(b_ctx, dim, rng);

    // AdaGrad accumulators start at 1 so the first steps equal the base rate.
    std::vector<double> acc_w_main, acc_w_ctx, acc_b_main, acc_b_ctx;
    if (config.adaptive) {
        acc_w_main.assign(w_main.size(), 1.0);
        acc_w_ctx.assign(w_ctx.size(), 1.0);
        acc_b_main.assign(vocab, 1.0);
        acc_b_ctx.assign(vocab, 1.0);
    }

    std::vector<double> grad_wi(static_cast<std::size_t>(dim));
    std::vector<double> grad_wj(static_cast<std::size_t>(dim));
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    EmbeddingTable table;
    table.init(dim, cooc.words);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx : order) {
            const auto& p = pairs[idx];
            double* wi = w_main.data() + static_cast<std::size_t>(p.i) * dim;
            double* wj = w_ctx.data() + static_cast<std::size_t>(p.j) * dim;
            double gbi, gbj;
            glove_pair_grad(wi, wj, b_main[static_cast<std::size_t>(p.i)],
                            b_ctx[static_cast<std::size_t>(p.j)], p.x, dim, config.x_max,
                            config.alpha, grad_wi.data(), grad_wj.data(), &gbi, &gbj);
            const double lr = config.learning_rate;
            if (config.adaptive) {
                double* awi = acc_w_main.data() + static_cast<std::size_t>(p.i) * dim;
                double* awj = acc_w_ctx.data() + static_cast<std::size_t>(p.j) * dim;
                for (int d = 0; d < dim; ++d) {
                    wi[d] -= lr * grad_wi[static_cast<std::size_t>(d)] / std::sqrt(awi[d]);
                    awi[d] += grad_wi[static_cast<std::size_t>(d)] * grad_wi[static_cast<std::size_t>(d)];
                    wj[d] -= lr * grad_wj[static_cast<std::size_t>(d)] / std::sqrt(awj[d]);
                    awj[d] += grad_wj[static_cast<std::size_t>(d)] * grad_wj[static_cast<std::size_t>(d)];
                }
                b_main[static_cast<std::size_t>(p.i)] -=
                    lr * gbi / std::sqrt(acc_b_main[static_cast<std::size_t>(p.i)]);
                acc_b_main[static_cast<std::size_t>(p.i)] += gbi * gbi;
                b_ctx[static_cast<std::size_t>(p.j)] -=
                    lr * gbj / std::sqrt(acc_b_ctx[static_cast<std::size_t>(p.j)]);
                acc_b_ctx[static_cast<std::size_t>(p.j)] += gbj * gbj;
            } else {
                for (int d = 0; d < dim; ++d) {
                    wi[d] -= lr * grad_wi[static_cast<std::size_t>(d)];
                    wj[d] -= lr * grad_wj[static_cast<std::size_t>(d)];
                }
                b_main[static_cast<std::size_t>(p.i)] -= lr * gbi;
                b_ctx[static_cast<std::size_t>(p.j)] -= lr * gbj;
            }
        }
        // Exact objective at the end of the epoch.
        double objective = 0.0;
        for (const auto& p : pairs) {
            objective += glove_pair_loss(w_main.data() + static_cast<std::size_t>(p.i) * dim,
                                         w_ctx.data() + static_cast<std::size_t>(p.j) * dim,
                                         b_main[static_cast<std::size_t>(p.i)],
                                         b_ctx[static_cast<std::size_t>(p.j)], p.x, dim,
                                         config.x_max, config.alpha);
        }
        if (!std::isfinite(objective)) {
            throw NumericError("glove training diverged; reduce the learning rate");
        }
        table.epoch_losses.push_back(objective);
    }

    auto& vectors = table.raw_vectors();
    for (std::size_t i = 0; i < vectors.size(); ++i) vectors[i] = w_main[i] + w_ctx[i];
    return table;
}

bool EmbeddingTable::lookup(const std::string& word, DenseVector& out) const {
    out.assign(static_cast<std::size_t>(dim_), 0.0);
    int id = word_id(word);
    if (!subwords_) {
        if (id < 0) return false;
        const double* v = word_vector(id);
        std::copy(v, v + dim_, out.begin());
        return true;
    }
    if (id >= 0) {
        const double* v = word_vector(id);
        std::copy(v, v + dim_, out.begin());
    }
    auto grams = char_ngrams(word, subword_config_.n_min, subword_config_.n_max);
    if (!grams.empty()) {
        const double inv = 1.0 / static_cast<double>(grams.size());
        for (const auto& g : grams) {
            const double* bv = bucket_vectors_.data() +
                               static_cast<std::size_t>(subword_bucket(g, subword_config_.buckets)) * dim_;
            for (int d = 0; d < dim_; ++d) out[static_cast<std::size_t>(d)] += inv * bv[d];
        }
    }
    return true;
}

void EmbeddingTable::init(int dim, std::vector<std::string> words) {
    dim_ = dim;
    words_ = std::move(words);
    index_.clear();
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<int>(i));
    vectors_.assign(words_.size() * static_cast<std::size_t>(dim), 0.0);
}

void EmbeddingTable::init_subwords(const SubwordConfig& sub) {
    subwords_ = true;
    subword_config_ = sub;
    bucket_vectors_.assign(static_cast<std::size_t>(sub.buckets) * static_cast<std::size_t>(dim_),
                           0.0);
}

void EmbeddingTable::save(BinaryWriter& w) const {
    w.i32(dim_);
    w.u64(words_.size());
    for (const auto& word : words_) w.str(word);
    w.f64_vec(vectors_);
    w.u8(subwords_ ? 1 : 0);
    if (subwords_) {
        w.i32(subword_config_.n_min);
        w.i32(subword_config_.n_max);
        w.u32(subword_config_.buckets);
        w.f64_vec(bucket_vectors_);
    }
    w.f64_vec(epoch_losses);
}

EmbeddingTable EmbeddingTable::load(BinaryReader& r) {
    EmbeddingTable t;
    int dim = r.i32();
    std::uint64_t n = r.u64();
    std::vector<std::string> words(n);
    for (auto& w : words) w = r.str();
    t.init(dim, std::move(words));
    t.vectors_ = r.f64_vec();
    if (r.u8()) {
        SubwordConfig sub;
        sub.n_min = r.i32();
        sub.n_max = r.i32();
        sub.buckets = r.u32();
        t.subwords_ = true;
        t.subword_config_ = sub;
        t.bucket_vectors_ = r.f64_vec();
    }
    t.epoch_losses = r.f64_vec();
    return t;
}

DenseVector embed_doc_sum(const TokenizedDoc& doc, const EmbeddingTable& table) {
    DenseVector sum(static_cast<std::size_t>(table.dim()), 0.0);
    DenseVector word(static_cast<std::size_t>(table.dim()));
    for (const auto& tok : doc.tokens) {
        if (!table.lookup(tok, word)) continue;
        for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += word[d];
    }
    return sum;
}

DenseVector embed_doc_avg(const TokenizedDoc& doc, const EmbeddingTable& table) {
    DenseVector sum(static_cast<std::size_t>(table.dim()), 0.0);
    DenseVector word(static_cast<std::size_t>(table.dim()));
    std::size_t contributing = 0;
    for (const auto& tok : doc.tokens) {
        if (!table.lookup(tok, word)) continue;
        ++contributing;
        for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += word[d];
    }
    if (contributing > 0) {
        for (auto& x : sum) x /= static_cast<double>(contributing);
    }
    return sum;
}

DenseVector embed_doc_fasttext(const TokenizedDoc& doc, const EmbeddingTable& table) {
    if (!table.has_subwords()) {
        throw ValidationError("normalized-average aggregation requires a subword table");
    }
    DenseVector sum(static_cast<std::size_t>(table.dim()), 0.0);
    DenseVector word(static_cast<std::size_t>(table.dim()));
    std::size_t contributing = 0;
    for (const auto& tok : doc.tokens) {
        table.lookup(tok, word);
        double norm = 0.0;
        for (double x : word) norm += x * x;
        norm = std::sqrt(norm);
        if (norm <= kZeroNormThreshold) continue;
        ++contributing;
        for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += word[d] / norm;
    }
    if (contributing > 0) {
        for (auto& x : sum) x /= static_cast<double>(contributing);
    }
    return sum;
}

std::vector<std::string> char_ngrams(const std::string& word, int n_min, int n_max) {
    std::string wrapped = "<" + word + ">";
    auto bounds = utf8_boundaries(wrapped);
    const int len = static_cast<int>(bounds.size()) - 1;  // codepoints
    std::vector<std::string> grams;
    for (int n = n_min; n <= n_max; ++n) {
        for (int s = 0; s + n <= len; ++s) {
            grams.push_back(wrapped.substr(bounds[static_cast<std::size_t>(s)],
                                           bounds[static_cast<std::size_t>(s + n)] -
                                               bounds[static_cast<std::size_t>(s)]));
        }
    }
    return grams;
}

std::uint32_t subword_bucket(const std::string& gram, std::uint32_t buckets) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : gram) {
        h ^= c;
        h *= 16777619u;
    }
    return h % buckets;
}

}  // namespace prodcat
