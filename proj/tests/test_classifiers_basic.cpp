#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "prodcat/binary_io.hpp"
#include "prodcat/knn.hpp"
#include "prodcat/linear.hpp"
#include "prodcat/naive_bayes.hpp"
#include "prodcat/rng.hpp"

using namespace prodcat;

namespace {

FeatureVector fv(const DenseVector& values) { return to_feature(values); }

TrainingSet make_ts(const std::vector<DenseVector>& rows, const std::vector<int>& labels,
                    int n_classes) {
    TrainingSet ts;
    ts.dim = rows.empty() ? 0 : rows[0].size();
    for (const auto& r : rows) ts.features.push_back(fv(r));
    ts.labels = labels;
    ts.n_classes = n_classes;
    return ts;
}

// integer-valued random features keep distance arithmetic exact
TrainingSet random_int_ts(Rng& rng, std::size_t n, std::size_t dim, int n_classes) {
    std::vector<DenseVector> rows(n, DenseVector(dim));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : rows[i]) v = static_cast<double>(rng.below(9));
        labels[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));
    }
    // make sure every class appears
    for (int c = 0; c < n_classes; ++c) labels[static_cast<std::size_t>(c)] = c;
    return make_ts(rows, labels, n_classes);
}

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

}  // namespace

TEST_CASE("logreg separates a 1-D two-class set") {
    auto ts = make_ts({{-1.0}, {1.0}, {-0.8}, {0.9}}, {0, 1, 0, 1}, 2);
    auto model = train_logistic_regression(ts, {});
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        CHECK(model->predict(ts.features[i]) == ts.labels[i]);
    }
}

TEST_CASE("logreg gradient matches finite differences") {
    Rng rng(100);
    auto ts = random_int_ts(rng, 12, 4, 3);
    for (int draw = 0; draw < 10; ++draw) {
        std::vector<double> weights(3 * 4);
        std::vector<double> bias(3);
        for (auto& w : weights) w = rng.uniform(-1.0, 1.0);
        for (auto& b : bias) b = rng.uniform(-1.0, 1.0);
        double l2 = draw % 2 ? 0.1 : 0.0;

        std::vector<double> grad_w, grad_b;
        logreg_loss_grad(ts, weights, bias, l2, grad_w, grad_b);

        std::vector<double> dump_w, dump_b;
        auto loss_w = [&]() { return logreg_loss_grad(ts, weights, bias, l2, dump_w, dump_b); };
        auto num_w = finite_diff(weights, loss_w);
        auto num_b = finite_diff(bias, loss_w);
        for (std::size_t i = 0; i < grad_w.size(); ++i) {
            double scale = std::max({std::abs(grad_w[i]), std::abs(num_w[i]), 1e-8});
            CHECK(std::abs(grad_w[i] - num_w[i]) / scale < 1e-5);
        }
        for (std::size_t i = 0; i < grad_b.size(); ++i) {
            double scale = std::max({std::abs(grad_b[i]), std::abs(num_b[i]), 1e-8});
            CHECK(std::abs(grad_b[i] - num_b[i]) / scale < 1e-5);
        }
    }
}

TEST_CASE("logreg with huge l2 predicts the majority class") {
    auto ts = make_ts({{-1.0}, {1.0}, {2.0}, {-2.0}, {1.5}}, {0, 1, 1, 0, 1}, 2);
    LogRegParams params;
    params.l2 = 1e4;  // keep learning_rate * l2 < 2 so descent stays stable
    params.epochs = 500;
    params.learning_rate = 1e-5;
    auto model = train_logistic_regression(ts, params);
    auto* lr = dynamic_cast<LogisticRegressionModel*>(model.get());
    REQUIRE(lr != nullptr);
    for (double w : lr->weights) CHECK(std::abs(w) < 1e-3);
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        CHECK(model->predict(fv({x})) == 1);  // class 1 is the majority
    }
}

TEST_CASE("logreg zero weights predict class 0") {
    LogisticRegressionModel model;
    model.set_shape(3, 4);
    model.weights.assign(12, 0.0);
    model.bias.assign(4, 0.0);
    CHECK(model.predict(fv({1.0, -2.0, 0.5})) == 0);
}

TEST_CASE("logreg diverging learning rate raises a numeric error") {
    auto ts = make_ts({{1000.0}, {-1000.0}}, {0, 1}, 2);
    LogRegParams params;
    params.learning_rate = 1e12;
    params.epochs = 50;
    CHECK_THROWS_AS(train_logistic_regression(ts, params), NumericError);
}

TEST_CASE("logreg records final training loss and serializes") {
    Rng rng(7);
    auto ts = random_int_ts(rng, 20, 5, 3);
    auto model = train_logistic_regression(ts, {});
    auto* lr = dynamic_cast<LogisticRegressionModel*>(model.get());
    CHECK(lr->final_loss > 0.0);
    CHECK(std::isfinite(lr->final_loss));

    std::stringstream buf;
    BinaryWriter w(buf);
    model->save(w);
    BinaryReader r(buf);
    auto loaded = Model::load(r);
    for (int i = 0; i < 100; ++i) {
        DenseVector x(5);
        for (auto& v : x) v = rng.uniform(-3.0, 3.0);
        CHECK(model->predict(fv(x)) == loaded->predict(fv(x)));
    }
}

TEST_CASE("naive bayes worked example") {
    // class 0 doc: (2,0); class 1 doc: (0,2); alpha = 1
    auto ts = make_ts({{2.0, 0.0}, {0.0, 2.0}}, {0, 1}, 2);
    auto model = train_multinomial_nb(ts, {1.0});
    auto* nb = dynamic_cast<NaiveBayesModel*>(model.get());
    REQUIRE(nb != nullptr);
    // theta_{0,0} = (2+1)/(2+2) = 3/4
    CHECK(nb->log_likelihood[0] == doctest::Approx(std::log(0.75)).epsilon(1e-12));
    CHECK(nb->log_likelihood[1] == doctest::Approx(std::log(0.25)).epsilon(1e-12));
    CHECK(model->predict(fv({1.0, 0.0})) == 0);
    CHECK(model->predict(fv({0.0, 1.0})) == 1);
}

TEST_CASE("naive bayes single-class training set predicts that class") {
    auto ts = make_ts({{1.0, 0.0}, {0.0, 1.0}}, {0, 0}, 1);
    auto model = train_multinomial_nb(ts, {1.0});
    CHECK(model->predict(fv({5.0, 2.0})) == 0);
    CHECK(model->predict(fv({0.0, 0.0})) == 0);
}

TEST_CASE("naive bayes rejects negative features naming the feature") {
    auto ts = make_ts({{1.0, -0.5}, {0.0, 1.0}}, {0, 1}, 2);
    CHECK_THROWS_WITH_AS(train_multinomial_nb(ts, {1.0}), doctest::Contains("feature 1"),
                         ValidationError);
}

TEST_CASE("knn k=1 memorizes distinct training points") {
    Rng rng(55);
    auto ts = random_int_ts(rng, 30, 6, 3);
    // de-duplicate rows to guarantee distinctness
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        ts.features[i].entries.clear();
        ts.features[i].dim = 6;
        ts.features[i].push(0, static_cast<double>(i + 1));
        ts.features[i].push(1, static_cast<double>(rng.below(5)));
    }
    auto model = train_knn(ts, {1, KnnMetric::kEuclidean});
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        CHECK(model->predict(ts.features[i]) == ts.labels[i]);
    }
}

namespace {

// All-pairs scan oracle with the same published tie rules.
int knn_oracle(const TrainingSet& ts, const FeatureVector& x, int k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        const auto a = to_dense(x);
        const auto b = to_dense(ts.features[i]);
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
        d.emplace_back(std::sqrt(s), i);
    }
    std::sort(d.begin(), d.end());
    std::vector<int> votes(static_cast<std::size_t>(ts.n_classes), 0);
    std::vector<double> sums(static_cast<std::size_t>(ts.n_classes), 0.0);
    for (int i = 0; i < k; ++i) {
        int c = ts.labels[d[static_cast<std::size_t>(i)].second];
        ++votes[static_cast<std::size_t>(c)];
        sums[static_cast<std::size_t>(c)] += d[static_cast<std::size_t>(i)].first;
    }
    int best = -1;
    for (int c = 0; c < ts.n_classes; ++c) {
        if (votes[static_cast<std::size_t>(c)] == 0) continue;
        if (best < 0 || votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)] ||
            (votes[static_cast<std::size_t>(c)] == votes[static_cast<std::size_t>(best)] &&
             sums[static_cast<std::size_t>(c)] < sums[static_cast<std::size_t>(best)])) {
            best = c;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("knn matches the brute-force scan oracle on 200 random points") {
    Rng rng(1234);
    auto ts = random_int_ts(rng, 200, 5, 4);
    for (int k : {1, 3, 7}) {
        auto model = train_knn(ts, {k, KnnMetric::kEuclidean});
        for (int q = 0; q < 100; ++q) {
            DenseVector x(5);
            for (auto& v : x) v = static_cast<double>(rng.below(9));
            CHECK(model->predict(fv(x)) == knn_oracle(ts, fv(x), k));
        }
    }
}

TEST_CASE("knn with k = n returns the dominant class") {
    auto ts = make_ts({{0.0}, {1.0}, {2.0}, {10.0}, {11.0}}, {1, 1, 1, 0, 0}, 2);
    auto model = train_knn(ts, {5, KnnMetric::kEuclidean});
    CHECK(model->predict(fv({100.0})) == 1);
}

TEST_CASE("knn k larger than training size is an error") {
    auto ts = make_ts({{0.0}, {1.0}}, {0, 1}, 2);
    CHECK_THROWS_AS(train_knn(ts, {3, KnnMetric::kEuclidean}), ValidationError);
}

TEST_CASE("knn cosine metric handles zero vectors") {
    auto ts = make_ts({{1.0, 0.0}, {0.0, 1.0}}, {0, 1}, 2);
    auto model = train_knn(ts, {1, KnnMetric::kCosine});
    FeatureVector zero;
    zero.dim = 2;
    CHECK(model->predict(zero) == 0);  // all distances 1, index tie -> first point
    CHECK(model->predict(fv({0.9, 0.1})) == 0);
    CHECK(model->predict(fv({0.1, 0.9})) == 1);
}

TEST_CASE("predict rejects dimension mismatches") {
    auto ts = make_ts({{1.0, 0.0}, {0.0, 1.0}}, {0, 1}, 2);
    auto model = train_knn(ts, {1, KnnMetric::kEuclidean});
    CHECK_THROWS_AS(model->predict(fv({1.0, 2.0, 3.0})), ValidationError);
}

TEST_CASE("knn serialization round trip preserves predictions") {
    Rng rng(9);
    auto ts = random_int_ts(rng, 50, 4, 3);
    auto model = train_knn(ts, {3, KnnMetric::kEuclidean});
    std::stringstream buf;
    BinaryWriter w(buf);
    model->save(w);
    BinaryReader r(buf);
    auto loaded = Model::load(r);
    CHECK(loaded->algorithm() == "knn");
    for (int i = 0; i < 200; ++i) {
        DenseVector x(4);
        for (auto& v : x) v = static_cast<double>(rng.below(9));
        CHECK(model->predict(fv(x)) == loaded->predict(fv(x)));
    }
}
