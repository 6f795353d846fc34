#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "prodcat/ann.hpp"
#include "prodcat/binary_io.hpp"
#include "prodcat/rng.hpp"
#include "prodcat/svm.hpp"

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

// binary blobs with a clear margin
TrainingSet separable_blobs(Rng& rng, int per_class, double gap) {
    std::vector<DenseVector> rows;
    std::vector<int> labels;
    for (int i = 0; i < per_class; ++i) {
        rows.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        labels.push_back(0);
        rows.push_back({gap + rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        labels.push_back(1);
    }
    return make_ts(rows, labels, 2);
}

// KKT conditions for the decision u(x) = sum alpha y K - b
void check_kkt(const std::vector<FeatureVector>& points, const std::vector<int>& y,
               const SmoResult& result, const SvmParams& params, double gamma) {
    double sum_ay = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sum_ay += result.alpha[i] * y[i];
        double u = -result.b;
        for (std::size_t j = 0; j < points.size(); ++j) {
            u += result.alpha[j] * y[j] *
                 kernel_eval(points[j], points[i], params.kernel, gamma, params.coef0);
        }
        double margin = y[i] * u;
        CHECK(result.alpha[i] >= -1e-12);
        CHECK(result.alpha[i] <= params.C + 1e-12);
        if (result.alpha[i] < 1e-9) {
            CHECK(margin >= 1.0 - params.tol);
        } else if (result.alpha[i] > params.C - 1e-9) {
            CHECK(margin <= 1.0 + params.tol);
        } else {
            CHECK(std::abs(margin - 1.0) <= params.tol);
        }
    }
    CHECK(std::abs(sum_ay) <= 1e-9);
}

}  // namespace

TEST_CASE("smo matches the hand-solved two-point dual") {
    // points -1 and +1 in 1-D, rbf gamma 1, large C:
    // alpha* = 1/(1 - exp(-4)), b = 0
    std::vector<FeatureVector> points = {fv({-1.0}), fv({1.0})};
    std::vector<int> y = {-1, +1};
    SvmParams params;
    params.C = 100.0;
    params.tol = 1e-6;
    auto result = smo_solve(points, y, params, /*gamma=*/1.0);
    REQUIRE(result.converged);
    double expected = 1.0 / (1.0 - std::exp(-4.0));
    CHECK(result.alpha[0] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(result.alpha[1] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(std::abs(result.b) < 1e-6);
}

TEST_CASE("smo satisfies KKT on random separable instances") {
    Rng rng(808);
    for (int round = 0; round < 20; ++round) {
        int per_class = 5 + static_cast<int>(rng.below(16));  // up to 40 points
        auto ts = separable_blobs(rng, per_class, 6.0);
        std::vector<int> y;
        for (int l : ts.labels) y.push_back(l == 0 ? +1 : -1);
        SvmParams params;
        params.C = 10.0;
        auto result = smo_solve(ts.features, y, params, /*gamma=*/1.0);
        REQUIRE(result.converged);
        check_kkt(ts.features, y, result, params, 1.0);

        // training accuracy 1.0
        auto model = train_svm(ts, params);
        int correct = 0;
        for (std::size_t i = 0; i < ts.features.size(); ++i) {
            correct += model->predict(ts.features[i]) == ts.labels[i];
        }
        CHECK(correct == static_cast<int>(ts.features.size()));
    }
}

TEST_CASE("svm radial kernel separates blobs exactly") {
    Rng rng(11);
    auto ts = separable_blobs(rng, 20, 5.0);
    SvmParams params;
    params.C = 10.0;
    auto model = train_svm(ts, params);
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        CHECK(model->predict(ts.features[i]) == ts.labels[i]);
    }
}

TEST_CASE("svm sigmoid kernel trains and votes deterministically") {
    Rng rng(23);
    auto ts = separable_blobs(rng, 15, 3.0);
    SvmParams params;
    params.kernel = SvmKernel::kSigmoid;
    params.gamma = 0.1;
    params.coef0 = 0.0;
    params.C = 5.0;
    auto model = train_svm(ts, params);
    auto again = train_svm(ts, params);
    int correct = 0;
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        CHECK(model->predict(ts.features[i]) == again->predict(ts.features[i]));
        correct += model->predict(ts.features[i]) == ts.labels[i];
    }
    CHECK(correct >= static_cast<int>(0.9 * static_cast<double>(ts.features.size())));
}

TEST_CASE("svm multiclass one-vs-one voting") {
    // three well-separated clusters
    Rng rng(3);
    std::vector<DenseVector> rows;
    std::vector<int> labels;
    for (int i = 0; i < 15; ++i) {
        rows.push_back({rng.uniform(-0.5, 0.5), 0.0});
        labels.push_back(0);
        rows.push_back({5.0 + rng.uniform(-0.5, 0.5), 0.0});
        labels.push_back(1);
        rows.push_back({2.5, 5.0 + rng.uniform(-0.5, 0.5)});
        labels.push_back(2);
    }
    auto ts = make_ts(rows, labels, 3);
    SvmParams params;
    params.C = 10.0;
    params.gamma = 1.0;
    auto model = train_svm(ts, params);
    auto* svm = dynamic_cast<SvmModel*>(model.get());
    CHECK(svm->machines.size() == 3);  // C(3,2)
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        CHECK(model->predict(ts.features[i]) == ts.labels[i]);
    }
}

TEST_CASE("svm serialization round trip") {
    Rng rng(31);
    auto ts = separable_blobs(rng, 12, 5.0);
    SvmParams params;
    auto model = train_svm(ts, params);
    std::stringstream buf;
    BinaryWriter w(buf);
    model->save(w);
    BinaryReader r(buf);
    auto loaded = Model::load(r);
    for (int i = 0; i < 200; ++i) {
        FeatureVector x = fv({rng.uniform(-2.0, 7.0), rng.uniform(-2.0, 2.0)});
        CHECK(model->predict(x) == loaded->predict(x));
    }
}

TEST_CASE("ann gradient matches finite differences on a 5-sample batch") {
    Rng rng(606);
    const std::size_t dim = 6;
    const int hidden = 5;
    const int n_classes = 3;
    TrainingSet ts;
    ts.dim = dim;
    ts.n_classes = n_classes;
    for (int i = 0; i < 5; ++i) {
        DenseVector x(dim);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        ts.features.push_back(fv(x));
        ts.labels.push_back(i % n_classes);
    }
    std::vector<std::size_t> batch = {0, 1, 2, 3, 4};

    for (int draw = 0; draw < 10; ++draw) {
        AnnModel net;
        net.set_shape(dim, n_classes);
        net.hidden = hidden;
        net.w1.resize(static_cast<std::size_t>(hidden) * dim);
        net.b1.resize(static_cast<std::size_t>(hidden));
        net.w2.resize(static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(hidden));
        net.b2.resize(static_cast<std::size_t>(n_classes));
        for (auto& v : net.w1) v = rng.uniform(-1.0, 1.0);
        for (auto& v : net.b1) v = rng.uniform(-0.5, 0.5);
        for (auto& v : net.w2) v = rng.uniform(-1.0, 1.0);
        for (auto& v : net.b2) v = rng.uniform(-0.5, 0.5);
        double l2 = draw % 2 ? 0.05 : 0.0;

        AnnGradients grads;
        ann_loss_grad(net, ts, batch, l2, grads);

        AnnGradients dump;
        auto loss_at = [&]() { return ann_loss_grad(net, ts, batch, l2, dump); };
        auto check_block = [&](std::vector<double>& params, const std::vector<double>& analytic) {
            std::vector<double> numeric(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                double saved = params[i];
                params[i] = saved + 1e-6;
                double up = loss_at();
                params[i] = saved - 1e-6;
                double down = loss_at();
                params[i] = saved;
                numeric[i] = (up - down) / 2e-6;
            }
            for (std::size_t i = 0; i < params.size(); ++i) {
                double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-7});
                CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
            }
        };
        check_block(net.w1, grads.w1);
        check_block(net.b1, grads.b1);
        check_block(net.w2, grads.w2);
        check_block(net.b2, grads.b2);
    }
}

TEST_CASE("ann learns XOR with enough hidden units") {
    auto ts = make_ts({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}, {0, 1, 1, 0}, 2);
    AnnParams params;
    params.hidden_units = 8;
    params.epochs = 3000;
    params.learning_rate = 0.3;
    params.batch_size = 4;
    params.seed = 12;
    auto model = train_ann(ts, params);
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        CHECK(model->predict(ts.features[i]) == ts.labels[i]);
    }
}

TEST_CASE("ann diverging learning rate raises a numeric error") {
    auto ts = make_ts({{1e4, 0.0}, {0.0, 1e4}}, {0, 1}, 2);
    AnnParams params;
    params.learning_rate = 1e10;
    params.epochs = 100;
    params.seed = 1;
    CHECK_THROWS_AS(train_ann(ts, params), NumericError);
}

TEST_CASE("ann training is deterministic per seed and serializes") {
    Rng rng(44);
    std::vector<DenseVector> rows;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        rows.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        labels.push_back(static_cast<int>(rng.below(3)));
    }
    for (int c = 0; c < 3; ++c) labels[static_cast<std::size_t>(c)] = c;
    auto ts = make_ts(rows, labels, 3);
    AnnParams params;
    params.hidden_units = 6;
    params.epochs = 20;
    params.seed = 9;
    auto a = train_ann(ts, params);
    auto b = train_ann(ts, params);
    auto* na = dynamic_cast<AnnModel*>(a.get());
    auto* nb = dynamic_cast<AnnModel*>(b.get());
    CHECK(na->w1 == nb->w1);
    CHECK(na->w2 == nb->w2);
    CHECK(na->epoch_losses == nb->epoch_losses);

    std::stringstream buf;
    BinaryWriter w(buf);
    a->save(w);
    BinaryReader r(buf);
    auto loaded = Model::load(r);
    for (int i = 0; i < 100; ++i) {
        FeatureVector x = fv({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        CHECK(a->predict(x) == loaded->predict(x));
    }
}
