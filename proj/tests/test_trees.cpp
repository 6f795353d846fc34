#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "prodcat/binary_io.hpp"
#include "prodcat/ensemble.hpp"
#include "prodcat/gbt.hpp"
#include "prodcat/rng.hpp"
#include "prodcat/tree.hpp"

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

TrainingSet random_ts(Rng& rng, std::size_t n, std::size_t dim, int n_classes) {
    std::vector<DenseVector> rows(n, DenseVector(dim));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : rows[i]) v = static_cast<double>(rng.below(7)) - 2.0;
        labels[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));
    }
    for (int c = 0; c < n_classes; ++c) labels[static_cast<std::size_t>(c)] = c;
    return make_ts(rows, labels, n_classes);
}

// Exhaustive-search oracle for the best root split: every feature, every
// midpoint of consecutive distinct values, impurity decrease recomputed from
// scratch. Ties resolve to the lowest feature, then the smallest threshold.
struct OracleSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

double oracle_gini(const std::vector<int>& labels, const std::vector<bool>& mask, bool side,
                   int n_classes, const std::vector<DenseVector>& rows, int feature, double thr) {
    (void)rows;
    (void)feature;
    (void)thr;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_classes), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (mask[i] == side) ++counts[static_cast<std::size_t>(labels[i])];
    }
    return gini_impurity(counts);
}

OracleSplit oracle_best_split(const std::vector<DenseVector>& rows, const std::vector<int>& labels,
                              int n_classes) {
    const std::size_t n = rows.size();
    const std::size_t dim = rows[0].size();
    std::vector<std::int64_t> parent_counts(static_cast<std::size_t>(n_classes), 0);
    for (int l : labels) ++parent_counts[static_cast<std::size_t>(l)];
    const double parent = gini_impurity(parent_counts);

    OracleSplit best;
    for (std::size_t f = 0; f < dim; ++f) {
        std::vector<double> values;
        for (const auto& r : rows) values.push_back(r[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            double thr = (values[v] + values[v + 1]) / 2.0;
            std::vector<bool> mask(n);
            std::size_t n_left = 0;
            for (std::size_t i = 0; i < n; ++i) {
                mask[i] = rows[i][f] <= thr;
                n_left += mask[i];
            }
            if (n_left == 0 || n_left == n) continue;
            double gini_left = oracle_gini(labels, mask, true, n_classes, rows, static_cast<int>(f), thr);
            double gini_right = oracle_gini(labels, mask, false, n_classes, rows, static_cast<int>(f), thr);
            double wl = static_cast<double>(n_left);
            double wr = static_cast<double>(n - n_left);
            double wt = static_cast<double>(n);
            double gain = parent - (wl * gini_left + wr * gini_right) / wt;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = static_cast<int>(f);
                best.threshold = thr;
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("impurity formula endpoints") {
    CHECK(gini_impurity({5, 0}) == 0.0);
    CHECK(gini_impurity({5, 5}) == 0.5);
    CHECK(entropy_impurity({4, 4}) == doctest::Approx(1.0));
    CHECK(entropy_impurity({7, 0, 0}) == 0.0);
}

TEST_CASE("single split separates a 1-D two-point set") {
    auto ts = make_ts({{0.0}, {1.0}}, {0, 1}, 2);
    auto model = train_decision_tree(ts, {});
    auto* tree = dynamic_cast<DecisionTreeModel*>(model.get());
    REQUIRE(tree != nullptr);
    REQUIRE(tree->nodes.size() == 3);
    CHECK(tree->nodes[0].feature == 0);
    CHECK(tree->nodes[0].threshold == 0.5);
    CHECK(model->predict(fv({0.0})) == 0);
    CHECK(model->predict(fv({1.0})) == 1);
}

TEST_CASE("root split equals the exhaustive-search oracle on a 6-point instance") {
    std::vector<DenseVector> rows = {{1.0, 4.0}, {2.0, 1.0}, {3.0, 3.5},
                                     {6.0, 2.0}, {7.0, 4.5}, {8.0, 1.5}};
    std::vector<int> labels = {0, 0, 0, 1, 1, 1};
    auto oracle = oracle_best_split(rows, labels, 2);
    auto ts = make_ts(rows, labels, 2);
    auto model = train_decision_tree(ts, {});
    auto* tree = dynamic_cast<DecisionTreeModel*>(model.get());
    CHECK(tree->nodes[0].feature == oracle.feature);
    CHECK(tree->nodes[0].threshold == oracle.threshold);
}

TEST_CASE("root split equals the oracle on random instances") {
    Rng rng(2718);
    for (int round = 0; round < 20; ++round) {
        auto ts = random_ts(rng, 12 + rng.below(20), 3, 3);
        std::vector<DenseVector> rows;
        for (const auto& f : ts.features) rows.push_back(to_dense(f));
        auto oracle = oracle_best_split(rows, ts.labels, ts.n_classes);
        TreeParams params;
        params.max_depth = 1;
        auto model = train_decision_tree(ts, params);
        auto* tree = dynamic_cast<DecisionTreeModel*>(model.get());
        if (oracle.feature < 0) {
            CHECK(tree->nodes[0].feature == -1);
        } else {
            CHECK(tree->nodes[0].feature == oracle.feature);
            CHECK(tree->nodes[0].threshold == doctest::Approx(oracle.threshold).epsilon(1e-12));
        }
    }
}

namespace {

// Recomputes impurities by routing the training data through the tree.
void check_split_improvements(const std::vector<TreeNode>& nodes, const TrainingSet& ts,
                              int min_samples_leaf) {
    std::vector<std::vector<std::size_t>> node_rows(nodes.size());
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        int at = 0;
        node_rows[0].push_back(i);
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const auto& n = nodes[static_cast<std::size_t>(at)];
            at = ts.features[i].get(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left
                                                                                          : n.right;
            node_rows[static_cast<std::size_t>(at)].push_back(i);
        }
    }
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        const auto& n = nodes[id];
        if (n.feature < 0) {
            CHECK(node_rows[id].size() >= static_cast<std::size_t>(min_samples_leaf));
            continue;
        }
        auto hist = [&](std::size_t node_id) {
            std::vector<std::int64_t> counts(static_cast<std::size_t>(ts.n_classes), 0);
            for (auto r : node_rows[node_id]) ++counts[static_cast<std::size_t>(ts.labels[r])];
            return counts;
        };
        double parent = gini_impurity(hist(id));
        double nl = static_cast<double>(node_rows[static_cast<std::size_t>(n.left)].size());
        double nr = static_cast<double>(node_rows[static_cast<std::size_t>(n.right)].size());
        double weighted = (nl * gini_impurity(hist(static_cast<std::size_t>(n.left))) +
                           nr * gini_impurity(hist(static_cast<std::size_t>(n.right)))) /
                          (nl + nr);
        CHECK(weighted <= parent + 1e-12);
    }
}

}  // namespace

TEST_CASE("every split lowers weighted impurity and leaves respect min size") {
    Rng rng(13);
    for (int round = 0; round < 5; ++round) {
        auto ts = random_ts(rng, 60, 4, 3);
        TreeParams params;
        params.min_samples_leaf = 3;
        auto model = train_decision_tree(ts, params);
        auto* tree = dynamic_cast<DecisionTreeModel*>(model.get());
        check_split_improvements(tree->nodes, ts, params.min_samples_leaf);
    }
}

TEST_CASE("gain ratio criterion splits sensibly") {
    auto ts = make_ts({{0.0, 1.0}, {0.0, 2.0}, {1.0, 1.0}, {1.0, 2.0}}, {0, 0, 1, 1}, 2);
    TreeParams params;
    params.criterion = SplitCriterion::kGainRatio;
    auto model = train_decision_tree(ts, params);
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        CHECK(model->predict(ts.features[i]) == ts.labels[i]);
    }
}

TEST_CASE("max_depth zero yields a majority leaf") {
    auto ts = make_ts({{0.0}, {1.0}, {2.0}}, {1, 1, 0}, 2);
    TreeParams params;
    params.max_depth = 0;
    auto model = train_decision_tree(ts, params);
    CHECK(model->predict(fv({5.0})) == 1);
}

TEST_CASE("majority vote tie-break picks the lowest class") {
    CHECK(majority_vote({0, 0, 1}, 2) == 0);
    CHECK(majority_vote({1, 0, 1}, 2) == 1);
    CHECK(majority_vote({2, 1, 1, 2}, 3) == 1);
    CHECK(majority_vote({0}, 1) == 0);
}

TEST_CASE("reduction identities: forest == bagging == tree") {
    Rng rng(321);
    auto ts = random_ts(rng, 40, 5, 3);

    TreeParams tree_params;
    auto single = train_decision_tree(ts, tree_params);

    BaggingParams bag;
    bag.n_trees = 1;
    bag.bootstrap = false;
    bag.tree = tree_params;
    auto bagged = train_bagged_trees(ts, bag);

    RandomForestParams forest;
    forest.n_trees = 1;
    forest.bootstrap = false;
    forest.mtry = static_cast<int>(ts.dim);
    forest.tree = tree_params;
    auto rf = train_random_forest(ts, forest);

    for (int i = 0; i < 500; ++i) {
        DenseVector x(5);
        for (auto& v : x) v = static_cast<double>(rng.below(7)) - 2.0;
        int a = single->predict(fv(x));
        CHECK(a == bagged->predict(fv(x)));
        CHECK(a == rf->predict(fv(x)));
    }
}

TEST_CASE("bagging determinism per seed") {
    Rng rng(77);
    auto ts = random_ts(rng, 50, 4, 3);
    BaggingParams params;
    params.n_trees = 7;
    params.seed = 99;
    auto a = train_bagged_trees(ts, params);
    auto b = train_bagged_trees(ts, params);
    for (int i = 0; i < 100; ++i) {
        DenseVector x(4);
        for (auto& v : x) v = static_cast<double>(rng.below(7)) - 2.0;
        CHECK(a->predict(fv(x)) == b->predict(fv(x)));
    }
}

TEST_CASE("random forest separates 2-D blobs") {
    Rng rng(2025);
    std::vector<DenseVector> rows;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        double cx = i % 2 == 0 ? 0.0 : 4.0;
        rows.push_back({cx + rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        labels.push_back(i % 2);
    }
    auto ts = make_ts(rows, labels, 2);
    RandomForestParams params;
    params.n_trees = 30;
    params.seed = 4;
    auto model = train_random_forest(ts, params);
    int correct = 0;
    for (int i = 0; i < 100; ++i) {
        double cx = i % 2 == 0 ? 0.0 : 4.0;
        FeatureVector x = fv({cx + rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        correct += model->predict(x) == i % 2;
    }
    CHECK(correct >= 95);
}

TEST_CASE("gbt single-leaf closed form on a 4-sample instance") {
    // labels {0,0,0,1}: p = 1/2 at the base score; for class 0,
    // sum g = 4*0.5 - 3 = -1, sum h = 4*0.25 = 1, leaf = -G/H = 1.
    auto ts = make_ts({{0.0}, {1.0}, {2.0}, {3.0}}, {0, 0, 0, 1}, 2);
    GbtParams params;
    params.n_rounds = 1;
    params.max_depth = 0;
    params.lambda = 0.0;
    params.learning_rate = 1.0;
    auto model = train_gradient_boosted_trees(ts, params);
    auto* gbt = dynamic_cast<GbtModel*>(model.get());
    REQUIRE(gbt != nullptr);
    REQUIRE(gbt->rounds.size() == 1);
    REQUIRE(gbt->rounds[0].size() == 2);
    CHECK(gbt->rounds[0][0][0].leaf_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gbt->rounds[0][1][0].leaf_value == doctest::Approx(-1.0).epsilon(1e-12));
    // prediction shifts toward the majority class everywhere
    CHECK(model->predict(fv({9.0})) == 0);
}

TEST_CASE("gbt learning rate zero keeps the base score") {
    Rng rng(1);
    auto ts = random_ts(rng, 20, 3, 3);
    GbtParams params;
    params.n_rounds = 5;
    params.learning_rate = 0.0;
    auto model = train_gradient_boosted_trees(ts, params);
    auto* gbt = dynamic_cast<GbtModel*>(model.get());
    for (int i = 0; i < 20; ++i) {
        DenseVector x(3);
        for (auto& v : x) v = static_cast<double>(rng.below(7)) - 2.0;
        auto margins = gbt->margins(fv(x));
        for (double m : margins) CHECK(m == gbt->base_score);
        CHECK(model->predict(fv(x)) == 0);
    }
}

TEST_CASE("gbt training loss is non-increasing at moderate learning rate") {
    Rng rng(42);
    auto ts = random_ts(rng, 60, 5, 3);
    GbtParams params;
    params.n_rounds = 100;
    params.learning_rate = 0.1;
    params.max_depth = 3;
    auto model = train_gradient_boosted_trees(ts, params);
    auto* gbt = dynamic_cast<GbtModel*>(model.get());
    REQUIRE(gbt->round_losses.size() == 100);
    for (std::size_t r = 1; r < gbt->round_losses.size(); ++r) {
        CHECK(gbt->round_losses[r] <= gbt->round_losses[r - 1] + 1e-12);
    }
}

TEST_CASE("tree-family models serialize losslessly") {
    Rng rng(5150);
    auto ts = random_ts(rng, 40, 4, 3);
    GbtParams gbt_params;
    gbt_params.n_rounds = 10;
    gbt_params.max_depth = 3;
    RandomForestParams rf_params;
    rf_params.n_trees = 5;
    std::vector<std::unique_ptr<Model>> models;
    models.push_back(train_decision_tree(ts, {}));
    models.push_back(train_random_forest(ts, rf_params));
    models.push_back(train_gradient_boosted_trees(ts, gbt_params));
    for (const auto& model : models) {
        std::stringstream buf;
        BinaryWriter w(buf);
        model->save(w);
        BinaryReader r(buf);
        auto loaded = Model::load(r);
        CHECK(loaded->algorithm() == model->algorithm());
        for (int i = 0; i < 200; ++i) {
            DenseVector x(4);
            for (auto& v : x) v = static_cast<double>(rng.below(7)) - 2.0;
            CHECK(model->predict(fv(x)) == loaded->predict(fv(x)));
        }
    }
}
