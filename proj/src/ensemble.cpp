#include "prodcat/ensemble.hpp"

#include <cmath>

#include "prodcat/binary_io.hpp"

namespace prodcat {

int majority_vote(const std::vector<int>& votes, int n_classes) {
    std::vector<int> tally(static_cast<std::size_t>(n_classes), 0);
    for (int v : votes) ++tally[static_cast<std::size_t>(v)];
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
        if (tally[static_cast<std::size_t>(c)] > tally[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

namespace {

std::vector<std::int64_t> bootstrap_weights(std::size_t n, bool bootstrap, Rng& rng) {
    std::vector<std::int64_t> weights(n, 0);
    if (!bootstrap) {
        std::fill(weights.begin(), weights.end(), 1);
        return weights;
    }
    for (std::size_t i = 0; i < n; ++i) ++weights[rng.below(n)];
    return weights;
}

std::unique_ptr<Model> train_tree_ensemble(const TrainingSet& ts, const char* algorithm,
                                           int n_trees, int mtry, const TreeParams& tree_params,
                                           std::uint64_t seed, bool bootstrap) {
    validate_training_set(ts);
    if (n_trees < 1) throw ValidationError(std::string(algorithm) + ": n_trees must be >= 1");

    auto store = ColumnStore::build(ts.features, ts.dim);
    auto model = std::make_unique<TreeEnsembleModel>(algorithm);
    model->set_shape(ts.dim, ts.n_classes);
    model->trees.reserve(static_cast<std::size_t>(n_trees));
    for (int t = 0; t < n_trees; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        auto weights = bootstrap_weights(ts.features.size(), bootstrap, rng);
        model->trees.push_back(grow_classification_tree(store, ts.labels, ts.n_classes, weights,
                                                        tree_params, mtry, &rng));
    }
    return model;
}

}  // namespace

std::unique_ptr<Model> train_bagged_trees(const TrainingSet& ts, const BaggingParams& params) {
    auto model = train_tree_ensemble(ts, "bagged-trees", params.n_trees, /*mtry=*/0, params.tree,
                                     params.seed, params.bootstrap);
    model->hyperparams = {{"n_trees", params.n_trees},
                          {"max_depth", params.tree.max_depth},
                          {"min_samples_leaf", params.tree.min_samples_leaf},
                          {"seed", params.seed},
                          {"bootstrap", params.bootstrap}};
    return model;
}

std::unique_ptr<Model> train_random_forest(const TrainingSet& ts,
                                           const RandomForestParams& params) {
    int mtry = params.mtry;
    if (mtry == 0) {
        mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(ts.dim))));
    }
    if (mtry < 1 || static_cast<std::size_t>(mtry) > ts.dim) {
        throw ValidationError("random forest: mtry must be in [1, dim]");
    }
    auto model = train_tree_ensemble(ts, "random-forest", params.n_trees, mtry, params.tree,
                                     params.seed, params.bootstrap);
    model->hyperparams = {{"n_trees", params.n_trees},
                          {"mtry", mtry},
                          {"max_depth", params.tree.max_depth},
                          {"min_samples_leaf", params.tree.min_samples_leaf},
                          {"seed", params.seed},
                          {"bootstrap", params.bootstrap}};
    return model;
}

int TreeEnsembleModel::predict_impl(const FeatureVector& x) const {
    std::vector<int> votes;
    votes.reserve(trees.size());
    for (const auto& tree : trees) {
        votes.push_back(tree[static_cast<std::size_t>(tree_walk(tree, x))].leaf_class);
    }
    return majority_vote(votes, n_classes_);
}

void TreeEnsembleModel::save_payload(BinaryWriter& w) const {
    w.u64(trees.size());
    for (const auto& tree : trees) save_nodes(w, tree);
}

void TreeEnsembleModel::load_payload(BinaryReader& r) {
    trees.resize(r.u64());
    for (auto& tree : trees) tree = load_nodes(r);
}

}  // namespace prodcat
