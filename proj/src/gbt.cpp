#include "prodcat/gbt.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/binary_io.hpp"

namespace prodcat {

std::unique_ptr<Model> train_gradient_boosted_trees(const TrainingSet& ts,
                                                    const GbtParams& params) {
    validate_training_set(ts);
    if (params.n_rounds < 1) throw ValidationError("gbt: n_rounds must be >= 1");
    if (params.max_depth < 0) throw ValidationError("gbt: max_depth must be >= 0");
    if (params.lambda < 0.0) throw ValidationError("gbt: lambda must be >= 0");

    const std::size_t n = ts.features.size();
    const int n_classes = ts.n_classes;
    auto store = ColumnStore::build(ts.features, ts.dim);

    auto model = std::make_unique<GbtModel>();
    model->set_shape(ts.dim, n_classes);
    model->base_score = 0.0;

    // margins[i][c], flattened
    std::vector<double> margins(n * static_cast<std::size_t>(n_classes), model->base_score);
    std::vector<double> probs(n * static_cast<std::size_t>(n_classes));
    std::vector<double> grad(n), hess(n);

    RegressionTreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.min_samples_leaf = params.min_samples_leaf;
    tree_params.lambda = params.lambda;

    auto update_probs = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            const double* m = margins.data() + i * static_cast<std::size_t>(n_classes);
            double* p = probs.data() + i * static_cast<std::size_t>(n_classes);
            double max_m = *std::max_element(m, m + n_classes);
            double z = 0.0;
            for (int c = 0; c < n_classes; ++c) {
                p[c] = std::exp(m[c] - max_m);
                z += p[c];
            }
            for (int c = 0; c < n_classes; ++c) p[c] /= z;
        }
    };
    auto mean_loss = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = probs.data() + i * static_cast<std::size_t>(n_classes);
            loss -= std::log(std::max(p[ts.labels[i]], 1e-300));
        }
        return loss / static_cast<double>(n);
    };

    for (int round = 0; round < params.n_rounds; ++round) {
        update_probs();
        std::vector<std::vector<TreeNode>> class_trees;
        class_trees.reserve(static_cast<std::size_t>(n_classes));
        for (int c = 0; c < n_classes; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                double p = probs[i * static_cast<std::size_t>(n_classes) +
                                 static_cast<std::size_t>(c)];
                grad[i] = p - (ts.labels[i] == c ? 1.0 : 0.0);
                hess[i] = p * (1.0 - p);
            }
            auto tree = grow_regression_tree(store, grad, hess, tree_params);
            // fold the shrinkage into the stored leaves
            for (auto& node : tree) {
                if (node.feature < 0) node.leaf_value *= params.learning_rate;
            }
            for (std::size_t i = 0; i < n; ++i) {
                int leaf = tree_walk(tree, ts.features[i]);
                margins[i * static_cast<std::size_t>(n_classes) + static_cast<std::size_t>(c)] +=
                    tree[static_cast<std::size_t>(leaf)].leaf_value;
            }
            class_trees.push_back(std::move(tree));
        }
        model->rounds.push_back(std::move(class_trees));
        update_probs();
        double loss = mean_loss();
        if (!std::isfinite(loss)) {
            throw NumericError("gbt: training loss is not finite; reduce the learning rate");
        }
        model->round_losses.push_back(loss);
    }

    model->hyperparams = {{"n_rounds", params.n_rounds},
                          {"learning_rate", params.learning_rate},
                          {"max_depth", params.max_depth},
                          {"lambda", params.lambda},
                          {"min_samples_leaf", params.min_samples_leaf},
                          {"seed", params.seed}};
    return model;
}

std::vector<double> GbtModel::margins(const FeatureVector& x) const {
    std::vector<double> scores(static_cast<std::size_t>(n_classes_), base_score);
    for (const auto& round : rounds) {
        for (int c = 0; c < n_classes_; ++c) {
            const auto& tree = round[static_cast<std::size_t>(c)];
            scores[static_cast<std::size_t>(c)] +=
                tree[static_cast<std::size_t>(tree_walk(tree, x))].leaf_value;
        }
    }
    return scores;
}

int GbtModel::predict_impl(const FeatureVector& x) const { return argmax_class(margins(x)); }

void GbtModel::save_payload(BinaryWriter& w) const {
    w.f64(base_score);
    w.u64(rounds.size());
    for (const auto& round : rounds) {
        w.u64(round.size());
        for (const auto& tree : round) save_nodes(w, tree);
    }
    w.f64_vec(round_losses);
}

void GbtModel::load_payload(BinaryReader& r) {
    base_score = r.f64();
    rounds.resize(r.u64());
    for (auto& round : rounds) {
        round.resize(r.u64());
        for (auto& tree : round) tree = load_nodes(r);
    }
    round_losses = r.f64_vec();
}

}  // namespace prodcat
