#pragma once

#include <cstdint>

#include "prodcat/model.hpp"
#include "prodcat/rng.hpp"

namespace prodcat {

enum class SplitCriterion { kGini, kInfoGain, kGainRatio };

struct TreeParams {
    SplitCriterion criterion = SplitCriterion::kGini;
    int max_depth = 30;        // 0 = root is a leaf
    int min_samples_leaf = 1;  // weighted draws for bootstrapped trees
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf_class = -1;
    double leaf_value = 0.0;  // regression trees (boosting)
};

int tree_walk(const std::vector<TreeNode>& nodes, const FeatureVector& x);

// Impurity of an integer class histogram, exposed for tests.
double gini_impurity(const std::vector<std::int64_t>& counts);
double entropy_impurity(const std::vector<std::int64_t>& counts);  // bits

// Column-major view of a feature matrix: per feature, (row, value) pairs of
// the nonzero entries sorted by value. Built once and shared across all trees
// grown on the same matrix; absent entries are implicit zeros.
struct ColumnStore {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> columns;

    static ColumnStore build(const std::vector<FeatureVector>& features, std::size_t dim);
};

// Grows a binary classification tree by exhaustive threshold search over the
// midpoints of sorted distinct values; ties resolve to the lowest feature
// index, then the smallest threshold. Rows with zero weight are ignored.
// mtry > 0 restricts each node's search to a fresh random feature subset.
std::vector<TreeNode> grow_classification_tree(const ColumnStore& store,
                                               const std::vector<int>& labels, int n_classes,
                                               const std::vector<std::int64_t>& row_weights,
                                               const TreeParams& params, int mtry, Rng* rng);

// Second-order regression tree on per-row (gradient, hessian): split gain
// 0.5 * (GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)), leaf value
// -G/(H+lambda).
struct RegressionTreeParams {
    int max_depth = 6;
    int min_samples_leaf = 1;
    double lambda = 1.0;
};

std::vector<TreeNode> grow_regression_tree(const ColumnStore& store,
                                           const std::vector<double>& gradients,
                                           const std::vector<double>& hessians,
                                           const RegressionTreeParams& params);

class DecisionTreeModel : public Model {
public:
    std::string algorithm() const override { return "decision-tree"; }

    std::vector<TreeNode> nodes;

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;
};

std::unique_ptr<Model> train_decision_tree(const TrainingSet& ts, const TreeParams& params);

void save_nodes(BinaryWriter& w, const std::vector<TreeNode>& nodes);
std::vector<TreeNode> load_nodes(BinaryReader& r);

}  // namespace prodcat
