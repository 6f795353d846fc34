#pragma once

#include "prodcat/tree.hpp"

namespace prodcat {

struct BaggingParams {
    int n_trees = 100;
    TreeParams tree;
    std::uint64_t seed = 0;
    bool bootstrap = true;  // false = every tree sees the identity resample
};

struct RandomForestParams {
    int n_trees = 100;
    int mtry = 0;  // 0 = ceil(sqrt(dim))
    TreeParams tree;
    std::uint64_t seed = 0;
    bool bootstrap = true;
};

// Majority vote with ties resolved to the lowest class index.
int majority_vote(const std::vector<int>& votes, int n_classes);

class TreeEnsembleModel : public Model {
public:
    explicit TreeEnsembleModel(std::string algorithm = "bagged-trees")
        : algorithm_(std::move(algorithm)) {}

    std::string algorithm() const override { return algorithm_; }

    std::vector<std::vector<TreeNode>> trees;

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;

private:
    std::string algorithm_;
};

std::unique_ptr<Model> train_bagged_trees(const TrainingSet& ts, const BaggingParams& params);
std::unique_ptr<Model> train_random_forest(const TrainingSet& ts, const RandomForestParams& params);

}  // namespace prodcat
