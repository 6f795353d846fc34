#pragma once

#include "prodcat/tree.hpp"

namespace prodcat {

struct GbtParams {
    int n_rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 6;
    double lambda = 1.0;
    int min_samples_leaf = 1;
    std::uint64_t seed = 0;  // accepted for interface uniformity; training is deterministic
};

// Gradient-boosted trees on the softmax objective: per round and class, a
// second-order regression tree on g = p - y, h = p(1 - p). Stored leaf values
// already include the learning-rate scaling.
class GbtModel : public Model {
public:
    std::string algorithm() const override { return "gbt"; }

    double base_score = 0.0;
    std::vector<std::vector<std::vector<TreeNode>>> rounds;  // [round][class]
    std::vector<double> round_losses;  // training loss after each round

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

    std::vector<double> margins(const FeatureVector& x) const;

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;
};

std::unique_ptr<Model> train_gradient_boosted_trees(const TrainingSet& ts, const GbtParams& params);

}  // namespace prodcat
