#pragma once

#include "prodcat/model.hpp"

namespace prodcat {

enum class KnnMetric { kEuclidean, kCosine };

struct KnnParams {
    int k = 5;
    KnnMetric metric = KnnMetric::kEuclidean;
};

// Lazy learner: stores the training set, scans it per query. Neighbor order is
// (distance, training index); votes tie-break by smaller summed distance, then
// lower class index.
class KnnModel : public Model {
public:
    std::string algorithm() const override { return "knn"; }

    std::vector<FeatureVector> points;
    std::vector<int> labels;
    int k = 5;
    KnnMetric metric = KnnMetric::kEuclidean;

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;
};

std::unique_ptr<Model> train_knn(const TrainingSet& ts, const KnnParams& params);

}  // namespace prodcat
