#pragma once

#include "prodcat/model.hpp"

namespace prodcat {

struct NaiveBayesParams {
    double alpha = 1.0;  // Lidstone smoothing
};

// Multinomial naive Bayes over nonnegative count/TF-IDF features. Embedding
// vectors carry negative components and are rejected at training time.
class NaiveBayesModel : public Model {
public:
    std::string algorithm() const override { return "naive-bayes"; }

    std::vector<double> log_prior;       // n_classes; -inf for absent classes
    std::vector<double> log_likelihood;  // n_classes x dim

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;
};

std::unique_ptr<Model> train_multinomial_nb(const TrainingSet& ts, const NaiveBayesParams& params);

}  // namespace prodcat
