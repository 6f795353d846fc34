#pragma once

#include "prodcat/model.hpp"

namespace prodcat {

struct LogRegParams {
    double l2 = 1e-4;
    int epochs = 500;
    double learning_rate = 0.1;
};

class LogisticRegressionModel : public Model {
public:
    std::string algorithm() const override { return "logreg"; }

    std::vector<double> weights;  // n_classes x dim, row major
    std::vector<double> bias;     // n_classes
    double final_loss = 0.0;

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;
};

// Mean cross-entropy of softmax(Wx + b) plus (l2/2)|W|^2, with gradients.
// Shared by training and the finite-difference checks.
double logreg_loss_grad(const TrainingSet& ts, const std::vector<double>& weights,
                        const std::vector<double>& bias, double l2, std::vector<double>& grad_w,
                        std::vector<double>& grad_b);

std::unique_ptr<Model> train_logistic_regression(const TrainingSet& ts, const LogRegParams& params);

}  // namespace prodcat
