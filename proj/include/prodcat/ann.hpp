#pragma once

#include "prodcat/model.hpp"

namespace prodcat {

struct AnnParams {
    int hidden_units = 64;
    int epochs = 200;
    double learning_rate = 0.1;
    double l2 = 0.0;
    int batch_size = 32;
    std::uint64_t seed = 0;
};

// One hidden layer, ReLU activation, softmax output, mini-batch SGD.
class AnnModel : public Model {
public:
    std::string algorithm() const override { return "ann"; }

    int hidden = 0;
    std::vector<double> w1;  // hidden x dim
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // n_classes x hidden
    std::vector<double> b2;  // n_classes
    std::vector<double> epoch_losses;

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;
};

struct AnnGradients {
    std::vector<double> w1, b1, w2, b2;
};

// Mean cross-entropy of the batch plus (l2/2)(|W1|^2+|W2|^2), with gradients
// for every layer. The training loop and the finite-difference checks share
// this function.
double ann_loss_grad(const AnnModel& net, const TrainingSet& ts,
                     const std::vector<std::size_t>& batch, double l2, AnnGradients& grads);

std::unique_ptr<Model> train_ann(const TrainingSet& ts, const AnnParams& params);

}  // namespace prodcat
