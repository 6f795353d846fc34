#include "prodcat/linear.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/binary_io.hpp"

namespace prodcat {

namespace {

// softmax scores for one sample; returns -log p[label]
double softmax_sample(const std::vector<double>& weights, const std::vector<double>& bias,
                      const FeatureVector& x, int n_classes, std::size_t dim, int label,
                      std::vector<double>& probs) {
    probs.assign(static_cast<std::size_t>(n_classes), 0.0);
    for (int c = 0; c < n_classes; ++c) {
        const double* row = weights.data() + static_cast<std::size_t>(c) * dim;
        double s = bias[static_cast<std::size_t>(c)];
        for (const auto& [j, v] : x.entries) s += row[j] * v;
        probs[static_cast<std::size_t>(c)] = s;
    }
    double max_s = *std::max_element(probs.begin(), probs.end());
    double z = 0.0;
    for (auto& p : probs) {
        p = std::exp(p - max_s);
        z += p;
    }
    double loss = -std::log(probs[static_cast<std::size_t>(label)] / z);
    for (auto& p : probs) p /= z;
    return loss;
}

}  // namespace

double logreg_loss_grad(const TrainingSet& ts, const std::vector<double>& weights,
                        const std::vector<double>& bias, double l2, std::vector<double>& grad_w,
                        std::vector<double>& grad_b) {
    const std::size_t dim = ts.dim;
    const int n_classes = ts.n_classes;
    const double inv_n = 1.0 / static_cast<double>(ts.features.size());

    grad_w.assign(weights.size(), 0.0);
    grad_b.assign(bias.size(), 0.0);
    std::vector<double> probs;
    double loss = 0.0;
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        const FeatureVector& x = ts.features[i];
        loss += inv_n * softmax_sample(weights, bias, x, n_classes, dim, ts.labels[i], probs);
        for (int c = 0; c < n_classes; ++c) {
            double coef = (probs[static_cast<std::size_t>(c)] - (c == ts.labels[i] ? 1.0 : 0.0)) *
                          inv_n;
            grad_b[static_cast<std::size_t>(c)] += coef;
            double* grow = grad_w.data() + static_cast<std::size_t>(c) * dim;
            for (const auto& [j, v] : x.entries) grow[j] += coef * v;
        }
    }
    if (l2 > 0.0) {
        double reg = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            reg += weights[i] * weights[i];
            grad_w[i] += l2 * weights[i];
        }
        loss += 0.5 * l2 * reg;
    }
    return loss;
}

std::unique_ptr<Model> train_logistic_regression(const TrainingSet& ts,
                                                 const LogRegParams& params) {
    validate_training_set(ts);
    if (params.epochs < 1) throw ValidationError("logreg: epochs must be >= 1");
    if (!(params.learning_rate > 0.0)) throw ValidationError("logreg: learning_rate must be > 0");
    if (params.l2 < 0.0) throw ValidationError("logreg: l2 must be >= 0");

    auto model = std::make_unique<LogisticRegressionModel>();
    model->set_shape(ts.dim, ts.n_classes);
    model->weights.assign(static_cast<std::size_t>(ts.n_classes) * ts.dim, 0.0);
    model->bias.assign(static_cast<std::size_t>(ts.n_classes), 0.0);

    std::vector<double> grad_w, grad_b;
    double loss = 0.0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        loss = logreg_loss_grad(ts, model->weights, model->bias, params.l2, grad_w, grad_b);
        if (!std::isfinite(loss)) {
            throw NumericError("logreg: training loss is not finite; reduce the learning rate");
        }
        for (std::size_t i = 0; i < grad_w.size(); ++i) {
            model->weights[i] -= params.learning_rate * grad_w[i];
        }
        for (std::size_t i = 0; i < grad_b.size(); ++i) {
            model->bias[i] -= params.learning_rate * grad_b[i];
        }
    }
    model->final_loss = loss;
    model->hyperparams = {{"l2", params.l2},
                          {"epochs", params.epochs},
                          {"learning_rate", params.learning_rate}};
    return model;
}

int LogisticRegressionModel::predict_impl(const FeatureVector& x) const {
    std::vector<double> scores(static_cast<std::size_t>(n_classes_));
    for (int c = 0; c < n_classes_; ++c) {
        const double* row = weights.data() + static_cast<std::size_t>(c) * dim_;
        double s = bias[static_cast<std::size_t>(c)];
        for (const auto& [j, v] : x.entries) s += row[j] * v;
        scores[static_cast<std::size_t>(c)] = s;
    }
    return argmax_class(scores);
}

void LogisticRegressionModel::save_payload(BinaryWriter& w) const {
    w.f64_vec(weights);
    w.f64_vec(bias);
    w.f64(final_loss);
}

void LogisticRegressionModel::load_payload(BinaryReader& r) {
    weights = r.f64_vec();
    bias = r.f64_vec();
    final_loss = r.f64();
}

}  // namespace prodcat
