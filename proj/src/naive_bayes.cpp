#include "prodcat/naive_bayes.hpp"

#include <cmath>

#include "prodcat/binary_io.hpp"

namespace prodcat {

std::unique_ptr<Model> train_multinomial_nb(const TrainingSet& ts, const NaiveBayesParams& params) {
    validate_training_set(ts);
    if (!(params.alpha > 0.0)) throw ValidationError("naive bayes: alpha must be > 0");

    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        for (const auto& [j, v] : ts.features[i].entries) {
            if (v < 0.0) {
                throw ValidationError("naive bayes: negative value at feature " +
                                      std::to_string(j) + " of sample " + std::to_string(i) +
                                      "; multinomial NB needs nonnegative features");
            }
        }
    }

    const std::size_t dim = ts.dim;
    const int n_classes = ts.n_classes;
    std::vector<double> class_count(static_cast<std::size_t>(n_classes), 0.0);
    std::vector<double> feature_sum(static_cast<std::size_t>(n_classes) * dim, 0.0);
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        int c = ts.labels[i];
        class_count[static_cast<std::size_t>(c)] += 1.0;
        double* sums = feature_sum.data() + static_cast<std::size_t>(c) * dim;
        for (const auto& [j, v] : ts.features[i].entries) sums[j] += v;
    }

    auto model = std::make_unique<NaiveBayesModel>();
    model->set_shape(dim, n_classes);
    model->log_prior.resize(static_cast<std::size_t>(n_classes));
    model->log_likelihood.resize(static_cast<std::size_t>(n_classes) * dim);
    const double n = static_cast<double>(ts.features.size());
    for (int c = 0; c < n_classes; ++c) {
        model->log_prior[static_cast<std::size_t>(c)] =
            std::log(class_count[static_cast<std::size_t>(c)] / n);
        const double* sums = feature_sum.data() + static_cast<std::size_t>(c) * dim;
        double total = 0.0;
        for (std::size_t j = 0; j < dim; ++j) total += sums[j];
        const double denom = total + params.alpha * static_cast<double>(dim);
        double* ll = model->log_likelihood.data() + static_cast<std::size_t>(c) * dim;
        for (std::size_t j = 0; j < dim; ++j) {
            ll[j] = std::log((sums[j] + params.alpha) / denom);
        }
    }
    model->hyperparams = {{"alpha", params.alpha}};
    return model;
}

int NaiveBayesModel::predict_impl(const FeatureVector& x) const {
    std::vector<double> scores(static_cast<std::size_t>(n_classes_));
    for (int c = 0; c < n_classes_; ++c) {
        double s = log_prior[static_cast<std::size_t>(c)];
        const double* ll = log_likelihood.data() + static_cast<std::size_t>(c) * dim_;
        for (const auto& [j, v] : x.entries) s += v * ll[j];
        scores[static_cast<std::size_t>(c)] = s;
    }
    return argmax_class(scores);
}

void NaiveBayesModel::save_payload(BinaryWriter& w) const {
    w.f64_vec(log_prior);
    w.f64_vec(log_likelihood);
}

void NaiveBayesModel::load_payload(BinaryReader& r) {
    log_prior = r.f64_vec();
    log_likelihood = r.f64_vec();
}

}  // namespace prodcat
