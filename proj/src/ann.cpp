#include "prodcat/ann.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/binary_io.hpp"
#include "prodcat/rng.hpp"

namespace prodcat {

double ann_loss_grad(const AnnModel& net, const TrainingSet& ts,
                     const std::vector<std::size_t>& batch, double l2, AnnGradients& grads) {
    const std::size_t dim = net.feature_dim();
    const int hidden = net.hidden;
    const int n_classes = net.class_count();

    grads.w1.assign(net.w1.size(), 0.0);
    grads.b1.assign(net.b1.size(), 0.0);
    grads.w2.assign(net.w2.size(), 0.0);
    grads.b2.assign(net.b2.size(), 0.0);

    std::vector<double> act(static_cast<std::size_t>(hidden));
    std::vector<double> probs(static_cast<std::size_t>(n_classes));
    std::vector<double> delta_hidden(static_cast<std::size_t>(hidden));
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;

    for (std::size_t idx : batch) {
        const FeatureVector& x = ts.features[idx];
        const int label = ts.labels[idx];
        for (int h = 0; h < hidden; ++h) {
            const double* row = net.w1.data() + static_cast<std::size_t>(h) * dim;
            double s = net.b1[static_cast<std::size_t>(h)];
            for (const auto& [j, v] : x.entries) s += row[j] * v;
            act[static_cast<std::size_t>(h)] = s > 0.0 ? s : 0.0;
        }
        for (int c = 0; c < n_classes; ++c) {
            const double* row = net.w2.data() + static_cast<std::size_t>(c) * hidden;
            double s = net.b2[static_cast<std::size_t>(c)];
            for (int h = 0; h < hidden; ++h) s += row[h] * act[static_cast<std::size_t>(h)];
            probs[static_cast<std::size_t>(c)] = s;
        }
        double max_s = *std::max_element(probs.begin(), probs.end());
        double z = 0.0;
        for (auto& p : probs) {
            p = std::exp(p - max_s);
            z += p;
        }
        loss -= inv_n * std::log(probs[static_cast<std::size_t>(label)] / z);

        std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
        for (int c = 0; c < n_classes; ++c) {
            double coef = (probs[static_cast<std::size_t>(c)] / z - (c == label ? 1.0 : 0.0)) *
                          inv_n;
            grads.b2[static_cast<std::size_t>(c)] += coef;
            double* grow = grads.w2.data() + static_cast<std::size_t>(c) * hidden;
            const double* row = net.w2.data() + static_cast<std::size_t>(c) * hidden;
            for (int h = 0; h < hidden; ++h) {
                grow[h] += coef * act[static_cast<std::size_t>(h)];
                delta_hidden[static_cast<std::size_t>(h)] += coef * row[h];
            }
        }
        for (int h = 0; h < hidden; ++h) {
            if (act[static_cast<std::size_t>(h)] <= 0.0) continue;  // ReLU gate
            double d = delta_hidden[static_cast<std::size_t>(h)];
            grads.b1[static_cast<std::size_t>(h)] += d;
            double* grow = grads.w1.data() + static_cast<std::size_t>(h) * dim;
            for (const auto& [j, v] : x.entries) grow[j] += d * v;
        }
    }

    if (l2 > 0.0) {
        double reg = 0.0;
        for (std::size_t i = 0; i < net.w1.size(); ++i) {
            reg += net.w1[i] * net.w1[i];
            grads.w1[i] += l2 * net.w1[i];
        }
        for (std::size_t i = 0; i < net.w2.size(); ++i) {
            reg += net.w2[i] * net.w2[i];
            grads.w2[i] += l2 * net.w2[i];
        }
        loss += 0.5 * l2 * reg;
    }
    return loss;
}

std::unique_ptr<Model> train_ann(const TrainingSet& ts, const AnnParams& params) {
    validate_training_set(ts);
    if (params.hidden_units < 1) throw ValidationError("ann: hidden_units must be >= 1");
    if (params.epochs < 1) throw ValidationError("ann: epochs must be >= 1");
    if (!(params.learning_rate > 0.0)) throw ValidationError("ann: learning_rate must be > 0");
    if (params.batch_size < 1) throw ValidationError("ann: batch_size must be >= 1");

    auto model = std::make_unique<AnnModel>();
    model->set_shape(ts.dim, ts.n_classes);
    model->hidden = params.hidden_units;
    model->w1.resize(static_cast<std::size_t>(params.hidden_units) * ts.dim);
    model->b1.assign(static_cast<std::size_t>(params.hidden_units), 0.0);
    model->w2.resize(static_cast<std::size_t>(ts.n_classes) *
                     static_cast<std::size_t>(params.hidden_units));
    model->b2.assign(static_cast<std::size_t>(ts.n_classes), 0.0);

    Rng rng(params.seed);
    const double s1 = std::sqrt(6.0 / static_cast<double>(ts.dim + static_cast<std::size_t>(params.hidden_units)));
    for (auto& w : model->w1) w = rng.uniform(-s1, s1);
    const double s2 = std::sqrt(6.0 / static_cast<double>(params.hidden_units + ts.n_classes));
    for (auto& w : model->w2) w = rng.uniform(-s2, s2);

    std::vector<std::size_t> order(ts.features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    AnnGradients grads;
    std::vector<std::size_t> batch;

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(params.batch_size)) {
            std::size_t stop = std::min(order.size(), at + static_cast<std::size_t>(params.batch_size));
            batch.assign(order.begin() + static_cast<std::ptrdiff_t>(at),
                         order.begin() + static_cast<std::ptrdiff_t>(stop));
            double batch_loss = ann_loss_grad(*model, ts, batch, params.l2, grads);
            if (!std::isfinite(batch_loss)) {
                throw NumericError("ann: training loss is not finite; use a smaller learning rate");
            }
            epoch_loss += batch_loss * static_cast<double>(batch.size());
            const double lr = params.learning_rate;
            for (std::size_t i = 0; i < model->w1.size(); ++i) model->w1[i] -= lr * grads.w1[i];
            for (std::size_t i = 0; i < model->b1.size(); ++i) model->b1[i] -= lr * grads.b1[i];
            for (std::size_t i = 0; i < model->w2.size(); ++i) model->w2[i] -= lr * grads.w2[i];
            for (std::size_t i = 0; i < model->b2.size(); ++i) model->b2[i] -= lr * grads.b2[i];
        }
        model->epoch_losses.push_back(epoch_loss / static_cast<double>(order.size()));
    }

    model->hyperparams = {{"hidden_units", params.hidden_units}, {"epochs", params.epochs},
                          {"learning_rate", params.learning_rate}, {"l2", params.l2},
                          {"batch_size", params.batch_size},       {"seed", params.seed}};
    return model;
}

int AnnModel::predict_impl(const FeatureVector& x) const {
    std::vector<double> act(static_cast<std::size_t>(hidden));
    for (int h = 0; h < hidden; ++h) {
        const double* row = w1.data() + static_cast<std::size_t>(h) * dim_;
        double s = b1[static_cast<std::size_t>(h)];
        for (const auto& [j, v] : x.entries) s += row[j] * v;
        act[static_cast<std::size_t>(h)] = s > 0.0 ? s : 0.0;
    }
    std::vector<double> scores(static_cast<std::size_t>(n_classes_));
    for (int c = 0; c < n_classes_; ++c) {
        const double* row = w2.data() + static_cast<std::size_t>(c) * hidden;
        double s = b2[static_cast<std::size_t>(c)];
        for (int h = 0; h < hidden; ++h) s += row[h] * act[static_cast<std::size_t>(h)];
        scores[static_cast<std::size_t>(c)] = s;
    }
    return argmax_class(scores);
}

void AnnModel::save_payload(BinaryWriter& w) const {
    w.i32(hidden);
    w.f64_vec(w1);
    w.f64_vec(b1);
    w.f64_vec(w2);
    w.f64_vec(b2);
    w.f64_vec(epoch_losses);
}

void AnnModel::load_payload(BinaryReader& r) {
    hidden = r.i32();
    w1 = r.f64_vec();
    b1 = r.f64_vec();
    w2 = r.f64_vec();
    b2 = r.f64_vec();
    epoch_losses = r.f64_vec();
}

}  // namespace prodcat
