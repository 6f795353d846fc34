#include "prodcat/knn.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/binary_io.hpp"

namespace prodcat {

namespace {

double knn_distance(const FeatureVector& a, const FeatureVector& b, KnnMetric metric) {
    if (metric == KnnMetric::kEuclidean) {
        return std::sqrt(squared_distance(a, b));
    }
    double na = std::sqrt(a.squared_norm());
    double nb = std::sqrt(b.squared_norm());
    if (na == 0.0 || nb == 0.0) return 1.0;  // zero vector: similarity 0
    return 1.0 - a.dot(b) / (na * nb);
}

}  // namespace

std::unique_ptr<Model> train_knn(const TrainingSet& ts, const KnnParams& params) {
    validate_training_set(ts);
    if (params.k < 1) throw ValidationError("knn: k must be >= 1");
    if (static_cast<std::size_t>(params.k) > ts.features.size()) {
        throw ValidationError("knn: k = " + std::to_string(params.k) +
                              " exceeds training size " + std::to_string(ts.features.size()));
    }
    auto model = std::make_unique<KnnModel>();
    model->set_shape(ts.dim, ts.n_classes);
    model->points = ts.features;
    model->labels = ts.labels;
    model->k = params.k;
    model->metric = params.metric;
    model->hyperparams = {{"k", params.k},
                          {"metric", params.metric == KnnMetric::kEuclidean ? "euclidean" : "cosine"}};
    return model;
}

int KnnModel::predict_impl(const FeatureVector& x) const {
    std::vector<std::pair<double, std::size_t>> order(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        order[i] = {knn_distance(x, points[i], metric), i};
    }
    std::size_t kk = static_cast<std::size_t>(k);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end());

    std::vector<int> votes(static_cast<std::size_t>(n_classes_), 0);
    std::vector<double> dist_sum(static_cast<std::size_t>(n_classes_), 0.0);
    for (std::size_t i = 0; i < kk; ++i) {
        int c = labels[order[i].second];
        ++votes[static_cast<std::size_t>(c)];
        dist_sum[static_cast<std::size_t>(c)] += order[i].first;
    }
    int best = -1;
    for (int c = 0; c < n_classes_; ++c) {
        if (votes[static_cast<std::size_t>(c)] == 0) continue;
        if (best < 0) {
            best = c;
            continue;
        }
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)] ||
            (votes[static_cast<std::size_t>(c)] == votes[static_cast<std::size_t>(best)] &&
             dist_sum[static_cast<std::size_t>(c)] < dist_sum[static_cast<std::size_t>(best)])) {
            best = c;
        }
    }
    return best;
}

void KnnModel::save_payload(BinaryWriter& w) const {
    w.i32(k);
    w.u8(metric == KnnMetric::kEuclidean ? 0 : 1);
    w.u64(points.size());
    for (const auto& p : points) w.feature(p);
    w.u64(labels.size());
    for (int l : labels) w.i32(l);
}

void KnnModel::load_payload(BinaryReader& r) {
    k = r.i32();
    metric = r.u8() == 0 ? KnnMetric::kEuclidean : KnnMetric::kCosine;
    points.resize(r.u64());
    for (auto& p : points) p = r.feature();
    labels.resize(r.u64());
    for (auto& l : labels) l = r.i32();
}

}  // namespace prodcat
