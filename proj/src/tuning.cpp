#include "prodcat/tuning.hpp"

#include <cmath>

#include "prodcat/parallel.hpp"
#include "prodcat/rng.hpp"

namespace prodcat {

namespace {

int class_count_of(const std::vector<TokenizedDoc>& docs) {
    int n = 0;
    for (const auto& d : docs) n = std::max(n, d.label + 1);
    return n;
}

TrainingSet transform_docs(const FittedVectorizer& vectorizer,
                           const std::vector<TokenizedDoc>& docs, int n_classes) {
    TrainingSet ts;
    ts.dim = vectorizer.dim();
    ts.n_classes = n_classes;
    ts.features.reserve(docs.size());
    ts.labels.reserve(docs.size());
    for (const auto& d : docs) {
        ts.features.push_back(vectorizer.transform(d));
        ts.labels.push_back(d.label);
    }
    return ts;
}

struct MeanStd {
    double mean = 0.0, std_dev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    if (xs.empty()) return ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - ms.mean) * (x - ms.mean);
    ms.std_dev = std::sqrt(var / static_cast<double>(xs.size()));
    return ms;
}

}  // namespace

FittedPipeline fit_pipeline(const RunSpec& spec, const std::vector<TokenizedDoc>& train_docs,
                            int n_classes, std::uint64_t seed_stream) {
    FittedPipeline pipeline;
    VectorizationConfig vec_config = spec.vectorization;
    vec_config.embedding.seed = mix_seed(spec.seed, 2 * seed_stream);
    vec_config.glove.seed = vec_config.embedding.seed;
    pipeline.vectorizer = FittedVectorizer::fit(train_docs, vec_config);

    TrainingSet ts = transform_docs(pipeline.vectorizer, train_docs, n_classes);
    pipeline.model = train_classifier(ts, spec.classifier.algorithm, spec.classifier.params,
                                      mix_seed(spec.seed, 2 * seed_stream + 1));
    return pipeline;
}

EvalReport evaluate_pipeline(const FittedPipeline& pipeline,
                             const std::vector<TokenizedDoc>& test_docs, int n_classes) {
    std::vector<int> y_true, y_pred;
    y_true.reserve(test_docs.size());
    y_pred.reserve(test_docs.size());
    for (const auto& d : test_docs) {
        y_true.push_back(d.label);
        y_pred.push_back(pipeline.model->predict(pipeline.vectorizer.transform(d)));
    }
    return evaluate_predictions(y_true, y_pred, n_classes);
}

CVResult cross_validate(const RunSpec& spec, const std::vector<TokenizedDoc>& docs,
                        const FoldPlan& plan, int threads) {
    if (plan.assignment.size() != docs.size()) {
        throw ValidationError("cross_validate: fold plan does not cover the records");
    }
    const int n_classes = class_count_of(docs);
    const int k = plan.k;

    CVResult result;
    result.fold_reports.resize(static_cast<std::size_t>(k));
    std::vector<std::vector<std::string>> fold_warnings(static_cast<std::size_t>(k));

    parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t f) {
        std::vector<TokenizedDoc> train_docs, test_docs;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            (plan.assignment[i] == static_cast<int>(f) ? test_docs : train_docs).push_back(docs[i]);
        }
        std::vector<bool> in_train(static_cast<std::size_t>(n_classes), false);
        std::vector<bool> in_test(static_cast<std::size_t>(n_classes), false);
        for (const auto& d : train_docs) in_train[static_cast<std::size_t>(d.label)] = true;
        for (const auto& d : test_docs) in_test[static_cast<std::size_t>(d.label)] = true;
        for (int c = 0; c < n_classes; ++c) {
            if (!in_train[static_cast<std::size_t>(c)]) {
                fold_warnings[f].push_back("fold " + std::to_string(f) +
                                           ": training part lacks class " + std::to_string(c));
            }
            if (!in_test[static_cast<std::size_t>(c)]) {
                fold_warnings[f].push_back("fold " + std::to_string(f) +
                                           ": held-out part lacks class " + std::to_string(c));
            }
        }
        auto pipeline = fit_pipeline(spec, train_docs, n_classes, f);
        result.fold_reports[f] = evaluate_pipeline(pipeline, test_docs, n_classes);
    });

    for (auto& w : fold_warnings) {
        result.warnings.insert(result.warnings.end(), w.begin(), w.end());
    }
    std::vector<double> acc, macro, weighted;
    for (const auto& r : result.fold_reports) {
        acc.push_back(r.accuracy);
        macro.push_back(r.scores.macro_f1);
        weighted.push_back(r.scores.weighted_f1);
    }
    auto a = mean_std(acc);
    auto m = mean_std(macro);
    auto w = mean_std(weighted);
    result.mean_accuracy = a.mean;
    result.std_accuracy = a.std_dev;
    result.mean_macro_f1 = m.mean;
    result.std_macro_f1 = m.std_dev;
    result.mean_weighted_f1 = w.mean;
    result.std_weighted_f1 = w.std_dev;
    return result;
}

ParamGrid ParamGrid::from_json(const nlohmann::json& grid) {
    if (!grid.is_object() || grid.empty()) {
        throw ValidationError("grid: must be a non-empty object of parameter value lists");
    }
    ParamGrid out;
    for (const auto& [key, values] : grid.items()) {  // nlohmann iterates keys alphabetically
        if (!values.is_array() || values.empty()) {
            throw ValidationError("grid." + key + ": must be a non-empty array");
        }
        out.axes.emplace_back(key, std::vector<nlohmann::json>(values.begin(), values.end()));
    }
    return out;
}

std::size_t ParamGrid::size() const {
    std::size_t n = 1;
    for (const auto& [_, values] : axes) n *= values.size();
    return n;
}

nlohmann::json ParamGrid::point(std::size_t index) const {
    nlohmann::json out = nlohmann::json::object();
    // row-major: the first axis varies slowest
    std::size_t stride = size();
    for (const auto& [name, values] : axes) {
        stride /= values.size();
        out[name] = values[(index / stride) % values.size()];
    }
    return out;
}

GridSearchResult grid_search(const RunSpec& base, const ParamGrid& grid,
                             const std::vector<TokenizedDoc>& docs, const FoldPlan& plan,
                             int threads) {
    if (grid.size() == 0) throw ValidationError("grid: empty Cartesian product");

    GridSearchResult result;
    const std::size_t n_points = grid.size();
    result.points.resize(n_points);
    result.results.resize(n_points);

    parallel_for(n_points, threads, [&](std::size_t i) {
        nlohmann::json overrides = grid.point(i);
        RunSpec spec = base;
        for (const auto& [key, value] : overrides.items()) spec.classifier.params[key] = value;
        result.points[i] = overrides;
        result.results[i] = cross_validate(spec, docs, plan, /*threads=*/1);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < n_points; ++i) {
        const auto& cand = result.results[i];
        const auto& incumbent = result.results[best];
        if (cand.mean_accuracy > incumbent.mean_accuracy ||
            (cand.mean_accuracy == incumbent.mean_accuracy &&
             cand.mean_weighted_f1 > incumbent.mean_weighted_f1)) {
            best = i;
        }
    }
    result.best_index = best;
    result.best_spec = base;
    for (const auto& [key, value] : result.points[best].items()) {
        result.best_spec.classifier.params[key] = value;
    }
    return result;
}

}  // namespace prodcat
