#include "prodcat/model.hpp"

#include "prodcat/ann.hpp"
#include "prodcat/binary_io.hpp"
#include "prodcat/ensemble.hpp"
#include "prodcat/gbt.hpp"
#include "prodcat/knn.hpp"
#include "prodcat/linear.hpp"
#include "prodcat/naive_bayes.hpp"
#include "prodcat/svm.hpp"
#include "prodcat/tree.hpp"

namespace prodcat {

void validate_training_set(const TrainingSet& ts) {
    if (ts.features.size() != ts.labels.size()) {
        throw ValidationError("training set: feature/label count mismatch");
    }
    if (ts.n_classes < 1) throw ValidationError("training set: class count must be >= 1");
    if (ts.features.size() < static_cast<std::size_t>(ts.n_classes)) {
        throw ValidationError("training set: fewer samples than classes");
    }
    if (ts.dim < 1) throw ValidationError("training set: feature dimension must be >= 1");
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        if (ts.features[i].dim != ts.dim) {
            throw ValidationError("training set: sample " + std::to_string(i) +
                                  " has dimension " + std::to_string(ts.features[i].dim) +
                                  ", expected " + std::to_string(ts.dim));
        }
        if (ts.labels[i] < 0 || ts.labels[i] >= ts.n_classes) {
            throw ValidationError("training set: sample " + std::to_string(i) +
                                  " has out-of-range label");
        }
    }
}

int argmax_class(const std::vector<double>& scores) {
    int best = 0;
    for (int c = 1; c < static_cast<int>(scores.size()); ++c) {
        if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

void Model::save(BinaryWriter& w) const {
    w.str(algorithm());
    w.u64(dim_);
    w.i32(n_classes_);
    w.str(hyperparams.is_null() ? std::string("{}") : hyperparams.dump());
    save_payload(w);
}

std::unique_ptr<Model> make_empty_model(const std::string& tag) {
    std::unique_ptr<Model> model;
    if (tag == "logreg") model = std::make_unique<LogisticRegressionModel>();
    else if (tag == "naive-bayes") model = std::make_unique<NaiveBayesModel>();
    else if (tag == "knn") model = std::make_unique<KnnModel>();
    else if (tag == "decision-tree") model = std::make_unique<DecisionTreeModel>();
    else if (tag == "bagged-trees") model = std::make_unique<TreeEnsembleModel>("bagged-trees");
    else if (tag == "random-forest") model = std::make_unique<TreeEnsembleModel>("random-forest");
    else if (tag == "ann") model = std::make_unique<AnnModel>();
    else if (tag == "svm") model = std::make_unique<SvmModel>();
    else if (tag == "gbt") model = std::make_unique<GbtModel>();
    else throw DataError("archive names unknown model algorithm '" + tag + "'");
    return model;
}

std::unique_ptr<Model> Model::load(BinaryReader& r) {
    std::string tag = r.str();
    auto model = make_empty_model(tag);
    model->dim_ = r.u64();
    model->n_classes_ = r.i32();
    model->hyperparams = nlohmann::json::parse(r.str());
    model->load_payload(r);
    return model;
}

}  // namespace prodcat
