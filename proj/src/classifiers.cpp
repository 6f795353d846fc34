#include "prodcat/classifiers.hpp"

#include <algorithm>

namespace prodcat {

namespace {

struct FieldSpec {
    const char* name;
    enum Kind { kNumber, kInteger, kBool, kString } kind;
    nlohmann::json default_value;
    double min = 0.0;
    bool has_min = false;
    std::vector<std::string> choices;
};

const std::vector<FieldSpec>& fields_for(const std::string& algorithm) {
    static const std::vector<FieldSpec> logreg = {
        {"l2", FieldSpec::kNumber, 1e-4, 0.0, true, {}},
        {"epochs", FieldSpec::kInteger, 500, 1.0, true, {}},
        {"learning_rate", FieldSpec::kNumber, 0.1, 1e-300, true, {}},
    };
    static const std::vector<FieldSpec> nb = {
        {"alpha", FieldSpec::kNumber, 1.0, 1e-300, true, {}},
    };
    static const std::vector<FieldSpec> knn = {
        {"k", FieldSpec::kInteger, 5, 1.0, true, {}},
        {"metric", FieldSpec::kString, "euclidean", 0.0, false, {"euclidean", "cosine"}},
    };
    static const std::vector<FieldSpec> tree = {
        {"max_depth", FieldSpec::kInteger, 30, 0.0, true, {}},
        {"min_samples_leaf", FieldSpec::kInteger, 1, 1.0, true, {}},
    };
    static const std::vector<FieldSpec> bagged = {
        {"n_trees", FieldSpec::kInteger, 100, 1.0, true, {}},
        {"max_depth", FieldSpec::kInteger, 30, 0.0, true, {}},
        {"min_samples_leaf", FieldSpec::kInteger, 1, 1.0, true, {}},
        {"criterion", FieldSpec::kString, "gini", 0.0, false, {"gini", "info_gain", "gain_ratio"}},
        {"bootstrap", FieldSpec::kBool, true, 0.0, false, {}},
        {"seed", FieldSpec::kInteger, nullptr, 0.0, true, {}},
    };
    static const std::vector<FieldSpec> forest = {
        {"n_trees", FieldSpec::kInteger, 100, 1.0, true, {}},
        {"mtry", FieldSpec::kInteger, 0, 0.0, true, {}},
        {"max_depth", FieldSpec::kInteger, 30, 0.0, true, {}},
        {"min_samples_leaf", FieldSpec::kInteger, 1, 1.0, true, {}},
        {"criterion", FieldSpec::kString, "gini", 0.0, false, {"gini", "info_gain", "gain_ratio"}},
        {"bootstrap", FieldSpec::kBool, true, 0.0, false, {}},
        {"seed", FieldSpec::kInteger, nullptr, 0.0, true, {}},
    };
    static const std::vector<FieldSpec> ann = {
        {"hidden_units", FieldSpec::kInteger, 64, 1.0, true, {}},
        {"epochs", FieldSpec::kInteger, 200, 1.0, true, {}},
        {"learning_rate", FieldSpec::kNumber, 0.1, 1e-300, true, {}},
        {"l2", FieldSpec::kNumber, 0.0, 0.0, true, {}},
        {"batch_size", FieldSpec::kInteger, 32, 1.0, true, {}},
        {"seed", FieldSpec::kInteger, nullptr, 0.0, true, {}},
    };
    static const std::vector<FieldSpec> svm = {
        {"C", FieldSpec::kNumber, 1.0, 1e-300, true, {}},
        {"gamma", FieldSpec::kNumber, 0.0, 0.0, true, {}},
        {"coef0", FieldSpec::kNumber, 0.0, 0.0, false, {}},
        {"tol", FieldSpec::kNumber, 1e-3, 1e-300, true, {}},
        {"max_iter", FieldSpec::kInteger, 10000, 1.0, true, {}},
    };
    static const std::vector<FieldSpec> gbt = {
        {"n_rounds", FieldSpec::kInteger, 100, 1.0, true, {}},
        {"learning_rate", FieldSpec::kNumber, 0.1, 0.0, true, {}},
        {"max_depth", FieldSpec::kInteger, 6, 0.0, true, {}},
        {"lambda", FieldSpec::kNumber, 1.0, 0.0, true, {}},
        {"min_samples_leaf", FieldSpec::kInteger, 1, 1.0, true, {}},
        {"seed", FieldSpec::kInteger, nullptr, 0.0, true, {}},
    };
    static const std::vector<FieldSpec> empty;

    if (algorithm == "logreg") return logreg;
    if (algorithm == "naive-bayes") return nb;
    if (algorithm == "knn") return knn;
    if (algorithm == "tree-gini" || algorithm == "tree-infogain" || algorithm == "tree-gainratio")
        return tree;
    if (algorithm == "bagged-trees") return bagged;
    if (algorithm == "random-forest") return forest;
    if (algorithm == "ann") return ann;
    if (algorithm == "svm-radial" || algorithm == "svm-sigmoid") return svm;
    if (algorithm == "gbt") return gbt;
    return empty;
}

SplitCriterion criterion_from(const std::string& name) {
    if (name == "gini") return SplitCriterion::kGini;
    if (name == "info_gain") return SplitCriterion::kInfoGain;
    return SplitCriterion::kGainRatio;
}

}  // namespace

const std::vector<std::string>& classifier_names() {
    static const std::vector<std::string> names = {
        "logreg",         "naive-bayes",  "knn",           "tree-gini", "tree-infogain",
        "tree-gainratio", "bagged-trees", "random-forest", "ann",       "svm-radial",
        "svm-sigmoid",    "gbt",
    };
    return names;
}

bool classifier_exists(const std::string& algorithm) {
    const auto& names = classifier_names();
    return std::find(names.begin(), names.end(), algorithm) != names.end();
}

nlohmann::json normalize_classifier_params(const std::string& algorithm,
                                           const nlohmann::json& params) {
    if (!classifier_exists(algorithm)) {
        throw ValidationError("classifier.algorithm: unknown algorithm '" + algorithm + "'");
    }
    if (!params.is_object() && !params.is_null()) {
        throw ValidationError("classifier.params: must be an object");
    }
    const auto& fields = fields_for(algorithm);
    nlohmann::json out = nlohmann::json::object();
    for (const auto& f : fields) {
        if (!f.default_value.is_null()) out[f.name] = f.default_value;
    }
    if (params.is_null()) return out;
    for (const auto& [key, value] : params.items()) {
        auto it = std::find_if(fields.begin(), fields.end(),
                               [&](const FieldSpec& f) { return key == f.name; });
        if (it == fields.end()) {
            throw ValidationError("classifier.params." + key + ": unknown parameter for '" +
                                  algorithm + "'");
        }
        const std::string where = "classifier.params." + key;
        switch (it->kind) {
            case FieldSpec::kNumber:
                if (!value.is_number())
                    throw ValidationError(where + ": expected a number");
                break;
            case FieldSpec::kInteger:
                if (!value.is_number_integer())
                    throw ValidationError(where + ": expected an integer");
                break;
            case FieldSpec::kBool:
                if (!value.is_boolean()) throw ValidationError(where + ": expected a boolean");
                break;
            case FieldSpec::kString: {
                if (!value.is_string()) throw ValidationError(where + ": expected a string");
                std::string s = value.get<std::string>();
                if (std::find(it->choices.begin(), it->choices.end(), s) == it->choices.end()) {
                    throw ValidationError(where + ": '" + s + "' is not a valid choice");
                }
                break;
            }
        }
        if (it->has_min && value.is_number() && value.get<double>() < it->min) {
            throw ValidationError(where + ": must be >= " + std::to_string(it->min));
        }
        out[key] = value;
    }
    return out;
}

std::unique_ptr<Model> train_classifier(const TrainingSet& ts, const std::string& algorithm,
                                        const nlohmann::json& params, std::uint64_t seed) {
    nlohmann::json p = normalize_classifier_params(algorithm, params);
    auto seed_of = [&]() -> std::uint64_t {
        if (p.contains("seed")) return p["seed"].get<std::uint64_t>();
        return seed;
    };

    if (algorithm == "logreg") {
        LogRegParams lp;
        lp.l2 = p["l2"];
        lp.epochs = p["epochs"];
        lp.learning_rate = p["learning_rate"];
        return train_logistic_regression(ts, lp);
    }
    if (algorithm == "naive-bayes") {
        return train_multinomial_nb(ts, {p["alpha"].get<double>()});
    }
    if (algorithm == "knn") {
        KnnParams kp;
        kp.k = p["k"];
        kp.metric = p["metric"] == "cosine" ? KnnMetric::kCosine : KnnMetric::kEuclidean;
        return train_knn(ts, kp);
    }
    if (algorithm == "tree-gini" || algorithm == "tree-infogain" ||
        algorithm == "tree-gainratio") {
        TreeParams tp;
        tp.criterion = algorithm == "tree-gini" ? SplitCriterion::kGini
                       : algorithm == "tree-infogain" ? SplitCriterion::kInfoGain
                                                      : SplitCriterion::kGainRatio;
        tp.max_depth = p["max_depth"];
        tp.min_samples_leaf = p["min_samples_leaf"];
        return train_decision_tree(ts, tp);
    }
    if (algorithm == "bagged-trees") {
        BaggingParams bp;
        bp.n_trees = p["n_trees"];
        bp.tree.criterion = criterion_from(p["criterion"]);
        bp.tree.max_depth = p["max_depth"];
        bp.tree.min_samples_leaf = p["min_samples_leaf"];
        bp.bootstrap = p["bootstrap"];
        bp.seed = seed_of();
        return train_bagged_trees(ts, bp);
    }
    if (algorithm == "random-forest") {
        RandomForestParams fp;
        fp.n_trees = p["n_trees"];
        fp.mtry = p["mtry"];
        fp.tree.criterion = criterion_from(p["criterion"]);
        fp.tree.max_depth = p["max_depth"];
        fp.tree.min_samples_leaf = p["min_samples_leaf"];
        fp.bootstrap = p["bootstrap"];
        fp.seed = seed_of();
        return train_random_forest(ts, fp);
    }
    if (algorithm == "ann") {
        AnnParams ap;
        ap.hidden_units = p["hidden_units"];
        ap.epochs = p["epochs"];
        ap.learning_rate = p["learning_rate"];
        ap.l2 = p["l2"];
        ap.batch_size = p["batch_size"];
        ap.seed = seed_of();
        return train_ann(ts, ap);
    }
    if (algorithm == "svm-radial" || algorithm == "svm-sigmoid") {
        SvmParams sp;
        sp.kernel = algorithm == "svm-radial" ? SvmKernel::kRadial : SvmKernel::kSigmoid;
        sp.C = p["C"];
        sp.gamma = p["gamma"];
        sp.coef0 = p["coef0"];
        sp.tol = p["tol"];
        sp.max_iter = p["max_iter"];
        return train_svm(ts, sp);
    }
    if (algorithm == "gbt") {
        GbtParams gp;
        gp.n_rounds = p["n_rounds"];
        gp.learning_rate = p["learning_rate"];
        gp.max_depth = p["max_depth"];
        gp.lambda = p["lambda"];
        gp.min_samples_leaf = p["min_samples_leaf"];
        gp.seed = seed_of();
        return train_gradient_boosted_trees(ts, gp);
    }
    throw ValidationError("classifier.algorithm: unknown algorithm '" + algorithm + "'");
}

}  // namespace prodcat
