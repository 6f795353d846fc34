#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "prodcat/ann.hpp"
#include "prodcat/ensemble.hpp"
#include "prodcat/gbt.hpp"
#include "prodcat/knn.hpp"
#include "prodcat/linear.hpp"
#include "prodcat/model.hpp"
#include "prodcat/naive_bayes.hpp"
#include "prodcat/svm.hpp"
#include "prodcat/tree.hpp"

namespace prodcat {

// Name-based training dispatch used by the pipeline, cross-validation and
// grid search. Recognized algorithms: logreg, naive-bayes, knn, tree-gini,
// tree-infogain, tree-gainratio, bagged-trees, random-forest, ann, svm-radial,
// svm-sigmoid, gbt.
const std::vector<std::string>& classifier_names();
bool classifier_exists(const std::string& algorithm);

// Validates a params object against the algorithm's schema and fills in the
// defaults; unknown keys and out-of-domain values raise a ValidationError
// naming the field.
nlohmann::json normalize_classifier_params(const std::string& algorithm,
                                           const nlohmann::json& params);

// Seeded learners take their seed from the params object when present,
// otherwise from `seed`.
std::unique_ptr<Model> train_classifier(const TrainingSet& ts, const std::string& algorithm,
                                        const nlohmann::json& params, std::uint64_t seed);

}  // namespace prodcat
