#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "prodcat/classifiers.hpp"
#include "prodcat/corpus.hpp"
#include "prodcat/evaluation.hpp"
#include "prodcat/vectorizer.hpp"

namespace prodcat {

struct ClassifierConfig {
    std::string algorithm = "logreg";
    nlohmann::json params = nlohmann::json::object();
};

// One (vectorization, classifier, seed) configuration.
struct RunSpec {
    VectorizationConfig vectorization;
    ClassifierConfig classifier;
    std::uint64_t seed = 0;
};

struct FittedPipeline {
    FittedVectorizer vectorizer;
    std::unique_ptr<Model> model;
};

// Fits the vectorizer and classifier on the given documents only. All
// randomness derives from mix_seed(spec.seed, seed_stream), so fitted
// artifacts are bit-independent of anything outside train_docs.
FittedPipeline fit_pipeline(const RunSpec& spec, const std::vector<TokenizedDoc>& train_docs,
                            int n_classes, std::uint64_t seed_stream);

EvalReport evaluate_pipeline(const FittedPipeline& pipeline,
                             const std::vector<TokenizedDoc>& test_docs, int n_classes);

struct CVResult {
    std::vector<EvalReport> fold_reports;
    double mean_accuracy = 0.0, std_accuracy = 0.0;
    double mean_macro_f1 = 0.0, std_macro_f1 = 0.0;
    double mean_weighted_f1 = 0.0, std_weighted_f1 = 0.0;
    std::vector<std::string> warnings;  // e.g. folds lacking a class
};

// Per fold: refit vectorizer and classifier on the other k-1 folds, evaluate
// on the held-out fold. Folds may run in parallel; numbers are identical to
// sequential execution.
CVResult cross_validate(const RunSpec& spec, const std::vector<TokenizedDoc>& docs,
                        const FoldPlan& plan, int threads = 1);

// Ordered hyperparameter grid; enumeration is row-major over the declared
// order with the first entry varying slowest.
struct ParamGrid {
    std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;

    static ParamGrid from_json(const nlohmann::json& grid);  // keys in alphabetical order
    std::size_t size() const;
    nlohmann::json point(std::size_t index) const;  // parameter overrides for one grid point
};

struct GridSearchResult {
    std::size_t best_index = 0;
    RunSpec best_spec;
    std::vector<nlohmann::json> points;
    std::vector<CVResult> results;
};

GridSearchResult grid_search(const RunSpec& base, const ParamGrid& grid,
                             const std::vector<TokenizedDoc>& docs, const FoldPlan& plan,
                             int threads = 1);

}  // namespace prodcat
