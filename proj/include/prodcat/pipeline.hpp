#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prodcat/archive.hpp"
#include "prodcat/corpus.hpp"
#include "prodcat/evaluation.hpp"
#include "prodcat/tuning.hpp"

namespace prodcat {

// Declarative pipeline configuration, read from a JSON file. Validation is
// total: every invalid field is rejected with a field-level message before
// any data is touched.
struct PipelineConfig {
    std::string data_path;
    std::string text_column = "name";
    std::string label_column = "category";
    TokenizerConfig tokenizer;
    VectorizationConfig vectorization;
    ClassifierConfig classifier;
    double test_fraction = 0.2;
    bool stratified = true;
    int cv_folds = 10;
    bool cv_stratified = true;
    nlohmann::json grid;  // optional hyperparameter grid
    std::uint64_t seed = 42;
    int threads = 1;
    std::string output_dir = ".";

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_file(const std::string& path);
    nlohmann::json to_json() const;

    RunSpec run_spec() const;
};

// Built-in grids for the four grid-searched methods.
nlohmann::json default_grid_for(const std::string& algorithm);

struct IngestedData {
    std::vector<TokenizedDoc> docs;
    LabelDictionary labels;
    std::vector<std::string> diagnostics;
};

IngestedData load_and_ingest(const PipelineConfig& config);

struct TrainOutcome {
    EvalReport report;
    std::string archive_path;
    std::string report_json_path;
    std::string report_text_path;
    std::vector<std::string> diagnostics;
};

// ingest -> split -> fit vectorizer and classifier on the training split ->
// evaluate on the test split -> write archive + reports. Stage failures carry
// the stage name; outputs appear only after every stage succeeded.
TrainOutcome run_train(const PipelineConfig& config);

struct CvOutcome {
    CVResult result;
    std::string report_path;
    std::string runlog_path;
};

CvOutcome run_cv(const PipelineConfig& config);

struct GridOutcome {
    GridSearchResult result;
    std::string best_path;
    std::string runlog_path;
};

GridOutcome run_grid(const PipelineConfig& config);

struct PredictOutcome {
    std::size_t rows = 0;
    std::string output_path;
};

// One predicted label per input row, in row order; unseen words are fine
// (subword tables compose them, sparse vectorizers drop them).
PredictOutcome run_predict(const std::string& archive_path, const std::string& input_path,
                           const std::string& output_path);

}  // namespace prodcat
