#include "prodcat/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "prodcat/csv.hpp"
#include "prodcat/rng.hpp"

namespace prodcat {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw ValidationError(field + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                const std::vector<std::string>& allowed) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            field_error(where.empty() ? key : where + "." + key, "unknown field");
        }
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

double wall_seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Fn>
auto run_stage(const std::string& stage, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(stage + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(stage + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(stage + ": " + e.what());
    }
}

std::string path_join(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config: must be a JSON object");
    check_keys(j, "", {"data", "tokenizer", "vectorization", "classifier", "split", "cv", "grid",
                       "seed", "threads", "output_dir"});

    PipelineConfig config;
    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, "data", {"path", "text_column", "label_column"});
        config.data_path = get_or<std::string>(d, "path", "");
        config.text_column = get_or<std::string>(d, "text_column", "name");
        config.label_column = get_or<std::string>(d, "label_column", "category");
        if (config.text_column.empty()) field_error("data.text_column", "must be non-empty");
        if (config.label_column.empty()) field_error("data.label_column", "must be non-empty");
    }
    if (j.contains("tokenizer")) {
        const json& t = j.at("tokenizer");
        check_keys(t, "tokenizer", {"fold_diacritics"});
        if (t.contains("fold_diacritics") && !t.at("fold_diacritics").is_boolean()) {
            field_error("tokenizer.fold_diacritics", "expected a boolean");
        }
        config.tokenizer.fold_diacritics = get_or<bool>(t, "fold_diacritics", false);
    }
    if (j.contains("vectorization")) {
        const json& v = j.at("vectorization");
        check_keys(v, "vectorization",
                   {"kind", "max_features", "max_ngram", "dim", "window", "epochs",
                    "learning_rate", "min_count", "negative", "subword_min", "subword_max",
                    "buckets", "glove_x_max", "glove_alpha", "glove_epochs", "glove_adaptive"});
        std::string kind = get_or<std::string>(v, "kind", "tfidf");
        auto parsed = vectorization_from_string(kind);
        if (!parsed) field_error("vectorization.kind", "unknown kind '" + kind + "'");
        config.vectorization.kind = *parsed;
        config.vectorization.max_features = get_or<std::size_t>(v, "max_features", 3000);
        config.vectorization.max_ngram = get_or<int>(v, "max_ngram", 3);
        auto& emb = config.vectorization.embedding;
        emb.dim = get_or<int>(v, "dim", 50);
        emb.window = get_or<int>(v, "window", 4);
        emb.epochs = get_or<int>(v, "epochs", 5);
        emb.learning_rate = get_or<double>(v, "learning_rate", 0.05);
        emb.min_count = get_or<int>(v, "min_count", 1);
        emb.negative = get_or<int>(v, "negative", 0);
        auto& sub = config.vectorization.subword;
        sub.n_min = get_or<int>(v, "subword_min", 3);
        sub.n_max = get_or<int>(v, "subword_max", 6);
        sub.buckets = get_or<std::uint32_t>(v, "buckets", 1u << 18);
        auto& glove = config.vectorization.glove;
        glove.x_max = get_or<double>(v, "glove_x_max", 100.0);
        glove.alpha = get_or<double>(v, "glove_alpha", 0.75);
        glove.epochs = get_or<int>(v, "glove_epochs", 50);
        glove.adaptive = get_or<bool>(v, "glove_adaptive", true);
        glove.learning_rate = emb.learning_rate;
        glove.dim = emb.dim;

        if (config.vectorization.max_features < 1) {
            field_error("vectorization.max_features", "must be >= 1");
        }
        if (config.vectorization.max_ngram < 1) field_error("vectorization.max_ngram", "must be >= 1");
        if (emb.dim < 1) field_error("vectorization.dim", "must be >= 1");
        if (emb.window < 1) field_error("vectorization.window", "must be >= 1");
        if (emb.epochs < 1) field_error("vectorization.epochs", "must be >= 1");
        if (!(emb.learning_rate > 0.0)) field_error("vectorization.learning_rate", "must be > 0");
        if (emb.min_count < 1) field_error("vectorization.min_count", "must be >= 1");
        if (emb.negative < 0) field_error("vectorization.negative", "must be >= 0");
        if (sub.n_min < 1) field_error("vectorization.subword_min", "must be >= 1");
        if (sub.n_max < sub.n_min) field_error("vectorization.subword_max", "must be >= subword_min");
        if (sub.buckets < 1) field_error("vectorization.buckets", "must be >= 1");
        if (glove.epochs < 1) field_error("vectorization.glove_epochs", "must be >= 1");
        if (!(glove.x_max > 0.0)) field_error("vectorization.glove_x_max", "must be > 0");
        if (!(glove.alpha > 0.0)) field_error("vectorization.glove_alpha", "must be > 0");
    }
    if (j.contains("classifier")) {
        const json& c = j.at("classifier");
        check_keys(c, "classifier", {"algorithm", "params"});
        config.classifier.algorithm = get_or<std::string>(c, "algorithm", "logreg");
        config.classifier.params = c.contains("params") ? c.at("params") : json::object();
    }
    // normalization validates the algorithm name and the params schema
    config.classifier.params =
        normalize_classifier_params(config.classifier.algorithm, config.classifier.params);
    if (config.classifier.algorithm == "naive-bayes" &&
        is_embedding_kind(config.vectorization.kind)) {
        field_error("classifier.algorithm",
                    "naive-bayes needs nonnegative features; pair it with count or tfidf");
    }
    if (j.contains("split")) {
        const json& s = j.at("split");
        check_keys(s, "split", {"test_fraction", "stratified"});
        config.test_fraction = get_or<double>(s, "test_fraction", 0.2);
        config.stratified = get_or<bool>(s, "stratified", true);
        if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
            field_error("split.test_fraction", "must be in (0,1)");
        }
    }
    if (j.contains("cv")) {
        const json& c = j.at("cv");
        check_keys(c, "cv", {"folds", "stratified"});
        config.cv_folds = get_or<int>(c, "folds", 10);
        config.cv_stratified = get_or<bool>(c, "stratified", true);
        if (config.cv_folds < 2) field_error("cv.folds", "must be >= 2");
    }
    if (j.contains("grid")) {
        config.grid = j.at("grid");
        if (!config.grid.is_null()) ParamGrid::from_json(config.grid);  // structural check
    }
    config.seed = get_or<std::uint64_t>(j, "seed", 42);
    config.threads = get_or<int>(j, "threads", 1);
    if (config.threads < 1) field_error("threads", "must be >= 1");
    config.output_dir = get_or<std::string>(j, "output_dir", ".");
    return config;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("config file " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

json PipelineConfig::to_json() const {
    json v = {{"kind", to_string(vectorization.kind)},
              {"max_features", vectorization.max_features},
              {"max_ngram", vectorization.max_ngram},
              {"dim", vectorization.embedding.dim},
              {"window", vectorization.embedding.window},
              {"epochs", vectorization.embedding.epochs},
              {"learning_rate", vectorization.embedding.learning_rate},
              {"min_count", vectorization.embedding.min_count},
              {"negative", vectorization.embedding.negative},
              {"subword_min", vectorization.subword.n_min},
              {"subword_max", vectorization.subword.n_max},
              {"buckets", vectorization.subword.buckets},
              {"glove_x_max", vectorization.glove.x_max},
              {"glove_alpha", vectorization.glove.alpha},
              {"glove_epochs", vectorization.glove.epochs},
              {"glove_adaptive", vectorization.glove.adaptive}};
    return {{"data",
             {{"path", data_path}, {"text_column", text_column}, {"label_column", label_column}}},
            {"tokenizer", {{"fold_diacritics", tokenizer.fold_diacritics}}},
            {"vectorization", v},
            {"classifier", {{"algorithm", classifier.algorithm}, {"params", classifier.params}}},
            {"split", {{"test_fraction", test_fraction}, {"stratified", stratified}}},
            {"cv", {{"folds", cv_folds}, {"stratified", cv_stratified}}},
            {"grid", grid},
            {"seed", seed},
            {"threads", threads},
            {"output_dir", output_dir}};
}

RunSpec PipelineConfig::run_spec() const {
    RunSpec spec;
    spec.vectorization = vectorization;
    spec.classifier = classifier;
    spec.seed = seed;
    return spec;
}

json default_grid_for(const std::string& algorithm) {
    if (algorithm == "svm-radial" || algorithm == "svm-sigmoid") {
        return {{"C", {0.1, 1.0, 10.0}}, {"gamma", {0.01, 0.1, 1.0}}};
    }
    if (algorithm == "knn") return {{"k", {1, 3, 5, 7, 9}}};
    if (algorithm == "ann") {
        return {{"hidden_units", {32, 64, 128}}, {"learning_rate", {0.01, 0.1}}};
    }
    if (algorithm == "gbt") {
        return {{"n_rounds", {50, 100}}, {"max_depth", {4, 6}}, {"learning_rate", {0.1, 0.3}}};
    }
    return json();
}

IngestedData load_and_ingest(const PipelineConfig& config) {
    if (config.data_path.empty()) field_error("data.path", "must be set");
    auto loaded = load_csv(config.data_path, {config.text_column, config.label_column});
    auto ingested = ingest(loaded.records, config.tokenizer);
    IngestedData data;
    data.docs = std::move(ingested.docs);
    data.labels = std::move(ingested.labels);
    data.diagnostics = std::move(loaded.diagnostics);
    data.diagnostics.insert(data.diagnostics.end(), ingested.diagnostics.begin(),
                            ingested.diagnostics.end());
    if (data.docs.empty()) throw DataError("dataset is empty after ingestion");
    if (data.labels.size() < 2) throw DataError("dataset needs at least 2 distinct labels");
    return data;
}

namespace {

json run_record(const PipelineConfig& config, const char* command, double wall_time) {
    return {{"command", command},
            {"seed", config.seed},
            {"threads", config.threads},
            {"wall_time_seconds", wall_time}};
}

}  // namespace

TrainOutcome run_train(const PipelineConfig& config) {
    auto start = std::chrono::steady_clock::now();
    auto data = run_stage("ingest", [&]() { return load_and_ingest(config); });

    auto split_result = run_stage("split", [&]() {
        return split(data.docs, config.test_fraction, config.seed, config.stratified);
    });
    std::vector<TokenizedDoc> train_docs, test_docs;
    for (auto i : split_result.train) train_docs.push_back(data.docs[i]);
    for (auto i : split_result.test) test_docs.push_back(data.docs[i]);

    auto pipeline = run_stage("fit", [&]() {
        return fit_pipeline(config.run_spec(), train_docs, data.labels.size(), 0);
    });
    auto report = run_stage("evaluate", [&]() {
        return evaluate_pipeline(pipeline, test_docs, data.labels.size());
    });

    TrainOutcome outcome;
    outcome.report = report;
    outcome.diagnostics = data.diagnostics;
    outcome.archive_path = path_join(config.output_dir, "model.pnca");
    outcome.report_json_path = path_join(config.output_dir, "report.json");
    outcome.report_text_path = path_join(config.output_dir, "report.txt");

    run_stage("write-outputs", [&]() {
        try {
            ModelArchive archive;
            archive.config = config.to_json();
            archive.labels = data.labels;
            archive.vectorizer = std::move(pipeline.vectorizer);
            archive.model = std::move(pipeline.model);
            archive.save(outcome.archive_path);

            json report_json = report.to_json();
            report_json["diagnostics"] = data.diagnostics;
            report_json["labels"] = data.labels.names;
            report_json["run"] = run_record(config, "train", wall_seconds_since(start));
            write_file_atomic(outcome.report_json_path, report_json.dump(2) + "\n");
            write_file_atomic(outcome.report_text_path, report.to_text(data.labels.names));
        } catch (...) {
            // no partial output set: either all three files land or none
            std::remove(outcome.archive_path.c_str());
            std::remove(outcome.report_json_path.c_str());
            std::remove(outcome.report_text_path.c_str());
            throw;
        }
        return 0;
    });
    return outcome;
}

CvOutcome run_cv(const PipelineConfig& config) {
    auto start = std::chrono::steady_clock::now();
    auto data = run_stage("ingest", [&]() { return load_and_ingest(config); });
    auto plan = run_stage("folds", [&]() {
        return make_folds(data.docs, config.cv_folds, config.seed, config.cv_stratified);
    });
    auto result = run_stage("cross-validate", [&]() {
        return cross_validate(config.run_spec(), data.docs, plan, config.threads);
    });

    CvOutcome outcome;
    outcome.result = result;
    outcome.report_path = path_join(config.output_dir, "cv_report.json");
    outcome.runlog_path = path_join(config.output_dir, "cv_runlog.jsonl");

    run_stage("write-outputs", [&]() {
        json summary = {{"folds", config.cv_folds},
                        {"mean_accuracy", result.mean_accuracy},
                        {"std_accuracy", result.std_accuracy},
                        {"mean_macro_f1", result.mean_macro_f1},
                        {"std_macro_f1", result.std_macro_f1},
                        {"mean_weighted_f1", result.mean_weighted_f1},
                        {"std_weighted_f1", result.std_weighted_f1},
                        {"warnings", result.warnings},
                        {"run", run_record(config, "cv", wall_seconds_since(start))}};
        write_file_atomic(outcome.report_path, summary.dump(2) + "\n");

        std::ostringstream log;
        for (std::size_t f = 0; f < result.fold_reports.size(); ++f) {
            json record = {{"fold", f},
                           {"accuracy", result.fold_reports[f].accuracy},
                           {"macro_f1", result.fold_reports[f].scores.macro_f1},
                           {"weighted_f1", result.fold_reports[f].scores.weighted_f1}};
            log << record.dump() << "\n";
        }
        write_file_atomic(outcome.runlog_path, log.str());
        return 0;
    });
    return outcome;
}

GridOutcome run_grid(const PipelineConfig& config) {
    auto start = std::chrono::steady_clock::now();
    json grid_json = config.grid;
    if (grid_json.is_null()) {
        grid_json = default_grid_for(config.classifier.algorithm);
        if (grid_json.is_null()) {
            field_error("grid", "no grid given and no default grid exists for '" +
                                    config.classifier.algorithm + "'");
        }
    }
    auto grid = ParamGrid::from_json(grid_json);

    auto data = run_stage("ingest", [&]() { return load_and_ingest(config); });
    auto plan = run_stage("folds", [&]() {
        return make_folds(data.docs, config.cv_folds, config.seed, config.cv_stratified);
    });
    auto result = run_stage("grid-search", [&]() {
        return grid_search(config.run_spec(), grid, data.docs, plan, config.threads);
    });

    GridOutcome outcome;
    outcome.result = std::move(result);
    outcome.best_path = path_join(config.output_dir, "grid_best.json");
    outcome.runlog_path = path_join(config.output_dir, "grid_runlog.jsonl");

    run_stage("write-outputs", [&]() {
        const auto& best_cv = outcome.result.results[outcome.result.best_index];
        json best = {{"algorithm", config.classifier.algorithm},
                     {"params", outcome.result.best_spec.classifier.params},
                     {"mean_accuracy", best_cv.mean_accuracy},
                     {"mean_weighted_f1", best_cv.mean_weighted_f1},
                     {"run", run_record(config, "grid", wall_seconds_since(start))}};
        write_file_atomic(outcome.best_path, best.dump(2) + "\n");

        std::ostringstream log;
        for (std::size_t i = 0; i < outcome.result.points.size(); ++i) {
            const auto& cv = outcome.result.results[i];
            for (std::size_t f = 0; f < cv.fold_reports.size(); ++f) {
                json record = {{"point", i},
                               {"params", outcome.result.points[i]},
                               {"fold", f},
                               {"accuracy", cv.fold_reports[f].accuracy},
                               {"macro_f1", cv.fold_reports[f].scores.macro_f1},
                               {"weighted_f1", cv.fold_reports[f].scores.weighted_f1}};
                log << record.dump() << "\n";
            }
        }
        write_file_atomic(outcome.runlog_path, log.str());
        return 0;
    });
    return outcome;
}

PredictOutcome run_predict(const std::string& archive_path, const std::string& input_path,
                           const std::string& output_path) {
    auto archive = ModelArchive::load(archive_path);
    const std::string text_column = archive.config.contains("data")
                                        ? archive.config["data"].value("text_column", "name")
                                        : "name";
    TokenizerConfig tokenizer;
    if (archive.config.contains("tokenizer")) {
        tokenizer.fold_diacritics = archive.config["tokenizer"].value("fold_diacritics", false);
    }

    CsvTable input = read_csv(input_path);
    int col = input.column(text_column);
    if (col < 0) throw DataError("missing column '" + text_column + "' in " + input_path);

    CsvTable output;
    output.header = {text_column, "predicted"};
    for (const auto& row : input.rows) {
        const std::string& text = row[static_cast<std::size_t>(col)];
        TokenizedDoc doc;
        doc.tokens = tokenize(text, tokenizer);
        output.rows.push_back({text, archive.predict_label(doc)});
    }
    std::ostringstream buffer;
    write_csv(buffer, output);
    write_file_atomic(output_path, buffer.str());

    PredictOutcome outcome;
    outcome.rows = output.rows.size();
    outcome.output_path = output_path;
    return outcome;
}

}  // namespace prodcat
