#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "prodcat/archive.hpp"
#include "prodcat/corpus_gen.hpp"
#include "prodcat/pipeline.hpp"

using namespace prodcat;

namespace {

// exit codes: 0 ok, 1 validation, 2 data, 3 numeric
int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

struct CommonOverrides {
    std::string config_path;
    std::string data_path;
    std::string output_dir;
    std::int64_t seed = -1;
    int threads = 0;

    PipelineConfig load() const {
        PipelineConfig config = PipelineConfig::from_file(config_path);
        if (!data_path.empty()) config.data_path = data_path;
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        if (threads > 0) config.threads = threads;
        return config;
    }
};

void add_common(CLI::App* cmd, CommonOverrides& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline config file (JSON)")->required();
    cmd->add_option("--data", opts.data_path, "override data.path");
    cmd->add_option("--output-dir", opts.output_dir, "override output_dir");
    cmd->add_option("--seed", opts.seed, "override seed");
    cmd->add_option("--threads", opts.threads, "override worker thread count");
}

void print_diagnostics(const std::vector<std::string>& diagnostics) {
    for (const auto& d : diagnostics) std::cerr << "note: " << d << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"product-name classification pipeline"};
    app.require_subcommand(1);

    CommonOverrides train_opts, cv_opts, grid_opts;
    auto* train_cmd = app.add_subcommand("train", "fit on a train split, evaluate on the test split");
    add_common(train_cmd, train_opts);
    auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation");
    add_common(cv_cmd, cv_opts);
    auto* grid_cmd = app.add_subcommand("grid", "grid search over classifier hyperparameters");
    add_common(grid_cmd, grid_opts);

    std::string predict_archive, predict_input, predict_output = "predictions.csv";
    auto* predict_cmd = app.add_subcommand("predict", "label a CSV of product names");
    predict_cmd->add_option("--archive", predict_archive, "model archive")->required();
    predict_cmd->add_option("--input", predict_input, "input CSV")->required();
    predict_cmd->add_option("--output", predict_output, "output CSV");

    CorpusSpec corpus_spec;
    std::string corpus_output = "corpus.csv";
    auto* gen_cmd = app.add_subcommand("gen-corpus", "write a synthetic labeled product corpus");
    gen_cmd->add_option("--output", corpus_output, "output CSV path");
    gen_cmd->add_option("--classes", corpus_spec.classes, "number of categories (2..15)");
    gen_cmd->add_option("--size", corpus_spec.size, "number of records");
    gen_cmd->add_option("--seed", corpus_spec.seed, "generator seed");
    gen_cmd->add_option("--noise", corpus_spec.noise_rate, "cross-category noise rate in [0,1]");
    gen_cmd->add_option("--imbalance", corpus_spec.imbalance,
                        "per-class weights (default: mild built-in profile)");

    std::string inspect_archive, dump_embeddings;
    auto* inspect_cmd = app.add_subcommand("inspect", "print archive metadata");
    inspect_cmd->add_option("--archive", inspect_archive, "model archive")->required();
    inspect_cmd->add_option("--dump-embeddings", dump_embeddings,
                            "write the word vectors as text, one word per line");

    CLI11_PARSE(app, argc, argv);

    if (train_cmd->parsed()) {
        return guarded([&]() {
            auto outcome = run_train(train_opts.load());
            print_diagnostics(outcome.diagnostics);
            std::cout << outcome.report.to_text() << "archive: " << outcome.archive_path << "\n"
                      << "report: " << outcome.report_json_path << "\n";
            return 0;
        });
    }
    if (cv_cmd->parsed()) {
        return guarded([&]() {
            auto outcome = run_cv(cv_opts.load());
            for (const auto& w : outcome.result.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "folds: " << outcome.result.fold_reports.size() << "\n"
                      << "mean accuracy: " << outcome.result.mean_accuracy << " (std "
                      << outcome.result.std_accuracy << ")\n"
                      << "mean macro F1: " << outcome.result.mean_macro_f1 << "\n"
                      << "mean weighted F1: " << outcome.result.mean_weighted_f1 << "\n"
                      << "report: " << outcome.report_path << "\n";
            return 0;
        });
    }
    if (grid_cmd->parsed()) {
        return guarded([&]() {
            auto outcome = run_grid(grid_opts.load());
            const auto& best = outcome.result.results[outcome.result.best_index];
            std::cout << "grid points: " << outcome.result.points.size() << "\n"
                      << "best params: " << outcome.result.points[outcome.result.best_index].dump()
                      << "\n"
                      << "best mean accuracy: " << best.mean_accuracy << "\n"
                      << "details: " << outcome.runlog_path << "\n";
            return 0;
        });
    }
    if (predict_cmd->parsed()) {
        return guarded([&]() {
            auto outcome = run_predict(predict_archive, predict_input, predict_output);
            std::cout << "labeled " << outcome.rows << " rows -> " << outcome.output_path << "\n";
            return 0;
        });
    }
    if (gen_cmd->parsed()) {
        return guarded([&]() {
            generate_corpus_file(corpus_spec, corpus_output);
            std::cout << "wrote " << corpus_spec.size << " records (" << corpus_spec.classes
                      << " categories) -> " << corpus_output << "\n";
            return 0;
        });
    }
    if (inspect_cmd->parsed()) {
        return guarded([&]() {
            auto archive = ModelArchive::load(inspect_archive);
            nlohmann::json info = {
                {"version", ModelArchive::kVersion},
                {"labels", archive.labels.names},
                {"vectorization", to_string(archive.vectorizer.kind())},
                {"feature_dim", archive.vectorizer.dim()},
                {"algorithm", archive.model->algorithm()},
                {"classes", archive.model->class_count()},
                {"hyperparams", archive.model->hyperparams},
                {"config", archive.config},
            };
            std::cout << info.dump(2) << "\n";
            if (!dump_embeddings.empty()) {
                if (!is_embedding_kind(archive.vectorizer.kind())) {
                    throw ValidationError("archive holds no embedding table");
                }
                const auto& table = archive.vectorizer.table();
                std::ostringstream text;
                DenseVector vec;
                for (const auto& word : table.words()) {
                    table.lookup(word, vec);
                    text << word;
                    for (double v : vec) text << " " << v;
                    text << "\n";
                }
                write_file_atomic(dump_embeddings, text.str());
                std::cout << "embeddings -> " << dump_embeddings << "\n";
            }
            return 0;
        });
    }
    return 0;
}
