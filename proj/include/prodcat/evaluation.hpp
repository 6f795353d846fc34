#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace prodcat {

struct ConfusionMatrix {
    int n_classes = 0;
    std::vector<std::int64_t> counts;  // row-major; rows = true class, columns = predicted

    std::int64_t at(int true_class, int predicted) const {
        return counts[static_cast<std::size_t>(true_class) * static_cast<std::size_t>(n_classes) +
                      static_cast<std::size_t>(predicted)];
    }
    std::int64_t row_sum(int true_class) const;
    std::int64_t col_sum(int predicted) const;
    std::int64_t total() const;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 int n_classes);

double accuracy(const ConfusionMatrix& cm);

// Per-class precision/recall/F1 with the 0/0 -> 0 convention. The weighted
// mean uses w_c = 1 - class frequency on the evaluated set, normalized by the
// weight sum so balanced classes reduce it to the macro mean.
struct F1Scores {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<double> weights;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
};

F1Scores f1_scores(const ConfusionMatrix& cm);

struct EvalReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    F1Scores scores;

    nlohmann::json to_json() const;
    std::string to_text(const std::vector<std::string>& class_names = {}) const;
};

EvalReport evaluate_predictions(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                int n_classes);

}  // namespace prodcat
