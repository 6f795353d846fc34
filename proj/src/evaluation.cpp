#include "prodcat/evaluation.hpp"

#include <sstream>

#include "prodcat/common.hpp"

namespace prodcat {

std::int64_t ConfusionMatrix::row_sum(int true_class) const {
    std::int64_t s = 0;
    for (int j = 0; j < n_classes; ++j) s += at(true_class, j);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(int predicted) const {
    std::int64_t s = 0;
    for (int i = 0; i < n_classes; ++i) s += at(i, predicted);
    return s;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t s = 0;
    for (std::int64_t c : counts) s += c;
    return s;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 int n_classes) {
    if (y_true.size() != y_pred.size() || y_true.empty()) {
        throw ValidationError("confusion_matrix: label vectors must be non-empty and equal length");
    }
    ConfusionMatrix cm;
    cm.n_classes = n_classes;
    cm.counts.assign(static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(n_classes), 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 || y_pred[i] >= n_classes) {
            throw ValidationError("confusion_matrix: label out of range at sample " +
                                  std::to_string(i));
        }
        ++cm.counts[static_cast<std::size_t>(y_true[i]) * static_cast<std::size_t>(n_classes) +
                    static_cast<std::size_t>(y_pred[i])];
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    std::int64_t total = cm.total();
    if (total <= 0) throw ValidationError("accuracy: empty confusion matrix");
    std::int64_t diag = 0;
    for (int c = 0; c < cm.n_classes; ++c) diag += cm.at(c, c);
    return static_cast<double>(diag) / static_cast<double>(total);
}

F1Scores f1_scores(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total <= 0) throw ValidationError("f1_scores: empty confusion matrix");
    const int n = cm.n_classes;
    F1Scores s;
    s.precision.resize(static_cast<std::size_t>(n));
    s.recall.resize(static_cast<std::size_t>(n));
    s.f1.resize(static_cast<std::size_t>(n));
    s.weights.resize(static_cast<std::size_t>(n));

    double macro = 0.0;
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (int c = 0; c < n; ++c) {
        const double tp = static_cast<double>(cm.at(c, c));
        const double col = static_cast<double>(cm.col_sum(c));
        const double row = static_cast<double>(cm.row_sum(c));
        const double precision = col > 0.0 ? tp / col : 0.0;
        const double recall = row > 0.0 ? tp / row : 0.0;
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        const double weight = 1.0 - row / static_cast<double>(total);
        s.precision[static_cast<std::size_t>(c)] = precision;
        s.recall[static_cast<std::size_t>(c)] = recall;
        s.f1[static_cast<std::size_t>(c)] = f1;
        s.weights[static_cast<std::size_t>(c)] = weight;
        macro += f1;
        weighted += weight * f1;
        weight_sum += weight;
    }
    s.macro_f1 = macro / static_cast<double>(n);
    s.weighted_f1 = weight_sum > 0.0 ? weighted / weight_sum : s.macro_f1;
    return s;
}

EvalReport evaluate_predictions(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                int n_classes) {
    EvalReport report;
    report.confusion = confusion_matrix(y_true, y_pred, n_classes);
    report.accuracy = accuracy(report.confusion);
    report.scores = f1_scores(report.confusion);
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json matrix = nlohmann::json::array();
    for (int i = 0; i < confusion.n_classes; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < confusion.n_classes; ++j) row.push_back(confusion.at(i, j));
        matrix.push_back(row);
    }
    return {{"confusion_matrix", matrix}, {"accuracy", accuracy},
            {"per_class_precision", scores.precision}, {"per_class_recall", scores.recall},
            {"per_class_f1", scores.f1},               {"class_weights", scores.weights},
            {"macro_f1", scores.macro_f1},             {"weighted_f1", scores.weighted_f1}};
}

std::string EvalReport::to_text(const std::vector<std::string>& class_names) const {
    std::ostringstream out;
    out.precision(6);
    out << "samples: " << confusion.total() << "\n";
    out << "accuracy: " << accuracy << "\n";
    out << "macro F1: " << scores.macro_f1 << "\n";
    out << "weighted F1: " << scores.weighted_f1 << "\n";
    out << "per-class (precision / recall / F1 / weight):\n";
    for (int c = 0; c < confusion.n_classes; ++c) {
        std::string name = c < static_cast<int>(class_names.size())
                               ? class_names[static_cast<std::size_t>(c)]
                               : "class " + std::to_string(c);
        out << "  " << name << ": " << scores.precision[static_cast<std::size_t>(c)] << " / "
            << scores.recall[static_cast<std::size_t>(c)] << " / "
            << scores.f1[static_cast<std::size_t>(c)] << " / "
            << scores.weights[static_cast<std::size_t>(c)] << "\n";
    }
    out << "confusion matrix (rows = true, columns = predicted):\n";
    for (int i = 0; i < confusion.n_classes; ++i) {
        out << " ";
        for (int j = 0; j < confusion.n_classes; ++j) out << " " << confusion.at(i, j);
        out << "\n";
    }
    return out.str();
}

}  // namespace prodcat
