#include "prodcat/svm.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/binary_io.hpp"

namespace prodcat {

double kernel_eval(const FeatureVector& a, const FeatureVector& b, SvmKernel kernel, double gamma,
                   double coef0) {
    if (kernel == SvmKernel::kRadial) {
        return std::exp(-gamma * squared_distance(a, b));
    }
    return std::tanh(gamma * a.dot(b) + coef0);
}

namespace {

// Platt's SMO with an error cache and deterministic working-set selection.
// Decision value u(x) = sum alpha_i y_i K(x_i, x) - b.
struct SmoSolver {
    const std::vector<std::vector<double>>& kernel;
    const std::vector<int>& y;
    double C;
    double tol;
    int max_iter;

    std::vector<double> alpha;
    std::vector<double> error;  // u_i - y_i
    double b = 0.0;

    static constexpr double kEps = 1e-12;

    explicit SmoSolver(const std::vector<std::vector<double>>& k, const std::vector<int>& labels,
                       const SvmParams& params)
        : kernel(k), y(labels), C(params.C), tol(params.tol), max_iter(params.max_iter) {
        alpha.assign(y.size(), 0.0);
        error.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) error[i] = -static_cast<double>(y[i]);
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double alph1 = alpha[i1];
        const double alph2 = alpha[i2];
        const double y1 = y[i1], y2 = y[i2];
        const double e1 = error[i1], e2 = error[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(C, C + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph2 + alph1 - C);
            hi = std::min(C, alph2 + alph1);
        }
        if (lo >= hi) return false;

        const double k11 = kernel[i1][i1];
        const double k12 = kernel[i1][i2];
        const double k22 = kernel[i2][i2];
        const double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 0.0) {
            a2 = alph2 + y2 * (e1 - e2) / eta;
            a2 = std::clamp(a2, lo, hi);
        } else {
            // non-positive curvature (possible for the sigmoid kernel):
            // evaluate the objective at both clip bounds
            const double f1 = y1 * (e1 + b) - alph1 * k11 - s * alph2 * k12;
            const double f2 = y2 * (e2 + b) - s * alph1 * k12 - alph2 * k22;
            const double l1 = alph1 + s * (alph2 - lo);
            const double h1 = alph1 + s * (alph2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                                  s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                                  s * hi * h1 * k12;
            if (obj_lo < obj_hi - kEps) a2 = lo;
            else if (obj_lo > obj_hi + kEps) a2 = hi;
            else return false;
        }
        if (std::abs(a2 - alph2) < kEps * (a2 + alph2 + kEps)) return false;
        const double a1 = alph1 + s * (alph2 - a2);

        const double d1 = y1 * (a1 - alph1);
        const double d2 = y2 * (a2 - alph2);
        const double b1 = e1 + d1 * k11 + d2 * k12 + b;
        const double b2 = e2 + d1 * k12 + d2 * k22 + b;
        double b_new;
        if (a1 > 0.0 && a1 < C) b_new = b1;
        else if (a2 > 0.0 && a2 < C) b_new = b2;
        else b_new = (b1 + b2) / 2.0;

        for (std::size_t i = 0; i < y.size(); ++i) {
            error[i] += d1 * kernel[i1][i] + d2 * kernel[i2][i] - (b_new - b);
        }
        alpha[i1] = a1;
        alpha[i2] = a2;
        b = b_new;
        return true;
    }

    bool examine(std::size_t i2) {
        const double y2 = y[i2];
        const double alph2 = alpha[i2];
        const double e2 = error[i2];
        const double r2 = e2 * y2;
        if (!((r2 < -tol && alph2 < C) || (r2 > tol && alph2 > 0.0))) return false;

        // heuristic 1: largest |E1 - E2| over non-bound points
        std::size_t best = y.size();
        double best_gap = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (alpha[i] <= 0.0 || alpha[i] >= C) continue;
            double gap = std::abs(error[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < y.size() && take_step(best, i2)) return true;
        // heuristic 2: every non-bound point in index order
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (alpha[i] <= 0.0 || alpha[i] >= C) continue;
            if (take_step(i, i2)) return true;
        }
        // heuristic 3: the entire set
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (take_step(i, i2)) return true;
        }
        return false;
    }

    bool solve() {
        bool examine_all = true;
        int changed = 0;
        int iter = 0;
        while (changed > 0 || examine_all) {
            if (++iter > max_iter) return false;
            changed = 0;
            if (examine_all) {
                for (std::size_t i = 0; i < y.size(); ++i) changed += examine(i);
            } else {
                for (std::size_t i = 0; i < y.size(); ++i) {
                    if (alpha[i] > 0.0 && alpha[i] < C) changed += examine(i);
                }
            }
            if (examine_all) examine_all = false;
            else if (changed == 0) examine_all = true;
        }
        return true;
    }
};

}  // namespace

SmoResult smo_solve(const std::vector<FeatureVector>& points, const std::vector<int>& y,
                    const SvmParams& params, double gamma) {
    std::vector<std::vector<double>> kernel(points.size(), std::vector<double>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double k = kernel_eval(points[i], points[j], params.kernel, gamma, params.coef0);
            kernel[i][j] = k;
            kernel[j][i] = k;
        }
    }
    SmoSolver solver(kernel, y, params);
    SmoResult result;
    result.converged = solver.solve();
    result.alpha = std::move(solver.alpha);
    result.b = solver.b;
    return result;
}

double BinarySvm::decision(const FeatureVector& x, SvmKernel kernel, double gamma,
                           double coef0) const {
    double u = -b;
    for (std::size_t i = 0; i < support.size(); ++i) {
        u += coef[i] * kernel_eval(support[i], x, kernel, gamma, coef0);
    }
    return u;
}

std::unique_ptr<Model> train_svm(const TrainingSet& ts, const SvmParams& params) {
    validate_training_set(ts);
    if (!(params.C > 0.0)) throw ValidationError("svm: C must be > 0");
    if (!(params.tol > 0.0)) throw ValidationError("svm: tol must be > 0");
    if (params.gamma < 0.0) throw ValidationError("svm: gamma must be >= 0");

    auto model = std::make_unique<SvmModel>();
    model->set_shape(ts.dim, ts.n_classes);
    model->kernel = params.kernel;
    model->gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(ts.dim);
    model->coef0 = params.coef0;

    for (int a = 0; a < ts.n_classes; ++a) {
        for (int c = a + 1; c < ts.n_classes; ++c) {
            std::vector<FeatureVector> points;
            std::vector<int> y;
            for (std::size_t i = 0; i < ts.features.size(); ++i) {
                if (ts.labels[i] == a) {
                    points.push_back(ts.features[i]);
                    y.push_back(+1);
                } else if (ts.labels[i] == c) {
                    points.push_back(ts.features[i]);
                    y.push_back(-1);
                }
            }
            BinarySvm machine;
            machine.class_a = a;
            machine.class_b = c;
            bool has_pos = std::find(y.begin(), y.end(), +1) != y.end();
            bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
            if (!has_pos || !has_neg) {
                // one-sided pair (possible inside CV folds): fixed vote
                machine.b = has_pos ? -1.0 : 1.0;
                model->machines.push_back(std::move(machine));
                continue;
            }
            auto solved = smo_solve(points, y, params, model->gamma);
            if (!solved.converged) model->convergence_warning = true;
            machine.b = solved.b;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (solved.alpha[i] > 0.0) {
                    machine.support.push_back(points[i]);
                    machine.coef.push_back(solved.alpha[i] * y[i]);
                }
            }
            model->machines.push_back(std::move(machine));
        }
    }
    model->hyperparams = {{"kernel", params.kernel == SvmKernel::kRadial ? "radial" : "sigmoid"},
                          {"gamma", model->gamma},
                          {"coef0", params.coef0},
                          {"C", params.C},
                          {"tol", params.tol},
                          {"max_iter", params.max_iter}};
    return model;
}

int SvmModel::predict_impl(const FeatureVector& x) const {
    std::vector<double> votes(static_cast<std::size_t>(n_classes_), 0.0);
    for (const auto& machine : machines) {
        double u = machine.decision(x, kernel, gamma, coef0);
        ++votes[static_cast<std::size_t>(u >= 0.0 ? machine.class_a : machine.class_b)];
    }
    return argmax_class(votes);
}

void SvmModel::save_payload(BinaryWriter& w) const {
    w.u8(kernel == SvmKernel::kRadial ? 0 : 1);
    w.f64(gamma);
    w.f64(coef0);
    w.u8(convergence_warning ? 1 : 0);
    w.u64(machines.size());
    for (const auto& m : machines) {
        w.i32(m.class_a);
        w.i32(m.class_b);
        w.f64(m.b);
        w.u64(m.support.size());
        for (const auto& sv : m.support) w.feature(sv);
        w.f64_vec(m.coef);
    }
}

void SvmModel::load_payload(BinaryReader& r) {
    kernel = r.u8() == 0 ? SvmKernel::kRadial : SvmKernel::kSigmoid;
    gamma = r.f64();
    coef0 = r.f64();
    convergence_warning = r.u8() != 0;
    machines.resize(r.u64());
    for (auto& m : machines) {
        m.class_a = r.i32();
        m.class_b = r.i32();
        m.b = r.f64();
        m.support.resize(r.u64());
        for (auto& sv : m.support) sv = r.feature();
        m.coef = r.f64_vec();
    }
}

}  // namespace prodcat
