#pragma once

#include "prodcat/model.hpp"

namespace prodcat {

enum class SvmKernel { kRadial, kSigmoid };

struct SvmParams {
    SvmKernel kernel = SvmKernel::kRadial;
    double gamma = 0.0;  // 0 = 1/dim
    double coef0 = 0.0;  // sigmoid only
    double C = 1.0;
    double tol = 1e-3;
    int max_iter = 10000;  // outer SMO sweeps per binary machine
};

double kernel_eval(const FeatureVector& a, const FeatureVector& b, SvmKernel kernel, double gamma,
                   double coef0);

// Sequential minimal optimization on the dual of one binary machine.
// Deterministic working-set selection; converged means every point satisfies
// the KKT conditions within tol.
struct SmoResult {
    std::vector<double> alpha;
    double b = 0.0;  // decision u(x) = sum alpha_i y_i K(x_i, x) - b
    bool converged = true;
};

SmoResult smo_solve(const std::vector<FeatureVector>& points, const std::vector<int>& y,
                    const SvmParams& params, double gamma);

// One binary machine of the one-vs-one reduction; positive decision votes
// class_a. One-sided pairs degenerate to a fixed vote.
struct BinarySvm {
    int class_a = 0;
    int class_b = 0;
    std::vector<FeatureVector> support;
    std::vector<double> coef;  // alpha_i * y_i
    double b = 0.0;

    double decision(const FeatureVector& x, SvmKernel kernel, double gamma, double coef0) const;
};

class SvmModel : public Model {
public:
    std::string algorithm() const override { return "svm"; }

    SvmKernel kernel = SvmKernel::kRadial;
    double gamma = 0.0;  // effective value
    double coef0 = 0.0;
    std::vector<BinarySvm> machines;
    bool convergence_warning = false;

    void set_shape(std::size_t dim, int n_classes) {
        dim_ = dim;
        n_classes_ = n_classes;
    }

protected:
    int predict_impl(const FeatureVector& x) const override;
    void save_payload(BinaryWriter& w) const override;
    void load_payload(BinaryReader& r) override;
};

std::unique_ptr<Model> train_svm(const TrainingSet& ts, const SvmParams& params);

}  // namespace prodcat
