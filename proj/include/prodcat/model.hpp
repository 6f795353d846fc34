#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "prodcat/common.hpp"

namespace prodcat {

class BinaryReader;
class BinaryWriter;

struct TrainingSet {
    std::vector<FeatureVector> features;
    std::vector<int> labels;
    int n_classes = 0;
    std::size_t dim = 0;
};

void validate_training_set(const TrainingSet& ts);

// Tie-break rule shared by every learner: highest score, lowest class index.
int argmax_class(const std::vector<double>& scores);

// Uniform train/predict contract for every classifier. Models serialize to
// the archive through a tag + payload scheme and reload losslessly.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string algorithm() const = 0;

    int predict(const FeatureVector& x) const {
        if (x.dim != dim_) {
            throw ValidationError("predict: input has dimension " + std::to_string(x.dim) +
                                  ", model expects " + std::to_string(dim_));
        }
        return predict_impl(x);
    }

    std::size_t feature_dim() const { return dim_; }
    int class_count() const { return n_classes_; }

    nlohmann::json hyperparams;

    void save(BinaryWriter& w) const;
    static std::unique_ptr<Model> load(BinaryReader& r);

protected:
    virtual int predict_impl(const FeatureVector& x) const = 0;
    virtual void save_payload(BinaryWriter& w) const = 0;
    virtual void load_payload(BinaryReader& r) = 0;

    std::size_t dim_ = 0;
    int n_classes_ = 0;

    friend std::unique_ptr<Model> make_empty_model(const std::string& tag);
};

}  // namespace prodcat
