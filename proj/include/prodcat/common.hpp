#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prodcat {

// Error taxonomy mirrored by the CLI exit codes: validation(1), data(2), numeric(3).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using DenseVector = std::vector<double>;

// Canonical feature representation: sorted sparse (index, value) pairs.
// Count/TF-IDF vectors are naturally sparse; dense embedding vectors are
// stored the same way with exact-zero entries dropped.
struct FeatureVector {
    std::size_t dim = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;

    // Appends an entry; indices must arrive in strictly increasing order.
    void push(std::uint32_t index, double value) {
        if (value == 0.0) return;
        entries.emplace_back(index, value);
    }

    double get(std::uint32_t index) const;
    double dot(const FeatureVector& other) const;
    double squared_norm() const;
    bool operator==(const FeatureVector& other) const {
        return dim == other.dim && entries == other.entries;
    }
};

FeatureVector to_feature(const DenseVector& values);
DenseVector to_dense(const FeatureVector& v);
double squared_distance(const FeatureVector& a, const FeatureVector& b);

}  // namespace prodcat
