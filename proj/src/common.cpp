#include "prodcat/common.hpp"

#include <algorithm>
#include <cmath>

namespace prodcat {

double FeatureVector::get(std::uint32_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const auto& e, std::uint32_t i) { return e.first < i; });
    if (it != entries.end() && it->first == index) return it->second;
    return 0.0;
}

double FeatureVector::dot(const FeatureVector& other) const {
    double s = 0.0;
    auto a = entries.begin();
    auto b = other.entries.begin();
    while (a != entries.end() && b != other.entries.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            s += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return s;
}

double FeatureVector::squared_norm() const {
    double s = 0.0;
    for (const auto& [_, v] : entries) s += v * v;
    return s;
}

FeatureVector to_feature(const DenseVector& values) {
    FeatureVector f;
    f.dim = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        f.push(static_cast<std::uint32_t>(i), values[i]);
    }
    return f;
}

DenseVector to_dense(const FeatureVector& v) {
    DenseVector d(v.dim, 0.0);
    for (const auto& [i, x] : v.entries) d[i] = x;
    return d;
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    auto pa = a.entries.begin();
    auto pb = b.entries.begin();
    while (pa != a.entries.end() || pb != b.entries.end()) {
        if (pb == b.entries.end() || (pa != a.entries.end() && pa->first < pb->first)) {
            s += pa->second * pa->second;
            ++pa;
        } else if (pa == a.entries.end() || pb->first < pa->first) {
            s += pb->second * pb->second;
            ++pb;
        } else {
            double d = pa->second - pb->second;
            s += d * d;
            ++pa;
            ++pb;
        }
    }
    return s;
}

}  // namespace prodcat
