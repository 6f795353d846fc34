#include "prodcat/tree.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/binary_io.hpp"

namespace prodcat {

namespace {

constexpr double kMinGain = 1e-12;

double impurity(const std::vector<std::int64_t>& counts, std::int64_t total,
                SplitCriterion criterion) {
    if (total <= 0) return 0.0;
    const double t = static_cast<double>(total);
    if (criterion == SplitCriterion::kGini) {
        double sq = 0.0;
        for (std::int64_t c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
        return 1.0 - sq / (t * t);
    }
    double h = 0.0;
    for (std::int64_t c : counts) {
        if (c <= 0) continue;
        double p = static_cast<double>(c) / t;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

double gini_impurity(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    return impurity(counts, total, SplitCriterion::kGini);
}

double entropy_impurity(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    return impurity(counts, total, SplitCriterion::kInfoGain);
}

ColumnStore ColumnStore::build(const std::vector<FeatureVector>& features, std::size_t dim) {
    ColumnStore store;
    store.n_rows = features.size();
    store.n_cols = dim;
    store.columns.resize(dim);
    for (std::size_t row = 0; row < features.size(); ++row) {
        for (const auto& [j, v] : features[row].entries) {
            store.columns[j].emplace_back(static_cast<std::uint32_t>(row), v);
        }
    }
    for (auto& col : store.columns) {
        std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second < b.second;
            return a.first < b.first;
        });
    }
    return store;
}

int tree_walk(const std::vector<TreeNode>& nodes, const FeatureVector& x) {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(at)];
        at = x.get(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right;
    }
    return at;
}

namespace {

// State shared by one classification-tree build.
struct ClassTreeBuilder {
    const ColumnStore& store;
    const std::vector<int>& labels;
    const std::vector<std::int64_t>& weights;
    int n_classes;
    const TreeParams& params;
    int mtry;  // 0 = all features
    Rng* rng;

    std::vector<TreeNode> nodes;
    std::vector<std::uint32_t> rows;      // active rows, grouped by node segment
    std::vector<std::int32_t> node_of;    // row -> current node id
    std::vector<std::uint8_t> side;       // partition scratch: 0 unset, 1 left, 2 right
    std::vector<std::uint32_t> feat_pool; // mtry sampling scratch

    struct Best {
        double gain = kMinGain;
        int feature = -1;
        double threshold = 0.0;
        bool found() const { return feature >= 0; }
    };

    void search_feature(std::uint32_t f, std::int32_t nid,
                        const std::vector<std::int64_t>& node_counts, std::int64_t node_weight,
                        double parent_impurity, Best& best) {
        const auto& column = store.columns[f];
        // In-node nonzero entries keep the column's value order.
        std::vector<std::pair<std::uint32_t, double>> present;
        std::vector<std::int64_t> nz_counts(static_cast<std::size_t>(n_classes), 0);
        std::int64_t nz_weight = 0;
        for (const auto& [row, value] : column) {
            if (node_of[row] != nid) continue;
            present.emplace_back(row, value);
            nz_counts[static_cast<std::size_t>(labels[row])] += weights[row];
            nz_weight += weights[row];
        }
        const std::int64_t zero_weight = node_weight - nz_weight;
        if (present.empty()) return;  // feature constant (all zero) inside node

        std::vector<std::int64_t> left(static_cast<std::size_t>(n_classes), 0);
        std::int64_t left_weight = 0;

        auto evaluate = [&](double lo, double hi) {
            const std::int64_t right_weight = node_weight - left_weight;
            if (left_weight < params.min_samples_leaf || right_weight < params.min_samples_leaf) {
                return;
            }
            double threshold = (lo + hi) / 2.0;
            const double wl = static_cast<double>(left_weight);
            const double wr = static_cast<double>(right_weight);
            const double wt = static_cast<double>(node_weight);

            std::vector<std::int64_t> right(static_cast<std::size_t>(n_classes));
            for (int c = 0; c < n_classes; ++c) {
                right[static_cast<std::size_t>(c)] = node_counts[static_cast<std::size_t>(c)] -
                                                     left[static_cast<std::size_t>(c)];
            }
            double score;
            if (params.criterion == SplitCriterion::kGainRatio) {
                double gain = parent_impurity -
                              (wl * impurity(left, left_weight, SplitCriterion::kInfoGain) +
                               wr * impurity(right, right_weight, SplitCriterion::kInfoGain)) /
                                  wt;
                if (gain <= kMinGain) return;
                double split_info =
                    -(wl / wt) * std::log2(wl / wt) - (wr / wt) * std::log2(wr / wt);
                score = gain / split_info;
            } else {
                score = parent_impurity - (wl * impurity(left, left_weight, params.criterion) +
                                           wr * impurity(right, right_weight, params.criterion)) /
                                              wt;
            }
            if (score > best.gain) {
                best.gain = score;
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
            }
        };

        std::size_t i = 0;
        bool zero_pending = zero_weight > 0;
        auto consume_group = [&](double value) {
            while (i < present.size() && present[i].second == value) {
                const auto row = present[i].first;
                left[static_cast<std::size_t>(labels[row])] += weights[row];
                left_weight += weights[row];
                ++i;
            }
        };

        // negative values, then the implicit zero block, then positives
        while (i < present.size() && present[i].second < 0.0) {
            double v = present[i].second;
            consume_group(v);
            double next;
            if (i < present.size() && present[i].second < 0.0) next = present[i].second;
            else if (zero_pending) next = 0.0;
            else if (i < present.size()) next = present[i].second;
            else break;  // all remaining mass is on this side; no boundary
            evaluate(v, next);
        }
        if (zero_pending) {
            // zero-block class counts: rows of the node absent from the column
            for (int c = 0; c < n_classes; ++c) {
                left[static_cast<std::size_t>(c)] += node_counts[static_cast<std::size_t>(c)] -
                                                     nz_counts[static_cast<std::size_t>(c)];
            }
            left_weight += zero_weight;
            if (i < present.size()) evaluate(0.0, present[i].second);
        }
        while (i < present.size()) {
            double v = present[i].second;
            consume_group(v);
            if (i < present.size()) evaluate(v, present[i].second);
        }
    }

    void build() {
        rows.clear();
        for (std::size_t r = 0; r < store.n_rows; ++r) {
            if (weights[r] > 0) rows.push_back(static_cast<std::uint32_t>(r));
        }
        node_of.assign(store.n_rows, -1);
        side.assign(store.n_rows, 0);
        for (auto r : rows) node_of[r] = 0;
        nodes.clear();
        nodes.emplace_back();

        struct Task {
            std::int32_t node;
            std::size_t begin, end;
            int depth;
        };
        std::vector<Task> stack;
        stack.push_back({0, 0, rows.size(), 0});

        std::vector<std::int64_t> node_counts(static_cast<std::size_t>(n_classes));

        while (!stack.empty()) {
            Task task = stack.back();
            stack.pop_back();

            std::fill(node_counts.begin(), node_counts.end(), 0);
            std::int64_t node_weight = 0;
            for (std::size_t s = task.begin; s < task.end; ++s) {
                const auto row = rows[s];
                node_counts[static_cast<std::size_t>(labels[row])] += weights[row];
                node_weight += weights[row];
            }
            int majority = 0;
            bool pure = true;
            for (int c = 1; c < n_classes; ++c) {
                if (node_counts[static_cast<std::size_t>(c)] >
                    node_counts[static_cast<std::size_t>(majority)]) {
                    majority = c;
                }
            }
            for (int c = 0; c < n_classes; ++c) {
                if (c != majority && node_counts[static_cast<std::size_t>(c)] > 0) pure = false;
            }

            TreeNode& node = nodes[static_cast<std::size_t>(task.node)];
            node.leaf_class = majority;
            if (pure || task.depth >= params.max_depth ||
                node_weight < 2 * static_cast<std::int64_t>(params.min_samples_leaf)) {
                continue;
            }

            double parent_impurity =
                impurity(node_counts, node_weight,
                         params.criterion == SplitCriterion::kGini ? SplitCriterion::kGini
                                                                   : SplitCriterion::kInfoGain);
            Best best;
            if (mtry > 0 && mtry < static_cast<int>(store.n_cols)) {
                if (feat_pool.size() != store.n_cols) {
                    feat_pool.resize(store.n_cols);
                    for (std::size_t j = 0; j < store.n_cols; ++j) {
                        feat_pool[j] = static_cast<std::uint32_t>(j);
                    }
                }
                // partial Fisher-Yates, then ascending scan order for tie-breaks
                for (int j = 0; j < mtry; ++j) {
                    std::size_t pick = static_cast<std::size_t>(j) +
                                       rng->below(store.n_cols - static_cast<std::size_t>(j));
                    std::swap(feat_pool[static_cast<std::size_t>(j)], feat_pool[pick]);
                }
                std::sort(feat_pool.begin(), feat_pool.begin() + mtry);
                for (int j = 0; j < mtry; ++j) {
                    search_feature(feat_pool[static_cast<std::size_t>(j)], task.node, node_counts,
                                   node_weight, parent_impurity, best);
                }
            } else {
                for (std::size_t f = 0; f < store.n_cols; ++f) {
                    search_feature(static_cast<std::uint32_t>(f), task.node, node_counts,
                                   node_weight, parent_impurity, best);
                }
            }
            if (!best.found()) continue;

            // partition the segment by the chosen split
            const auto& column = store.columns[static_cast<std::size_t>(best.feature)];
            for (const auto& [row, value] : column) {
                if (node_of[row] != task.node) continue;
                side[row] = value <= best.threshold ? 1 : 2;
            }
            const bool zero_goes_left = 0.0 <= best.threshold;
            auto mid_it = std::stable_partition(
                rows.begin() + static_cast<std::ptrdiff_t>(task.begin),
                rows.begin() + static_cast<std::ptrdiff_t>(task.end), [&](std::uint32_t row) {
                    return side[row] != 0 ? side[row] == 1 : zero_goes_left;
                });
            for (const auto& [row, value] : column) {
                (void)value;
                side[row] = 0;
            }
            std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());

            std::int32_t left_id = static_cast<std::int32_t>(nodes.size());
            nodes.emplace_back();
            std::int32_t right_id = static_cast<std::int32_t>(nodes.size());
            nodes.emplace_back();
            TreeNode& parent = nodes[static_cast<std::size_t>(task.node)];
            parent.feature = best.feature;
            parent.threshold = best.threshold;
            parent.left = left_id;
            parent.right = right_id;
            parent.leaf_class = -1;
            for (std::size_t s = task.begin; s < mid; ++s) node_of[rows[s]] = left_id;
            for (std::size_t s = mid; s < task.end; ++s) node_of[rows[s]] = right_id;
            stack.push_back({right_id, mid, task.end, task.depth + 1});
            stack.push_back({left_id, task.begin, mid, task.depth + 1});
        }
    }
};

}  // namespace

std::vector<TreeNode> grow_classification_tree(const ColumnStore& store,
                                               const std::vector<int>& labels, int n_classes,
                                               const std::vector<std::int64_t>& row_weights,
                                               const TreeParams& params, int mtry, Rng* rng) {
    ClassTreeBuilder builder{store, labels, row_weights, n_classes, params, mtry, rng,
                             {},    {},     {},          {},        {}};
    builder.build();
    return std::move(builder.nodes);
}

namespace {

struct RegTreeBuilder {
    const ColumnStore& store;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const RegressionTreeParams& params;

    std::vector<TreeNode> nodes;
    std::vector<std::uint32_t> rows;
    std::vector<std::int32_t> node_of;
    std::vector<std::uint8_t> side;

    struct Best {
        double gain = kMinGain;
        int feature = -1;
        double threshold = 0.0;
        bool found() const { return feature >= 0; }
    };

    static double leaf_objective(double g, double h, double lambda) {
        return g * g / (h + lambda);
    }

    void search_feature(std::uint32_t f, double node_g, double node_h, std::int64_t node_count,
                        std::int32_t nid, Best& best) {
        const auto& column = store.columns[f];
        std::vector<std::pair<std::uint32_t, double>> present;
        double nz_g = 0.0, nz_h = 0.0;
        std::int64_t nz_count = 0;
        for (const auto& [row, value] : column) {
            if (node_of[row] != nid) continue;
            present.emplace_back(row, value);
            nz_g += grad[row];
            nz_h += hess[row];
            ++nz_count;
        }
        if (present.empty()) return;
        const std::int64_t zero_count = node_count - nz_count;
        const double zero_g = node_g - nz_g;
        const double zero_h = node_h - nz_h;

        double left_g = 0.0, left_h = 0.0;
        std::int64_t left_count = 0;
        const double parent_obj = leaf_objective(node_g, node_h, params.lambda);

        auto evaluate = [&](double lo, double hi) {
            const std::int64_t right_count = node_count - left_count;
            if (left_count < params.min_samples_leaf || right_count < params.min_samples_leaf) {
                return;
            }
            double gain = 0.5 * (leaf_objective(left_g, left_h, params.lambda) +
                                 leaf_objective(node_g - left_g, node_h - left_h, params.lambda) -
                                 parent_obj);
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = static_cast<int>(f);
                best.threshold = (lo + hi) / 2.0;
            }
        };

        std::size_t i = 0;
        bool zero_pending = zero_count > 0;
        auto consume_group = [&](double value) {
            while (i < present.size() && present[i].second == value) {
                left_g += grad[present[i].first];
                left_h += hess[present[i].first];
                ++left_count;
                ++i;
            }
        };

        while (i < present.size() && present[i].second < 0.0) {
            double v = present[i].second;
            consume_group(v);
            double next;
            if (i < present.size() && present[i].second < 0.0) next = present[i].second;
            else if (zero_pending) next = 0.0;
            else if (i < present.size()) next = present[i].second;
            else break;
            evaluate(v, next);
        }
        if (zero_pending) {
            left_g += zero_g;
            left_h += zero_h;
            left_count += zero_count;
            if (i < present.size()) evaluate(0.0, present[i].second);
        }
        while (i < present.size()) {
            double v = present[i].second;
            consume_group(v);
            if (i < present.size()) evaluate(v, present[i].second);
        }
    }

    void build() {
        rows.resize(store.n_rows);
        for (std::size_t r = 0; r < store.n_rows; ++r) rows[r] = static_cast<std::uint32_t>(r);
        node_of.assign(store.n_rows, 0);
        side.assign(store.n_rows, 0);
        nodes.clear();
        nodes.emplace_back();

        struct Task {
            std::int32_t node;
            std::size_t begin, end;
            int depth;
        };
        std::vector<Task> stack;
        stack.push_back({0, 0, rows.size(), 0});

        while (!stack.empty()) {
            Task task = stack.back();
            stack.pop_back();

            double node_g = 0.0, node_h = 0.0;
            for (std::size_t s = task.begin; s < task.end; ++s) {
                node_g += grad[rows[s]];
                node_h += hess[rows[s]];
            }
            const std::int64_t node_count = static_cast<std::int64_t>(task.end - task.begin);

            TreeNode& node = nodes[static_cast<std::size_t>(task.node)];
            node.leaf_value = -node_g / (node_h + params.lambda);
            if (task.depth >= params.max_depth ||
                node_count < 2 * static_cast<std::int64_t>(params.min_samples_leaf)) {
                continue;
            }

            Best best;
            for (std::size_t f = 0; f < store.n_cols; ++f) {
                search_feature(static_cast<std::uint32_t>(f), node_g, node_h, node_count,
                               task.node, best);
            }
            if (!best.found()) continue;

            const auto& column = store.columns[static_cast<std::size_t>(best.feature)];
            for (const auto& [row, value] : column) {
                if (node_of[row] != task.node) continue;
                side[row] = value <= best.threshold ? 1 : 2;
            }
            const bool zero_goes_left = 0.0 <= best.threshold;
            auto mid_it = std::stable_partition(
                rows.begin() + static_cast<std::ptrdiff_t>(task.begin),
                rows.begin() + static_cast<std::ptrdiff_t>(task.end), [&](std::uint32_t row) {
                    return side[row] != 0 ? side[row] == 1 : zero_goes_left;
                });
            for (const auto& [row, value] : column) {
                (void)value;
                side[row] = 0;
            }
            std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());

            std::int32_t left_id = static_cast<std::int32_t>(nodes.size());
            nodes.emplace_back();
            std::int32_t right_id = static_cast<std::int32_t>(nodes.size());
            nodes.emplace_back();
            TreeNode& parent = nodes[static_cast<std::size_t>(task.node)];
            parent.feature = best.feature;
            parent.threshold = best.threshold;
            parent.left = left_id;
            parent.right = right_id;
            for (std::size_t s = task.begin; s < mid; ++s) node_of[rows[s]] = left_id;
            for (std::size_t s = mid; s < task.end; ++s) node_of[rows[s]] = right_id;
            stack.push_back({right_id, mid, task.end, task.depth + 1});
            stack.push_back({left_id, task.begin, mid, task.depth + 1});
        }
    }
};

}  // namespace

std::vector<TreeNode> grow_regression_tree(const ColumnStore& store,
                                           const std::vector<double>& gradients,
                                           const std::vector<double>& hessians,
                                           const RegressionTreeParams& params) {
    RegTreeBuilder builder{store, gradients, hessians, params, {}, {}, {}, {}};
    builder.build();
    return std::move(builder.nodes);
}

std::unique_ptr<Model> train_decision_tree(const TrainingSet& ts, const TreeParams& params) {
    validate_training_set(ts);
    if (params.max_depth < 0) throw ValidationError("tree: max_depth must be >= 0");
    if (params.min_samples_leaf < 1) throw ValidationError("tree: min_samples_leaf must be >= 1");

    auto store = ColumnStore::build(ts.features, ts.dim);
    std::vector<std::int64_t> weights(ts.features.size(), 1);
    auto model = std::make_unique<DecisionTreeModel>();
    model->set_shape(ts.dim, ts.n_classes);
    model->nodes = grow_classification_tree(store, ts.labels, ts.n_classes, weights, params,
                                            /*mtry=*/0, /*rng=*/nullptr);
    const char* criterion = params.criterion == SplitCriterion::kGini ? "gini"
                            : params.criterion == SplitCriterion::kInfoGain ? "info_gain"
                                                                            : "gain_ratio";
    model->hyperparams = {{"criterion", criterion},
                          {"max_depth", params.max_depth},
                          {"min_samples_leaf", params.min_samples_leaf}};
    return model;
}

int DecisionTreeModel::predict_impl(const FeatureVector& x) const {
    return nodes[static_cast<std::size_t>(tree_walk(nodes, x))].leaf_class;
}

void save_nodes(BinaryWriter& w, const std::vector<TreeNode>& nodes) {
    w.u64(nodes.size());
    for (const auto& n : nodes) {
        w.i32(n.feature);
        w.f64(n.threshold);
        w.i32(n.left);
        w.i32(n.right);
        w.i32(n.leaf_class);
        w.f64(n.leaf_value);
    }
}

std::vector<TreeNode> load_nodes(BinaryReader& r) {
    std::vector<TreeNode> nodes(r.u64());
    for (auto& n : nodes) {
        n.feature = r.i32();
        n.threshold = r.f64();
        n.left = r.i32();
        n.right = r.i32();
        n.leaf_class = r.i32();
        n.leaf_value = r.f64();
    }
    return nodes;
}

void DecisionTreeModel::save_payload(BinaryWriter& w) const { save_nodes(w, nodes); }

void DecisionTreeModel::load_payload(BinaryReader& r) { nodes = load_nodes(r); }

}  // namespace prodcat
