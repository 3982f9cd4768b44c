// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pnembed/embedder.hpp"
#include "pnembed/matrix.hpp"
#include "pnembed/netgen.hpp"

namespace pnembed {

// Top-k most similar models to m (m excluded), sorted by descending cosine
// similarity, ties broken by model id.
struct Neighbor {
    std::string model_id;
    double similarity;
};
std::vector<Neighbor> query_nearest(const EmbeddingSpace& space, const std::string& m, int topk);

// Entrywise cosine similarity. task_model compares task input vectors
// against model vectors; the two live in different vector spaces, so treat
// those scores as relevance hints, not as model-to-model similarity.
Matrix task_similarity_matrix(const EmbeddingSpace& space);
Matrix task_model_matrix(const EmbeddingSpace& space);

struct ConfusionMatrix {
    std::vector<int> classes;
    std::vector<std::vector<std::int64_t>> counts;  // counts[true][predicted]
    double accuracy = 0.0;
    std::int64_t total = 0;
};

// Majority vote of the k nearest training rows under cosine distance.
// Neighbor order and votes tie-break on (distance, label), so predictions
// do not depend on training-row order.
int knn_predict(const Matrix& train_x, const std::vector<int>& train_labels,
                std::span<const double> query, int k);

// Stratified k-fold cross-validation of the k-NN classifier; fold
// assignment is seeded and round-robin per class.
ConfusionMatrix knn_cross_validate(const Matrix& x, const std::vector<int>& labels, int k,
                                   int folds, std::uint64_t seed);

// Rule fields usable as decision-tree features / purity keys. B appears
// twice: its ternary value and the {0} vs {1,2} binarization.
enum class RuleFeature { A, B, BBinary, C, D, E, F };
const char* to_string(RuleFeature feature);
int feature_value(const RuleConfig& cfg, RuleFeature feature);

struct RuleTreeNode {
    std::optional<RuleFeature> feature;  // nullopt = leaf
    std::vector<int> branch_values;
    std::vector<std::unique_ptr<RuleTreeNode>> children;
    int label = -1;      // leaf: majority cluster label
    double purity = 1.0; // leaf: majority fraction
    int count = 0;

    bool is_leaf() const { return !feature.has_value(); }
};

struct RuleTree {
    std::unique_ptr<RuleTreeNode> root;
    double overall_purity = 0.0;  // fraction of instances matching their leaf label

    std::optional<RuleFeature> root_feature() const;
    std::string to_text() const;
    std::string to_dot() const;
};

// Greedy Gini-impurity tree over the six rule fields predicting cluster
// labels, grown until leaves are pure or no split gains. Noise instances
// (label -1) are dropped. Throws SingleClass with fewer than 2 labels.
RuleTree fit_rule_tree(const std::vector<RuleConfig>& configs, const std::vector<int>& cluster_labels);

// Fraction of non-noise models whose selected field values equal the modal
// combination of their cluster. Returns 0 when nothing is clustered.
double cluster_rule_purity(const std::vector<int>& cluster_labels,
                           const std::vector<RuleConfig>& configs,
                           const std::vector<RuleFeature>& fields);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool reject = false;
};

// Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom.
// When both variances are zero: equal means report reject = false, unequal
// means reject with p = 0.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b, double alpha);

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path);
void write_matrix_csv(const Matrix& m, const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids, const std::string& path);

}  // namespace pnembed
