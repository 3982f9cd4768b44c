// SPDX-License-Identifier: Apache-2.0
#include "pnembed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "pnembed/cluster.hpp"
#include "pnembed/errors.hpp"

namespace pnembed {

namespace {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    return 1.0 - cosine_distance(u, v);
}

}  // namespace

std::vector<Neighbor> query_nearest(const EmbeddingSpace& space, const std::string& m, int topk) {
    int query = space.vocab.require_model(m);
    int n = space.vocab.model_count();
    if (topk < 0 || topk > n - 1) {
        throw std::invalid_argument("topk must be in [0, n-1]");
    }

    std::vector<Neighbor> all;
    all.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        if (i == query) continue;
        all.push_back({space.vocab.model_ids[i],
                       cosine_similarity(space.models.row(query), space.models.row(i))});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.model_id < b.model_id;
    });
    all.resize(topk);
    return all;
}

Matrix task_similarity_matrix(const EmbeddingSpace& space) {
    int k = space.vocab.token_count();
    Matrix sim(k, k, 0.0);
    for (int i = 0; i < k; ++i) {
        sim(i, i) = 1.0;
        for (int j = i + 1; j < k; ++j) {
            double s = cosine_similarity(space.tasks_in.row(i), space.tasks_in.row(j));
            sim(i, j) = s;
            sim(j, i) = s;
        }
    }
    return sim;
}

Matrix task_model_matrix(const EmbeddingSpace& space) {
    int k = space.vocab.token_count();
    int n = space.vocab.model_count();
    Matrix sim(k, n, 0.0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) {
            sim(i, j) = cosine_similarity(space.tasks_in.row(i), space.models.row(j));
        }
    }
    return sim;
}

int knn_predict(const Matrix& train_x, const std::vector<int>& train_labels,
                std::span<const double> query, int k) {
    if (train_x.rows() == 0 || k < 1) throw std::invalid_argument("knn_predict: empty training set or k < 1");

    std::vector<std::pair<double, int>> scored;  // (distance, label)
    scored.reserve(train_x.rows());
    for (std::size_t i = 0; i < train_x.rows(); ++i) {
        scored.emplace_back(cosine_distance(query, train_x.row(i)), train_labels[i]);
    }
    std::size_t kk = std::min<std::size_t>(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + kk, scored.end());

    std::map<int, int> votes;
    for (std::size_t i = 0; i < kk; ++i) ++votes[scored[i].second];
    int best_label = -1;
    int best_count = -1;
    for (const auto& [label, count] : votes) {
        if (count > best_count) {
            best_count = count;
            best_label = label;
        }
    }
    return best_label;
}

ConfusionMatrix knn_cross_validate(const Matrix& x, const std::vector<int>& labels, int k,
                                   int folds, std::uint64_t seed) {
    const int n = static_cast<int>(x.rows());
    if (labels.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("knn_cross_validate: labels/rows mismatch");
    }
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");

    std::vector<int> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    // Stratified round-robin fold assignment, per class in sorted order.
    SeededRng rng(seed);
    std::vector<int> fold_of(n, -1);
    for (int cls : classes) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        if (static_cast<int>(members.size()) < folds) {
            throw StratifyError("class " + std::to_string(cls) + " has " +
                                std::to_string(members.size()) + " members, fewer than " +
                                std::to_string(folds) + " folds");
        }
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            fold_of[members[i]] = static_cast<int>(i % folds);
        }
    }

    std::map<int, int> class_pos;
    for (std::size_t c = 0; c < classes.size(); ++c) class_pos[classes[c]] = static_cast<int>(c);

    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));

    const int d = static_cast<int>(x.cols());
    for (int f = 0; f < folds; ++f) {
        Matrix train_x(0, 0);
        std::vector<int> train_labels;
        int train_rows = 0;
        for (int i = 0; i < n; ++i) train_rows += fold_of[i] != f;
        train_x = Matrix(train_rows, d);
        int r = 0;
        for (int i = 0; i < n; ++i) {
            if (fold_of[i] == f) continue;
            for (int j = 0; j < d; ++j) train_x(r, j) = x(i, j);
            train_labels.push_back(labels[i]);
            ++r;
        }
        for (int i = 0; i < n; ++i) {
            if (fold_of[i] != f) continue;
            int predicted = knn_predict(train_x, train_labels, x.row(i), k);
            ++cm.counts[class_pos[labels[i]]][class_pos[predicted]];
        }
    }

    std::int64_t correct = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) correct += cm.counts[c][c];
    cm.total = n;
    cm.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return cm;
}

const char* to_string(RuleFeature feature) {
    switch (feature) {
        case RuleFeature::A: return "A";
        case RuleFeature::B: return "B";
        case RuleFeature::BBinary: return "B01";
        case RuleFeature::C: return "C";
        case RuleFeature::D: return "D";
        case RuleFeature::E: return "E";
        case RuleFeature::F: return "F";
    }
    return "?";
}

int feature_value(const RuleConfig& cfg, RuleFeature feature) {
    switch (feature) {
        case RuleFeature::A: return cfg.a;
        case RuleFeature::B: return cfg.b;
        case RuleFeature::BBinary: return cfg.b == 0 ? 0 : 1;
        case RuleFeature::C: return cfg.c;
        case RuleFeature::D: return cfg.d;
        case RuleFeature::E: return cfg.e;
        case RuleFeature::F: return cfg.f;
    }
    return 0;
}

namespace {

double gini(const std::vector<int>& labels, const std::vector<int>& idx) {
    std::map<int, int> counts;
    for (int i : idx) ++counts[labels[i]];
    double g = 1.0;
    for (const auto& [label, count] : counts) {
        (void)label;
        double p = static_cast<double>(count) / static_cast<double>(idx.size());
        g -= p * p;
    }
    return g;
}

constexpr RuleFeature kTreeFeatures[] = {RuleFeature::A,       RuleFeature::BBinary,
                                         RuleFeature::B,       RuleFeature::C,
                                         RuleFeature::D,       RuleFeature::E,
                                         RuleFeature::F};

std::unique_ptr<RuleTreeNode> grow(const std::vector<RuleConfig>& configs,
                                   const std::vector<int>& labels, const std::vector<int>& idx) {
    auto node = std::make_unique<RuleTreeNode>();
    node->count = static_cast<int>(idx.size());

    std::map<int, int> label_counts;
    for (int i : idx) ++label_counts[labels[i]];
    int best_count = -1;
    for (const auto& [label, count] : label_counts) {
        if (count > best_count) {
            best_count = count;
            node->label = label;
        }
    }
    node->purity = static_cast<double>(best_count) / static_cast<double>(idx.size());
    if (label_counts.size() == 1) return node;

    double parent_gini = gini(labels, idx);
    double best_gain = 1e-12;
    RuleFeature best_feature = RuleFeature::A;
    std::vector<std::pair<int, std::vector<int>>> best_branches;

    for (RuleFeature feature : kTreeFeatures) {
        std::map<int, std::vector<int>> branches;
        for (int i : idx) branches[feature_value(configs[i], feature)].push_back(i);
        if (branches.size() < 2) continue;

        double child_gini = 0.0;
        for (const auto& [value, members] : branches) {
            (void)value;
            child_gini += gini(labels, members) * static_cast<double>(members.size()) /
                          static_cast<double>(idx.size());
        }
        double gain = parent_gini - child_gini;
        if (gain > best_gain) {
            best_gain = gain;
            best_feature = feature;
            best_branches.assign(branches.begin(), branches.end());
        }
    }
    if (best_branches.empty()) return node;  // no useful split

    node->feature = best_feature;
    for (auto& [value, members] : best_branches) {
        node->branch_values.push_back(value);
        node->children.push_back(grow(configs, labels, members));
    }
    return node;
}

double leaf_weighted_purity(const RuleTreeNode& node) {
    if (node.is_leaf()) return node.purity * node.count;
    double sum = 0.0;
    for (const auto& child : node.children) sum += leaf_weighted_purity(*child);
    return sum;
}

void render_text(const RuleTreeNode& node, int depth, std::string& out) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    if (node.is_leaf()) {
        std::ostringstream line;
        line << indent << "cluster " << node.label << " (purity " << node.purity << ", n="
             << node.count << ")\n";
        out += line.str();
        return;
    }
    out += indent + "split on " + to_string(*node.feature) + "\n";
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        std::string value = std::to_string(node.branch_values[i]);
        if (*node.feature == RuleFeature::BBinary && node.branch_values[i] == 1) value = "1,2";
        out += indent + "= " + value + ":\n";
        render_text(*node.children[i], depth + 1, out);
    }
}

void render_dot(const RuleTreeNode& node, int& next_id, int my_id, std::string& out) {
    std::ostringstream decl;
    if (node.is_leaf()) {
        decl << "  n" << my_id << " [shape=box,label=\"C" << node.label << "\\nn=" << node.count
             << "\\npurity=" << node.purity << "\"];\n";
    } else {
        decl << "  n" << my_id << " [label=\"" << to_string(*node.feature) << "\"];\n";
    }
    out += decl.str();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        int child_id = next_id++;
        render_dot(*node.children[i], next_id, child_id, out);
        std::string value = std::to_string(node.branch_values[i]);
        if (*node.feature == RuleFeature::BBinary && node.branch_values[i] == 1) value = "1,2";
        out += "  n" + std::to_string(my_id) + " -> n" + std::to_string(child_id) + " [label=\"" +
               value + "\"];\n";
    }
}

}  // namespace

std::optional<RuleFeature> RuleTree::root_feature() const {
    return root ? root->feature : std::nullopt;
}

std::string RuleTree::to_text() const {
    std::string out;
    if (root) render_text(*root, 0, out);
    return out;
}

std::string RuleTree::to_dot() const {
    std::string out = "digraph rule_tree {\n";
    if (root) {
        int next_id = 1;
        render_dot(*root, next_id, 0, out);
    }
    out += "}\n";
    return out;
}

RuleTree fit_rule_tree(const std::vector<RuleConfig>& configs,
                       const std::vector<int>& cluster_labels) {
    if (configs.size() != cluster_labels.size()) {
        throw std::invalid_argument("fit_rule_tree: configs/labels length mismatch");
    }
    std::vector<int> idx;
    for (std::size_t i = 0; i < cluster_labels.size(); ++i) {
        if (cluster_labels[i] >= 0) idx.push_back(static_cast<int>(i));
    }
    std::vector<int> distinct;
    for (int i : idx) {
        if (std::find(distinct.begin(), distinct.end(), cluster_labels[i]) == distinct.end()) {
            distinct.push_back(cluster_labels[i]);
        }
    }
    if (distinct.size() < 2) {
        throw SingleClass("rule tree needs at least 2 distinct cluster labels");
    }

    RuleTree tree;
    tree.root = grow(configs, cluster_labels, idx);
    tree.overall_purity = leaf_weighted_purity(*tree.root) / static_cast<double>(idx.size());
    return tree;
}

double cluster_rule_purity(const std::vector<int>& cluster_labels,
                           const std::vector<RuleConfig>& configs,
                           const std::vector<RuleFeature>& fields) {
    if (configs.size() != cluster_labels.size()) {
        throw std::invalid_argument("cluster_rule_purity: configs/labels length mismatch");
    }
    std::map<int, std::map<std::vector<int>, int>> combos;  // cluster -> combo -> count
    int total = 0;
    for (std::size_t i = 0; i < cluster_labels.size(); ++i) {
        if (cluster_labels[i] < 0) continue;
        std::vector<int> combo;
        combo.reserve(fields.size());
        for (RuleFeature f : fields) combo.push_back(feature_value(configs[i], f));
        ++combos[cluster_labels[i]][std::move(combo)];
        ++total;
    }
    if (total == 0) return 0.0;

    int matched = 0;
    for (const auto& [cluster, table] : combos) {
        (void)cluster;
        int mode = 0;
        for (const auto& [combo, count] : table) {
            (void)combo;
            mode = std::max(mode, count);
        }
        matched += mode;
    }
    return static_cast<double>(matched) / static_cast<double>(total);
}

TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("welch_t_test needs at least 2 samples per group");
    }
    auto mean_var = [](const std::vector<double>& v) {
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return std::pair{mean, var};
    };
    auto [ma, va] = mean_var(a);
    auto [mb, vb] = mean_var(b);

    double sa = va / static_cast<double>(a.size());
    double sb = vb / static_cast<double>(b.size());
    double se2 = sa + sb;

    TTestResult result;
    if (se2 == 0.0) {
        if (ma == mb) return result;  // t = 0, p = 1, keep the null
        result.t = ma > mb ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
        result.p = 0.0;
        result.reject = alpha > 0.0;
        return result;
    }

    result.t = (ma - mb) / std::sqrt(se2);
    double df = se2 * se2 /
                (sa * sa / static_cast<double>(a.size() - 1) +
                 sb * sb / static_cast<double>(b.size() - 1));
    boost::math::students_t dist(df);
    result.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t)));
    result.reject = result.p < alpha;
    return result;
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "true\\pred";
    for (int c : cm.classes) out << "," << c;
    out << "\n";
    for (std::size_t i = 0; i < cm.classes.size(); ++i) {
        out << cm.classes[i];
        for (std::size_t j = 0; j < cm.classes.size(); ++j) out << "," << cm.counts[i][j];
        out << "\n";
    }
    out << "accuracy," << cm.accuracy << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_matrix_csv(const Matrix& m, const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.precision(17);
    out << "id";
    for (const auto& c : col_ids) out << "," << c;
    out << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << row_ids[i];
        for (std::size_t j = 0; j < m.cols(); ++j) out << "," << m(i, j);
        out << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pnembed
