// SPDX-License-Identifier: Apache-2.0
#include "pnembed/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "pnembed/errors.hpp"

namespace pnembed {

namespace {

// Lambda = 1/distance with zero (and denormal) distances capped, so the
// stability sums stay finite on duplicate points.
constexpr double kMinDistance = 1e-12;

double lambda_of(double distance) { return 1.0 / std::max(distance, kMinDistance); }

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine_distance: length mismatch");
    double nu = norm(u);
    double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) throw DegenerateVector("cosine distance of a zero vector");
    double d = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) d += u[j] * v[j];
    return std::clamp(1.0 - d / (nu * nv), 0.0, 2.0);
}

namespace {

Matrix pairwise_impl(const Matrix& x, bool parallel) {
    const std::int64_t n = static_cast<std::int64_t>(x.rows());
    for (std::int64_t i = 0; i < n; ++i) {
        if (norm(x.row(i)) == 0.0) {
            throw DegenerateVector("zero vector at row " + std::to_string(i));
        }
    }
    Matrix d(n, n, 0.0);
    // Each (i, j) entry is computed independently, so sharding rows across
    // threads cannot change any value.
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = i + 1; j < n; ++j) {
            d(i, j) = cosine_distance(x.row(i), x.row(j));
        }
    }
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < i; ++j) d(i, j) = d(j, i);
    }
    return d;
}

}  // namespace

Matrix pairwise_distances(const Matrix& x) { return pairwise_impl(x, true); }

Matrix pairwise_distances_serial(const Matrix& x) { return pairwise_impl(x, false); }

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

struct MstEdge {
    int u;
    int v;
    double w;
};

// Canonical MST over the mutual-reachability graph: Kruskal with edges
// ordered by (weight, min index, max index).
std::vector<MstEdge> mutual_reachability_mst(const Matrix& dist, const std::vector<double>& core) {
    const int n = static_cast<int>(dist.rows());
    std::vector<MstEdge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            edges.push_back({i, j, std::max({core[i], core[j], dist(i, j)})});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) {
        return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
    });

    UnionFind uf(n);
    std::vector<MstEdge> mst;
    mst.reserve(n - 1);
    for (const auto& e : edges) {
        int ru = uf.find(e.u);
        int rv = uf.find(e.v);
        if (ru == rv) continue;
        uf.parent[ru] = rv;
        mst.push_back(e);
        if (static_cast<int>(mst.size()) == n - 1) break;
    }
    return mst;
}

// Single-linkage dendrogram node. Points are 0..n-1; merge node n+e is
// created by the e-th MST edge (ascending weight).
struct HierarchyNode {
    int left = -1;
    int right = -1;
    double distance = 0.0;
    int size = 1;
};

std::vector<HierarchyNode> single_linkage(int n, const std::vector<MstEdge>& mst) {
    std::vector<HierarchyNode> nodes(2 * n - 1);
    for (int i = 0; i < n; ++i) nodes[i].size = 1;

    // Union-find tracking the current top node of each component.
    std::vector<int> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    int next = n;
    for (const auto& e : mst) {
        int a = find(e.u);
        int b = find(e.v);
        nodes[next].left = a;
        nodes[next].right = b;
        nodes[next].distance = e.w;
        nodes[next].size = nodes[a].size + nodes[b].size;
        parent[a] = next;
        parent[b] = next;
        ++next;
    }
    return nodes;
}

struct CondensedEntry {
    int parent;   // condensed cluster id
    int child;    // point index, or cluster id when child_size > 1
    double lambda;
    int size;
};

struct CondensedTree {
    std::vector<CondensedEntry> entries;
    int cluster_count = 0;  // cluster ids are 0 (root) .. cluster_count-1
};

// Walks the dendrogram top-down. A split where both sides reach
// min_cluster_size creates two new clusters; otherwise the surviving side
// keeps the cluster id and the small side's points fall out at the split's
// lambda.
CondensedTree condense(const std::vector<HierarchyNode>& nodes, int n, int min_cluster_size) {
    CondensedTree tree;
    tree.cluster_count = 1;

    const int root = 2 * n - 2;
    std::vector<std::pair<int, int>> stack;  // (hierarchy node, condensed cluster)
    stack.emplace_back(root, 0);

    auto emit_points = [&](int node, int cluster, double lambda) {
        std::vector<int> walk{node};
        while (!walk.empty()) {
            int cur = walk.back();
            walk.pop_back();
            if (cur < n) {
                tree.entries.push_back({cluster, cur, lambda, 1});
            } else {
                walk.push_back(nodes[cur].left);
                walk.push_back(nodes[cur].right);
            }
        }
    };

    while (!stack.empty()) {
        auto [node, cluster] = stack.back();
        stack.pop_back();
        if (node < n) {
            // A bare point directly under a cluster root can only appear when
            // n == 1; regular point exits are handled at their parent split.
            tree.entries.push_back({cluster, node, lambda_of(0.0), 1});
            continue;
        }

        double lambda = lambda_of(nodes[node].distance);
        int left = nodes[node].left;
        int right = nodes[node].right;
        int left_size = nodes[left].size;
        int right_size = nodes[right].size;

        bool left_big = left_size >= min_cluster_size;
        bool right_big = right_size >= min_cluster_size;

        if (left_big && right_big) {
            int left_cluster = tree.cluster_count++;
            int right_cluster = tree.cluster_count++;
            tree.entries.push_back({cluster, left_cluster, lambda, left_size});
            tree.entries.push_back({cluster, right_cluster, lambda, right_size});
            stack.emplace_back(left, left_cluster);
            stack.emplace_back(right, right_cluster);
        } else if (left_big) {
            emit_points(right, cluster, lambda);
            stack.emplace_back(left, cluster);
        } else if (right_big) {
            emit_points(left, cluster, lambda);
            stack.emplace_back(right, cluster);
        } else {
            emit_points(left, cluster, lambda);
            emit_points(right, cluster, lambda);
        }
    }
    return tree;
}

}  // namespace

std::vector<int> hdbscan_labels(const Matrix& x, int min_cluster_size, int min_samples) {
    const int n = static_cast<int>(x.rows());
    if (min_cluster_size < 2) throw std::invalid_argument("min_cluster_size must be >= 2");
    if (n < min_cluster_size) {
        throw TooFewPoints("need at least min_cluster_size points, got " + std::to_string(n));
    }
    if (min_samples <= 0) min_samples = min_cluster_size;
    min_samples = std::min(min_samples, n - 1);

    Matrix dist = pairwise_distances(x);

    // Core distance: distance to the min_samples-th nearest other point.
    std::vector<double> core(n);
    std::vector<double> others(n - 1);
    for (int i = 0; i < n; ++i) {
        int k = 0;
        for (int j = 0; j < n; ++j) {
            if (j != i) others[k++] = dist(i, j);
        }
        std::nth_element(others.begin(), others.begin() + (min_samples - 1), others.end());
        core[i] = others[min_samples - 1];
    }

    auto mst = mutual_reachability_mst(dist, core);
    auto hierarchy = single_linkage(n, mst);
    auto tree = condense(hierarchy, n, min_cluster_size);

    // Stability (excess of mass): sum over entries of (lambda - birth) * size.
    std::vector<double> birth(tree.cluster_count, 0.0);
    std::vector<int> parent_of(tree.cluster_count, -1);
    for (const auto& e : tree.entries) {
        if (e.size > 1) {
            birth[e.child] = e.lambda;
            parent_of[e.child] = e.parent;
        }
    }
    std::vector<double> stability(tree.cluster_count, 0.0);
    for (const auto& e : tree.entries) {
        stability[e.parent] += (e.lambda - birth[e.parent]) * e.size;
    }

    // Excess-of-mass selection, children before parents; the root cluster
    // (id 0) is never selectable.
    std::vector<std::vector<int>> cluster_children(tree.cluster_count);
    for (int c = 1; c < tree.cluster_count; ++c) cluster_children[parent_of[c]].push_back(c);

    std::vector<bool> selected(tree.cluster_count, false);
    for (int c = tree.cluster_count - 1; c >= 1; --c) {
        double subtree = 0.0;
        for (int child : cluster_children[c]) subtree += stability[child];
        if (!cluster_children[c].empty() && subtree > stability[c]) {
            stability[c] = subtree;
        } else {
            selected[c] = true;
            // Deselect all descendants.
            std::vector<int> walk = cluster_children[c];
            while (!walk.empty()) {
                int cur = walk.back();
                walk.pop_back();
                selected[cur] = false;
                walk.insert(walk.end(), cluster_children[cur].begin(), cluster_children[cur].end());
            }
        }
    }

    // Each point belongs to the unique selected cluster on its ancestor
    // chain, if any.
    std::vector<int> owner(n, -1);
    for (const auto& e : tree.entries) {
        if (e.size != 1) continue;
        int c = e.parent;
        while (c >= 0 && !selected[c]) c = parent_of[c];
        owner[e.child] = c;
    }

    // Normalize selected-cluster ids by smallest member point.
    std::vector<int> first_point(tree.cluster_count, n);
    for (int p = 0; p < n; ++p) {
        if (owner[p] >= 0) first_point[owner[p]] = std::min(first_point[owner[p]], p);
    }
    std::vector<int> order;
    for (int c = 0; c < tree.cluster_count; ++c) {
        if (selected[c] && first_point[c] < n) order.push_back(c);
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return first_point[a] < first_point[b]; });
    std::vector<int> relabel(tree.cluster_count, -1);
    for (std::size_t i = 0; i < order.size(); ++i) relabel[order[i]] = static_cast<int>(i);

    std::vector<int> labels(n, -1);
    for (int p = 0; p < n; ++p) {
        if (owner[p] >= 0) labels[p] = relabel[owner[p]];
    }
    return labels;
}

SilhouetteResult silhouette(const Matrix& x, const std::vector<int>& labels) {
    const int n = static_cast<int>(x.rows());
    if (labels.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("silhouette: labels/rows mismatch");
    }

    std::vector<int> clusters;
    for (int l : labels) {
        if (l >= 0 && std::find(clusters.begin(), clusters.end(), l) == clusters.end()) {
            clusters.push_back(l);
        }
    }
    if (clusters.size() < 2) {
        throw UndefinedSilhouette("silhouette needs at least 2 clusters, got " +
                                  std::to_string(clusters.size()));
    }
    std::sort(clusters.begin(), clusters.end());

    Matrix dist = pairwise_distances(x);
    std::vector<std::vector<int>> members(clusters.size());
    std::vector<int> cluster_pos(*std::max_element(clusters.begin(), clusters.end()) + 1, -1);
    for (std::size_t c = 0; c < clusters.size(); ++c) cluster_pos[clusters[c]] = static_cast<int>(c);
    for (int i = 0; i < n; ++i) {
        if (labels[i] >= 0) members[cluster_pos[labels[i]]].push_back(i);
    }

    SilhouetteResult result;
    result.per_point.assign(n, std::nullopt);
    double sum = 0.0;
    int counted = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[i] < 0) continue;
        int own = cluster_pos[labels[i]];
        double s = 0.0;
        if (members[own].size() > 1) {
            double a = 0.0;
            for (int j : members[own]) {
                if (j != i) a += dist(i, j);
            }
            a /= static_cast<double>(members[own].size() - 1);

            double b = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < members.size(); ++c) {
                if (static_cast<int>(c) == own) continue;
                double m = 0.0;
                for (int j : members[c]) m += dist(i, j);
                b = std::min(b, m / static_cast<double>(members[c].size()));
            }
            double denom = std::max(a, b);
            s = denom > 0.0 ? (b - a) / denom : 0.0;
        }
        result.per_point[i] = s;
        sum += s;
        ++counted;
    }
    result.mean = sum / static_cast<double>(counted);
    return result;
}

ClusterResult cluster_embeddings(const Matrix& x, int min_cluster_size, int min_samples) {
    ClusterResult result;
    result.labels = hdbscan_labels(x, min_cluster_size, min_samples);
    result.per_point_silhouette.assign(x.rows(), std::nullopt);
    try {
        SilhouetteResult s = silhouette(x, result.labels);
        result.per_point_silhouette = std::move(s.per_point);
        result.mean_silhouette = s.mean;
        result.silhouette_defined = true;
    } catch (const UndefinedSilhouette&) {
        result.silhouette_defined = false;
    }
    return result;
}

void write_cluster_csv(const std::vector<std::string>& ids, const ClusterResult& result,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "model_id,label,silhouette\n";
    out.precision(17);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << "," << result.labels[i] << ",";
        if (result.per_point_silhouette[i]) out << *result.per_point_silhouette[i];
        out << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pnembed
