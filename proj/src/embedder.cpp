// SPDX-License-Identifier: Apache-2.0
#include "pnembed/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "pnembed/errors.hpp"

namespace pnembed {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// softplus(x) = log(1 + e^x) = -log sigma(-x), overflow-safe.
double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

void check_compatible(const EmbeddingSpace& space, const Corpus& corpus) {
    if (space.vocab.tokens != corpus.vocab.tokens ||
        space.vocab.model_ids != corpus.vocab.model_ids) {
        throw std::invalid_argument("embedding space was not built from this corpus");
    }
}

double lr_at(const TrainConfig& cfg, std::int64_t step, std::int64_t total_steps) {
    if (total_steps <= 1) return cfg.lr_start;
    double f = static_cast<double>(step) / static_cast<double>(total_steps - 1);
    return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * f;
}

}  // namespace

namespace detail {

UnigramSampler::UnigramSampler(const Vocabulary& vocab) {
    cumulative_.reserve(vocab.tokens.size());
    for (std::int64_t count : vocab.token_target_count) {
        total_ += std::pow(static_cast<double>(count), 0.75);
        cumulative_.push_back(total_);
    }
}

double UnigramSampler::weight(int token) const {
    return cumulative_[token] - (token > 0 ? cumulative_[token - 1] : 0.0);
}

int UnigramSampler::draw(SeededRng& rng, int exclude) const {
    if (cumulative_.size() < 2) throw CannotSample("vocabulary has fewer than 2 tokens");
    double available = total_;
    if (exclude >= 0) available -= weight(exclude);
    if (!(available > 0.0)) {
        throw CannotSample("no token with positive sampling weight besides the excluded one");
    }
    while (true) {
        double u = rng.uniform01() * total_;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        int idx = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                            cumulative_.size() - 1));
        if (idx != exclude && weight(idx) > 0.0) return idx;
    }
}

double sgd_step_indexed(EmbeddingSpace& space, int source, int target, int model,
                        std::span<const int> negatives, double lr) {
    const int d = space.dim;
    auto task_row = space.tasks_in.row(source);
    auto model_row = space.models.row(model);

    double h[64];
    for (int j = 0; j < d; ++j) h[j] = 0.5 * (task_row[j] + model_row[j]);

    // Phase 1: scores and gradients at the current parameters.
    double grad_h[64] = {0};
    double loss = 0.0;

    auto pos_row = space.tasks_out.row(target);
    double z_pos = dot({h, static_cast<std::size_t>(d)}, pos_row);
    loss += softplus(-z_pos);
    double g_pos = sigmoid(z_pos) - 1.0;
    for (int j = 0; j < d; ++j) grad_h[j] += g_pos * pos_row[j];

    double g_neg[32];
    for (std::size_t n = 0; n < negatives.size(); ++n) {
        auto neg_row = space.tasks_out.row(negatives[n]);
        double z = dot({h, static_cast<std::size_t>(d)}, neg_row);
        loss += softplus(z);
        g_neg[n] = sigmoid(z);
        for (int j = 0; j < d; ++j) grad_h[j] += g_neg[n] * neg_row[j];
    }

    // Phase 2: apply the updates (h stays fixed, so repeated output rows
    // accumulate their gradient contributions exactly).
    for (int j = 0; j < d; ++j) pos_row[j] -= lr * g_pos * h[j];
    for (std::size_t n = 0; n < negatives.size(); ++n) {
        auto neg_row = space.tasks_out.row(negatives[n]);
        for (int j = 0; j < d; ++j) neg_row[j] -= lr * g_neg[n] * h[j];
    }
    for (int j = 0; j < d; ++j) {
        double g = 0.5 * lr * grad_h[j];
        task_row[j] -= g;
        model_row[j] -= g;
    }
    return loss;
}

}  // namespace detail

EmbeddingSpace init_space(const Corpus& corpus, int dim, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("embedding dimension must be >= 1");
    if (dim > 64) throw std::invalid_argument("embedding dimension must be <= 64");
    if (corpus.tuples.empty() || corpus.vocab.token_count() == 0 || corpus.vocab.model_count() == 0) {
        throw EmptyCorpus("cannot initialize embeddings from an empty corpus");
    }

    EmbeddingSpace space;
    space.dim = dim;
    space.vocab = corpus.vocab;
    space.models = Matrix(corpus.vocab.model_count(), dim);
    space.tasks_in = Matrix(corpus.vocab.token_count(), dim);
    space.tasks_out = Matrix(corpus.vocab.token_count(), dim, 0.0);

    const double half = 0.5 / dim;
    SeededRng rng(seed);
    for (double& v : space.models.data()) v = rng.uniform(-half, half);
    for (double& v : space.tasks_in.data()) v = rng.uniform(-half, half);
    return space;
}

double positive_score(const EmbeddingSpace& space, const std::string& t_i,
                      const std::string& t_next, const std::string& m_j) {
    int source = space.vocab.require_token(t_i);
    int target = space.vocab.require_token(t_next);
    int model = space.vocab.require_model(m_j);

    auto t_row = space.tasks_in.row(source);
    auto x_row = space.models.row(model);
    auto o_row = space.tasks_out.row(target);
    double z = 0.0;
    for (int j = 0; j < space.dim; ++j) z += 0.5 * (t_row[j] + x_row[j]) * o_row[j];
    return sigmoid(z);
}

double sgd_step(EmbeddingSpace& space, const TaskPair& tuple,
                const std::vector<std::string>& negatives, double lr) {
    if (negatives.empty()) throw std::invalid_argument("sgd_step needs at least one negative");
    if (space.dim > 64 || negatives.size() > 32) {
        throw std::invalid_argument("sgd_step supports dim <= 64 and at most 32 negatives");
    }
    int source = space.vocab.require_token(tuple.source);
    int target = space.vocab.require_token(tuple.target);
    int model = space.vocab.require_model(tuple.model);

    std::vector<int> neg_indices;
    neg_indices.reserve(negatives.size());
    for (const auto& token : negatives) {
        if (token == tuple.target) {
            throw std::invalid_argument("negative token equals the positive target");
        }
        neg_indices.push_back(space.vocab.require_token(token));
    }
    return detail::sgd_step_indexed(space, source, target, model, neg_indices, lr);
}

std::vector<std::string> negative_sample(const Vocabulary& vocab, const std::string& exclude,
                                         int count, SeededRng& rng) {
    if (vocab.token_count() < 2) throw CannotSample("vocabulary has fewer than 2 tokens");
    int excluded = vocab.require_token(exclude);
    detail::UnigramSampler sampler(vocab);
    std::vector<std::string> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(vocab.tokens[sampler.draw(rng, excluded)]);
    return out;
}

TrainReport train(EmbeddingSpace& space, const Corpus& corpus, const TrainConfig& cfg) {
    check_compatible(space, corpus);
    if (space.dim > 64) throw std::invalid_argument("train supports dim <= 64");
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.negatives < 1 || cfg.negatives > 32) {
        throw std::invalid_argument("negatives must be in [1, 32]");
    }
    if (!(cfg.lr_start >= cfg.lr_end && cfg.lr_end > 0.0)) {
        throw std::invalid_argument("need lr_start >= lr_end > 0");
    }

    const std::int64_t tuple_count = static_cast<std::int64_t>(corpus.tuples.size());
    const std::int64_t total_steps = tuple_count * cfg.epochs;
    detail::UnigramSampler sampler(space.vocab);

    TrainReport report;
    report.epoch_mean_loss.reserve(cfg.epochs);

    std::vector<std::int64_t> order(tuple_count);
    std::iota(order.begin(), order.end(), 0);

    std::vector<int> negatives(cfg.negatives);

    if (cfg.deterministic) {
        SeededRng rng(cfg.seed);
        std::int64_t step = 0;
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            rng.shuffle(order);
            double loss_sum = 0.0;
            for (std::int64_t idx : order) {
                const Corpus::Tuple& t = corpus.tuples[idx];
                double lr = lr_at(cfg, step, total_steps);
                for (int n = 0; n < cfg.negatives; ++n) negatives[n] = sampler.draw(rng, t.target);
                loss_sum += detail::sgd_step_indexed(space, t.source, t.target, t.model,
                                                     negatives, lr);
                ++step;
            }
            report.epoch_mean_loss.push_back(loss_sum / static_cast<double>(tuple_count));
        }
    } else {
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            SeededRng shuffle_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
            shuffle_rng.shuffle(order);
            double loss_sum = 0.0;
            // Hogwild-style: threads update the shared space without locks.
#ifdef _OPENMP
#pragma omp parallel reduction(+ : loss_sum)
            {
                SeededRng rng(derive_seed(cfg.seed, (static_cast<std::uint64_t>(epoch) << 16) ^
                                                        (omp_get_thread_num() + 1)));
                std::vector<int> local_negatives(cfg.negatives);
#pragma omp for schedule(static)
                for (std::int64_t i = 0; i < tuple_count; ++i) {
                    const Corpus::Tuple& t = corpus.tuples[order[i]];
                    double lr = lr_at(cfg, static_cast<std::int64_t>(epoch) * tuple_count + i,
                                      total_steps);
                    for (int n = 0; n < cfg.negatives; ++n) {
                        local_negatives[n] = sampler.draw(rng, t.target);
                    }
                    loss_sum += detail::sgd_step_indexed(space, t.source, t.target, t.model,
                                                         local_negatives, lr);
                }
            }
#else
            SeededRng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch) << 16));
            for (std::int64_t i = 0; i < tuple_count; ++i) {
                const Corpus::Tuple& t = corpus.tuples[order[i]];
                double lr = lr_at(cfg, static_cast<std::int64_t>(epoch) * tuple_count + i,
                                  total_steps);
                for (int n = 0; n < cfg.negatives; ++n) negatives[n] = sampler.draw(rng, t.target);
                loss_sum += detail::sgd_step_indexed(space, t.source, t.target, t.model,
                                                     negatives, lr);
            }
#endif
            report.epoch_mean_loss.push_back(loss_sum / static_cast<double>(tuple_count));
        }
    }

    double prob_sum = 0.0;
    for (const Corpus::Tuple& t : corpus.tuples) {
        auto t_row = space.tasks_in.row(t.source);
        auto x_row = space.models.row(t.model);
        auto o_row = space.tasks_out.row(t.target);
        double z = 0.0;
        for (int j = 0; j < space.dim; ++j) z += 0.5 * (t_row[j] + x_row[j]) * o_row[j];
        prob_sum += sigmoid(z);
    }
    report.final_mean_positive_prob = prob_sum / static_cast<double>(tuple_count);
    return report;
}

std::vector<double> model_vector(const EmbeddingSpace& space, const std::string& model_id) {
    auto row = space.models.row(space.vocab.require_model(model_id));
    return {row.begin(), row.end()};
}

std::vector<double> task_vector(const EmbeddingSpace& space, const std::string& token) {
    auto row = space.tasks_in.row(space.vocab.require_token(token));
    return {row.begin(), row.end()};
}

void save_embeddings(const EmbeddingSpace& space, const std::string& path) {
    nlohmann::json doc;
    doc["d"] = space.dim;
    auto& models = doc["models"] = nlohmann::json::object();
    for (int i = 0; i < space.vocab.model_count(); ++i) {
        auto row = space.models.row(i);
        models[space.vocab.model_ids[i]] = std::vector<double>(row.begin(), row.end());
    }
    auto& tasks = doc["tasks"] = nlohmann::json::object();
    for (int i = 0; i < space.vocab.token_count(); ++i) {
        auto row = space.tasks_in.row(i);
        tasks[space.vocab.tokens[i]] = std::vector<double>(row.begin(), row.end());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump(1) << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

EmbeddingSpace load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw IoError("cannot parse embeddings '" + path + "': " + e.what());
    }

    EmbeddingSpace space;
    space.dim = doc.at("d").get<int>();
    const auto& models = doc.at("models");
    const auto& tasks = doc.at("tasks");
    space.models = Matrix(models.size(), space.dim);
    space.tasks_in = Matrix(tasks.size(), space.dim);
    space.tasks_out = Matrix(tasks.size(), space.dim, 0.0);

    int row = 0;
    for (const auto& [id, values] : models.items()) {
        space.vocab.add_model(id);
        for (int j = 0; j < space.dim; ++j) space.models(row, j) = values.at(j).get<double>();
        ++row;
    }
    row = 0;
    for (const auto& [token, values] : tasks.items()) {
        space.vocab.add_token(token);
        for (int j = 0; j < space.dim; ++j) space.tasks_in(row, j) = values.at(j).get<double>();
        ++row;
    }
    return space;
}

}  // namespace pnembed
