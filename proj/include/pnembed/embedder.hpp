// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pnembed/dfg.hpp"
#include "pnembed/matrix.hpp"
#include "pnembed/rng.hpp"

namespace pnembed {

// Jointly trained vectors: one row per model in `models` (X), one row per
// task token in `tasks_in` (T). `tasks_out` holds the target-side rows used
// by the logistic objective; it starts at zero and is not exported.
struct EmbeddingSpace {
    int dim = 0;
    Matrix models;
    Matrix tasks_in;
    Matrix tasks_out;
    Vocabulary vocab;
};

struct TrainConfig {
    int epochs = 500;
    int negatives = 5;
    double lr_start = 0.025;
    double lr_end = 1e-4;
    std::uint64_t seed = 1;
    // Deterministic mode trains single-threaded with fully seeded order and
    // sampling (bit-reproducible). Otherwise tuples are sharded across OpenMP
    // threads that update the shared space without locks.
    bool deterministic = true;
};

struct TrainReport {
    std::vector<double> epoch_mean_loss;
    double final_mean_positive_prob = 0.0;
};

// Seeded uniform init in [-0.5/d, 0.5/d) for model and task-input rows;
// task-output rows start at zero. Throws EmptyCorpus when the corpus has no
// tuples, tokens or models.
EmbeddingSpace init_space(const Corpus& corpus, int dim, std::uint64_t seed);

// sigma(h . T_out[t_next]) with h = (T[t_i] + X[m_j]) / 2.
double positive_score(const EmbeddingSpace& space, const std::string& t_i,
                      const std::string& t_next, const std::string& m_j);

// One stochastic update on a positive tuple plus its negative tokens,
// descending L = -log sigma(h.o+) - sum_neg log sigma(-h.o_neg). All
// gradients are evaluated at the pre-update parameters; returns L before
// the update. Negatives must be non-empty and none may equal t_next.
double sgd_step(EmbeddingSpace& space, const TaskPair& tuple,
                const std::vector<std::string>& negatives, double lr);

// Draws `count` tokens i.i.d. from unigram(target frequency)^0.75,
// resampling draws equal to `exclude`. Throws CannotSample when no other
// token has positive sampling weight.
std::vector<std::string> negative_sample(const Vocabulary& vocab, const std::string& exclude,
                                         int count, SeededRng& rng);

// cfg.epochs passes over all tuples, shuffled per epoch, with the learning
// rate interpolated linearly from lr_start to lr_end over all steps.
TrainReport train(EmbeddingSpace& space, const Corpus& corpus, const TrainConfig& cfg);

std::vector<double> model_vector(const EmbeddingSpace& space, const std::string& model_id);
std::vector<double> task_vector(const EmbeddingSpace& space, const std::string& token);

// JSON export {d, models: {id: [...]}, tasks: {token: [...]}}. Doubles are
// written round-trip exact; task-output rows are internal and not exported.
void save_embeddings(const EmbeddingSpace& space, const std::string& path);
EmbeddingSpace load_embeddings(const std::string& path);

namespace detail {

// Cumulative unigram^0.75 table shared by train() and negative_sample().
class UnigramSampler {
public:
    explicit UnigramSampler(const Vocabulary& vocab);
    int draw(SeededRng& rng, int exclude) const;
    double total_weight() const { return total_; }
    double weight(int token) const;

private:
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

double sgd_step_indexed(EmbeddingSpace& space, int source, int target, int model,
                        std::span<const int> negatives, double lr);

}  // namespace detail

}  // namespace pnembed
