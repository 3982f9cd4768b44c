// SPDX-License-Identifier: Apache-2.0
//
// Compares the serial reference kernels against their OpenMP versions:
// embedding training (deterministic vs hogwild) and pairwise cosine
// distances. Run with OMP_NUM_THREADS to control the parallel side.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pnembed/cluster.hpp"
#include "pnembed/dfg.hpp"
#include "pnembed/embedder.hpp"
#include "pnembed/netgen.hpp"
#include "pnembed/rng.hpp"

using namespace pnembed;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

Corpus synthetic_corpus() {
    const PetriNet base = base_model();
    std::vector<Dfg> dfgs;
    for (const RuleConfig& cfg : enumerate_configs()) {
        dfgs.push_back(to_dfg(apply_rules(base, cfg), SilentPolicy::SharedNone));
    }
    return build_corpus(dfgs);
}

double bench_train(const Corpus& corpus, bool deterministic, int epochs) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.negatives = 5;
    cfg.seed = 7;
    cfg.deterministic = deterministic;
    EmbeddingSpace space = init_space(corpus, 8, cfg.seed);
    double t0 = now_seconds();
    train(space, corpus, cfg);
    return now_seconds() - t0;
}

}  // namespace

int main(int argc, char** argv) {
    int epochs = argc > 1 ? std::stoi(argv[1]) : 200;
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::printf("pnembed benchmark (%d thread(s), %d train epochs)\n\n", threads, epochs);

    Corpus corpus = synthetic_corpus();
    std::printf("corpus: %d models, %d tasks, %zu tuples\n", corpus.vocab.model_count(),
                corpus.vocab.token_count(), corpus.tuples.size());

    double serial = bench_train(corpus, true, epochs);
    double parallel = bench_train(corpus, false, epochs);
    double steps = static_cast<double>(corpus.tuples.size()) * epochs;
    std::printf("train serial   : %8.3f s  (%.2e tuples/s)\n", serial, steps / serial);
    std::printf("train parallel : %8.3f s  (%.2e tuples/s, speedup %.2fx)\n", parallel,
                steps / parallel, serial / parallel);

    const int n = 1500;
    const int d = 16;
    Matrix x(n, d);
    SeededRng rng(11);
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);

    double t0 = now_seconds();
    Matrix ds = pairwise_distances_serial(x);
    double dist_serial = now_seconds() - t0;
    t0 = now_seconds();
    Matrix dp = pairwise_distances(x);
    double dist_parallel = now_seconds() - t0;

    std::printf("\npairwise %dx%d cosine distances\n", n, n);
    std::printf("serial         : %8.3f s\n", dist_serial);
    std::printf("parallel       : %8.3f s  (speedup %.2fx, results %s)\n", dist_parallel,
                dist_serial / dist_parallel, ds == dp ? "identical" : "DIFFER");
    return ds == dp ? 0 : 1;
}
