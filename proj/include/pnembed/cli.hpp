// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnembed/dfg.hpp"
#include "pnembed/petri_net.hpp"

namespace pnembed::cli {

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;   // assertion/acceptance failure
inline constexpr int kUsage = 2;     // usage or I/O error

struct TrainOptions {
    std::string input_dir;
    std::string output_dir;
    SilentPolicy policy = SilentPolicy::SharedNone;
    int dim = 8;
    int epochs = 500;
    int negatives = 5;
    std::uint64_t seed = 1;
    bool deterministic = true;
    bool dedup = false;
};

struct ClusterOptions {
    std::string embeddings_path;
    std::string output_dir;
    int min_cluster_size = 4;
    int min_samples = 0;  // 0 = default to min_cluster_size
};

struct ClassifyOptions {
    std::string embeddings_path;
    std::string manifest_path;
    std::string output_dir;
    char rule = 'F';
    int k = 1;
    int folds = 5;
    std::uint64_t seed = 1;
};

struct ExperimentOptions {
    std::string input_dir;
    std::string output_dir;
    int runs = 10;
    int epochs = 500;
    int negatives = 5;
    std::uint64_t seed = 1;
};

// Models parsed from every *.pnml under `dir` (sorted by filename); the
// model id is the file stem. Unparseable files are reported to stderr and
// skipped.
std::vector<PetriNet> load_models(const std::string& dir, std::vector<std::string>* ids);

int cmd_generate(const std::string& output_dir);
int cmd_train(const TrainOptions& opt);
int cmd_cluster(const ClusterOptions& opt);
int cmd_query(const std::string& embeddings_path, const std::string& model_id, int topk);
int cmd_classify(const ClassifyOptions& opt);
int cmd_experiment(const ExperimentOptions& opt);

}  // namespace pnembed::cli
