// SPDX-License-Identifier: Apache-2.0
//
// pnembed: learn embedding vectors for Petri-net process models, then
// cluster, query and classify them by structural properties.

#include <CLI11.hpp>

#include "pnembed/cli.hpp"
#include "pnembed/dfg.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Petri-net process-model embeddings: dataset generation, training, "
                 "clustering, retrieval, classification"};
    app.require_subcommand(1);

    std::string input;
    std::string output = ".";
    std::string policy = "none";
    std::string embeddings;
    std::string manifest;
    std::string model_id;
    std::string rule = "F";
    int dim = 8;
    int epochs = 500;
    int negatives = 5;
    int min_cluster_size = 4;
    int min_samples = 0;
    int k = 1;
    int folds = 5;
    int runs = 10;
    int topk = 5;
    std::uint64_t seed = 1;
    bool deterministic = false;
    bool dedup = false;

    auto* generate = app.add_subcommand("generate", "write the 96-variant synthetic dataset");
    generate->add_option("--output", output, "output directory")->required();

    auto* train = app.add_subcommand("train", "train embeddings from a directory of PNML files");
    train->add_option("--input", input, "directory with .pnml files")->required();
    train->add_option("--output", output, "output directory")->required();
    train->add_option("--policy", policy, "silent-task naming: none|unique")
        ->check(CLI::IsMember({"none", "unique"}));
    train->add_option("--dim", dim, "embedding dimension");
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--negatives", negatives, "negative samples per tuple");
    train->add_option("--seed", seed, "rng seed");
    train->add_flag("--deterministic", deterministic, "single-threaded bit-reproducible training");
    train->add_flag("--dedup", dedup, "collapse repeated task pairs to one tuple");

    auto* cluster = app.add_subcommand("cluster", "HDBSCAN over trained model embeddings");
    cluster->add_option("--input", embeddings, "embeddings.json")->required();
    cluster->add_option("--output", output, "output directory")->required();
    cluster->add_option("--min-cluster-size", min_cluster_size, "HDBSCAN minimum cluster size");
    cluster->add_option("--min-samples", min_samples, "core-distance neighbor count");

    auto* query = app.add_subcommand("query", "rank models by similarity to a query model");
    query->add_option("--input", embeddings, "embeddings.json")->required();
    query->add_option("--model", model_id, "query model id (or bare rule code)")->required();
    query->add_option("--topk", topk, "number of neighbors");

    auto* classify = app.add_subcommand("classify", "k-NN cross-validation of one rule flag");
    classify->add_option("--input", embeddings, "embeddings.json")->required();
    classify->add_option("--manifest", manifest, "dataset manifest.json")->required();
    classify->add_option("--output", output, "output directory")->required();
    classify->add_option("--rule", rule, "rule flag A..F")->check(CLI::IsMember(
        {"A", "B", "C", "D", "E", "F"}));
    classify->add_option("--k", k, "neighbor count");
    classify->add_option("--folds", folds, "cross-validation folds");
    classify->add_option("--seed", seed, "rng seed");

    auto* experiment = app.add_subcommand(
        "experiment", "silhouette sweep over both policies, d in {4,8,16,32}, mcs in {2..6}");
    experiment->add_option("--input", input, "directory with .pnml files")->required();
    experiment->add_option("--output", output, "output directory")->required();
    experiment->add_option("--runs", runs, "repetitions per cell");
    experiment->add_option("--epochs", epochs, "training epochs");
    experiment->add_option("--negatives", negatives, "negative samples per tuple");
    experiment->add_option("--seed", seed, "rng seed");

    CLI11_PARSE(app, argc, argv);

    using namespace pnembed;
    if (generate->parsed()) return cli::cmd_generate(output);
    if (train->parsed()) {
        cli::TrainOptions opt;
        opt.input_dir = input;
        opt.output_dir = output;
        opt.policy = silent_policy_from_string(policy);
        opt.dim = dim;
        opt.epochs = epochs;
        opt.negatives = negatives;
        opt.seed = seed;
        opt.deterministic = deterministic;
        opt.dedup = dedup;
        return cli::cmd_train(opt);
    }
    if (cluster->parsed()) {
        cli::ClusterOptions opt;
        opt.embeddings_path = embeddings;
        opt.output_dir = output;
        opt.min_cluster_size = min_cluster_size;
        opt.min_samples = min_samples;
        return cli::cmd_cluster(opt);
    }
    if (query->parsed()) return cli::cmd_query(embeddings, model_id, topk);
    if (classify->parsed()) {
        cli::ClassifyOptions opt;
        opt.embeddings_path = embeddings;
        opt.manifest_path = manifest;
        opt.output_dir = output;
        opt.rule = rule[0];
        opt.k = k;
        opt.folds = folds;
        opt.seed = seed;
        return cli::cmd_classify(opt);
    }
    if (experiment->parsed()) {
        cli::ExperimentOptions opt;
        opt.input_dir = input;
        opt.output_dir = output;
        opt.runs = runs;
        opt.epochs = epochs;
        opt.negatives = negatives;
        opt.seed = seed;
        return cli::cmd_experiment(opt);
    }
    return pnembed::cli::kUsage;
}
