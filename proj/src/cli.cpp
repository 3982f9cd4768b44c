// SPDX-License-Identifier: Apache-2.0
#include "pnembed/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "pnembed/analysis.hpp"
#include "pnembed/cluster.hpp"
#include "pnembed/embedder.hpp"
#include "pnembed/errors.hpp"
#include "pnembed/netgen.hpp"
#include "pnembed/pnml.hpp"

namespace pnembed::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

Corpus corpus_from_models(const std::vector<PetriNet>& models, const std::vector<std::string>& ids,
                          SilentPolicy policy, bool dedup) {
    std::vector<Dfg> dfgs;
    dfgs.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        PetriNet net = models[i];
        net.id = ids[i];
        dfgs.push_back(to_dfg(net, policy));
    }
    return build_corpus(dfgs, dedup);
}

void write_train_report_csv(const TrainReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.precision(17);
    out << "epoch,mean_loss\n";
    for (std::size_t e = 0; e < report.epoch_mean_loss.size(); ++e) {
        out << e << "," << report.epoch_mean_loss[e] << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::vector<PetriNet> load_models(const std::string& dir, std::vector<std::string>* ids) {
    if (!fs::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pnml") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<PetriNet> models;
    for (const auto& file : files) {
        try {
            models.push_back(read_pnml_file(file));
            if (ids) ids->push_back(fs::path(file).stem().string());
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping '" << file << "': " << e.what() << "\n";
        }
    }
    return models;
}

int cmd_generate(const std::string& output_dir) {
    try {
        DatasetManifest manifest = generate_dataset(output_dir);
        std::cout << "wrote " << manifest.entries.size() << " models and manifest.json to "
                  << output_dir << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_train(const TrainOptions& opt) {
    try {
        std::vector<std::string> ids;
        std::vector<PetriNet> models = load_models(opt.input_dir, &ids);
        if (models.size() < 2) {
            std::cerr << "error: need at least 2 parseable PNML models in '" << opt.input_dir
                      << "', found " << models.size() << "\n";
            return kUsage;
        }
        ensure_dir(opt.output_dir);

        Corpus corpus = corpus_from_models(models, ids, opt.policy, opt.dedup);
        EmbeddingSpace space = init_space(corpus, opt.dim, opt.seed);

        TrainConfig cfg;
        cfg.epochs = opt.epochs;
        cfg.negatives = opt.negatives;
        cfg.seed = opt.seed;
        cfg.deterministic = opt.deterministic;
        TrainReport report = train(space, corpus, cfg);

        fs::path out(opt.output_dir);
        save_embeddings(space, (out / "embeddings.json").string());
        write_train_report_csv(report, (out / "train_report.csv").string());
        write_corpus_jsonl(corpus, (out / "corpus.jsonl").string());
        write_histogram_csv(task_histogram(corpus), (out / "task_histogram.csv").string());

        std::cout.precision(17);
        std::cout << "trained " << corpus.vocab.model_count() << " models, "
                  << corpus.vocab.token_count() << " tasks, " << corpus.tuples.size()
                  << " tuples; final mean positive probability "
                  << report.final_mean_positive_prob << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_cluster(const ClusterOptions& opt) {
    try {
        EmbeddingSpace space = load_embeddings(opt.embeddings_path);
        ClusterResult result =
            cluster_embeddings(space.models, opt.min_cluster_size, opt.min_samples);
        ensure_dir(opt.output_dir);
        write_cluster_csv(space.vocab.model_ids, result,
                          (fs::path(opt.output_dir) / "clusters.csv").string());

        int cluster_count = 0;
        for (int l : result.labels) cluster_count = std::max(cluster_count, l + 1);
        std::cout.precision(17);
        std::cout << "clusters: " << cluster_count << "\n";
        if (result.silhouette_defined) {
            std::cout << "mean silhouette: " << result.mean_silhouette << "\n";
        } else {
            std::cout << "mean silhouette: undefined (fewer than 2 clusters)\n";
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_query(const std::string& embeddings_path, const std::string& model_id, int topk) {
    try {
        EmbeddingSpace space = load_embeddings(embeddings_path);
        std::string id = model_id;
        if (!space.vocab.model_index.count(id) && space.vocab.model_index.count("pdc_" + id)) {
            id = "pdc_" + id;  // allow bare rule codes for generated datasets
        }
        topk = std::min(topk, space.vocab.model_count() - 1);
        std::cout.precision(17);
        for (const auto& neighbor : query_nearest(space, id, std::max(topk, 0))) {
            std::cout << neighbor.model_id << " " << neighbor.similarity << "\n";
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_classify(const ClassifyOptions& opt) {
    try {
        if (std::string("ABCDEF").find(opt.rule) == std::string::npos) {
            std::cerr << "error: rule must be one of A..F\n";
            return kUsage;
        }
        EmbeddingSpace space = load_embeddings(opt.embeddings_path);
        DatasetManifest manifest = read_manifest(opt.manifest_path);

        std::map<std::string, RuleConfig> config_of;
        for (const auto& entry : manifest.entries) {
            config_of[fs::path(entry.file).stem().string()] = entry.config;
        }
        std::vector<int> labels;
        for (const auto& id : space.vocab.model_ids) {
            auto it = config_of.find(id);
            if (it == config_of.end()) {
                std::cerr << "error: model '" << id << "' not present in manifest\n";
                return kUsage;
            }
            labels.push_back(it->second.value(opt.rule));
        }

        ConfusionMatrix cm = knn_cross_validate(space.models, labels, opt.k, opt.folds, opt.seed);

        std::cout << "rule " << opt.rule << ", " << opt.k << "-NN, " << opt.folds << "-fold\n";
        std::cout << "true\\pred";
        for (int c : cm.classes) std::cout << "\t" << c;
        std::cout << "\n";
        for (std::size_t i = 0; i < cm.classes.size(); ++i) {
            std::cout << cm.classes[i];
            for (std::size_t j = 0; j < cm.classes.size(); ++j) std::cout << "\t" << cm.counts[i][j];
            std::cout << "\n";
        }
        std::cout.precision(17);
        std::cout << "accuracy: " << cm.accuracy << "\n";

        ensure_dir(opt.output_dir);
        write_confusion_csv(cm, (fs::path(opt.output_dir) /
                                 (std::string("confusion_") + opt.rule + ".csv"))
                                    .string());
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_experiment(const ExperimentOptions& opt) {
    try {
        if (opt.runs < 2) {
            std::cerr << "error: experiment needs at least 2 runs for the t-test\n";
            return kUsage;
        }
        std::vector<std::string> ids;
        std::vector<PetriNet> models = load_models(opt.input_dir, &ids);
        if (models.size() < 2) {
            std::cerr << "error: need at least 2 parseable PNML models\n";
            return kUsage;
        }
        ensure_dir(opt.output_dir);

        const SilentPolicy policies[] = {SilentPolicy::SharedNone, SilentPolicy::UniquePerPosition};
        const int dims[] = {4, 8, 16, 32};
        const int mcs_values[] = {2, 3, 4, 5, 6};

        Corpus corpora[2] = {corpus_from_models(models, ids, policies[0], false),
                             corpus_from_models(models, ids, policies[1], false)};

        // silhouettes[policy][dim][mcs] holds one mean silhouette per run
        // (0 when fewer than 2 clusters formed).
        std::vector<double> silhouettes[2][4][5];
        for (auto& per_policy : silhouettes)
            for (auto& per_dim : per_policy)
                for (auto& cell : per_dim) cell.assign(opt.runs, 0.0);

        // Runs are independent; each one trains deterministically from its
        // own derived seed, so the schedule does not affect results.
        const int total_jobs = 2 * 4 * opt.runs;
#pragma omp parallel for schedule(dynamic)
        for (int job = 0; job < total_jobs; ++job) {
            int p = job / (4 * opt.runs);
            int di = job / opt.runs % 4;
            int run = job % opt.runs;

            TrainConfig cfg;
            cfg.epochs = opt.epochs;
            cfg.negatives = opt.negatives;
            cfg.deterministic = true;
            cfg.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(job));

            EmbeddingSpace space = init_space(corpora[p], dims[di], cfg.seed);
            train(space, corpora[p], cfg);
            for (int mi = 0; mi < 5; ++mi) {
                ClusterResult r = cluster_embeddings(space.models, mcs_values[mi]);
                silhouettes[p][di][mi][run] = r.silhouette_defined ? r.mean_silhouette : 0.0;
            }
        }

        auto mean_std = [](const std::vector<double>& v) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            var /= static_cast<double>(v.size() - 1);
            return std::pair{mean, std::sqrt(var)};
        };

        // Baseline cell for the pairwise t-tests: policy none, d=8, mcs=4.
        const std::vector<double>& baseline = silhouettes[0][1][2];

        std::ofstream out(fs::path(opt.output_dir) / "experiment.csv");
        if (!out) throw IoError("cannot write experiment.csv");
        out.precision(17);
        out << "policy,d,min_cluster_size,mean_silhouette,std_silhouette,t_vs_baseline,"
               "p_vs_baseline,significant_at_0.01\n";

        std::printf("%-8s %4s %4s %12s %12s %10s %12s %s\n", "policy", "d", "mcs", "mean", "std",
                    "t", "p", "tie-with-baseline");
        for (int p = 0; p < 2; ++p) {
            for (int di = 0; di < 4; ++di) {
                for (int mi = 0; mi < 5; ++mi) {
                    auto [mean, std_dev] = mean_std(silhouettes[p][di][mi]);
                    bool is_baseline = p == 0 && di == 1 && mi == 2;
                    TTestResult tt;
                    if (!is_baseline) {
                        tt = welch_t_test(baseline, silhouettes[p][di][mi], 0.01);
                    }
                    out << to_string(policies[p]) << "," << dims[di] << "," << mcs_values[mi]
                        << "," << mean << "," << std_dev << "," << tt.t << "," << tt.p << ","
                        << (tt.reject ? 1 : 0) << "\n";
                    std::printf("%-8s %4d %4d %12.4f %12.4f %10.3f %12.4g %s\n",
                                to_string(policies[p]), dims[di], mcs_values[mi], mean, std_dev,
                                tt.t, tt.p,
                                is_baseline ? "(baseline)" : (tt.reject ? "no" : "yes"));
                }
            }
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace pnembed::cli
