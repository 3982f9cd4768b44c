// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "pnembed/petri_net.hpp"

namespace pnembed {

// How silent transitions are tokenized: one shared "None" token, or
// "n_<i>" where i counts silent transitions per model in net order.
enum class SilentPolicy { SharedNone, UniquePerPosition };

const char* to_string(SilentPolicy policy);
SilentPolicy silent_policy_from_string(const std::string& name);

struct DfgEdge {
    std::string from;
    std::string to;
    int count = 1;

    bool operator==(const DfgEdge&) const = default;
};

// Directly-follows graph of one model: task tokens plus (from, to) edges
// with multiplicity. An edge exists for every place that connects the two
// transitions; multiplicity counts those witnesses.
struct Dfg {
    std::string model_id;
    std::vector<std::string> nodes;   // unique tokens, first-appearance order
    std::vector<DfgEdge> edges;       // sorted by (from, to)
};

// One training tuple: task, directly-following task, owning model.
struct TaskPair {
    std::string source;
    std::string target;
    std::string model;

    bool operator==(const TaskPair&) const = default;
};

struct Vocabulary {
    std::vector<std::string> tokens;      // index -> token
    std::vector<std::string> model_ids;   // index -> model id
    std::unordered_map<std::string, int> token_index;
    std::unordered_map<std::string, int> model_index;
    std::vector<std::int64_t> token_target_count;  // tuples where token is the target

    int token_count() const { return static_cast<int>(tokens.size()); }
    int model_count() const { return static_cast<int>(model_ids.size()); }

    int add_token(const std::string& token);
    int add_model(const std::string& model_id);
    // Index lookups; throw UnknownToken when absent.
    int require_token(const std::string& token) const;
    int require_model(const std::string& model_id) const;
};

struct Corpus {
    // Tuple endpoints stored as vocabulary indices.
    struct Tuple {
        int source;
        int target;
        int model;
    };
    std::vector<Tuple> tuples;
    Vocabulary vocab;
};

// Builds the DFG of a validated net under the given silent-naming policy.
Dfg to_dfg(const PetriNet& net, SilentPolicy policy);

// One tuple per edge occurrence; an edge with multiplicity m yields m
// tuples. Deterministic order (edges are kept sorted by from, to).
std::vector<TaskPair> extract_tuples(const Dfg& dfg);

// Concatenates tuples across models and indexes tokens/models. Token
// frequency counts target-side occurrences. With dedup = true each distinct
// edge contributes a single tuple regardless of multiplicity.
Corpus build_corpus(const std::vector<Dfg>& dfgs, bool dedup = false);

// Token occurrence counts over both tuple positions.
std::map<std::string, std::int64_t> task_histogram(const Corpus& corpus);

// JSON-lines export, one {"t", "t_next", "model"} record per tuple.
void write_corpus_jsonl(const Corpus& corpus, const std::string& path);
// CSV export "token,count", sorted by token.
void write_histogram_csv(const std::map<std::string, std::int64_t>& hist, const std::string& path);

}  // namespace pnembed
