// SPDX-License-Identifier: Apache-2.0
#include "pnembed/dfg.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pnembed/errors.hpp"

namespace pnembed {

const char* to_string(SilentPolicy policy) {
    return policy == SilentPolicy::SharedNone ? "none" : "unique";
}

SilentPolicy silent_policy_from_string(const std::string& name) {
    if (name == "none") return SilentPolicy::SharedNone;
    if (name == "unique") return SilentPolicy::UniquePerPosition;
    throw std::invalid_argument("unknown silent policy '" + name + "' (expected none|unique)");
}

int Vocabulary::add_token(const std::string& token) {
    auto [it, inserted] = token_index.try_emplace(token, static_cast<int>(tokens.size()));
    if (inserted) {
        tokens.push_back(token);
        token_target_count.push_back(0);
    }
    return it->second;
}

int Vocabulary::add_model(const std::string& model_id) {
    auto [it, inserted] = model_index.try_emplace(model_id, static_cast<int>(model_ids.size()));
    if (inserted) model_ids.push_back(model_id);
    return it->second;
}

int Vocabulary::require_token(const std::string& token) const {
    auto it = token_index.find(token);
    if (it == token_index.end()) throw UnknownToken("unknown task token '" + token + "'");
    return it->second;
}

int Vocabulary::require_model(const std::string& model_id) const {
    auto it = model_index.find(model_id);
    if (it == model_index.end()) throw UnknownToken("unknown model id '" + model_id + "'");
    return it->second;
}

Dfg to_dfg(const PetriNet& net, SilentPolicy policy) {
    Dfg dfg;
    dfg.model_id = net.id;

    // Token per transition, in net order; silent ones are numbered per model.
    std::unordered_map<std::string, std::string> token_of;
    int silent_index = 0;
    for (const auto& t : net.transitions) {
        if (t.silent()) {
            token_of[t.id] = policy == SilentPolicy::SharedNone
                                 ? "None"
                                 : "n_" + std::to_string(silent_index++);
        } else {
            token_of[t.id] = *t.label;
        }
    }

    std::vector<std::string> seen_order;
    std::unordered_map<std::string, bool> seen;
    for (const auto& t : net.transitions) {
        const std::string& token = token_of[t.id];
        if (!seen[token]) {
            seen[token] = true;
            seen_order.push_back(token);
        }
    }
    dfg.nodes = std::move(seen_order);

    // Every place p with arcs t_in -> p and p -> t_out witnesses the edge
    // (token(t_in), token(t_out)).
    std::unordered_map<std::string, std::vector<std::string>> producers;  // place -> transitions
    std::unordered_map<std::string, std::vector<std::string>> consumers;
    std::unordered_map<std::string, bool> is_place;
    for (const auto& p : net.places) is_place[p] = true;
    for (const auto& arc : net.arcs) {
        if (is_place[arc.target]) {
            producers[arc.target].push_back(arc.source);
        } else {
            consumers[arc.source].push_back(arc.target);
        }
    }

    std::map<std::pair<std::string, std::string>, int> counts;
    for (const auto& p : net.places) {
        auto in = producers.find(p);
        auto out = consumers.find(p);
        if (in == producers.end() || out == consumers.end()) continue;
        for (const auto& t_in : in->second) {
            for (const auto& t_out : out->second) {
                ++counts[{token_of[t_in], token_of[t_out]}];
            }
        }
    }
    for (const auto& [key, count] : counts) {
        dfg.edges.push_back({key.first, key.second, count});
    }
    return dfg;
}

std::vector<TaskPair> extract_tuples(const Dfg& dfg) {
    std::vector<TaskPair> out;
    for (const auto& edge : dfg.edges) {
        for (int i = 0; i < edge.count; ++i) {
            out.push_back({edge.from, edge.to, dfg.model_id});
        }
    }
    return out;
}

Corpus build_corpus(const std::vector<Dfg>& dfgs, bool dedup) {
    Corpus corpus;
    for (const auto& dfg : dfgs) {
        if (corpus.vocab.model_index.count(dfg.model_id)) {
            throw StructureError("duplicate model id '" + dfg.model_id + "'");
        }
        int model = corpus.vocab.add_model(dfg.model_id);
        for (const auto& node : dfg.nodes) corpus.vocab.add_token(node);
        for (const auto& edge : dfg.edges) {
            int from = corpus.vocab.add_token(edge.from);
            int to = corpus.vocab.add_token(edge.to);
            int repeats = dedup ? 1 : edge.count;
            for (int i = 0; i < repeats; ++i) {
                corpus.tuples.push_back({from, to, model});
                ++corpus.vocab.token_target_count[to];
            }
        }
    }
    return corpus;
}

std::map<std::string, std::int64_t> task_histogram(const Corpus& corpus) {
    std::map<std::string, std::int64_t> hist;
    for (const auto& tuple : corpus.tuples) {
        ++hist[corpus.vocab.tokens[tuple.source]];
        ++hist[corpus.vocab.tokens[tuple.target]];
    }
    return hist;
}

void write_corpus_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const auto& tuple : corpus.tuples) {
        nlohmann::ordered_json record = {{"t", corpus.vocab.tokens[tuple.source]},
                                         {"t_next", corpus.vocab.tokens[tuple.target]},
                                         {"model", corpus.vocab.model_ids[tuple.model]}};
        out << record.dump() << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_histogram_csv(const std::map<std::string, std::int64_t>& hist, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "token,count\n";
    for (const auto& [token, count] : hist) out << token << "," << count << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pnembed
