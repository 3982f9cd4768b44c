// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "pnembed/petri_net.hpp"

namespace pnembed {

// The six generation flags. Each value selects whether (and how) one
// structural edit is applied to the base model:
//   a: long-term-dependency bypass (0/1)
//   b: loops, 0 = none, 1 = simple back edge, 2 = adds a shortcut between
//      the loop branch and the main branch
//   c: OR construct on the parallel block (0/1)
//   d: designated tasks become invisible (0/1)
//   e: designated tasks become optional via parallel skips (0/1)
//   f: one added task duplicates an existing label (0/1)
struct RuleConfig {
    int a = 0;
    int b = 0;
    int c = 0;
    int d = 0;
    int e = 0;
    int f = 0;

    std::string code() const;
    static RuleConfig parse_code(const std::string& code);

    // Field value by letter 'A'..'F'.
    int value(char field) const;

    bool operator==(const RuleConfig&) const = default;
};

// Fixed deterministic base net ("000000"): a three-task head chain, an
// AND split/join block with two two-task branches, an XOR pair, and a
// nine-task tail chain. 20 labeled transitions, no silent ones.
PetriNet base_model();

// All 96 configs, F varying fastest, then E, D, C, B, A.
std::vector<RuleConfig> enumerate_configs();

// Applies the active rule edits to a copy of `base`. Edits are additive
// (plus label removals for d) at fixed, mutually disjoint attachment sites,
// so edits commute and nets differing in one flag differ only at that
// flag's site.
PetriNet apply_rules(const PetriNet& base, const RuleConfig& cfg);

struct ManifestEntry {
    std::string file;
    RuleConfig config;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

// Writes the 96 PNML files (pdc_<code>.pnml) plus manifest.json into `dir`
// and returns the manifest. Throws IoError on write failure.
DatasetManifest generate_dataset(const std::string& dir);

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const DatasetManifest& manifest, const std::string& path);

}  // namespace pnembed
