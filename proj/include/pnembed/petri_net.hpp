// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pnembed {

// A transition is silent exactly when it carries no label.
struct Transition {
    std::string id;
    std::optional<std::string> label;

    bool silent() const { return !label.has_value(); }
    bool operator==(const Transition&) const = default;
};

struct Arc {
    std::string source;
    std::string target;

    bool operator==(const Arc&) const = default;
};

// One process model: places, transitions, place<->transition arcs, and the
// initial token marking. Element order follows the source document; equality
// is order-insensitive (see operator==).
struct PetriNet {
    std::string id;
    std::vector<std::string> places;
    std::vector<Transition> transitions;
    std::vector<Arc> arcs;
    std::map<std::string, unsigned> initial_marking;

    // Structural equality: same id, same node/arc/marking multisets. Element
    // order is a serialization detail, not part of the model.
    bool operator==(const PetriNet& other) const;
};

enum class ViolationKind {
    DuplicateId,
    UnknownArcEndpoint,
    NonBipartiteArc,
    SelfLoopArc,
    UnknownMarkingPlace,
};

struct Violation {
    ViolationKind kind;
    std::string detail;
};

const char* to_string(ViolationKind kind);

// Empty result iff the net satisfies all structural invariants:
// unique node ids, arcs between existing nodes, strict place/transition
// bipartiteness, no self-loops, marking only on known places.
std::vector<Violation> validate(const PetriNet& net);

}  // namespace pnembed
