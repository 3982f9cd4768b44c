// SPDX-License-Identifier: Apache-2.0
#include "pnembed/petri_net.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace pnembed {

bool PetriNet::operator==(const PetriNet& other) const {
    if (id != other.id || initial_marking != other.initial_marking) return false;

    auto sorted_places = [](const PetriNet& n) {
        auto p = n.places;
        std::sort(p.begin(), p.end());
        return p;
    };
    auto sorted_transitions = [](const PetriNet& n) {
        auto t = n.transitions;
        std::sort(t.begin(), t.end(),
                  [](const Transition& a, const Transition& b) { return a.id < b.id; });
        return t;
    };
    auto sorted_arcs = [](const PetriNet& n) {
        auto a = n.arcs;
        std::sort(a.begin(), a.end(), [](const Arc& x, const Arc& y) {
            return std::tie(x.source, x.target) < std::tie(y.source, y.target);
        });
        return a;
    };
    return sorted_places(*this) == sorted_places(other) &&
           sorted_transitions(*this) == sorted_transitions(other) &&
           sorted_arcs(*this) == sorted_arcs(other);
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::DuplicateId: return "DuplicateId";
        case ViolationKind::UnknownArcEndpoint: return "UnknownArcEndpoint";
        case ViolationKind::NonBipartiteArc: return "NonBipartiteArc";
        case ViolationKind::SelfLoopArc: return "SelfLoopArc";
        case ViolationKind::UnknownMarkingPlace: return "UnknownMarkingPlace";
    }
    return "Unknown";
}

std::vector<Violation> validate(const PetriNet& net) {
    std::vector<Violation> out;

    enum class Kind { Place, Transition };
    std::unordered_map<std::string, Kind> kind_of;
    std::unordered_set<std::string> seen;

    for (const auto& p : net.places) {
        if (!seen.insert(p).second) {
            out.push_back({ViolationKind::DuplicateId, "duplicate node id '" + p + "'"});
        }
        kind_of.emplace(p, Kind::Place);
    }
    for (const auto& t : net.transitions) {
        if (!seen.insert(t.id).second) {
            out.push_back({ViolationKind::DuplicateId, "duplicate node id '" + t.id + "'"});
        }
        kind_of.emplace(t.id, Kind::Transition);
    }

    for (const auto& arc : net.arcs) {
        auto src = kind_of.find(arc.source);
        auto dst = kind_of.find(arc.target);
        if (src == kind_of.end()) {
            out.push_back({ViolationKind::UnknownArcEndpoint,
                           "arc source '" + arc.source + "' does not exist"});
        }
        if (dst == kind_of.end()) {
            out.push_back({ViolationKind::UnknownArcEndpoint,
                           "arc target '" + arc.target + "' does not exist"});
        }
        if (src == kind_of.end() || dst == kind_of.end()) continue;

        if (arc.source == arc.target) {
            out.push_back({ViolationKind::SelfLoopArc,
                           "arc from '" + arc.source + "' to itself"});
        }
        if (src->second == dst->second) {
            out.push_back({ViolationKind::NonBipartiteArc,
                           "arc '" + arc.source + "' -> '" + arc.target +
                               "' connects two nodes of the same kind"});
        }
    }

    for (const auto& [place, tokens] : net.initial_marking) {
        (void)tokens;
        auto it = kind_of.find(place);
        if (it == kind_of.end() || it->second != Kind::Place) {
            out.push_back({ViolationKind::UnknownMarkingPlace,
                           "initial marking on unknown place '" + place + "'"});
        }
    }

    return out;
}

}  // namespace pnembed
