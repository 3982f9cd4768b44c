// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "pnembed/petri_net.hpp"

namespace pnembed {

// Parses the PNML subset net/page/place/transition/arc/name/initialMarking.
// Unknown elements are ignored. Multiple <page> elements are flattened into
// one net. A transition is silent when it has no <name><text>, when the text
// is empty/whitespace, or when it carries an invisible="true" attribute or a
// <toolspecific> child with activity="$invisible$".
//
// Throws ParseError for malformed XML and StructureError when the document
// describes a net that fails validate().
PetriNet parse_pnml(const std::string& bytes);

// Emits PNML that parse_pnml reads back into an equal net. Output is
// deterministic: places, transitions and arcs are each sorted by id.
std::string serialize_pnml(const PetriNet& net);

PetriNet read_pnml_file(const std::string& path);
void write_pnml_file(const PetriNet& net, const std::string& path);

}  // namespace pnembed
