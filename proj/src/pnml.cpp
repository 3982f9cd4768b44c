// SPDX-License-Identifier: Apache-2.0
#include "pnembed/pnml.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "pnembed/errors.hpp"

namespace pnembed {

namespace {

using boost::property_tree::ptree;

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string attr(const ptree& node, const std::string& name) {
    return node.get<std::string>("<xmlattr>." + name, "");
}

bool transition_is_silent(const ptree& node) {
    if (attr(node, "invisible") == "true") return true;
    for (const auto& [key, child] : node) {
        if (key == "toolspecific" && attr(child, "activity") == "$invisible$") return true;
    }
    auto name = node.get_child_optional("name");
    if (!name) return true;
    return trimmed(name->get<std::string>("text", "")).empty();
}

unsigned parse_marking(const ptree& node, const std::string& place_id) {
    std::string text = trimmed(node.get<std::string>("text", "0"));
    if (text.empty()) return 0;
    try {
        std::size_t pos = 0;
        long long value = std::stoll(text, &pos);
        if (pos != text.size() || value < 0) throw std::invalid_argument(text);
        return static_cast<unsigned>(value);
    } catch (const std::exception&) {
        throw StructureError("invalid initial marking '" + text + "' on place '" + place_id + "'");
    }
}

void collect_nodes(const ptree& scope, PetriNet& net) {
    for (const auto& [key, child] : scope) {
        if (key == "page") {
            collect_nodes(child, net);
        } else if (key == "place") {
            std::string id = attr(child, "id");
            if (id.empty()) throw StructureError("place without id");
            net.places.push_back(id);
            if (auto marking = child.get_child_optional("initialMarking")) {
                unsigned tokens = parse_marking(*marking, id);
                if (tokens > 0) net.initial_marking[id] = tokens;
            }
        } else if (key == "transition") {
            std::string id = attr(child, "id");
            if (id.empty()) throw StructureError("transition without id");
            Transition t{id, std::nullopt};
            if (!transition_is_silent(child)) {
                t.label = trimmed(child.get<std::string>("name.text", ""));
            }
            net.transitions.push_back(std::move(t));
        } else if (key == "arc") {
            std::string source = attr(child, "source");
            std::string target = attr(child, "target");
            if (source.empty() || target.empty()) {
                throw StructureError("arc without source/target");
            }
            net.arcs.push_back({source, target});
        }
    }
}

void escape_into(std::string& out, const std::string& text) {
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
}

}  // namespace

PetriNet parse_pnml(const std::string& bytes) {
    ptree doc;
    try {
        std::istringstream in(bytes);
        boost::property_tree::read_xml(in, doc);
    } catch (const boost::property_tree::xml_parser_error& e) {
        throw ParseError(std::string("malformed PNML: ") + e.what());
    }

    const ptree* root = nullptr;
    if (auto pnml = doc.get_child_optional("pnml")) {
        root = &*pnml;
    } else if (doc.get_child_optional("net")) {
        root = &doc;
    } else {
        throw StructureError("document has no <pnml> or <net> root");
    }
    auto net_node = root->get_child_optional("net");
    if (!net_node) throw StructureError("<pnml> contains no <net>");

    PetriNet net;
    net.id = attr(*net_node, "id");
    collect_nodes(*net_node, net);

    auto violations = validate(net);
    if (!violations.empty()) {
        std::string msg = "net '" + net.id + "' is not well-formed:";
        for (const auto& v : violations) msg += std::string(" [") + to_string(v.kind) + "] " + v.detail + ";";
        throw StructureError(msg);
    }
    return net;
}

std::string serialize_pnml(const PetriNet& net) {
    auto places = net.places;
    std::sort(places.begin(), places.end());
    auto transitions = net.transitions;
    std::sort(transitions.begin(), transitions.end(),
              [](const Transition& a, const Transition& b) { return a.id < b.id; });
    auto arcs = net.arcs;
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n";
    out += "  <net id=\"";
    escape_into(out, net.id);
    out += "\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
    out += "    <page id=\"page0\">\n";

    for (const auto& p : places) {
        out += "      <place id=\"";
        escape_into(out, p);
        out += "\"";
        auto marking = net.initial_marking.find(p);
        if (marking != net.initial_marking.end() && marking->second > 0) {
            out += ">\n        <initialMarking><text>" + std::to_string(marking->second) +
                   "</text></initialMarking>\n      </place>\n";
        } else {
            out += "/>\n";
        }
    }
    for (const auto& t : transitions) {
        out += "      <transition id=\"";
        escape_into(out, t.id);
        out += "\"";
        if (t.label) {
            out += ">\n        <name><text>";
            escape_into(out, *t.label);
            out += "</text></name>\n      </transition>\n";
        } else {
            out += "/>\n";
        }
    }
    std::size_t arc_index = 0;
    for (const auto& a : arcs) {
        out += "      <arc id=\"arc" + std::to_string(arc_index++) + "\" source=\"";
        escape_into(out, a.source);
        out += "\" target=\"";
        escape_into(out, a.target);
        out += "\"/>\n";
    }

    out += "    </page>\n  </net>\n</pnml>\n";
    return out;
}

PetriNet read_pnml_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pnml(buf.str());
}

void write_pnml_file(const PetriNet& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << serialize_pnml(net);
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pnembed
