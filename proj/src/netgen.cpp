// SPDX-License-Identifier: Apache-2.0
#include "pnembed/netgen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pnembed/errors.hpp"
#include "pnembed/pnml.hpp"

namespace pnembed {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string RuleConfig::code() const {
    std::string s;
    for (int v : {a, b, c, d, e, f}) s += static_cast<char>('0' + v);
    return s;
}

RuleConfig RuleConfig::parse_code(const std::string& code) {
    if (code.size() != 6) throw std::invalid_argument("rule code must have 6 digits: '" + code + "'");
    auto digit = [&](int i, int max) {
        char c = code[i];
        if (c < '0' || c > static_cast<char>('0' + max)) {
            throw std::invalid_argument("invalid rule code '" + code + "'");
        }
        return c - '0';
    };
    RuleConfig cfg;
    cfg.a = digit(0, 1);
    cfg.b = digit(1, 2);
    cfg.c = digit(2, 1);
    cfg.d = digit(3, 1);
    cfg.e = digit(4, 1);
    cfg.f = digit(5, 1);
    return cfg;
}

int RuleConfig::value(char field) const {
    switch (field) {
        case 'A': return a;
        case 'B': return b;
        case 'C': return c;
        case 'D': return d;
        case 'E': return e;
        case 'F': return f;
    }
    throw std::invalid_argument(std::string("unknown rule field '") + field + "'");
}

PetriNet base_model() {
    PetriNet net;
    net.id = "pdc_000000";

    auto place = [&](const std::string& id) { net.places.push_back(id); };
    auto task = [&](const std::string& id) { net.transitions.push_back({id, id}); };
    auto arc = [&](const std::string& s, const std::string& t) { net.arcs.push_back({s, t}); };

    // Head chain: p00 -> t01 -> p01 -> t02 -> p02 -> t03 -> p03.
    for (const char* p : {"p00", "p01", "p02", "p03"}) place(p);
    for (const char* t : {"t01", "t02", "t03"}) task(t);
    arc("p00", "t01");
    arc("t01", "p01");
    arc("p01", "t02");
    arc("t02", "p02");
    arc("p02", "t03");
    arc("t03", "p03");

    // AND block: t04 splits into two two-task branches joined by t09.
    for (const char* p : {"pa0", "pa1", "pa2", "pb0", "pb1", "pb2", "p04"}) place(p);
    for (const char* t : {"t04", "t05", "t06", "t07", "t08", "t09"}) task(t);
    arc("p03", "t04");
    arc("t04", "pa0");
    arc("t04", "pb0");
    arc("pa0", "t05");
    arc("t05", "pa1");
    arc("pa1", "t06");
    arc("t06", "pa2");
    arc("pb0", "t07");
    arc("t07", "pb1");
    arc("pb1", "t08");
    arc("t08", "pb2");
    arc("pa2", "t09");
    arc("pb2", "t09");
    arc("t09", "p04");

    // First XOR pair: p04 chooses t10 or t11, both ending in p05.
    place("p05");
    task("t10");
    task("t11");
    arc("p04", "t10");
    arc("p04", "t11");
    arc("t10", "p05");
    arc("t11", "p05");

    // Main chain: eight sequential tasks t12..t19 through q01..q08.
    for (const char* p : {"q01", "q02", "q03", "q04", "q05", "q06", "q07", "q08"}) place(p);
    const char* chain[] = {"t12", "t13", "t14", "t15", "t16", "t17", "t18", "t19"};
    const char* waypoints[] = {"p05", "q01", "q02", "q03", "q04", "q05", "q06", "q07", "q08"};
    for (int i = 0; i < 8; ++i) {
        task(chain[i]);
        arc(waypoints[i], chain[i]);
        arc(chain[i], waypoints[i + 1]);
    }

    // Second XOR pair: q08 chooses one of t20/t21/t22, all ending in q09.
    place("q09");
    for (const char* t : {"t20", "t21", "t22"}) {
        task(t);
        arc("q08", t);
        arc(t, "q09");
    }

    // Closing tasks: q09 -> t23 -> q10 -> t24 -> pend.
    for (const char* p : {"q10", "pend"}) place(p);
    task("t23");
    task("t24");
    arc("q09", "t23");
    arc("t23", "q10");
    arc("q10", "t24");
    arc("t24", "pend");

    net.initial_marking["p00"] = 1;
    return net;
}

std::vector<RuleConfig> enumerate_configs() {
    std::vector<RuleConfig> out;
    out.reserve(96);
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 2; ++b)
            for (int c = 0; c <= 1; ++c)
                for (int d = 0; d <= 1; ++d)
                    for (int e = 0; e <= 1; ++e)
                        for (int f = 0; f <= 1; ++f) out.push_back({a, b, c, d, e, f});
    return out;
}

namespace {

void add_silent_path(PetriNet& net, const std::string& id, const std::string& from_place,
                     const std::string& to_place) {
    net.transitions.push_back({id, std::nullopt});
    net.arcs.push_back({from_place, id});
    net.arcs.push_back({id, to_place});
}

void silence(PetriNet& net, const std::string& transition_id) {
    for (auto& t : net.transitions) {
        if (t.id == transition_id) {
            t.label = std::nullopt;
            return;
        }
    }
    throw std::logic_error("no transition '" + transition_id + "' to silence");
}

}  // namespace

PetriNet apply_rules(const PetriNet& base, const RuleConfig& cfg) {
    PetriNet net = base;
    net.id = "pdc_" + cfg.code();

    // A: silent bypass of the head segment t01-t02, straight from the
    // source place.
    if (cfg.a == 1) add_silent_path(net, "sA", "p00", "p02");

    // B: back-edge loop around the second XOR pair; "complex" adds the
    // forward shortcut between the loop's attachment points.
    if (cfg.b >= 1) add_silent_path(net, "sB1", "q09", "q08");
    if (cfg.b == 2) add_silent_path(net, "sB2", "q08", "q09");

    // C: the AND block becomes an OR construct; branch a can be skipped as
    // a whole, branch b can skip its first task.
    if (cfg.c == 1) {
        add_silent_path(net, "sCa", "pa0", "pa2");
        add_silent_path(net, "sCb", "pb0", "pb1");
    }

    // D: designated tasks become invisible.
    if (cfg.d == 1) {
        silence(net, "t05");
        silence(net, "t07");
        silence(net, "t12");
        silence(net, "t18");
    }

    // E: the same designated tasks become optional via a parallel silent
    // skip, so the added task pairs mirror the ones rule D produces.
    if (cfg.e == 1) {
        add_silent_path(net, "sE1", "p05", "q01");
        add_silent_path(net, "sE2", "q06", "q07");
    }

    // F: one added task, parallel to t23, reuses the label of t02.
    if (cfg.f == 1) {
        net.transitions.push_back({"t25", "t02"});
        net.arcs.push_back({"q09", "t25"});
        net.arcs.push_back({"t25", "q10"});
    }

    return net;
}

DatasetManifest generate_dataset(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());

    const PetriNet base = base_model();
    DatasetManifest manifest;
    for (const RuleConfig& cfg : enumerate_configs()) {
        PetriNet net = apply_rules(base, cfg);
        std::string file = "pdc_" + cfg.code() + ".pnml";
        write_pnml_file(net, (fs::path(dir) / file).string());
        manifest.entries.push_back({file, cfg});
    }
    write_manifest(manifest, (fs::path(dir) / "manifest.json").string());
    return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
    ordered_json arr = ordered_json::array();
    for (const auto& entry : manifest.entries) {
        const RuleConfig& c = entry.config;
        arr.push_back({{"file", entry.file},
                       {"code", c.code()},
                       {"A", c.a},
                       {"B", c.b},
                       {"C", c.c},
                       {"D", c.d},
                       {"E", c.e},
                       {"F", c.f}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << arr.dump(2) << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    ordered_json arr;
    try {
        in >> arr;
    } catch (const std::exception& e) {
        throw IoError("cannot parse manifest '" + path + "': " + e.what());
    }
    DatasetManifest manifest;
    for (const auto& item : arr) {
        ManifestEntry entry;
        entry.file = item.at("file").get<std::string>();
        entry.config = RuleConfig::parse_code(item.at("code").get<std::string>());
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

}  // namespace pnembed
