#include "bvd/serial.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bvd {

namespace {

EdgeClass class_from_name(const std::string& s) {
    if (s == "plain") return EdgeClass::Plain;
    if (s == "thick") return EdgeClass::Thick;
    if (s == "thin") return EdgeClass::Thin;
    throw InvalidInput("unknown edge class: " + s);
}

Json list_to_json(const IncomingList& in, std::uint64_t explicit_limit, Json* classes) {
    if (in.degree() <= explicit_limit) {
        Json arr = Json::array();
        Json cls = Json::array();
        std::uint64_t pos = 0;
        for (const EdgeRun& r : in.runs()) {
            for (std::uint64_t i = 0; i < r.count; ++i, ++pos) {
                arr.push_back(r.sources[i % r.sources.size()]);
                cls.push_back(edge_class_name(r.cls));
            }
        }
        if (classes) *classes = std::move(cls);
        return arr;
    }
    Json runs = Json::array();
    for (const EdgeRun& r : in.runs()) {
        Json run;
        run["count"] = r.count;
        run["class"] = edge_class_name(r.cls);
        run["sources"] = r.sources;
        runs.push_back(std::move(run));
    }
    if (classes) *classes = nullptr;
    return runs;
}

IncomingList list_from_json(const Json& sources, const Json* classes, bool runs_mode) {
    if (runs_mode) {
        std::vector<EdgeRun> runs;
        for (const Json& r : sources) {
            EdgeRun run;
            run.count = r.at("count").get<std::uint64_t>();
            run.cls = class_from_name(r.at("class").get<std::string>());
            run.sources = r.at("sources").get<std::vector<VertexIndex>>();
            runs.push_back(std::move(run));
        }
        return IncomingList::from_runs(std::move(runs));
    }
    std::vector<EdgeRun> runs;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        EdgeRun run;
        run.count = 1;
        run.cls = classes && !classes->is_null()
                      ? class_from_name((*classes)[i].get<std::string>())
                      : EdgeClass::Plain;
        run.sources = {sources[i].get<VertexIndex>()};
        runs.push_back(std::move(run));
    }
    return IncomingList::from_runs(std::move(runs));
}

}  // namespace

Json diagram_to_json(const OrderedBratteliDiagram& d, std::uint64_t explicit_limit) {
    Json j;
    j["schema"] = "bvd.diagram/1";
    j["depth"] = d.depth();
    j["level_sizes"] = d.level_sizes();

    bool any_runs = false;
    for (int n = 0; n < d.depth() && !any_runs; ++n)
        for (VertexIndex v = 0; v < d.level_size(n + 1); ++v)
            any_runs = any_runs || d.incoming(n, v).degree() > explicit_limit;

    bool any_coloured = false;
    for (int n = 0; n < d.depth(); ++n) any_coloured = any_coloured || d.level_coloured(n);

    Json incoming = Json::array();
    Json edge_class = Json::array();
    for (int n = 0; n < d.depth(); ++n) {
        Json level = Json::array();
        Json level_cls = Json::array();
        for (VertexIndex v = 0; v < d.level_size(n + 1); ++v) {
            Json cls;
            level.push_back(list_to_json(d.incoming(n, v), any_runs ? 0 : explicit_limit, &cls));
            level_cls.push_back(std::move(cls));
        }
        incoming.push_back(std::move(level));
        edge_class.push_back(std::move(level_cls));
    }
    j[any_runs ? "incoming_runs" : "incoming"] = std::move(incoming);
    if (!any_runs && any_coloured) j["edge_class"] = std::move(edge_class);

    if (d.has_copy_meta()) {
        Json meta = Json::array();
        for (int n = 1; n <= d.depth(); ++n) {
            Json level = Json::array();
            for (VertexIndex v = 0; v < d.level_size(n); ++v) {
                const CopyMeta& m = d.copy_meta(n, v);
                level.push_back(Json{{"base", m.base}, {"copy", m.copy}});
            }
            meta.push_back(std::move(level));
        }
        j["copy_meta"] = std::move(meta);
    }
    return j;
}

OrderedBratteliDiagram diagram_from_json(const Json& j) {
    if (j.at("schema").get<std::string>() != "bvd.diagram/1")
        throw InvalidInput("unsupported diagram schema");
    auto sizes = j.at("level_sizes").get<std::vector<std::uint32_t>>();
    const bool runs_mode = j.contains("incoming_runs");
    const Json& incoming = runs_mode ? j.at("incoming_runs") : j.at("incoming");
    const Json* classes = j.contains("edge_class") ? &j.at("edge_class") : nullptr;

    std::vector<std::vector<IncomingList>> lists(incoming.size());
    for (std::size_t n = 0; n < incoming.size(); ++n) {
        for (std::size_t v = 0; v < incoming[n].size(); ++v) {
            const Json* cls = classes ? &(*classes)[n][v] : nullptr;
            lists[n].push_back(list_from_json(incoming[n][v], cls, runs_mode));
        }
    }
    OrderedBratteliDiagram d(std::move(sizes), std::move(lists));
    if (j.contains("copy_meta")) {
        std::vector<std::vector<CopyMeta>> meta(d.depth());
        const Json& m = j.at("copy_meta");
        for (int n = 0; n < d.depth(); ++n)
            for (const Json& e : m[n])
                meta[n].push_back(CopyMeta{e.at("base").get<VertexIndex>(),
                                           e.at("copy").get<std::uint32_t>()});
        d.attach_copy_meta(std::move(meta));
    }
    return d;
}

Json triple_to_json(const ExtensionTriple& t, std::uint64_t explicit_limit) {
    Json j;
    j["schema"] = "bvd.triple/1";
    switch (t.kind) {
        case ConstructionKind::Generic: j["kind"] = "generic"; break;
        case ConstructionKind::TwoToOne: j["kind"] = "two_to_one"; break;
        case ConstructionKind::ThreeToOne: j["kind"] = "three_to_one"; break;
    }
    j["base"] = diagram_to_json(t.base, explicit_limit);
    j["copy_counts"] = t.spec.copy_counts;
    Json rows = Json::array();
    for (const auto& level : t.spec.rows) {
        Json lv = Json::array();
        for (const auto& vertex : level) {
            Json copies = Json::array();
            for (const IncomingList& row : vertex) {
                Json runs = Json::array();
                for (const EdgeRun& r : row.runs())
                    runs.push_back(Json{{"count", r.count}, {"values", r.sources}});
                copies.push_back(std::move(runs));
            }
            lv.push_back(std::move(copies));
        }
        rows.push_back(std::move(lv));
    }
    j["rows"] = std::move(rows);
    return j;
}

ExtensionTriple triple_from_json(const Json& j) {
    if (j.at("schema").get<std::string>() != "bvd.triple/1")
        throw InvalidInput("unsupported triple schema");
    ExtensionTriple t;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "generic")
        t.kind = ConstructionKind::Generic;
    else if (kind == "two_to_one")
        t.kind = ConstructionKind::TwoToOne;
    else if (kind == "three_to_one")
        t.kind = ConstructionKind::ThreeToOne;
    else
        throw InvalidInput("unknown triple kind");
    t.base = diagram_from_json(j.at("base"));
    t.spec.copy_counts = j.at("copy_counts").get<std::vector<std::vector<std::uint32_t>>>();
    for (const Json& level : j.at("rows")) {
        std::vector<std::vector<IncomingList>> lv;
        for (const Json& vertex : level) {
            std::vector<IncomingList> copies;
            for (const Json& row : vertex) {
                std::vector<EdgeRun> runs;
                for (const Json& r : row)
                    runs.push_back(EdgeRun{r.at("count").get<std::uint64_t>(), EdgeClass::Plain,
                                           r.at("values").get<std::vector<VertexIndex>>()});
                copies.push_back(IncomingList::from_runs(std::move(runs)));
            }
            lv.push_back(std::move(copies));
        }
        t.spec.rows.push_back(std::move(lv));
    }
    t.extended = copy_paste(t.base, t.spec);
    return t;
}

void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);
    Json j;
    in >> j;
    return j;
}

namespace {

std::string float_string(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out) {
    out << "step,S_D,S,in_D,S_D_float,S_float\n";
    for (const TraceRow& r : rows) {
        out << r.step.get_str() << "," << rational_string(r.s_d) << "," << rational_string(r.s)
            << "," << (r.in_d ? 1 : 0) << "," << float_string(rational_double(r.s_d)) << ","
            << float_string(rational_double(r.s)) << "\n";
    }
}

void write_word_text(const SymbolWord& word, std::ostream& out) {
    for (std::size_t i = 0; i < word.symbols.size(); ++i)
        out << (i ? " " : "") << word.symbols[i];
    out << "\n";
}

Json word_to_json(const SymbolWord& word) {
    Json j;
    j["schema"] = "bvd.word/1";
    j["alphabet"] = word.alphabet_size;
    j["origin"] = word.origin;
    Json runs = Json::array();
    std::size_t i = 0;
    while (i < word.symbols.size()) {
        std::size_t k = i;
        while (k < word.symbols.size() && word.symbols[k] == word.symbols[i]) ++k;
        runs.push_back(Json::array({word.symbols[i], k - i}));
        i = k;
    }
    j["runs"] = std::move(runs);
    return j;
}

SymbolWord word_from_json(const Json& j) {
    if (j.at("schema").get<std::string>() != "bvd.word/1")
        throw InvalidInput("unsupported word schema");
    SymbolWord w;
    w.alphabet_size = j.at("alphabet").get<std::uint32_t>();
    w.origin = j.value("origin", std::string());
    for (const Json& run : j.at("runs")) {
        const std::uint32_t sym = run[0].get<std::uint32_t>();
        const std::uint64_t count = run[1].get<std::uint64_t>();
        w.symbols.insert(w.symbols.end(), count, sym);
    }
    return w;
}

std::string rational_json(const Rational& r) { return rational_string(r); }

Rational rational_from_string(const std::string& s) {
    const auto dot = s.find('.');
    if (dot == std::string::npos) {
        Rational r(s, 10);
        r.canonicalize();
        return r;
    }
    const std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t frac = s.size() - dot - 1;
    BigCount den = 1;
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
    return make_rational(BigCount(digits, 10), den);
}

}  // namespace bvd
