#include <sstream>

#include "bvd/coding.hpp"
#include "bvd/extension.hpp"
#include "bvd/serial.hpp"
#include "doctest.h"

using namespace bvd;

TEST_CASE("diagram JSON round-trips bit-exactly in explicit mode") {
    auto d = sturmian_diagram({2, 1, 3});
    Json j = diagram_to_json(d);
    CHECK(j.contains("incoming"));
    auto d2 = diagram_from_json(j);
    CHECK(diagram_to_json(d2) == j);
    CHECK(d2.level_sizes() == d.level_sizes());
    for (int n = 0; n < d.depth(); ++n)
        for (VertexIndex v = 0; v < d.level_size(n + 1); ++v)
            CHECK(d2.incoming(n, v).expand() == d.incoming(n, v).expand());
}

TEST_CASE("wide coloured diagrams round-trip through the run encoding") {
    auto base = odometer_diagram(std::vector<std::uint64_t>(18, 8));
    ColourBudget budget;
    budget.coloured_levels = 2;
    auto col = color_diagram(base, budget);
    Json j = diagram_to_json(col.diagram);
    CHECK(j.contains("incoming_runs"));
    auto d2 = diagram_from_json(j);
    CHECK(d2 == col.diagram);
    CHECK(diagram_to_json(d2) == j);
}

TEST_CASE("coloured classes survive the explicit encoding") {
    std::vector<std::vector<IncomingList>> in;
    in.push_back({IncomingList::from_runs({EdgeRun{6, EdgeClass::Plain, {0}}})});
    in.push_back({IncomingList::from_runs({EdgeRun{1, EdgeClass::Plain, {0}},
                                           EdgeRun{3, EdgeClass::Thick, {0}},
                                           EdgeRun{1, EdgeClass::Thin, {0}},
                                           EdgeRun{1, EdgeClass::Plain, {0}}})});
    OrderedBratteliDiagram d({1, 1, 1}, std::move(in));
    Json j = diagram_to_json(d);
    REQUIRE(j.contains("edge_class"));
    auto d2 = diagram_from_json(j);
    CHECK(d2.incoming(1, 0).thick_count() == 3);
    CHECK(d2.incoming(1, 0).class_at(4) == EdgeClass::Thin);
    CHECK(diagram_to_json(d2) == j);
}

TEST_CASE("triples round-trip and rebuild the copied diagram") {
    auto base = odometer_diagram(std::vector<std::uint64_t>(40, 2));
    ExtendBudget budget;
    budget.target_depth = 4;
    auto res = build_two_to_one(base, budget);
    Json j = triple_to_json(res.triple);
    auto t2 = triple_from_json(j);
    CHECK(t2.kind == ConstructionKind::TwoToOne);
    CHECK(t2.base == res.triple.base);
    CHECK(t2.extended == res.triple.extended);
    CHECK(triple_to_json(t2) == j);
}

TEST_CASE("rational parsing") {
    CHECK(rational_from_string("3/8") == make_rational(3, 8));
    CHECK(rational_from_string("2") == Rational(2));
    CHECK(rational_from_string("0.25") == make_rational(1, 4));
    CHECK(rational_from_string("0.3") == make_rational(3, 10));
}

TEST_CASE("trace CSV format") {
    std::vector<TraceRow> rows;
    TraceRow r;
    r.step = 4;
    r.s_d = make_rational(1, 2);
    r.s = make_rational(1, 4);
    r.in_d = true;
    rows.push_back(r);
    std::ostringstream out;
    write_trace_csv(rows, out);
    CHECK(out.str() == "step,S_D,S,in_D,S_D_float,S_float\n4,1/2,1/4,1,0.5,0.25\n");
}

TEST_CASE("word export: plain text and run-length JSON") {
    auto d = sturmian_diagram({1, 1, 1, 1, 1});
    auto w = to_word(d, extremal_paths(d, {d.depth(), 0}, 0).first, 8);
    std::ostringstream text;
    write_word_text(w, text);
    CHECK(text.str() == "0 1 0 0 1 0 1 0\n");
    Json j = word_to_json(w);
    auto w2 = word_from_json(j);
    CHECK(w2.symbols == w.symbols);
    CHECK(word_to_json(w2) == j);
}
