#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "bvd/diagram.hpp"

namespace bvd {

/// What a predicate automaton sees of one edge. `pos` is only meaningful to
/// positional automata; everything else is constant on a run phase, which is
/// what lets the window counter aggregate runs without enumerating them.
struct EdgeContext {
    int level = 0;
    VertexIndex range = 0;
    VertexIndex source = 0;
    std::uint64_t pos = 0;
    EdgeClass cls = EdgeClass::Plain;
    bool minimal = false;
    bool maximal = false;

    bool extremal() const { return minimal || maximal; }
};

/// Deterministic classifier with at most 8 states, run bottom-up over the
/// edges of a path. A path is a hit when the final state is accepting.
struct EdgePredicateAutomaton {
    int states = 1;
    int initial = 0;
    std::uint8_t accept_mask = 0;
    bool positional = false;  // forces per-position evaluation
    std::function<int(int, const EdgeContext&)> step;
    std::string name;
};

EdgePredicateAutomaton accept_all_automaton();

/// Seen an extremal edge at level >= min_level (and <= max_level when >= 0).
/// Accepting on "seen"; complement via `complement`.
EdgePredicateAutomaton extremal_seen_automaton(int min_level, int max_level = -1,
                                               bool complement = false);

/// Membership predicate for the irregularity set of the thick/thin
/// construction: accepts when the path has no extremal edge at level >= 1
/// and at most one thin edge.
EdgePredicateAutomaton thick_construction_d_automaton();

/// Thin-or-extremal seen at levels 1..n (the C* cylinders); with
/// `include_top_extremal`, also extremal at level n+1 (the C** cylinders).
EdgePredicateAutomaton thin_or_extremal_automaton(int n, bool include_top_extremal);

/// Edge at `level` is not Thick.
EdgePredicateAutomaton not_thick_at_automaton(int level);

/// Path's vertex at `level` (the source of its level-`level` edge) equals v.
EdgePredicateAutomaton traverses_automaton(int level, VertexIndex v);

/// Accepts when the range of the level-0 edge is flagged; used for counting
/// visits to forked level-1 vertices of an extended diagram.
EdgePredicateAutomaton level1_flag_automaton(std::vector<bool> flags);

/// Positional test automaton: pick at `level` equals m.
EdgePredicateAutomaton pick_equals_automaton(int level, std::uint64_t m);

}  // namespace bvd
