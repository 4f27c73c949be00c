#include "bvd/automaton.hpp"

#include <utility>

namespace bvd {

EdgePredicateAutomaton accept_all_automaton() {
    EdgePredicateAutomaton a;
    a.states = 1;
    a.accept_mask = 0b1;
    a.step = [](int, const EdgeContext&) { return 0; };
    a.name = "accept_all";
    return a;
}

EdgePredicateAutomaton extremal_seen_automaton(int min_level, int max_level, bool complement) {
    EdgePredicateAutomaton a;
    a.states = 2;
    a.accept_mask = complement ? 0b01 : 0b10;
    a.step = [min_level, max_level](int q, const EdgeContext& ctx) {
        if (q == 1) return 1;
        const bool in_range = ctx.level >= min_level && (max_level < 0 || ctx.level <= max_level);
        return (in_range && ctx.extremal()) ? 1 : 0;
    };
    a.name = complement ? "no_interior_extremal" : "interior_extremal_seen";
    return a;
}

EdgePredicateAutomaton thick_construction_d_automaton() {
    EdgePredicateAutomaton a;
    a.states = 3;
    a.accept_mask = 0b011;  // 0: no thin; 1: one thin; 2: dead
    a.step = [](int q, const EdgeContext& ctx) {
        if (q == 2 || ctx.level < 1) return q;
        if (ctx.extremal()) return 2;
        if (ctx.cls == EdgeClass::Thin) return q + 1;
        return q;
    };
    a.name = "at_most_one_thin_no_extremal";
    return a;
}

EdgePredicateAutomaton thin_or_extremal_automaton(int n, bool include_top_extremal) {
    EdgePredicateAutomaton a;
    a.states = 2;
    a.accept_mask = 0b10;
    a.step = [n, include_top_extremal](int q, const EdgeContext& ctx) {
        if (q == 1) return 1;
        if (ctx.level >= 1 && ctx.level <= n && (ctx.cls == EdgeClass::Thin || ctx.extremal()))
            return 1;
        if (include_top_extremal && ctx.level == n + 1 && ctx.extremal()) return 1;
        return 0;
    };
    a.name = include_top_extremal ? "c_star_star" : "c_star";
    return a;
}

EdgePredicateAutomaton not_thick_at_automaton(int level) {
    EdgePredicateAutomaton a;
    a.states = 3;
    a.accept_mask = 0b010;
    a.step = [level](int q, const EdgeContext& ctx) {
        if (q != 0 || ctx.level != level) return q;
        return ctx.cls != EdgeClass::Thick ? 1 : 2;
    };
    a.name = "not_thick_at_level";
    return a;
}

EdgePredicateAutomaton traverses_automaton(int level, VertexIndex v) {
    EdgePredicateAutomaton a;
    a.states = 2;
    a.accept_mask = 0b10;
    a.step = [level, v](int q, const EdgeContext& ctx) {
        if (q == 1) return 1;
        return (ctx.level == level && ctx.source == v) ? 1 : 0;
    };
    a.name = "traverses_vertex";
    return a;
}

EdgePredicateAutomaton level1_flag_automaton(std::vector<bool> flags) {
    EdgePredicateAutomaton a;
    a.states = 3;
    a.accept_mask = 0b010;
    a.step = [flags = std::move(flags)](int q, const EdgeContext& ctx) {
        if (ctx.level != 0) return q;
        return (ctx.range < flags.size() && flags[ctx.range]) ? 1 : 2;
    };
    a.name = "level1_flagged";
    return a;
}

EdgePredicateAutomaton pick_equals_automaton(int level, std::uint64_t m) {
    EdgePredicateAutomaton a;
    a.states = 2;
    a.accept_mask = 0b10;
    a.positional = true;
    a.step = [level, m](int q, const EdgeContext& ctx) {
        if (q == 1) return 1;
        return (ctx.level == level && ctx.pos == m) ? 1 : 0;
    };
    a.name = "pick_equals";
    return a;
}

}  // namespace bvd
