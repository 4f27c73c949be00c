#pragma once

#include <map>
#include <tuple>

#include "bvd/automaton.hpp"
#include "bvd/diagram.hpp"
#include "bvd/numeric.hpp"

namespace bvd {

/// Aggregate of a rank window [a, b) at a fixed end vertex. Each rank t
/// contributes hit(t) in {0,1} and the weighted value
/// w_step + w_hit * hit(t); best is the maximum over nonempty prefixes of
/// the running weighted sum, best_len the smallest prefix length achieving
/// it.
struct WindowAggregate {
    BigCount count = 0;
    BigCount hits = 0;
    BigCount weighted = 0;
    BigCount best = 0;
    BigCount best_len = 0;
    bool has_best = false;
};

/// Boundary-digit window evaluator over the mixed-radix path order: costs
/// O(depth * runs * cycle * states) big-integer operations per query instead
/// of enumerating ranks. Memoizes full-sweep aggregates per (vertex,
/// continuation mask).
class WindowCounter {
  public:
    WindowCounter(const OrderedBratteliDiagram& d, EdgePredicateAutomaton automaton,
                  int from_level = 0, BigCount weight_hit = 1, BigCount weight_step = 0);

    WindowAggregate window(VertexRef v, const BigCount& lo, const BigCount& hi);
    BigCount hits(VertexRef v, const BigCount& lo, const BigCount& hi);

    const OrderedBratteliDiagram& diagram() const { return *diagram_; }
    int from_level() const { return from_level_; }

  private:
    using GMask = std::uint8_t;

    WindowAggregate full(int level, VertexIndex u, GMask g);
    WindowAggregate range(int level, VertexIndex u, GMask g, const BigCount& lo,
                          const BigCount& hi);
    WindowAggregate base_case(GMask g) const;
    GMask compose(GMask g, const EdgeContext& ctx) const;

    const OrderedBratteliDiagram* diagram_;
    EdgePredicateAutomaton automaton_;
    int from_level_;
    BigCount w_hit_;
    BigCount w_step_;
    std::vector<std::vector<BigCount>> table_;  // counts from from_level_
    std::map<std::tuple<int, VertexIndex, GMask>, WindowAggregate> memo_;
};

/// Number of ranks t in [lo, hi) whose path into v is accepted.
BigCount count_in_window(const OrderedBratteliDiagram& d, const EdgePredicateAutomaton& a,
                         VertexRef v, const BigCount& lo, const BigCount& hi,
                         int from_level = 0);

}  // namespace bvd
