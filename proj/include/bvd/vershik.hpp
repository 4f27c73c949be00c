#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bvd/diagram.hpp"
#include "bvd/numeric.hpp"

namespace bvd {

/// Successor in the path order among co-ranged paths: mixed-radix increment
/// with refill of the levels below the carry. Empty when the path is maximal
/// into its end vertex.
std::optional<FinitePath> successor(const OrderedBratteliDiagram& d, const FinitePath& path);

/// Inverse of successor; empty on the minimal path.
std::optional<FinitePath> predecessor(const OrderedBratteliDiagram& d, const FinitePath& path);

/// Number of unambiguous iterations before the maximal path. For a head from
/// an intermediate level the unique maximal path into its source is
/// prepended first.
BigCount steps_to_max(const OrderedBratteliDiagram& d, const FinitePath& path);

/// True iff every pick is the second largest at its range vertex (which
/// requires degree >= 2 along the whole trail).
bool is_premaximal(const OrderedBratteliDiagram& d, const FinitePath& path);

/// The at-most-one pre-maximal path per level-N vertex, source level n.
std::vector<FinitePath> premaximal_paths(const OrderedBratteliDiagram& d, int n, int N);

struct ScaleCertificate {
    int n = 0;
    int N = 0;
    Rational delta;
    BigCount min_premaximal_steps;  // min T over pre-maximal paths in E_{n,N}
    BigCount max_base_steps;        // max T over E_{0,n}
    bool vacuous = false;           // no pre-maximal path exists
    bool ok = false;                // min * delta > max, exact

    /// Re-evaluates the cross-multiplied inequality.
    bool holds() const;
};

/// Exact test that N exceeds n on scale delta; vacuously succeeds (flagged)
/// when E_{n,N} has no pre-maximal path.
ScaleCertificate exceeds_on_scale(const OrderedBratteliDiagram& d, int n, int N,
                                  const Rational& delta);

/// Smallest N <= max_depth whose certificate holds.
int find_exceeding_level(const OrderedBratteliDiagram& d, int n, const Rational& delta,
                         int max_depth);

/// Single-owner cursor over the unambiguous forward orbit of a level-0 path.
class OrbitCursor {
  public:
    OrbitCursor(const OrderedBratteliDiagram& d, FinitePath start);

    const FinitePath& current() const { return current_; }
    const BigCount& steps_taken() const { return steps_; }
    const BigCount& remaining() const { return remaining_; }
    bool exhausted() const { return remaining_ == 0; }

    /// Applies successor once; false when already at the maximal path.
    bool advance();

  private:
    const OrderedBratteliDiagram* diagram_;
    FinitePath current_;
    BigCount steps_;
    BigCount remaining_;
};

struct IterateResult {
    BigCount steps_done;
    bool horizon_exhausted = false;
};

/// Applies successor `steps` times, calling the visitor with every path
/// visited including the start. Stops early (flagged) at the maximal path.
IterateResult iterate(OrbitCursor& cursor, const BigCount& steps,
                      const std::function<void(const FinitePath&, const BigCount&)>& visitor);

}  // namespace bvd
