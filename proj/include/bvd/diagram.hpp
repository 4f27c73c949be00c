#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvd/numeric.hpp"

namespace bvd {

using VertexIndex = std::uint32_t;

struct VertexRef {
    int level = 0;
    VertexIndex index = 0;

    friend bool operator==(const VertexRef&, const VertexRef&) = default;
};

/// Colour annotation carried by non-extremal order positions. Extremality
/// itself is positional: position 0 is minimal, position r-1 maximal.
enum class EdgeClass : std::uint8_t { Plain = 0, Thick = 1, Thin = 2 };

const char* edge_class_name(EdgeClass c);

/// A maximal block of consecutive order positions sharing one class whose
/// source indices repeat cyclically. A run with sources {a} is a constant
/// block; sources {a,b,c} encodes the alternating copy rules exactly.
/// Runs keep coloured levels with ~1e10 edges representable.
struct EdgeRun {
    std::uint64_t count = 0;
    EdgeClass cls = EdgeClass::Plain;
    std::vector<VertexIndex> sources;

    friend bool operator==(const EdgeRun&, const EdgeRun&) = default;
};

/// Ordered incoming-edge list of one vertex. Position m = 0..degree()-1 is
/// the identity of the edge and its rank in the total order on co-ranged
/// edges. Canonical form keeps positions 0 and degree()-1 in singleton runs
/// so that every run is constant in (class, minimal flag, maximal flag).
class IncomingList {
  public:
    IncomingList() = default;
    static IncomingList from_sources(const std::vector<VertexIndex>& sources);
    static IncomingList from_runs(std::vector<EdgeRun> runs);

    std::uint64_t degree() const { return degree_; }
    VertexIndex source_at(std::uint64_t m) const;
    EdgeClass class_at(std::uint64_t m) const;
    std::span<const EdgeRun> runs() const { return runs_; }

    /// Number of Thick positions (the colouring's M); 0 when uncoloured.
    std::uint64_t thick_count() const;
    bool coloured() const;

    /// Expands to one source index per position. Guarded by caller.
    std::vector<VertexIndex> expand() const;

    friend bool operator==(const IncomingList&, const IncomingList&) = default;

  private:
    void canonicalize();

    std::vector<EdgeRun> runs_;
    std::uint64_t degree_ = 0;
};

struct CopyMeta {
    VertexIndex base = 0;
    std::uint32_t copy = 0;

    friend bool operator==(const CopyMeta&, const CopyMeta&) = default;
};

struct Violation {
    std::string code;
    int level = 0;
    VertexIndex vertex = 0;
    std::string message;
};

/// Finite truncation of an ordered Bratteli diagram. Levels 0..depth carry
/// level_sizes(n) vertices; incoming(n, v) lists the edges from level n into
/// vertex v at level n+1 in order. Immutable after construction.
class OrderedBratteliDiagram {
  public:
    OrderedBratteliDiagram() = default;
    OrderedBratteliDiagram(std::vector<std::uint32_t> level_sizes,
                           std::vector<std::vector<IncomingList>> incoming);

    int depth() const { return static_cast<int>(level_sizes_.size()) - 1; }
    std::uint32_t level_size(int level) const { return level_sizes_.at(level); }
    const std::vector<std::uint32_t>& level_sizes() const { return level_sizes_; }

    /// Edges from `level` into vertex `v` at `level`+1.
    const IncomingList& incoming(int level, VertexIndex v) const {
        return incoming_.at(level).at(v);
    }
    std::uint64_t edge_count_into(int level, VertexIndex v) const {
        return incoming(level, v).degree();
    }

    bool has_copy_meta() const { return !copy_meta_.empty(); }
    const CopyMeta& copy_meta(int level, VertexIndex v) const {
        return copy_meta_.at(level - 1).at(v);
    }
    const std::vector<std::vector<CopyMeta>>& copy_meta_levels() const { return copy_meta_; }
    void attach_copy_meta(std::vector<std::vector<CopyMeta>> meta);

    bool level_coloured(int level) const;

    /// |E(v0, v)| style counts with unit weight at `from_level`. The
    /// from_level = 0 table is cached.
    const BigCount& path_count(VertexRef v) const;
    std::vector<std::vector<BigCount>> count_table(int from_level, int to_level) const;

    friend bool operator==(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b) {
        return a.level_sizes_ == b.level_sizes_ && a.incoming_ == b.incoming_ &&
               a.copy_meta_ == b.copy_meta_;
    }

  private:
    std::vector<std::uint32_t> level_sizes_;
    std::vector<std::vector<IncomingList>> incoming_;
    std::vector<std::vector<CopyMeta>> copy_meta_;  // copy_meta_[n-1][v] for level n >= 1

    // lazy level-0 count table; atomically published so const diagrams can
    // be shared across threads (concurrent first calls recompute the same
    // table and race benignly)
    mutable std::shared_ptr<const std::vector<std::vector<BigCount>>> counts_;
    const std::vector<std::vector<BigCount>>& ensure_counts() const;
};

/// A head of an infinite path: picks[k] is the order index of the edge from
/// level start_level+k, trail[k] the vertex traversed at start_level+k.
struct FinitePath {
    int start_level = 0;
    std::vector<std::uint64_t> picks;
    std::vector<VertexIndex> trail;

    int end_level() const { return start_level + static_cast<int>(picks.size()); }
    VertexIndex end_vertex() const { return trail.back(); }
    VertexRef end() const { return {end_level(), end_vertex()}; }

    friend bool operator==(const FinitePath&, const FinitePath&) = default;
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct WindowExceedsHorizon : std::runtime_error {
    explicit WindowExceedsHorizon(const std::string& what) : std::runtime_error(what) {}
};
struct TargetUnreachable : std::runtime_error {
    explicit TargetUnreachable(const std::string& what) : std::runtime_error(what) {}
};
struct LadderInvalid : std::runtime_error {
    explicit LadderInvalid(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// All axiom violations with locations; an empty vector means the diagram is
/// well formed. Violations are data, not failures.
std::vector<Violation> validate(const OrderedBratteliDiagram& d);

/// Weighted prefix sum over an incoming list: sum of weight[source_at(m)]
/// for m in [0, upto).
BigCount weighted_prefix(const IncomingList& in, const std::vector<BigCount>& weight,
                         std::uint64_t upto);

/// Rebuild the trail of a path from its end vertex downwards; picks are
/// interpreted top-down. Throws InvalidInput when a pick is out of range.
FinitePath make_path(const OrderedBratteliDiagram& d, VertexRef end,
                     const std::vector<std::uint64_t>& picks_bottom_up, int start_level);

/// Number of co-ranged paths strictly below `path` in the order.
BigCount rank(const OrderedBratteliDiagram& d, const FinitePath& path);

/// Inverse of rank among paths from `from_level` into v.
FinitePath path_at_rank(const OrderedBratteliDiagram& d, VertexRef v, const BigCount& t,
                        int from_level = 0);

/// Minimal and maximal paths into v starting at from_level.
std::pair<FinitePath, FinitePath> extremal_paths(const OrderedBratteliDiagram& d, VertexRef v,
                                                 int from_level);

/// New diagram whose level k is old level cuts[k]; edges are composite paths
/// ordered by the inherited path order. cuts[0] must be 0.
OrderedBratteliDiagram telescope(const OrderedBratteliDiagram& d,
                                 const std::vector<int>& cuts,
                                 std::uint64_t expansion_guard = 1u << 20);

/// True iff every vertex at level n reaches every vertex at level N.
bool simplicity_window_check(const OrderedBratteliDiagram& d, int n, int N);

struct NormalizeOptions {
    bool require_min = true;
    bool require_max = true;
    int max_window = 16;  // widest telescoping window tried per output level
    int max_depth = 64;
    std::uint64_t expansion_guard = 1u << 20;
};

struct NormalizeResult {
    OrderedBratteliDiagram diagram;
    std::vector<int> cuts;      // telescoping actually applied
    bool relabelled = false;
};

/// Telescopes (and relabels) until, on each level >= 1, all minimal edges
/// share one source (made vertex index 0) and, when required, all maximal
/// edges share one source. Throws BudgetExceeded when no window works.
NormalizeResult extremal_source_normalize(const OrderedBratteliDiagram& d,
                                          const NormalizeOptions& opts = {});

/// Relabels vertices per level; perms[n][old_index] = new_index.
OrderedBratteliDiagram relabel(const OrderedBratteliDiagram& d,
                               const std::vector<std::vector<VertexIndex>>& perms);

}  // namespace bvd
