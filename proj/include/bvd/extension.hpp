#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bvd/diagram.hpp"
#include "bvd/numeric.hpp"

namespace bvd {

/// How many copies each base vertex gets and, per copied edge, which copy of
/// the base edge's source it starts in. Rows reuse the run encoding: the
/// row for (level n, base range vertex l, range copy j) assigns one source
/// copy index per base order position. Order and ranges are inherited from
/// the base by construction.
struct CopyPasteSpec {
    // copy_counts[n-1][l] = copies of base vertex l at level n (n >= 1)
    std::vector<std::vector<std::uint32_t>> copy_counts;
    // rows[n][l][j], n = 0..depth-1; values are source copy indices
    std::vector<std::vector<std::vector<IncomingList>>> rows;

    std::uint32_t copies(int level, VertexIndex base_vertex) const {
        return copy_counts.at(level - 1).at(base_vertex);
    }
};

enum class ConstructionKind { Generic, TwoToOne, ThreeToOne };

struct ExtensionTriple {
    OrderedBratteliDiagram base;
    OrderedBratteliDiagram extended;  // carries copy_meta
    CopyPasteSpec spec;
    ConstructionKind kind = ConstructionKind::Generic;

    /// Flat index of copy j of base vertex l at `level` in the extended
    /// diagram.
    VertexIndex extended_index(int level, VertexIndex base_vertex, std::uint32_t copy) const;
};

/// Verifies the spec against the base (shape, value ranges, level-0
/// degeneracy). Throws InvalidInput on mismatch.
void check_spec_shape(const OrderedBratteliDiagram& base, const CopyPasteSpec& spec);

/// Builds the copy-pasted diagram: copies per vertex, copied edges keeping
/// their order positions, sources assigned by the spec rows.
OrderedBratteliDiagram copy_paste(const OrderedBratteliDiagram& base, const CopyPasteSpec& spec);

/// Identity spec: one copy per vertex.
CopyPasteSpec identity_spec(const OrderedBratteliDiagram& base);

/// Drops copy indices: picks are unchanged, the trail maps through
/// copy_meta.
FinitePath collapse_path(const ExtensionTriple& triple, const FinitePath& path_in_extended);

/// Structural re-check that `extended` is exactly `copy_paste(base, spec)`
/// and that every copied edge starts in a copy of its base edge's source.
std::vector<std::string> check_copy_paste(const ExtensionTriple& triple);

struct ExtendBudget {
    int target_depth = 7;          // levels of the output base diagram
    int max_window = 48;           // widest telescoping window per level
    std::uint64_t max_edges_per_level = std::uint64_t(1) << 40;
    std::uint64_t expansion_guard = 1u << 20;
};

struct RatioCheck {
    int level = 0;
    VertexIndex vertex = 0;
    BigCount numerator;    // |E^ex(v0,v)|
    BigCount denominator;  // |E(v0,v)|
    bool ok = false;       // ratio < 1/2
};

struct TwoToOneResult {
    ExtensionTriple triple;
    std::vector<int> cuts;                 // telescoping applied to the input
    std::vector<RatioCheck> ratio_checks;  // exact |E^ex|/|E| per level >= 2
};

/// The doubling construction: two copies per vertex plus a third copy of the
/// minimal-edge source; minimal copies start in the extra copy, maximal
/// copies in copy 0, edges from the extra copy alternate source copies by
/// parity of the same-source count, interior edges keep their copy index.
/// Preprocesses the base so interior-extremal path ratios stay below 1/2.
TwoToOneResult build_two_to_one(const OrderedBratteliDiagram& base, const ExtendBudget& budget);

struct ColourBudget {
    int coloured_levels = 2;       // colour edge levels 1..coloured_levels
    std::uint64_t thin_width = 2;  // minimum thin band width
    int max_window = 64;           // in input levels, per output level
    std::uint64_t max_edges_per_level = std::uint64_t(1) << 40;
    std::uint64_t expansion_guard = 1u << 20;
};

struct ColourLevelReport {
    int level = 0;  // coloured edge level n
    BigCount i1;    // 1 + max unambiguous run over E_{0,n}
    BigCount i2;    // 2 * i1
    std::uint64_t rho = 0;         // r - M, uniform at this level
    std::uint64_t min_degree = 0;  // min_l r_l(n)
    std::vector<std::uint64_t> thick_counts;  // M_l per vertex
    // exact inequality witnesses: lhs < rhs
    BigCount band_lhs, band_rhs;      // 2*3^n*(rho*i1+i2) < min_l M_l
    BigCount rho_lhs, rho_rhs;        // max_m 2*3^m*i2^m < rho (levels >= 2)
    bool rho_required = false;
};

struct ColouringResult {
    OrderedBratteliDiagram diagram;
    std::vector<int> cuts;
    std::vector<ColourLevelReport> levels;
};

/// Telescopes and colours edge levels 1..coloured_levels so that the exact
/// band inequality 2*3^n*((r-M)*i1 + i2) < M holds at every coloured level
/// and, at levels >= 2, the crossing inequalities 2*3^m*i2^m < r-M hold for
/// all m <= n. Thin bands get width rho-2 >= thin_width.
ColouringResult color_diagram(const OrderedBratteliDiagram& base, const ColourBudget& budget);

/// The tripling construction over a coloured base: three copies per vertex
/// plus a fourth copy of the minimal-edge source; thick edges keep their
/// copy index, thin edges merge copies 0,1 into source copy 0 and copy 2
/// into source copy 1, edges from the extra copy cycle source copies mod 3.
ExtensionTriple build_three_to_one(const OrderedBratteliDiagram& coloured_base);

/// Vertex of the extended (copy-set) diagram: a base vertex together with a
/// nonempty set of its copies, as a bitmask.
struct SetVertex {
    VertexIndex base = 0;
    std::uint32_t copy_set = 0;

    friend bool operator==(const SetVertex&, const SetVertex&) = default;
};

/// The copy-set diagram of a triple: vertices are base vertices labelled
/// with nonempty copy sets, one edge per surviving base order position, the
/// order inherited. Pruned backward from the horizon: a vertex survives iff
/// it reaches the top level.
struct ExtendedDiagram {
    OrderedBratteliDiagram diagram;
    std::vector<std::vector<SetVertex>> labels;  // labels[n][vertex]
    int horizon = 0;
    bool positions_dropped = false;
    // kept_positions[n][v]: base position per order index, only present when
    // pruning removed positions from that list
    std::vector<std::vector<std::optional<std::vector<std::uint64_t>>>> kept_positions;

    VertexIndex find_vertex(int level, VertexIndex base_vertex, std::uint32_t copy_set) const;
    /// Base order position of edge `pick` into (level+1, v).
    std::uint64_t base_position(int level, VertexIndex v, std::uint64_t pick) const;
    bool forked(int level, VertexIndex v) const;  // |copy set| >= 2
    std::vector<bool> forked_level1() const;
};

struct ExtendOptions {
    std::uint32_t max_set_vertices_per_level = 4096;
    std::uint64_t drop_rebuild_guard = 1u << 16;
};

ExtendedDiagram extended_diagram(const ExtensionTriple& triple, int horizon,
                                 const ExtendOptions& opts = {});

/// Per-level copy sets of the full preimage of a base head (level 0 =
/// {root}); sets shrink as the horizon grows.
std::vector<std::uint32_t> full_preimage_sets(const ExtensionTriple& triple,
                                              const FinitePath& base_head);

/// The unique copy-set path recording every copy reachable by some lift.
FinitePath full_preimage_path(const ExtendedDiagram& ed, const ExtensionTriple& triple,
                              const FinitePath& base_head);

struct FibreCardinality {
    std::uint32_t count = 0;
    int horizon = 0;  // the head's end level; exact only up to this horizon
};

/// |copy set| of the full preimage at the lowest level >= 1.
FibreCardinality fibre_cardinality(const ExtensionTriple& triple, const FinitePath& base_head);

}  // namespace bvd
