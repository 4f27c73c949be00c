#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bvd/automaton.hpp"
#include "bvd/extension.hpp"
#include "bvd/numeric.hpp"
#include "bvd/vershik.hpp"
#include "bvd/window.hpp"

namespace bvd {

enum class DMembership { InD, NotInD, UnknownAtHorizon };

/// Cylinder-level membership of the head in the irregularity set, decided at
/// the head's own horizon. The concrete constructions admit exact structural
/// predicates; generic triples can only certify NotInD (copy sets shrink
/// monotonically with the horizon).
DMembership in_irregular_set(const ExtensionTriple& triple, const FinitePath& base_head);

/// The head-classification automaton of a concrete construction: accepts
/// heads whose cylinder meets the irregularity set.
EdgePredicateAutomaton irregular_head_automaton(const ExtensionTriple& triple);

/// Heads into v whose own-horizon fibre forks at level 1, counted in the
/// copy-set diagram (heads correspond rank-for-rank to copy-set paths into
/// (v, all copies)). This is the computable surrogate for |E^D(v0,v)| on
/// generic triples; it shrinks towards the limit as the horizon deepens and
/// never undercounts. The concrete constructions use their exact structural
/// automata instead.
BigCount irregular_head_count(const ExtensionTriple& triple, VertexRef v);

/// S_D^n of the head: forked-vertex visits along the full preimage, counted
/// exactly over the rank window (no stepping).
Rational sdn_direct(const ExtensionTriple& triple, const ExtendedDiagram& ed,
                    const FinitePath& base_head, const BigCount& n);

/// Accepted-path count over the full rank range of v.
BigCount e_class_count(const OrderedBratteliDiagram& d, const EdgePredicateAutomaton& a,
                       VertexRef v);

/// |E^ex(v0,v)| by the source-splitting recursion (independent of the
/// window counter): extremal top edges contribute whole subtrees, interior
/// top edges recurse.
BigCount extremal_head_count_recursive(const OrderedBratteliDiagram& d, VertexRef v);

/// min over v at `level` of |E^D(v0,v)| / |E(v0,v)|.
Rational measure_lower_bound(const ExtensionTriple& triple, int level);

/// Sum over level vertices of ratio * tower_measure.
Rational mu_d_estimate(const ExtensionTriple& triple, int level,
                       const std::vector<Rational>& tower_measures);

/// Fraction of the orbit window [start, start + steps) traversing v.
Rational empirical_tower_measure(const OrderedBratteliDiagram& d, VertexRef v,
                                 const FinitePath& start, const BigCount& steps);

struct RealizableMax {
    Rational value;          // 0 when no window with positive length exists
    BigCount witness_rank;   // start rank achieving it
    bool has_witness = false;
};

/// max over start ranks t of the visit frequency to forked level-1 vertices
/// over the unambiguous run [t, count-1); exact via parametric search over
/// the prefix-maximum DP.
RealizableMax realizable_max(const ExtendedDiagram& ed, VertexRef vertex,
                             int max_iterations = 1000);

/// True iff some suffix run from `vertex` has forked-visit frequency >= nu.
bool can_realize(const ExtendedDiagram& ed, VertexRef vertex, const Rational& nu,
                 BigCount* witness_rank = nullptr);

struct VertexSplit {
    std::vector<VertexIndex> plus;   // can realise some frequency >= nu
    std::vector<VertexIndex> minus;  // cannot
};

VertexSplit v_plus_set(const ExtendedDiagram& ed, int level, const Rational& nu);

struct BandCheck {
    int index = 0;          // segment index i
    BigCount window;        // T(gamma^1..gamma^i)
    Rational value;         // S over the window
    Rational bound;         // nu -+ 2 delta_i
    bool lower = false;     // true: value >= bound required
    bool ok = false;
};

struct RealizationPlan {
    Rational nu;
    std::vector<Rational> deltas;  // deltas[i] for segment i (1-based, deltas[0] unused)
    std::vector<int> ladder;
    std::vector<ScaleCertificate> certificates;
    FinitePath path;      // concatenated plan path in the copy-set diagram
    BigCount start_rank;
    std::vector<BandCheck> bands;
    bool all_bands_ok = false;
};

struct RealizeBudget {
    int anchor_scan_blocks = 200000;  // block jumps while searching anchors
    int dinkelbach_iterations = 1000;
};

/// Constructs a finite orbit segment whose running forked-visit averages
/// alternate around nu within the 2*delta bands, per the scale-certificate
/// ladder. Throws TargetUnreachable when no top-level vertex realises nu,
/// LadderInvalid on certificate failures.
RealizationPlan realize_frequency(const ExtensionTriple& triple, const ExtendedDiagram& ed,
                                  const Rational& nu, const std::vector<Rational>& deltas,
                                  const std::vector<int>& ladder,
                                  const RealizeBudget& budget = {});

struct TraceRow {
    BigCount step;
    Rational s_d;  // running average of irregular-set visits
    Rational s;    // running average of forked visits along the lift
    bool in_d = false;
};

enum class LiftPolicy { FullPreimage, SingletonCopy0 };

/// Steps the orbit of `head` for `steps` iterations, recording running
/// exact averages every `stride` steps (and the final step).
std::vector<TraceRow> frequency_trace(const ExtensionTriple& triple, const ExtendedDiagram& ed,
                                      const FinitePath& head, std::uint64_t steps,
                                      std::uint64_t stride = 1,
                                      LiftPolicy lift = LiftPolicy::FullPreimage);

struct GapSample {
    int crossing_level = 0;
    BigCount start_rank;
    BigCount window;
    BigCount hits;
    bool pass_third = false;       // S_D^M >= 1/3
    bool cstar2_ok = true;         // crossing average of C**_{N-1} < 1/2
};

struct GapReport {
    std::vector<GapSample> samples;
    Rational min_sdm{1};
    Rational max_sdm{0};
    bool all_pass = false;
    BigCount zero_witness_window;  // window with S_D identically 0
    bool has_zero_witness = false;
};

/// Samples orbits with nontrivial fibres (thick everywhere) and windows past
/// their first thin-interval crossings; asserts S_D^M >= 1/3 exactly via
/// window counting.
GapReport gap_check_three_to_one(const ExtensionTriple& triple, int n_samples,
                                 std::uint64_t seed);

struct AuditSample {
    BigCount start_rank;
    BigCount window;
    Rational value;  // S_D over the window
    Rational proxy;  // level-capped estimate + tolerance reference
    int proxy_level = 0;
    bool ok = false;
};

struct AuditReport {
    std::vector<AuditSample> samples;
    Rational max_value{0};
    bool all_ok = false;
};

/// Checks that sampled windowed averages never exceed the level-capped
/// measure estimate by more than 1/1000.
AuditReport sup_frequency_audit(const ExtensionTriple& triple, int n_samples,
                                std::uint64_t seed);

}  // namespace bvd
