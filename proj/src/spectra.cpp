#include "bvd/spectra.hpp"

#include <algorithm>
#include <sstream>

namespace bvd {

namespace {

bool head_has_interior_extremal(const OrderedBratteliDiagram& d, const FinitePath& head) {
    for (std::size_t k = 0; k < head.picks.size(); ++k) {
        const int level = head.start_level + static_cast<int>(k);
        if (level < 1) continue;
        const std::uint64_t r = d.edge_count_into(level, head.trail[k + 1]);
        if (head.picks[k] == 0 || head.picks[k] == r - 1) return true;
    }
    return false;
}

std::uint64_t head_thin_count(const OrderedBratteliDiagram& d, const FinitePath& head) {
    std::uint64_t thin = 0;
    for (std::size_t k = 0; k < head.picks.size(); ++k) {
        const int level = head.start_level + static_cast<int>(k);
        if (level < 1) continue;
        if (d.incoming(level, head.trail[k + 1]).class_at(head.picks[k]) == EdgeClass::Thin)
            ++thin;
    }
    return thin;
}

}  // namespace

DMembership in_irregular_set(const ExtensionTriple& triple, const FinitePath& head) {
    switch (triple.kind) {
        case ConstructionKind::TwoToOne:
            return head_has_interior_extremal(triple.base, head) ? DMembership::NotInD
                                                                 : DMembership::InD;
        case ConstructionKind::ThreeToOne: {
            if (head_has_interior_extremal(triple.base, head)) return DMembership::NotInD;
            return head_thin_count(triple.base, head) <= 1 ? DMembership::InD
                                                           : DMembership::NotInD;
        }
        case ConstructionKind::Generic: {
            const auto sets = full_preimage_sets(triple, head);
            const std::uint32_t s = sets.size() > 1 ? sets[1] : 1u;
            return (s & (s - 1)) ? DMembership::UnknownAtHorizon : DMembership::NotInD;
        }
    }
    throw InvalidInput("unknown construction kind");
}

EdgePredicateAutomaton irregular_head_automaton(const ExtensionTriple& triple) {
    switch (triple.kind) {
        case ConstructionKind::TwoToOne:
            return extremal_seen_automaton(1, -1, /*complement=*/true);
        case ConstructionKind::ThreeToOne:
            return thick_construction_d_automaton();
        case ConstructionKind::Generic:
            throw InvalidInput("no structural head automaton for generic triples");
    }
    throw InvalidInput("unknown construction kind");
}

BigCount irregular_head_count(const ExtensionTriple& triple, VertexRef v) {
    ExtendedDiagram ed = extended_diagram(triple, v.level);
    const std::uint32_t full = (1u << triple.spec.copies(v.level, v.index)) - 1;
    const VertexIndex top = ed.find_vertex(v.level, v.index, full);
    WindowCounter counter(ed.diagram, level1_flag_automaton(ed.forked_level1()));
    return counter.hits({v.level, top}, 0, ed.diagram.path_count({v.level, top}));
}

Rational sdn_direct(const ExtensionTriple& triple, const ExtendedDiagram& ed,
                    const FinitePath& head, const BigCount& n) {
    if (n <= 0) throw InvalidInput("window must be positive");
    if (n > steps_to_max(triple.base, head))
        throw WindowExceedsHorizon("window exceeds the unambiguous run of the head");
    const FinitePath lift = full_preimage_path(ed, triple, head);
    const BigCount t0 = rank(ed.diagram, lift);
    WindowCounter counter(ed.diagram, level1_flag_automaton(ed.forked_level1()));
    return make_rational(counter.hits(lift.end(), t0, t0 + n), n);
}

BigCount e_class_count(const OrderedBratteliDiagram& d, const EdgePredicateAutomaton& a,
                       VertexRef v) {
    if (v.level < 1) throw InvalidInput("e_class_count needs level >= 1");
    return count_in_window(d, a, v, 0, d.path_count(v));
}

BigCount extremal_head_count_recursive(const OrderedBratteliDiagram& d, VertexRef v) {
    const auto h = d.count_table(0, v.level);
    std::vector<std::vector<BigCount>> x(v.level + 1);
    x[1].assign(d.level_size(1), 0);
    for (int n = 1; n < v.level; ++n) {
        x[n + 1].assign(d.level_size(n + 1), 0);
        for (VertexIndex u = 0; u < d.level_size(n + 1); ++u) {
            const IncomingList& in = d.incoming(n, u);
            const std::uint64_t r = in.degree();
            BigCount total = h[n][in.source_at(0)];  // minimal top edge
            if (r >= 2) {
                total += h[n][in.source_at(r - 1)];  // maximal top edge
                // canonical lists keep positions 0 and r-1 in singleton
                // runs, so the middle runs are exactly the interior edges
                const auto runs = in.runs();
                for (std::size_t ri = 1; ri + 1 < runs.size(); ++ri) {
                    const EdgeRun& run = runs[ri];
                    const std::size_t p = run.sources.size();
                    for (std::size_t ph = 0; ph < p && ph < run.count; ++ph) {
                        const std::uint64_t occur =
                            run.count / p + (ph < run.count % p ? 1 : 0);
                        total += BigCount(static_cast<unsigned long>(occur)) *
                                 x[n][run.sources[ph]];
                    }
                }
            }
            x[n + 1][u] = std::move(total);
        }
    }
    return x[v.level][v.index];
}

Rational measure_lower_bound(const ExtensionTriple& triple, int level) {
    if (level < 2) throw InvalidInput("measure lower bound needs level >= 2");
    Rational best;
    bool first = true;
    for (VertexIndex v = 0; v < triple.base.level_size(level); ++v) {
        const BigCount den = triple.base.path_count({level, v});
        BigCount num;
        if (triple.kind == ConstructionKind::Generic) {
            num = irregular_head_count(triple, {level, v});
        } else {
            num = e_class_count(triple.base, irregular_head_automaton(triple), {level, v});
        }
        Rational r = make_rational(num, den);
        if (first || r < best) best = r;
        first = false;
    }
    return best;
}

Rational mu_d_estimate(const ExtensionTriple& triple, int level,
                       const std::vector<Rational>& tower_measures) {
    if (tower_measures.size() != triple.base.level_size(level))
        throw InvalidInput("tower measure per level vertex required");
    Rational total = 0;
    for (const Rational& t : tower_measures) {
        if (sgn(t) < 0) throw InvalidInput("tower measures must be nonnegative");
        total += t;
    }
    if (total != 1) throw InvalidInput("tower measures must sum to 1");
    Rational out = 0;
    for (VertexIndex v = 0; v < triple.base.level_size(level); ++v) {
        const BigCount den = triple.base.path_count({level, v});
        BigCount num;
        if (triple.kind == ConstructionKind::Generic) {
            num = irregular_head_count(triple, {level, v});
        } else {
            num = e_class_count(triple.base, irregular_head_automaton(triple), {level, v});
        }
        out += make_rational(num, den) * tower_measures[v];
    }
    return out;
}

Rational empirical_tower_measure(const OrderedBratteliDiagram& d, VertexRef v,
                                 const FinitePath& start, const BigCount& steps) {
    if (steps <= 0) throw InvalidInput("need a positive window");
    if (steps > steps_to_max(d, start) + 1)
        throw WindowExceedsHorizon("window exceeds the unambiguous run");
    if (v.level == start.end_level()) return v.index == start.end_vertex() ? 1 : 0;
    const BigCount t0 = rank(d, start);
    WindowCounter counter(d, traverses_automaton(v.level, v.index));
    return make_rational(counter.hits(start.end(), t0, t0 + steps), steps);
}

bool can_realize(const ExtendedDiagram& ed, VertexRef vertex, const Rational& nu,
                 BigCount* witness_rank) {
    if (sgn(nu) < 0) throw InvalidInput("nu must be nonnegative");
    const BigCount C = ed.diagram.path_count(vertex);
    if (C < 2) return false;
    WindowCounter hit_counter(ed.diagram, level1_flag_automaton(ed.forked_level1()));
    const BigCount total = hit_counter.hits(vertex, 0, C - 1);
    const BigCount& p = nu.get_num();
    const BigCount& q = nu.get_den();
    const BigCount need = p * (C - 1) - q * total;

    // max over t in [0, C-2] of p*t - q*hits[0,t)
    BigCount best = 0;  // t = 0
    BigCount best_t = 0;
    if (C > 2) {
        WindowCounter prefix(ed.diagram, level1_flag_automaton(ed.forked_level1()), 0,
                             /*hit*/ -q, /*step*/ p);
        auto agg = prefix.window(vertex, 0, C - 2);
        if (agg.has_best && agg.best > best) {
            best = agg.best;
            best_t = agg.best_len;
        }
    }
    if (best >= need) {
        if (witness_rank) *witness_rank = best_t;
        return true;
    }
    return false;
}

RealizableMax realizable_max(const ExtendedDiagram& ed, VertexRef vertex, int max_iterations) {
    RealizableMax out;
    const BigCount C = ed.diagram.path_count(vertex);
    if (C < 2) return out;
    WindowCounter hit_counter(ed.diagram, level1_flag_automaton(ed.forked_level1()));
    const BigCount total = hit_counter.hits(vertex, 0, C - 1);
    out.value = make_rational(total, C - 1);
    out.witness_rank = 0;
    out.has_witness = true;
    if (total == 0) return out;

    for (int it = 0; it < max_iterations; ++it) {
        const BigCount& p = out.value.get_num();
        const BigCount& q = out.value.get_den();
        BigCount best = 0, best_t = 0;
        if (C > 2) {
            WindowCounter prefix(ed.diagram, level1_flag_automaton(ed.forked_level1()), 0, -q,
                                 p);
            auto agg = prefix.window(vertex, 0, C - 2);
            if (agg.has_best && agg.best > best) {
                best = agg.best;
                best_t = agg.best_len;
            }
        }
        // margin of t over the current value: q*(total - P(t)) - p*(C-1-t)
        const BigCount pt = hit_counter.hits(vertex, 0, best_t);
        const BigCount margin = q * (total - pt) - p * (C - 1 - best_t);
        if (margin <= 0) return out;  // current value is the maximum
        out.value = make_rational(total - pt, C - 1 - best_t);
        out.witness_rank = best_t;
    }
    throw BudgetExceeded("realizable_max did not stabilize within the iteration budget");
}

VertexSplit v_plus_set(const ExtendedDiagram& ed, int level, const Rational& nu) {
    VertexSplit out;
    for (VertexIndex v = 0; v < ed.diagram.level_size(level); ++v) {
        if (can_realize(ed, {level, v}, nu))
            out.plus.push_back(v);
        else
            out.minus.push_back(v);
    }
    return out;
}

namespace {

FinitePath slice_path(const FinitePath& path, int from_level, int to_level) {
    FinitePath out;
    out.start_level = from_level;
    out.picks.assign(path.picks.begin() + from_level, path.picks.begin() + to_level);
    out.trail.assign(path.trail.begin() + from_level, path.trail.begin() + to_level + 1);
    return out;
}

// Largest-order segment from `lo_level` into (hi_level, end_v) whose start
// vertex is flagged at lo_level.
FinitePath max_segment_from_flagged(const OrderedBratteliDiagram& d, int lo_level, int hi_level,
                                    VertexIndex end_v, const std::vector<bool>& lo_flags) {
    std::vector<std::vector<bool>> reach(hi_level + 1);
    reach[lo_level] = lo_flags;
    for (int lev = lo_level; lev < hi_level; ++lev) {
        reach[lev + 1].assign(d.level_size(lev + 1), false);
        for (VertexIndex u = 0; u < d.level_size(lev + 1); ++u)
            for (const EdgeRun& r : d.incoming(lev, u).runs())
                for (VertexIndex s : r.sources)
                    if (reach[lev][s]) reach[lev + 1][u] = true;
    }
    if (!reach[hi_level][end_v])
        throw LadderInvalid("no segment from a realizing vertex reaches the target");

    FinitePath seg;
    seg.start_level = lo_level;
    seg.picks.assign(hi_level - lo_level, 0);
    seg.trail.assign(hi_level - lo_level + 1, 0);
    seg.trail.back() = end_v;
    VertexIndex cur = end_v;
    for (int lev = hi_level - 1; lev >= lo_level; --lev) {
        const IncomingList& in = d.incoming(lev, cur);
        bool placed = false;
        std::uint64_t base = in.degree();
        const auto runs = in.runs();
        for (auto it = runs.rbegin(); it != runs.rend() && !placed; ++it) {
            base -= it->count;
            const std::size_t p = it->sources.size();
            std::uint64_t best = 0;
            bool any = false;
            for (std::size_t ph = 0; ph < p && ph < it->count; ++ph) {
                if (!reach[lev][it->sources[ph]]) continue;
                const std::uint64_t idx =
                    it->count - 1 - ((it->count - 1 - ph) % p);
                if (!any || idx > best) best = idx;
                any = true;
            }
            if (any) {
                const std::uint64_t m = base + best;
                seg.picks[lev - lo_level] = m;
                cur = in.source_at(m);
                seg.trail[lev - lo_level] = cur;
                placed = true;
            }
        }
        if (!placed) throw LadderInvalid("segment descent failed");
    }
    return seg;
}

}  // namespace

RealizationPlan realize_frequency(const ExtensionTriple& triple, const ExtendedDiagram& ed,
                                  const Rational& nu, const std::vector<Rational>& deltas,
                                  const std::vector<int>& ladder, const RealizeBudget& budget) {
    const int k = static_cast<int>(ladder.size());
    if (k < 1 || k % 2 == 0)
        throw LadderInvalid("ladder must have an odd number of levels");
    if (static_cast<int>(deltas.size()) != k)
        throw LadderInvalid("one delta per ladder level required");
    if (sgn(nu) <= 0 || nu >= 1) throw InvalidInput("nu must lie in (0,1)");
    for (int i = 0; i < k; ++i) {
        if (i > 0 && ladder[i] <= ladder[i - 1]) throw LadderInvalid("ladder must increase");
        if (sgn(deltas[i]) <= 0 || deltas[i] * 2 >= nu)
            throw LadderInvalid("deltas must lie in (0, nu/2)");
    }
    if (ladder.front() < 2 || ladder.back() > ed.horizon)
        throw LadderInvalid("ladder levels out of range");

    RealizationPlan plan;
    plan.nu = nu;
    plan.deltas = deltas;
    plan.ladder = ladder;
    for (int i = 0; i + 1 < k; ++i) {
        auto cert = exceeds_on_scale(ed.diagram, ladder[i], ladder[i + 1], deltas[i + 1]);
        if (!cert.ok)
            throw LadderInvalid("scale certificate fails between ladder levels");
        plan.certificates.push_back(std::move(cert));
    }

    // realizing vertices per ladder level
    std::vector<std::vector<bool>> plus(k);
    for (int i = 0; i < k; ++i) {
        plus[i].assign(ed.diagram.level_size(ladder[i]), false);
        for (VertexIndex v : v_plus_set(ed, ladder[i], nu).plus) plus[i][v] = true;
    }
    if (std::none_of(plus[k - 1].begin(), plus[k - 1].end(), [](bool b) { return b; }))
        throw TargetUnreachable("no top-level vertex realises the target frequency");

    const auto witness_path = [&](int level, VertexIndex v) {
        BigCount t = 0;
        if (!can_realize(ed, {level, v}, nu, &t))
            throw TargetUnreachable("realizing vertex lost its witness");
        return path_at_rank(ed.diagram, {level, v}, t);
    };

    // choose the best realizing top vertex
    VertexIndex target = 0;
    {
        bool first = true;
        Rational best;
        for (VertexIndex v = 0; v < ed.diagram.level_size(ladder[k - 1]); ++v) {
            if (!plus[k - 1][v]) continue;
            auto rm = realizable_max(ed, {ladder[k - 1], v}, budget.dinkelbach_iterations);
            if (first || rm.value > best) {
                best = rm.value;
                target = v;
                first = false;
            }
        }
    }

    std::vector<FinitePath> segments(k + 1);  // 1-based
    for (int i = k; i >= 3; i -= 2) {
        const int n_i = ladder[i - 1];
        const int n_im1 = ladder[i - 2];
        const int n_im2 = ladder[i - 3];
        FinitePath p = witness_path(n_i, target);
        const BigCount C = ed.diagram.path_count({n_i, target});
        BigCount s = rank(ed.diagram, p);
        int jumps = 0;
        while (true) {
            const VertexIndex a1 = p.trail[n_im1];
            const VertexIndex a2 = p.trail[n_im2];
            if (plus[i - 2][a1] && plus[i - 3][a2]) break;
            // jump to the end of the current block of constant digits above n_im2
            const BigCount sub = rank(ed.diagram, slice_path(p, 0, n_im2));
            s = s - sub + ed.diagram.path_count({n_im2, a2});
            if (s > C - 2) throw BudgetExceeded("anchor scan ran past the sweep");
            if (++jumps > budget.anchor_scan_blocks)
                throw BudgetExceeded("anchor scan exceeded the block budget");
            p = path_at_rank(ed.diagram, {n_i, target}, s);
        }
        segments[i] = slice_path(p, n_im1, n_i);
        // the even segment below: maximal among those starting at a
        // realizing vertex of level n_im2
        segments[i - 1] = max_segment_from_flagged(ed.diagram, n_im2, n_im1,
                                                   p.trail[n_im1], plus[i - 3]);
        target = segments[i - 1].trail.front();
    }
    segments[1] = witness_path(ladder[0], target);

    // assemble
    FinitePath path = segments[1];
    for (int i = 2; i <= k; ++i) {
        path.picks.insert(path.picks.end(), segments[i].picks.begin(), segments[i].picks.end());
        path.trail.insert(path.trail.end(), segments[i].trail.begin() + 1,
                          segments[i].trail.end());
    }
    plan.path = path;
    plan.start_rank = rank(ed.diagram, path);

    // exact band verification
    WindowCounter counter(ed.diagram, level1_flag_automaton(ed.forked_level1()));
    const VertexRef top{ladder[k - 1], path.end_vertex()};
    plan.all_bands_ok = true;
    for (int i = 1; i <= k; ++i) {
        const int n_i = ladder[i - 1];
        const FinitePath prefix = slice_path(path, 0, n_i);
        BandCheck band;
        band.index = i;
        band.window = ed.diagram.path_count({n_i, prefix.end_vertex()}) - 1 -
                      rank(ed.diagram, prefix);
        if (band.window == 0) throw LadderInvalid("degenerate prefix window");
        band.value = make_rational(
            counter.hits(top, plan.start_rank, plan.start_rank + band.window), band.window);
        // the first band reuses the second segment's delta when one exists
        const Rational delta = deltas[std::min(std::max(i, 2), k) - 1];
        band.lower = (i % 2 == 1);
        if (band.lower)
            band.bound = nu - 2 * delta;
        else
            band.bound = nu + 2 * delta;
        band.ok = band.lower ? band.value >= band.bound : band.value <= band.bound;
        plan.all_bands_ok = plan.all_bands_ok && band.ok;
        plan.bands.push_back(std::move(band));
    }
    return plan;
}

std::vector<TraceRow> frequency_trace(const ExtensionTriple& triple, const ExtendedDiagram& ed,
                                      const FinitePath& head, std::uint64_t steps,
                                      std::uint64_t stride, LiftPolicy lift_policy) {
    if (stride == 0) throw InvalidInput("stride must be positive");
    if (BigCount(static_cast<unsigned long>(steps)) > steps_to_max(triple.base, head))
        throw WindowExceedsHorizon("trace exceeds the unambiguous run");

    FinitePath base_path = head;
    FinitePath lift;
    if (lift_policy == LiftPolicy::FullPreimage) {
        lift = full_preimage_path(ed, triple, head);
    } else {
        const VertexIndex top =
            ed.find_vertex(head.end_level(), head.end_vertex(), 1u);
        lift = make_path(ed.diagram, {head.end_level(), top}, head.picks, 0);
    }

    const auto forked = ed.forked_level1();
    std::vector<TraceRow> rows;
    BigCount d_hits = 0, s_hits = 0;
    for (std::uint64_t i = 1; i <= steps; ++i) {
        const bool cur_in_d = in_irregular_set(triple, base_path) == DMembership::InD;
        if (cur_in_d) d_hits += 1;
        if (forked[lift.trail[1]]) s_hits += 1;
        if (i % stride == 0 || i == steps) {
            TraceRow row;
            row.step = i;
            row.s_d = make_rational(d_hits, BigCount(static_cast<unsigned long>(i)));
            row.s = make_rational(s_hits, BigCount(static_cast<unsigned long>(i)));
            row.in_d = cur_in_d;
            rows.push_back(std::move(row));
        }
        if (i < steps) {
            auto nb = successor(triple.base, base_path);
            auto nl = successor(ed.diagram, lift);
            if (!nb || !nl) throw WindowExceedsHorizon("orbit ended early");
            base_path = std::move(*nb);
            lift = std::move(*nl);
        }
    }
    return rows;
}

GapReport gap_check_three_to_one(const ExtensionTriple& triple, int n_samples,
                                 std::uint64_t seed) {
    if (triple.kind != ConstructionKind::ThreeToOne)
        throw InvalidInput("gap check requires a three-to-one triple");
    const auto& b = triple.base;
    const int D = b.depth();
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(static_cast<unsigned long>(seed));

    WindowCounter d_counter(b, thick_construction_d_automaton());
    const auto h = b.count_table(0, D);

    GapReport report;
    report.all_pass = true;

    auto rand_below = [&](const BigCount& n) { return BigCount(rng.get_z_range(n)); };

    for (int s = 0; s < n_samples; ++s) {
        // thick-everywhere head, random end vertex
        const VertexIndex end =
            static_cast<VertexIndex>(to_u64(rand_below(BigCount(b.level_size(D)))));
        FinitePath head;
        head.start_level = 0;
        head.picks.assign(D, 0);
        head.trail.assign(D + 1, 0);
        head.trail.back() = end;
        VertexIndex cur = end;
        for (int lev = D - 1; lev >= 0; --lev) {
            const IncomingList& in = b.incoming(lev, cur);
            std::uint64_t m;
            if (lev == 0) {
                m = to_u64(rand_below(BigCount(
                    static_cast<unsigned long>(in.degree()))));
            } else {
                const std::uint64_t M = in.thick_count();
                m = 1 + to_u64(rand_below(BigCount(static_cast<unsigned long>(M))));
            }
            head.picks[lev] = m;
            cur = in.source_at(m);
            head.trail[lev] = cur;
        }
        const BigCount t0 = rank(b, head);
        const BigCount T = b.path_count({D, end}) - 1 - t0;

        for (int N = 1; N < D; ++N) {
            const IncomingList& in = b.incoming(N, head.trail[N + 1]);
            const BigCount block_start = weighted_prefix(in, h[N], in.degree() - 1);
            const FinitePath sub = slice_path(head, 0, N + 1);
            const BigCount m0 = block_start - rank(b, sub);
            if (m0 < 1 || m0 > T) continue;  // no crossing within the sweep

            // windows: the crossing itself, the ends of the extremal blocks
            // right after it (where the average dips), and a uniform draw
            const BigCount& max_block = h[N][in.source_at(in.degree() - 1)];
            std::vector<BigCount> windows{m0, m0 + max_block, m0 + 2 * max_block,
                                          m0 + rand_below(T - m0 + 1)};
            for (const BigCount& M : windows) {
                if (M > T) continue;
                GapSample sample;
                sample.crossing_level = N;
                sample.start_rank = t0;
                sample.window = M;
                sample.hits = d_counter.hits({D, end}, t0, t0 + M);
                sample.pass_third = 3 * sample.hits >= M;
                Rational sdm = make_rational(sample.hits, M);
                if (sdm < report.min_sdm) report.min_sdm = sdm;
                if (sdm > report.max_sdm) report.max_sdm = sdm;
                if (N >= 2) {
                    WindowCounter cstar2(b, thin_or_extremal_automaton(N - 1, true));
                    const BigCount chits = cstar2.hits({D, end}, t0, t0 + M + 1);
                    sample.cstar2_ok = 2 * chits < M + 1;
                }
                report.all_pass = report.all_pass && sample.pass_third && sample.cstar2_ok;
                report.samples.push_back(std::move(sample));
            }
        }
    }
    if (report.samples.empty())
        throw WindowExceedsHorizon("no thin-interval crossing within the horizon");

    // a window on which the visit count is identically zero: park the top
    // interior digit at its maximal edge
    {
        FinitePath head;
        head.start_level = 0;
        head.picks.assign(D, 0);
        head.trail.assign(D + 1, 0);
        head.trail.back() = 0;
        VertexIndex cur = 0;
        for (int lev = D - 1; lev >= 0; --lev) {
            const IncomingList& in = b.incoming(lev, cur);
            const std::uint64_t m = (lev == D - 1) ? in.degree() - 1 : in.degree() / 2;
            head.picks[lev] = m;
            cur = in.source_at(m);
            head.trail[lev] = cur;
        }
        const BigCount t0 = rank(b, head);
        const BigCount T = b.path_count({D, 0}) - 1 - t0;
        if (T > 0) {
            const BigCount zhits = d_counter.hits({D, 0}, t0, t0 + T);
            if (zhits == 0) {
                report.zero_witness_window = T;
                report.has_zero_witness = true;
            }
        }
    }
    return report;
}

AuditReport sup_frequency_audit(const ExtensionTriple& triple, int n_samples,
                                std::uint64_t seed) {
    const auto& b = triple.base;
    const int D = b.depth();
    if (D < 3) throw InvalidInput("audit needs depth >= 3");
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(static_cast<unsigned long>(seed));

    ExtendedDiagram ed = extended_diagram(triple, D);
    WindowCounter sd_counter(ed.diagram, level1_flag_automaton(ed.forked_level1()));

    AuditReport report;
    report.all_ok = true;
    auto rand_below = [&](const BigCount& n) { return BigCount(rng.get_z_range(n)); };

    for (int s = 0; s < n_samples; ++s) {
        const VertexIndex end =
            static_cast<VertexIndex>(to_u64(rand_below(BigCount(b.level_size(D)))));
        const std::uint32_t full = (1u << triple.spec.copies(D, end)) - 1;
        const VertexIndex top = ed.find_vertex(D, end, full);
        const BigCount C = ed.diagram.path_count({D, top});

        // proxy level: total head count at L, window at least 2000x that
        int L = 2;
        AuditSample sample;
        {
            std::vector<int> levels;
            for (int lev = 2; lev < D; ++lev) levels.push_back(lev);
            L = levels[to_u64(rand_below(BigCount(
                static_cast<unsigned long>(levels.size()))))];
        }
        BigCount heads = 0;
        for (VertexIndex v = 0; v < b.level_size(L); ++v) heads += b.path_count({L, v});
        BigCount wmin = 2000 * heads;
        if (wmin >= C) {
            L = 2;
            heads = 0;
            for (VertexIndex v = 0; v < b.level_size(L); ++v) heads += b.path_count({L, v});
            wmin = 2000 * heads;
        }
        if (wmin >= C) throw InvalidInput("diagram too shallow for the audit window");
        BigCount w = wmin + rand_below(C - wmin);
        BigCount t = rand_below(C - w);

        sample.proxy_level = L;
        sample.start_rank = t;
        sample.window = w;
        sample.value = make_rational(sd_counter.hits({D, top}, t, t + w), w);

        // empirical tower measures over the same window
        std::vector<Rational> tower(b.level_size(L));
        Rational tower_total = 0;
        for (VertexIndex v = 0; v < b.level_size(L); ++v) {
            BigCount hits = 0;
            // sum over all copy-set labels with base v
            for (VertexIndex u = 0; u < ed.diagram.level_size(L); ++u) {
                if (ed.labels[L][u].base != v) continue;
                WindowCounter one(ed.diagram, traverses_automaton(L, u));
                hits += one.hits({D, top}, t, t + w);
            }
            tower[v] = make_rational(hits, w);
            tower_total += tower[v];
        }
        if (tower_total != 1) throw InvalidInput("window tower measures inconsistent");
        sample.proxy = mu_d_estimate(triple, L, tower);
        sample.ok = sample.value <= sample.proxy + make_rational(1, 1000);
        if (sample.value > report.max_value) report.max_value = sample.value;
        report.all_ok = report.all_ok && sample.ok;
        report.samples.push_back(std::move(sample));
    }
    return report;
}

}  // namespace bvd
