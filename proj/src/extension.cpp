#include "bvd/extension.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "bvd/window.hpp"

namespace bvd {

namespace {

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

// Zips a base incoming list with a per-copy row of equal degree. `combine`
// receives (base source vertex, row value, class, position-stretch length)
// and returns the output source index; the class of each stretch is the
// base class.
IncomingList zip_lists(const IncomingList& base, const IncomingList& row,
                       const std::function<VertexIndex(VertexIndex, VertexIndex)>& combine) {
    if (base.degree() != row.degree()) throw InvalidInput("copy row degree mismatch");
    std::vector<EdgeRun> out;
    auto bruns = base.runs();
    auto rruns = row.runs();
    std::size_t bi = 0, ri = 0;
    std::uint64_t boff = 0, roff = 0;
    std::uint64_t remaining = base.degree();
    while (remaining > 0) {
        const EdgeRun& br = bruns[bi];
        const EdgeRun& rr = rruns[ri];
        const std::uint64_t take =
            std::min({br.count - boff, rr.count - roff, remaining});
        const std::uint64_t p1 = br.sources.size();
        const std::uint64_t p2 = rr.sources.size();
        std::uint64_t period = lcm_u64(p1, p2);
        if (period > 256) throw BudgetExceeded("combined copy-rule cycle too long");
        if (period > take) period = take;
        std::vector<VertexIndex> srcs(period);
        for (std::uint64_t i = 0; i < period; ++i)
            srcs[i] = combine(br.sources[(boff + i) % p1], rr.sources[(roff + i) % p2]);
        out.push_back(EdgeRun{take, br.cls, std::move(srcs)});
        boff += take;
        roff += take;
        remaining -= take;
        if (boff == br.count) {
            boff = 0;
            ++bi;
        }
        if (roff == rr.count) {
            roff = 0;
            ++ri;
        }
    }
    return IncomingList::from_runs(std::move(out));
}

std::vector<std::vector<std::uint32_t>> copy_offsets(const OrderedBratteliDiagram& base,
                                                     const CopyPasteSpec& spec) {
    std::vector<std::vector<std::uint32_t>> offsets(base.depth() + 1);
    offsets[0] = {0};
    for (int n = 1; n <= base.depth(); ++n) {
        offsets[n].resize(base.level_size(n));
        std::uint32_t at = 0;
        for (VertexIndex l = 0; l < base.level_size(n); ++l) {
            offsets[n][l] = at;
            at += spec.copies(n, l);
        }
    }
    return offsets;
}

}  // namespace

VertexIndex ExtensionTriple::extended_index(int level, VertexIndex base_vertex,
                                            std::uint32_t copy) const {
    if (level == 0) return 0;
    std::uint32_t at = 0;
    for (VertexIndex l = 0; l < base_vertex; ++l) at += spec.copies(level, l);
    return at + copy;
}

void check_spec_shape(const OrderedBratteliDiagram& base, const CopyPasteSpec& spec) {
    if (static_cast<int>(spec.copy_counts.size()) != base.depth())
        throw InvalidInput("copy_counts must cover levels 1..depth");
    if (static_cast<int>(spec.rows.size()) != base.depth())
        throw InvalidInput("rows must cover edge levels 0..depth-1");
    for (int n = 1; n <= base.depth(); ++n) {
        if (spec.copy_counts[n - 1].size() != base.level_size(n))
            throw InvalidInput("copy_counts size mismatch");
        for (std::uint32_t c : spec.copy_counts[n - 1])
            if (c < 1) throw InvalidInput("copy counts must be >= 1");
    }
    for (int n = 0; n < base.depth(); ++n) {
        if (spec.rows[n].size() != base.level_size(n + 1))
            throw InvalidInput("row count mismatch");
        for (VertexIndex l = 0; l < base.level_size(n + 1); ++l) {
            if (spec.rows[n][l].size() != spec.copies(n + 1, l))
                throw InvalidInput("row copy count mismatch");
            for (const IncomingList& row : spec.rows[n][l])
                if (row.degree() != base.edge_count_into(n, l))
                    throw InvalidInput("row degree mismatch");
        }
    }
}

OrderedBratteliDiagram copy_paste(const OrderedBratteliDiagram& base, const CopyPasteSpec& spec) {
    check_spec_shape(base, spec);
    const auto offsets = copy_offsets(base, spec);

    std::vector<std::uint32_t> sizes(base.depth() + 1, 1);
    for (int n = 1; n <= base.depth(); ++n) {
        std::uint32_t total = 0;
        for (VertexIndex l = 0; l < base.level_size(n); ++l) total += spec.copies(n, l);
        sizes[n] = total;
    }

    std::vector<std::vector<IncomingList>> incoming(base.depth());
    std::vector<std::vector<CopyMeta>> meta(base.depth());
    for (int n = 0; n < base.depth(); ++n) {
        meta[n].resize(sizes[n + 1]);
        incoming[n].resize(sizes[n + 1]);
        for (VertexIndex l = 0; l < base.level_size(n + 1); ++l) {
            for (std::uint32_t j = 0; j < spec.copies(n + 1, l); ++j) {
                auto combine = [&](VertexIndex src, VertexIndex copy) -> VertexIndex {
                    const std::uint32_t avail =
                        n == 0 ? 1u : spec.copies(n, src);
                    if (copy >= avail)
                        throw InvalidInput("copy row value exceeds source copy count");
                    return n == 0 ? 0 : offsets[n][src] + copy;
                };
                const VertexIndex idx = offsets[n + 1][l] + j;
                incoming[n][idx] = zip_lists(base.incoming(n, l), spec.rows[n][l][j], combine);
                meta[n][idx] = CopyMeta{l, j};
            }
        }
    }
    OrderedBratteliDiagram out(std::move(sizes), std::move(incoming));
    out.attach_copy_meta(std::move(meta));
    return out;
}

CopyPasteSpec identity_spec(const OrderedBratteliDiagram& base) {
    CopyPasteSpec spec;
    spec.copy_counts.resize(base.depth());
    spec.rows.resize(base.depth());
    for (int n = 1; n <= base.depth(); ++n)
        spec.copy_counts[n - 1].assign(base.level_size(n), 1);
    for (int n = 0; n < base.depth(); ++n) {
        spec.rows[n].resize(base.level_size(n + 1));
        for (VertexIndex l = 0; l < base.level_size(n + 1); ++l)
            spec.rows[n][l] = {IncomingList::from_runs(
                {EdgeRun{base.edge_count_into(n, l), EdgeClass::Plain, {0}}})};
    }
    return spec;
}

FinitePath collapse_path(const ExtensionTriple& triple, const FinitePath& path) {
    FinitePath out = path;
    for (std::size_t k = 0; k < out.trail.size(); ++k) {
        const int level = out.start_level + static_cast<int>(k);
        if (level == 0) {
            out.trail[k] = 0;
        } else {
            out.trail[k] = triple.extended.copy_meta(level, path.trail[k]).base;
        }
    }
    return out;
}

std::vector<std::string> check_copy_paste(const ExtensionTriple& triple) {
    std::vector<std::string> problems;
    try {
        OrderedBratteliDiagram rebuilt = copy_paste(triple.base, triple.spec);
        if (!(rebuilt == triple.extended))
            problems.push_back("extended diagram is not copy_paste(base, spec)");
    } catch (const std::exception& e) {
        problems.push_back(std::string("spec rejected: ") + e.what());
        return problems;
    }
    // copied edges start in copies of the base edge's source, keep order
    // positions, and ranges are the right copies
    const auto& ext = triple.extended;
    for (int n = 0; n < ext.depth(); ++n) {
        for (VertexIndex v = 0; v < ext.level_size(n + 1); ++v) {
            const CopyMeta m = ext.copy_meta(n + 1, v);
            const IncomingList& base_in = triple.base.incoming(n, m.base);
            const IncomingList& ext_in = ext.incoming(n, v);
            if (base_in.degree() != ext_in.degree()) {
                problems.push_back("copied vertex degree differs from its base vertex");
                continue;
            }
            std::uint64_t pos = 0;
            for (const EdgeRun& r : ext_in.runs()) {
                for (std::size_t ph = 0; ph < r.sources.size(); ++ph) {
                    const std::uint64_t m_pos = pos + ph;
                    if (m_pos >= pos + r.count) break;
                    const VertexIndex src = r.sources[ph];
                    const VertexIndex want = base_in.source_at(m_pos);
                    const VertexIndex got = n == 0 ? 0 : ext.copy_meta(n, src).base;
                    if (got != want) {
                        problems.push_back("copied edge does not start in a copy of its base "
                                           "edge's source");
                        break;
                    }
                }
                pos += r.count;
            }
        }
    }
    return problems;
}

namespace {

// Per-source mod-k alternation rows for the extra copy: position 0 is the
// minimal edge (value = extra copy), interior position m gets the count of
// earlier same-source positions mod k, the maximal position gets copy 0.
IncomingList alternating_row(const IncomingList& base_in, std::uint32_t extra_copy,
                             std::uint32_t modulus, std::uint32_t level_size) {
    const std::uint64_t r = base_in.degree();
    if (r < 3) throw InvalidInput("alternating row needs degree >= 3");
    std::vector<EdgeRun> out;
    out.push_back(EdgeRun{1, EdgeClass::Plain, {extra_copy}});
    std::vector<std::uint64_t> counter(level_size, 0);
    counter[base_in.source_at(0)] = 1;

    std::uint64_t pos = 1;
    auto bruns = base_in.runs();
    std::size_t bi = 0;
    std::uint64_t consumed = 0;
    // skip the minimal singleton run
    while (consumed + bruns[bi].count <= pos) {
        consumed += bruns[bi].count;
        ++bi;
    }
    while (pos < r - 1) {
        const EdgeRun& br = bruns[bi];
        const std::uint64_t off = pos - consumed;
        const std::uint64_t take = std::min(br.count - off, r - 1 - pos);
        const std::uint64_t p = br.sources.size();
        const std::uint64_t period = p * modulus;
        std::vector<VertexIndex> vals(std::min<std::uint64_t>(period, take));
        std::vector<std::uint64_t> local(level_size, 0);
        for (std::uint64_t i = 0; i < vals.size(); ++i) {
            const VertexIndex s = br.sources[(off + i) % p];
            vals[i] = static_cast<VertexIndex>((counter[s] + local[s]) % modulus);
            local[s] += 1;
        }
        out.push_back(EdgeRun{take, br.cls, std::move(vals)});
        // advance the real counters by the whole stretch
        for (std::uint64_t ph = 0; ph < p; ++ph) {
            const VertexIndex s = br.sources[(off + ph) % p];
            counter[s] += take / p + (ph < take % p ? 1 : 0);
        }
        pos += take;
        if (off + take == br.count) {
            consumed += br.count;
            ++bi;
        }
    }
    out.push_back(EdgeRun{1, EdgeClass::Plain, {0}});
    return IncomingList::from_runs(std::move(out));
}

// Pairwise path counts u -> v between two levels.
std::vector<std::vector<BigCount>> pair_counts(const OrderedBratteliDiagram& d, int lo, int hi) {
    std::vector<std::vector<BigCount>> cur(d.level_size(lo));
    for (VertexIndex u = 0; u < d.level_size(lo); ++u) {
        cur[u].assign(d.level_size(lo), 0);
        cur[u][u] = 1;
    }
    for (int lev = lo; lev < hi; ++lev) {
        std::vector<std::vector<BigCount>> next(d.level_size(lev + 1));
        for (VertexIndex v = 0; v < d.level_size(lev + 1); ++v) {
            next[v].assign(d.level_size(lo), 0);
            for (const EdgeRun& r : d.incoming(lev, v).runs()) {
                const std::size_t p = r.sources.size();
                const std::uint64_t cycles = r.count / p;
                for (std::size_t ph = 0; ph < p; ++ph) {
                    const std::uint64_t mult = cycles + (ph < r.count % p ? 1 : 0);
                    if (mult == 0) continue;
                    for (VertexIndex u = 0; u < d.level_size(lo); ++u)
                        next[v][u] +=
                            BigCount(static_cast<unsigned long>(mult)) * cur[r.sources[ph]][u];
                }
            }
        }
        cur = std::move(next);
    }
    return cur;  // cur[v][u] = # paths u -> v
}

VertexIndex chain_down(const OrderedBratteliDiagram& d, int level, VertexIndex v, int down_to,
                       bool maximal) {
    VertexIndex cur = v;
    for (int lev = level - 1; lev >= down_to; --lev) {
        const IncomingList& in = d.incoming(lev, cur);
        cur = in.source_at(maximal ? in.degree() - 1 : 0);
    }
    return cur;
}

}  // namespace

TwoToOneResult build_two_to_one(const OrderedBratteliDiagram& base, const ExtendBudget& budget) {
    NormalizeOptions nopts;
    nopts.max_window = budget.max_window;
    nopts.max_depth = base.depth() + 1;
    nopts.expansion_guard = budget.expansion_guard;
    auto norm = extremal_source_normalize(base, nopts);
    const OrderedBratteliDiagram& d0 = norm.diagram;
    if (d0.depth() < 2) throw InvalidInput("base must have at least 2 levels to extend");

    const auto h0 = d0.count_table(0, d0.depth());

    std::vector<int> cuts{0, 1};
    while (static_cast<int>(cuts.size()) - 1 < budget.target_depth) {
        const int k = static_cast<int>(cuts.size()) - 1;  // new edge level being formed
        const int lo = cuts.back();
        bool placed = false;
        std::string reason = "depth exhausted";
        for (int next = lo + 1; next <= std::min(d0.depth(), lo + budget.max_window); ++next) {
            bool ok = true;
            // (a) margin: extremal mass of the new edge level k stays below 2^-(k+2)
            BigCount pow2 = BigCount(1) << (k + 2);
            for (VertexIndex v = 0; v < d0.level_size(next) && ok; ++v) {
                const BigCount& hmin = h0[lo][chain_down(d0, next, v, lo, false)];
                const BigCount& hmax = h0[lo][chain_down(d0, next, v, lo, true)];
                if ((hmin + hmax) * pow2 > h0[next][v]) {
                    ok = false;
                    reason = "(a) interior-extremal ratio";
                }
            }
            // (b) connected consecutive vertices joined by >= 3 edges
            if (ok) {
                const auto pc = pair_counts(d0, lo, next);
                for (VertexIndex v = 0; v < d0.level_size(next) && ok; ++v)
                    for (VertexIndex u = 0; u < d0.level_size(lo) && ok; ++u)
                        if (pc[v][u] != 0 && pc[v][u] < 3) {
                            ok = false;
                            reason = "(b) fewer than 3 edges between connected vertices";
                        }
            }
            // width guard on the composite degree
            if (ok) {
                const auto ht = d0.count_table(lo, next);
                for (VertexIndex v = 0; v < d0.level_size(next) && ok; ++v)
                    if (!fits_u64(ht[next][v]) ||
                        to_u64(ht[next][v]) > budget.max_edges_per_level) {
                        ok = false;
                        reason = "edge budget exceeded";
                    }
            }
            if (ok) {
                cuts.push_back(next);
                placed = true;
                break;
            }
        }
        if (!placed) {
            std::ostringstream msg;
            msg << "two-to-one preprocessing stuck at level " << cuts.size() - 1 << ": "
                << reason;
            throw BudgetExceeded(msg.str());
        }
    }

    OrderedBratteliDiagram b = telescope(d0, cuts, budget.expansion_guard);
    // (c): unique minimal source with index 0, preserved from normalization
    for (int n = 1; n < b.depth(); ++n)
        for (VertexIndex v = 0; v < b.level_size(n + 1); ++v)
            if (b.incoming(n, v).source_at(0) != 0)
                throw BudgetExceeded("(c) minimal edges lost their unique source");

    // build the doubling spec
    CopyPasteSpec spec;
    spec.copy_counts.resize(b.depth());
    for (int n = 1; n <= b.depth(); ++n) {
        spec.copy_counts[n - 1].assign(b.level_size(n), 2);
        spec.copy_counts[n - 1][0] = 3;
    }
    spec.rows.resize(b.depth());
    for (int n = 0; n < b.depth(); ++n) {
        spec.rows[n].resize(b.level_size(n + 1));
        for (VertexIndex l = 0; l < b.level_size(n + 1); ++l) {
            const std::uint64_t r = b.edge_count_into(n, l);
            auto& rows = spec.rows[n][l];
            if (n == 0) {
                rows.assign(l == 0 ? 3 : 2, IncomingList::from_runs(
                                                {EdgeRun{r, EdgeClass::Plain, {0}}}));
                continue;
            }
            for (std::uint32_t j = 0; j < 2; ++j)
                rows.push_back(IncomingList::from_runs({EdgeRun{1, EdgeClass::Plain, {2}},
                                                        EdgeRun{r - 2, EdgeClass::Plain, {j}},
                                                        EdgeRun{1, EdgeClass::Plain, {0}}}));
            if (l == 0) rows.push_back(alternating_row(b.incoming(n, l), 2, 2, b.level_size(n)));
        }
    }

    TwoToOneResult res;
    res.cuts = cuts;
    res.triple.extended = copy_paste(b, spec);
    res.triple.base = std::move(b);
    res.triple.spec = std::move(spec);
    res.triple.kind = ConstructionKind::TwoToOne;

    // exact |E^ex| / |E| audit
    WindowCounter exterior(res.triple.base, extremal_seen_automaton(1), 0);
    for (int n = 2; n <= res.triple.base.depth(); ++n) {
        for (VertexIndex v = 0; v < res.triple.base.level_size(n); ++v) {
            RatioCheck c;
            c.level = n;
            c.vertex = v;
            c.denominator = res.triple.base.path_count({n, v});
            c.numerator = exterior.hits({n, v}, 0, c.denominator);
            c.ok = 2 * c.numerator < c.denominator;
            if (!c.ok) throw BudgetExceeded("(a) violated after preprocessing");
            res.ratio_checks.push_back(std::move(c));
        }
    }
    return res;
}

ColouringResult color_diagram(const OrderedBratteliDiagram& base, const ColourBudget& budget) {
    if (budget.thin_width < 1) throw InvalidInput("thin width must be >= 1");
    NormalizeOptions nopts;
    nopts.max_depth = base.depth() + 1;
    nopts.expansion_guard = budget.expansion_guard;
    auto norm = extremal_source_normalize(base, nopts);
    const OrderedBratteliDiagram& d0 = norm.diagram;
    const auto h0 = d0.count_table(0, d0.depth());

    std::vector<int> cuts{0, 1};
    std::vector<ColourLevelReport> reports;
    std::vector<BigCount> i1s{0};  // i1s[k] for k >= 1

    for (int k = 1; k <= budget.coloured_levels; ++k) {
        const int lo = cuts.back();
        ColourLevelReport rep;
        rep.level = k;
        rep.i1 = 0;
        for (VertexIndex v = 0; v < d0.level_size(lo); ++v)
            if (h0[lo][v] > rep.i1) rep.i1 = h0[lo][v];
        rep.i2 = 2 * rep.i1;
        i1s.push_back(rep.i1);

        // rho requirement: crossing inequalities 2*3^m*i2^m < rho, m <= k
        BigCount rho_need = budget.thin_width + 2;
        rep.rho_required = k >= 2;
        if (k >= 2) {
            BigCount pow3 = 3;
            for (int m = 1; m <= k; ++m) {
                BigCount lhs = 2 * pow3 * (2 * i1s[m]);
                if (lhs > rep.rho_lhs) rep.rho_lhs = lhs;
                pow3 *= 3;
            }
            if (rep.rho_lhs + 1 > rho_need) rho_need = rep.rho_lhs + 1;
        }
        if (!fits_u64(rho_need)) throw BudgetExceeded("rho requirement exceeds edge budget");
        rep.rho = to_u64(rho_need);
        rep.rho_rhs = rho_need;

        // band inequality: 2*3^k*(rho*i1 + i2) < M = r - rho
        BigCount pow3k = 1;
        for (int m = 0; m < k; ++m) pow3k *= 3;
        rep.band_lhs = 2 * pow3k * (rho_need * rep.i1 + rep.i2);
        const BigCount r_min = rep.band_lhs + 1 + rho_need;

        bool placed = false;
        std::string reason = "depth exhausted";
        for (int next = lo + 1; next <= std::min(d0.depth(), lo + budget.max_window); ++next) {
            bool ok = true;
            const auto ht = d0.count_table(lo, next);  // composite degrees
            for (VertexIndex v = 0; v < d0.level_size(next) && ok; ++v) {
                if (ht[next][v] < 5) {
                    ok = false;
                    reason = "(b) fewer than 5 edges into a vertex";
                } else if (ht[next][v] < r_min) {
                    ok = false;
                    reason = "band inequality needs a wider level";
                }
                if (!fits_u64(ht[next][v]) || to_u64(ht[next][v]) > budget.max_edges_per_level) {
                    ok = false;
                    reason = "edge budget exceeded";
                }
            }
            if (ok && k >= 1) {
                // (c): the minimal-edge source is connected to every lower
                // vertex through at least 4 edges; (b) holds a fortiori.
                const auto pc = pair_counts(d0, lo, next);
                for (VertexIndex u = 0; u < d0.level_size(lo) && ok; ++u)
                    if (pc[0][u] < 4) {
                        ok = false;
                        reason = "(c) fewer than 4 edges from a predecessor into the minimal "
                                 "source";
                    }
            }
            if (ok) {
                cuts.push_back(next);
                placed = true;
                break;
            }
        }
        if (!placed) {
            std::ostringstream msg;
            msg << "colouring stuck at level " << k << ": " << reason;
            throw BudgetExceeded(msg.str());
        }
        reports.push_back(std::move(rep));
    }

    OrderedBratteliDiagram t = telescope(d0, cuts, budget.expansion_guard);
    for (int n = 1; n < t.depth(); ++n)
        for (VertexIndex v = 0; v < t.level_size(n + 1); ++v)
            if (t.incoming(n, v).source_at(0) != 0)
                throw BudgetExceeded("minimal edges lost their unique source");

    // assign the bands
    std::vector<std::vector<IncomingList>> incoming(t.depth());
    for (int n = 0; n < t.depth(); ++n) {
        incoming[n].resize(t.level_size(n + 1));
        for (VertexIndex v = 0; v < t.level_size(n + 1); ++v) {
            const IncomingList& in = t.incoming(n, v);
            if (n == 0 || n > budget.coloured_levels) {
                incoming[n][v] = in;
                continue;
            }
            ColourLevelReport& rep = reports[n - 1];
            const std::uint64_t r = in.degree();
            const std::uint64_t M = r - rep.rho;
            rep.thick_counts.push_back(M);
            if (rep.min_degree == 0 || r < rep.min_degree) rep.min_degree = r;
            if (rep.band_rhs == 0 || BigCount(static_cast<unsigned long>(M)) < rep.band_rhs)
                rep.band_rhs = static_cast<unsigned long>(M);
            // split positions [0][1..M][M+1..r-2][r-1] into class bands
            std::vector<EdgeRun> runs;
            std::uint64_t pos = 0;
            for (const EdgeRun& old : in.runs()) {
                std::uint64_t off = 0;
                while (off < old.count) {
                    const std::uint64_t gpos = pos + off;
                    std::uint64_t band_end;  // exclusive global end of the band
                    EdgeClass cls;
                    if (gpos == 0) {
                        band_end = 1;
                        cls = EdgeClass::Plain;
                    } else if (gpos <= M) {
                        band_end = M + 1;
                        cls = EdgeClass::Thick;
                    } else if (gpos <= r - 2) {
                        band_end = r - 1;
                        cls = EdgeClass::Thin;
                    } else {
                        band_end = r;
                        cls = EdgeClass::Plain;
                    }
                    const std::uint64_t take =
                        std::min(old.count - off, band_end - gpos);
                    const std::uint64_t p = old.sources.size();
                    std::vector<VertexIndex> srcs(std::min<std::uint64_t>(p, take));
                    for (std::uint64_t i = 0; i < srcs.size(); ++i)
                        srcs[i] = old.sources[(off + i) % p];
                    runs.push_back(EdgeRun{take, cls, std::move(srcs)});
                    off += take;
                }
                pos += old.count;
            }
            incoming[n][v] = IncomingList::from_runs(std::move(runs));
        }
    }

    ColouringResult res;
    res.cuts = cuts;
    res.levels = std::move(reports);
    res.diagram = OrderedBratteliDiagram(t.level_sizes(), std::move(incoming));
    auto violations = validate(res.diagram);
    if (!violations.empty()) throw BudgetExceeded("colouring produced an invalid diagram");
    return res;
}

ExtensionTriple build_three_to_one(const OrderedBratteliDiagram& b) {
    for (int n = 1; n < b.depth(); ++n) {
        if (!b.level_coloured(n)) throw InvalidInput("base not coloured");
        for (VertexIndex v = 0; v < b.level_size(n + 1); ++v)
            if (b.incoming(n, v).source_at(0) != 0)
                throw InvalidInput("minimal edges must share source vertex 0");
    }

    CopyPasteSpec spec;
    spec.copy_counts.resize(b.depth());
    for (int n = 1; n <= b.depth(); ++n) {
        spec.copy_counts[n - 1].assign(b.level_size(n), 3);
        spec.copy_counts[n - 1][0] = 4;
    }
    spec.rows.resize(b.depth());
    for (int n = 0; n < b.depth(); ++n) {
        spec.rows[n].resize(b.level_size(n + 1));
        for (VertexIndex l = 0; l < b.level_size(n + 1); ++l) {
            const IncomingList& in = b.incoming(n, l);
            auto& rows = spec.rows[n][l];
            if (n == 0) {
                rows.assign(l == 0 ? 4 : 3,
                            IncomingList::from_runs(
                                {EdgeRun{in.degree(), EdgeClass::Plain, {0}}}));
                continue;
            }
            for (std::uint32_t j = 0; j < 3; ++j) {
                // minimal -> extra copy, thick -> same copy, thin -> merge
                // (copies 0,1 to 0 and copy 2 to 1), maximal -> copy 0
                std::vector<EdgeRun> runs;
                std::uint64_t pos = 0;
                for (const EdgeRun& r : in.runs()) {
                    VertexIndex val;
                    if (pos == 0)
                        val = 3;
                    else if (pos + r.count == in.degree())
                        val = 0;
                    else if (r.cls == EdgeClass::Thick)
                        val = j;
                    else if (r.cls == EdgeClass::Thin)
                        val = j <= 1 ? 0 : 1;
                    else
                        throw InvalidInput("interior edge without colour");
                    runs.push_back(EdgeRun{r.count, r.cls, {val}});
                    pos += r.count;
                }
                rows.push_back(IncomingList::from_runs(std::move(runs)));
            }
            if (l == 0) rows.push_back(alternating_row(in, 3, 3, b.level_size(n)));
        }
    }

    ExtensionTriple triple;
    triple.extended = copy_paste(b, spec);
    triple.base = b;
    triple.spec = std::move(spec);
    triple.kind = ConstructionKind::ThreeToOne;
    return triple;
}

namespace {

std::uint32_t row_value_mask(const CopyPasteSpec& spec, int n, VertexIndex l,
                             std::uint32_t copy_set, std::uint64_t pos) {
    std::uint32_t out = 0;
    for (std::uint32_t j = 0; copy_set >> j; ++j)
        if ((copy_set >> j) & 1u)
            out |= 1u << spec.rows[n][l][j].source_at(pos);
    return out;
}

// Walks the common run refinement of a base incoming list and the rows of
// every copy in `copy_set`. For each stretch the (source vertex, image
// mask) pattern repeats with the reported period.
void for_each_set_stretch(
    const IncomingList& base_in, const CopyPasteSpec& spec, int n, VertexIndex l,
    std::uint32_t copy_set,
    const std::function<void(std::uint64_t pos, std::uint64_t len, EdgeClass cls,
                             std::uint64_t period,
                             const std::function<VertexIndex(std::uint64_t)>& src_at,
                             const std::function<std::uint32_t(std::uint64_t)>& mask_at)>& fn) {
    struct Cursor {
        std::span<const EdgeRun> runs;
        std::size_t ri = 0;
        std::uint64_t off = 0;
    };
    Cursor base{base_in.runs()};
    std::vector<Cursor> rows;
    std::vector<std::uint32_t> copies;
    for (std::uint32_t j = 0; copy_set >> j; ++j)
        if ((copy_set >> j) & 1u) {
            copies.push_back(j);
            if (n >= 1) rows.push_back(Cursor{spec.rows[n][l][j].runs()});
        }

    std::uint64_t pos = 0;
    std::uint64_t remaining = base_in.degree();
    while (remaining > 0) {
        std::uint64_t take = base.runs[base.ri].count - base.off;
        std::uint64_t period = base.runs[base.ri].sources.size();
        for (const Cursor& c : rows) {
            take = std::min(take, c.runs[c.ri].count - c.off);
            period = lcm_u64(period, c.runs[c.ri].sources.size());
        }
        take = std::min(take, remaining);
        if (period > 512) throw BudgetExceeded("combined copy-set cycle too long");
        if (period > take) period = take;

        const Cursor base_c = base;
        const std::vector<Cursor> rows_c = rows;
        auto src_at = [&base_c](std::uint64_t i) {
            const EdgeRun& r = base_c.runs[base_c.ri];
            return r.sources[(base_c.off + i) % r.sources.size()];
        };
        auto mask_at = [&rows_c, n](std::uint64_t i) -> std::uint32_t {
            if (n == 0) return 1u;
            std::uint32_t out = 0;
            for (const Cursor& c : rows_c) {
                const EdgeRun& r = c.runs[c.ri];
                out |= 1u << r.sources[(c.off + i) % r.sources.size()];
            }
            return out;
        };
        fn(pos, take, base.runs[base.ri].cls, period, src_at, mask_at);

        auto advance = [take](Cursor& c) {
            c.off += take;
            if (c.off == c.runs[c.ri].count) {
                c.off = 0;
                ++c.ri;
            }
        };
        advance(base);
        for (Cursor& c : rows) advance(c);
        pos += take;
        remaining -= take;
    }
}

}  // namespace

VertexIndex ExtendedDiagram::find_vertex(int level, VertexIndex base_vertex,
                                         std::uint32_t copy_set) const {
    const auto& lv = labels.at(level);
    for (VertexIndex v = 0; v < lv.size(); ++v)
        if (lv[v].base == base_vertex && lv[v].copy_set == copy_set) return v;
    throw InvalidInput("copy-set vertex not present (pruned or invalid)");
}

std::uint64_t ExtendedDiagram::base_position(int level, VertexIndex v,
                                             std::uint64_t pick) const {
    const auto& kept = kept_positions.at(level).at(v);
    return kept ? kept->at(pick) : pick;
}

bool ExtendedDiagram::forked(int level, VertexIndex v) const {
    const std::uint32_t s = labels.at(level).at(v).copy_set;
    return (s & (s - 1)) != 0;
}

std::vector<bool> ExtendedDiagram::forked_level1() const {
    std::vector<bool> out(labels.at(1).size());
    for (VertexIndex v = 0; v < out.size(); ++v) out[v] = forked(1, v);
    return out;
}

ExtendedDiagram extended_diagram(const ExtensionTriple& triple, int horizon,
                                 const ExtendOptions& opts) {
    const auto& base = triple.base;
    if (horizon < 1 || horizon > base.depth()) throw InvalidInput("horizon out of range");

    // candidate copy sets per level
    std::vector<std::vector<SetVertex>> cand(horizon + 1);
    cand[0] = {SetVertex{0, 1}};
    for (int n = 1; n <= horizon; ++n) {
        for (VertexIndex l = 0; l < base.level_size(n); ++l) {
            const std::uint32_t copies = triple.spec.copies(n, l);
            if (copies > 16) throw BudgetExceeded("too many copies for set vertices");
            for (std::uint32_t s = 1; s < (1u << copies); ++s)
                cand[n].push_back(SetVertex{l, s});
        }
        if (cand[n].size() > opts.max_set_vertices_per_level)
            throw BudgetExceeded("copy-set level exceeds the vertex cap");
    }

    // survival: a vertex survives iff it reaches the horizon level
    std::vector<std::set<std::pair<VertexIndex, std::uint32_t>>> alive(horizon + 1);
    for (const SetVertex& sv : cand[horizon]) alive[horizon].insert({sv.base, sv.copy_set});
    for (int n = horizon - 1; n >= 0; --n) {
        for (const SetVertex& sv : cand[n + 1]) {
            if (!alive[n + 1].count({sv.base, sv.copy_set})) continue;
            for_each_set_stretch(
                base.incoming(n, sv.base), triple.spec, n, sv.base, sv.copy_set,
                [&](std::uint64_t, std::uint64_t len, EdgeClass, std::uint64_t period,
                    const std::function<VertexIndex(std::uint64_t)>& src_at,
                    const std::function<std::uint32_t(std::uint64_t)>& mask_at) {
                    for (std::uint64_t i = 0; i < period && i < len; ++i)
                        alive[n].insert({src_at(i), mask_at(i)});
                });
        }
    }

    ExtendedDiagram ed;
    ed.horizon = horizon;
    ed.labels.resize(horizon + 1);
    ed.kept_positions.resize(horizon);
    std::vector<std::map<std::pair<VertexIndex, std::uint32_t>, VertexIndex>> index(horizon + 1);
    std::vector<std::uint32_t> sizes(horizon + 1);
    for (int n = 0; n <= horizon; ++n) {
        for (const SetVertex& sv : cand[n]) {
            if (!alive[n].count({sv.base, sv.copy_set})) continue;
            index[n][{sv.base, sv.copy_set}] = static_cast<VertexIndex>(ed.labels[n].size());
            ed.labels[n].push_back(sv);
        }
        sizes[n] = static_cast<std::uint32_t>(ed.labels[n].size());
    }

    std::vector<std::vector<IncomingList>> incoming(horizon);
    for (int n = 0; n < horizon; ++n) {
        incoming[n].resize(sizes[n + 1]);
        ed.kept_positions[n].resize(sizes[n + 1]);
        for (VertexIndex v = 0; v < sizes[n + 1]; ++v) {
            const SetVertex sv = ed.labels[n + 1][v];
            const IncomingList& in = base.incoming(n, sv.base);
            std::vector<EdgeRun> runs;
            bool dropped = false;
            for_each_set_stretch(
                in, triple.spec, n, sv.base, sv.copy_set,
                [&](std::uint64_t, std::uint64_t len, EdgeClass cls, std::uint64_t period,
                    const std::function<VertexIndex(std::uint64_t)>& src_at,
                    const std::function<std::uint32_t(std::uint64_t)>& mask_at) {
                    if (dropped) return;
                    std::vector<VertexIndex> srcs(std::min<std::uint64_t>(period, len));
                    for (std::uint64_t i = 0; i < srcs.size(); ++i) {
                        auto it = index[n].find({src_at(i), mask_at(i)});
                        if (it == index[n].end()) {
                            dropped = true;
                            return;
                        }
                        srcs[i] = it->second;
                    }
                    runs.push_back(EdgeRun{len, cls, std::move(srcs)});
                });
            if (!dropped) {
                incoming[n][v] = IncomingList::from_runs(std::move(runs));
                continue;
            }
            // explicit rebuild keeping only surviving positions
            if (in.degree() > opts.drop_rebuild_guard)
                throw BudgetExceeded("pruned positions on a run-compressed level");
            ed.positions_dropped = true;
            std::vector<VertexIndex> kept_srcs;
            std::vector<std::uint64_t> kept_pos;
            for (std::uint64_t m = 0; m < in.degree(); ++m) {
                const std::uint32_t img =
                    n == 0 ? 1u : row_value_mask(triple.spec, n, sv.base, sv.copy_set, m);
                auto it = index[n].find({in.source_at(m), img});
                if (it == index[n].end()) continue;
                kept_srcs.push_back(it->second);
                kept_pos.push_back(m);
            }
            if (kept_srcs.empty()) throw BudgetExceeded("surviving vertex lost all edges");
            incoming[n][v] = IncomingList::from_sources(kept_srcs);
            ed.kept_positions[n][v] = std::move(kept_pos);
        }
    }
    ed.diagram = OrderedBratteliDiagram(std::vector<std::uint32_t>(sizes), std::move(incoming));
    return ed;
}

std::vector<std::uint32_t> full_preimage_sets(const ExtensionTriple& triple,
                                              const FinitePath& head) {
    if (head.start_level != 0) throw InvalidInput("full preimage needs a level-0 head");
    const int H = head.end_level();
    std::vector<std::uint32_t> sets(H + 1);
    sets[H] = (1u << triple.spec.copies(H, head.trail[H])) - 1;
    for (int n = H - 1; n >= 1; --n)
        sets[n] = row_value_mask(triple.spec, n, head.trail[n + 1], sets[n + 1], head.picks[n]);
    sets[0] = 1;
    return sets;
}

FinitePath full_preimage_path(const ExtendedDiagram& ed, const ExtensionTriple& triple,
                              const FinitePath& head) {
    if (head.end_level() != ed.horizon)
        throw InvalidInput("head must reach the extended diagram's horizon");
    const auto sets = full_preimage_sets(triple, head);
    FinitePath p;
    p.start_level = 0;
    p.picks = head.picks;
    p.trail.resize(head.trail.size());
    for (int n = 0; n <= ed.horizon; ++n)
        p.trail[n] = ed.find_vertex(n, head.trail[n], sets[n]);
    if (ed.positions_dropped) {
        for (int n = 0; n < ed.horizon; ++n) {
            const auto& kept = ed.kept_positions[n][p.trail[n + 1]];
            if (!kept) continue;
            auto it = std::lower_bound(kept->begin(), kept->end(), head.picks[n]);
            if (it == kept->end() || *it != head.picks[n])
                throw InvalidInput("head uses a pruned edge");
            p.picks[n] = static_cast<std::uint64_t>(it - kept->begin());
        }
    }
    return p;
}

FibreCardinality fibre_cardinality(const ExtensionTriple& triple, const FinitePath& head) {
    if (head.end_level() < 1) throw InvalidInput("head must reach level 1");
    const auto sets = full_preimage_sets(triple, head);
    FibreCardinality out;
    out.horizon = head.end_level();
    out.count = static_cast<std::uint32_t>(__builtin_popcount(sets[1]));
    return out;
}

}  // namespace bvd
