#include "bvd/diagram.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <sstream>

namespace bvd {

const char* edge_class_name(EdgeClass c) {
    switch (c) {
        case EdgeClass::Plain: return "plain";
        case EdgeClass::Thick: return "thick";
        case EdgeClass::Thin: return "thin";
    }
    return "?";
}

namespace {

// Minimal cyclic period of a source pattern.
std::vector<VertexIndex> reduce_period(std::vector<VertexIndex> s) {
    const std::size_t n = s.size();
    for (std::size_t p = 1; p <= n / 2; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (std::size_t i = p; i < n && ok; ++i) ok = (s[i] == s[i % p]);
        if (ok) {
            s.resize(p);
            return s;
        }
    }
    return s;
}

}  // namespace

IncomingList IncomingList::from_sources(const std::vector<VertexIndex>& sources) {
    std::vector<EdgeRun> runs;
    for (VertexIndex s : sources) {
        if (!runs.empty() && runs.back().sources.size() == 1 && runs.back().sources[0] == s)
            runs.back().count += 1;
        else
            runs.push_back(EdgeRun{1, EdgeClass::Plain, {s}});
    }
    return from_runs(std::move(runs));
}

IncomingList IncomingList::from_runs(std::vector<EdgeRun> runs) {
    IncomingList out;
    out.runs_ = std::move(runs);
    out.canonicalize();
    return out;
}

void IncomingList::canonicalize() {
    std::vector<EdgeRun> flat;
    for (EdgeRun& r : runs_) {
        if (r.count == 0) continue;
        if (r.sources.empty()) throw InvalidInput("edge run without sources");
        if (r.count < r.sources.size()) r.sources.resize(r.count);
        r.sources = reduce_period(std::move(r.sources));
        flat.push_back(std::move(r));
    }
    runs_ = std::move(flat);
    degree_ = 0;
    for (const EdgeRun& r : runs_) degree_ += r.count;
    if (degree_ == 0) return;

    // Split the minimal and maximal position into singleton runs so every
    // run is homogeneous in (class, extremality).
    if (degree_ >= 2) {
        if (runs_.front().count > 1) {
            EdgeRun& r = runs_.front();
            EdgeRun head{1, r.cls, {r.sources[0]}};
            std::vector<VertexIndex> rest(r.sources.size());
            for (std::size_t i = 0; i < rest.size(); ++i)
                rest[i] = r.sources[(i + 1) % r.sources.size()];
            r.count -= 1;
            if (r.count < rest.size()) rest.resize(r.count);
            r.sources = reduce_period(std::move(rest));
            runs_.insert(runs_.begin(), std::move(head));
        }
        EdgeRun& last = runs_.back();
        if (last.count > 1) {
            EdgeRun tail{1, last.cls, {last.sources[(last.count - 1) % last.sources.size()]}};
            last.count -= 1;
            if (last.count < last.sources.size()) {
                last.sources.resize(last.count);
                last.sources = reduce_period(std::move(last.sources));
            }
            runs_.push_back(std::move(tail));
        }
    }
    // Merge adjacent constant runs of equal class and source away from the
    // extremal singletons.
    std::vector<EdgeRun> merged;
    const std::uint64_t deg = degree_;
    std::uint64_t begin_prev = 0;
    std::uint64_t at = 0;
    for (EdgeRun& r : runs_) {
        const std::uint64_t begin = at;
        at += r.count;
        const bool prev_is_min = deg >= 2 && !merged.empty() && begin_prev == 0;
        const bool cur_is_max = deg >= 2 && at == deg;
        if (!merged.empty() && !prev_is_min && !cur_is_max &&
            merged.back().sources.size() == 1 && r.sources.size() == 1 &&
            merged.back().sources[0] == r.sources[0] && merged.back().cls == r.cls) {
            merged.back().count += r.count;
        } else {
            begin_prev = begin;
            merged.push_back(std::move(r));
        }
    }
    runs_ = std::move(merged);
}

VertexIndex IncomingList::source_at(std::uint64_t m) const {
    if (m >= degree_) throw InvalidInput("edge position out of range");
    for (const EdgeRun& r : runs_) {
        if (m < r.count) return r.sources[m % r.sources.size()];
        m -= r.count;
    }
    throw InvalidInput("corrupt incoming list");
}

EdgeClass IncomingList::class_at(std::uint64_t m) const {
    if (m >= degree_) throw InvalidInput("edge position out of range");
    for (const EdgeRun& r : runs_) {
        if (m < r.count) return r.cls;
        m -= r.count;
    }
    throw InvalidInput("corrupt incoming list");
}

std::uint64_t IncomingList::thick_count() const {
    std::uint64_t n = 0;
    for (const EdgeRun& r : runs_)
        if (r.cls == EdgeClass::Thick) n += r.count;
    return n;
}

bool IncomingList::coloured() const {
    return std::any_of(runs_.begin(), runs_.end(),
                       [](const EdgeRun& r) { return r.cls != EdgeClass::Plain; });
}

std::vector<VertexIndex> IncomingList::expand() const {
    if (degree_ > (1u << 26)) throw BudgetExceeded("incoming list too long to expand");
    std::vector<VertexIndex> out;
    out.reserve(degree_);
    for (const EdgeRun& r : runs_)
        for (std::uint64_t i = 0; i < r.count; ++i) out.push_back(r.sources[i % r.sources.size()]);
    return out;
}

OrderedBratteliDiagram::OrderedBratteliDiagram(std::vector<std::uint32_t> level_sizes,
                                               std::vector<std::vector<IncomingList>> incoming)
    : level_sizes_(std::move(level_sizes)), incoming_(std::move(incoming)) {
    if (level_sizes_.empty()) throw InvalidInput("diagram needs at least one level");
    if (incoming_.size() + 1 != level_sizes_.size())
        throw InvalidInput("incoming level count must be depth");
    for (std::size_t n = 0; n < incoming_.size(); ++n)
        if (incoming_[n].size() != level_sizes_[n + 1])
            throw InvalidInput("incoming list count must match level size");
}

void OrderedBratteliDiagram::attach_copy_meta(std::vector<std::vector<CopyMeta>> meta) {
    if (meta.size() != incoming_.size()) throw InvalidInput("copy meta level mismatch");
    copy_meta_ = std::move(meta);
}

bool OrderedBratteliDiagram::level_coloured(int level) const {
    for (const IncomingList& in : incoming_.at(level))
        if (in.coloured()) return true;
    return false;
}

const std::vector<std::vector<BigCount>>& OrderedBratteliDiagram::ensure_counts() const {
    auto table = std::atomic_load_explicit(&counts_, std::memory_order_acquire);
    if (!table) {
        table = std::make_shared<const std::vector<std::vector<BigCount>>>(
            count_table(0, depth()));
        std::atomic_store_explicit(&counts_, table, std::memory_order_release);
    }
    return *table;
}

const BigCount& OrderedBratteliDiagram::path_count(VertexRef v) const {
    if (v.level < 1 || v.level > depth()) throw InvalidInput("path_count level out of range");
    return ensure_counts()[v.level][v.index];
}

std::vector<std::vector<BigCount>> OrderedBratteliDiagram::count_table(int from_level,
                                                                       int to_level) const {
    std::vector<std::vector<BigCount>> h(to_level + 1);
    h[from_level].assign(level_size(from_level), BigCount(1));
    for (int n = from_level; n < to_level; ++n) {
        h[n + 1].resize(level_size(n + 1));
        for (VertexIndex v = 0; v < level_size(n + 1); ++v)
            h[n + 1][v] = weighted_prefix(incoming(n, v), h[n], incoming(n, v).degree());
    }
    return h;
}

BigCount weighted_prefix(const IncomingList& in, const std::vector<BigCount>& weight,
                         std::uint64_t upto) {
    if (upto > in.degree()) throw InvalidInput("prefix beyond degree");
    BigCount sum = 0;
    std::uint64_t left = upto;
    for (const EdgeRun& r : in.runs()) {
        if (left == 0) break;
        const std::uint64_t take = std::min<std::uint64_t>(left, r.count);
        const std::size_t p = r.sources.size();
        BigCount cycle = 0;
        for (VertexIndex s : r.sources) cycle += weight[s];
        sum += BigCount(static_cast<unsigned long>(take / p)) * cycle;
        for (std::uint64_t j = 0; j < take % p; ++j) sum += weight[r.sources[j]];
        left -= take;
    }
    return sum;
}

FinitePath make_path(const OrderedBratteliDiagram& d, VertexRef end,
                     const std::vector<std::uint64_t>& picks, int start_level) {
    if (end.level - start_level != static_cast<int>(picks.size()))
        throw InvalidInput("pick count must match level span");
    FinitePath p;
    p.start_level = start_level;
    p.picks = picks;
    p.trail.assign(picks.size() + 1, 0);
    p.trail.back() = end.index;
    VertexIndex v = end.index;
    for (int k = static_cast<int>(picks.size()) - 1; k >= 0; --k) {
        const IncomingList& in = d.incoming(start_level + k, v);
        if (picks[k] >= in.degree()) throw InvalidInput("pick out of range");
        v = in.source_at(picks[k]);
        p.trail[k] = v;
    }
    return p;
}

BigCount rank(const OrderedBratteliDiagram& d, const FinitePath& path) {
    const auto h = d.count_table(path.start_level, path.end_level());
    BigCount t = 0;
    for (std::size_t k = 0; k < path.picks.size(); ++k) {
        const int level = path.start_level + static_cast<int>(k);
        t += weighted_prefix(d.incoming(level, path.trail[k + 1]), h[level], path.picks[k]);
    }
    return t;
}

FinitePath path_at_rank(const OrderedBratteliDiagram& d, VertexRef v, const BigCount& t,
                        int from_level) {
    const auto h = d.count_table(from_level, v.level);
    if (t < 0 || t >= h[v.level][v.index]) throw InvalidInput("rank out of range");

    FinitePath p;
    p.start_level = from_level;
    p.picks.assign(v.level - from_level, 0);
    p.trail.assign(v.level - from_level + 1, 0);
    p.trail.back() = v.index;

    BigCount rest = t;
    VertexIndex cur = v.index;
    for (int level = v.level - 1; level >= from_level; --level) {
        const IncomingList& in = d.incoming(level, cur);
        const std::vector<BigCount>& w = h[level];
        std::uint64_t base = 0;
        bool placed = false;
        for (const EdgeRun& r : in.runs()) {
            const std::size_t pp = r.sources.size();
            BigCount cycle = 0;
            for (VertexIndex s : r.sources) cycle += w[s];
            const std::uint64_t full = r.count / pp;
            BigCount run_w = BigCount(static_cast<unsigned long>(full)) * cycle;
            for (std::uint64_t j = 0; j < r.count % pp; ++j) run_w += w[r.sources[j]];
            if (rest >= run_w) {
                rest -= run_w;
                base += r.count;
                continue;
            }
            BigCount cyc_idx = rest / cycle;
            std::uint64_t idx = to_u64(cyc_idx) * pp;
            rest -= cyc_idx * cycle;
            std::size_t j = 0;
            while (rest >= w[r.sources[j % pp]]) {
                rest -= w[r.sources[j % pp]];
                ++idx;
                ++j;
            }
            const std::uint64_t m = base + idx;
            p.picks[level - from_level] = m;
            cur = r.sources[idx % pp];
            p.trail[level - from_level] = cur;
            placed = true;
            break;
        }
        if (!placed) throw InvalidInput("rank descent failed");
    }
    return p;
}

std::pair<FinitePath, FinitePath> extremal_paths(const OrderedBratteliDiagram& d, VertexRef v,
                                                 int from_level) {
    if (from_level >= v.level) throw InvalidInput("from_level must be below the end vertex");
    auto build = [&](bool maximal) {
        FinitePath p;
        p.start_level = from_level;
        p.picks.assign(v.level - from_level, 0);
        p.trail.assign(v.level - from_level + 1, 0);
        p.trail.back() = v.index;
        VertexIndex cur = v.index;
        for (int level = v.level - 1; level >= from_level; --level) {
            const IncomingList& in = d.incoming(level, cur);
            const std::uint64_t m = maximal ? in.degree() - 1 : 0;
            p.picks[level - from_level] = m;
            cur = in.source_at(m);
            p.trail[level - from_level] = cur;
        }
        return p;
    };
    return {build(false), build(true)};
}

std::vector<Violation> validate(const OrderedBratteliDiagram& d) {
    std::vector<Violation> out;
    if (d.level_size(0) != 1)
        out.push_back({"root", 0, 0, "level 0 must have exactly one vertex"});
    for (int n = 0; n <= d.depth(); ++n)
        if (d.level_size(n) == 0) out.push_back({"level_empty", n, 0, "empty level"});

    for (int n = 0; n < d.depth(); ++n) {
        std::vector<bool> sourced(d.level_size(n), false);
        bool any_coloured = false;
        for (VertexIndex v = 0; v < d.level_size(n + 1); ++v) {
            const IncomingList& in = d.incoming(n, v);
            if (in.degree() == 0) {
                out.push_back({"r_ge_1", n + 1, v, "vertex has no incoming edge"});
                continue;
            }
            for (const EdgeRun& r : in.runs()) {
                any_coloured = any_coloured || (r.cls != EdgeClass::Plain);
                for (VertexIndex s : r.sources) {
                    if (s >= d.level_size(n)) {
                        out.push_back({"source_range", n + 1, v, "edge source index out of range"});
                    } else {
                        sourced[s] = true;
                    }
                }
            }
        }
        for (VertexIndex u = 0; u < d.level_size(n); ++u)
            if (!sourced[u])
                out.push_back(
                    {"source_surjectivity", n, u, "vertex sources no edge to the next level"});

        if (any_coloured) {
            if (n == 0) out.push_back({"colour_level0", 0, 0, "level-0 edges cannot be coloured"});
            for (VertexIndex v = 0; v < d.level_size(n + 1); ++v) {
                const IncomingList& in = d.incoming(n, v);
                const std::uint64_t r = in.degree();
                // expected run shape: Plain(1), Thick^M, Thin^w, Plain(1)
                bool ok = r >= 5;
                std::uint64_t pos = 0, thick = 0, thin = 0;
                int stage = 0;  // 0: min, 1: thick, 2: thin, 3: max, 4: done
                for (const EdgeRun& run : in.runs()) {
                    if (!ok) break;
                    const std::uint64_t begin = pos;
                    pos += run.count;
                    switch (stage) {
                        case 0:
                            ok = begin == 0 && run.count == 1 && run.cls == EdgeClass::Plain;
                            stage = 1;
                            break;
                        case 1:
                            if (run.cls == EdgeClass::Thick) {
                                thick += run.count;
                                break;
                            }
                            stage = 2;
                            [[fallthrough]];
                        case 2:
                            if (run.cls == EdgeClass::Thin) {
                                thin += run.count;
                                break;
                            }
                            stage = 3;
                            [[fallthrough]];
                        case 3:
                            ok = run.count == 1 && pos == r && run.cls == EdgeClass::Plain;
                            stage = 4;
                            break;
                        default:
                            ok = false;
                    }
                }
                if (ok) ok = stage == 4 && thick >= 2 && thin >= 1;
                if (!ok)
                    out.push_back({"colour_bands", n + 1, v,
                                   "coloured list must partition as min|thick^M|thin^w|max "
                                   "with M >= 2, w >= 1"});
            }
        }
    }
    return out;
}

namespace {

std::vector<VertexIndex> expand_composite(const OrderedBratteliDiagram& d, int level,
                                          VertexIndex v, int down_to, std::uint64_t guard,
                                          std::map<std::pair<int, VertexIndex>,
                                                   std::vector<VertexIndex>>& memo) {
    if (level == down_to) return {v};
    auto key = std::make_pair(level, v);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<VertexIndex> out;
    const IncomingList& in = d.incoming(level - 1, v);
    if (in.degree() > guard) throw BudgetExceeded("telescoped incoming list exceeds guard");
    for (std::uint64_t m = 0; m < in.degree(); ++m) {
        auto sub = expand_composite(d, level - 1, in.source_at(m), down_to, guard, memo);
        if (out.size() + sub.size() > guard)
            throw BudgetExceeded("telescoped incoming list exceeds guard");
        out.insert(out.end(), sub.begin(), sub.end());
    }
    memo.emplace(std::move(key), out);
    return out;
}

}  // namespace

OrderedBratteliDiagram telescope(const OrderedBratteliDiagram& d, const std::vector<int>& cuts,
                                 std::uint64_t expansion_guard) {
    if (cuts.size() < 2 || cuts.front() != 0) throw InvalidInput("cuts must start at 0");
    for (std::size_t i = 1; i < cuts.size(); ++i)
        if (cuts[i] <= cuts[i - 1] || cuts[i] > d.depth())
            throw InvalidInput("cuts must be strictly increasing within depth");

    std::vector<std::uint32_t> sizes;
    for (int c : cuts) sizes.push_back(d.level_size(c));

    std::vector<std::vector<IncomingList>> incoming(cuts.size() - 1);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const int lo = cuts[k], hi = cuts[k + 1];
        incoming[k].reserve(d.level_size(hi));
        if (hi == lo + 1) {
            for (VertexIndex v = 0; v < d.level_size(hi); ++v)
                incoming[k].push_back(d.incoming(lo, v));
            continue;
        }
        if (d.level_size(lo) == 1) {
            const auto h = d.count_table(lo, hi);
            for (VertexIndex v = 0; v < d.level_size(hi); ++v) {
                const BigCount& c = h[hi][v];
                if (!fits_u64(c)) throw BudgetExceeded("telescoped edge count exceeds uint64");
                incoming[k].push_back(
                    IncomingList::from_runs({EdgeRun{to_u64(c), EdgeClass::Plain, {0}}}));
            }
            continue;
        }
        std::map<std::pair<int, VertexIndex>, std::vector<VertexIndex>> memo;
        for (VertexIndex v = 0; v < d.level_size(hi); ++v)
            incoming[k].push_back(IncomingList::from_sources(
                expand_composite(d, hi, v, lo, expansion_guard, memo)));
    }
    return OrderedBratteliDiagram(std::move(sizes), std::move(incoming));
}

bool simplicity_window_check(const OrderedBratteliDiagram& d, int n, int N) {
    if (!(0 <= n && n < N && N <= d.depth())) throw InvalidInput("bad window");
    // reach[v] = set of level-n vertices reaching v
    std::vector<std::vector<bool>> reach(d.level_size(n));
    for (VertexIndex u = 0; u < d.level_size(n); ++u) {
        reach[u].assign(d.level_size(n), false);
        reach[u][u] = true;
    }
    std::vector<std::vector<bool>> cur = std::move(reach);
    for (int lev = n; lev < N; ++lev) {
        std::vector<std::vector<bool>> next(d.level_size(lev + 1));
        for (VertexIndex v = 0; v < d.level_size(lev + 1); ++v) {
            next[v].assign(d.level_size(n), false);
            for (const EdgeRun& r : d.incoming(lev, v).runs())
                for (VertexIndex s : r.sources)
                    for (std::uint32_t i = 0; i < d.level_size(n); ++i)
                        if (cur[s][i]) next[v][i] = true;
        }
        cur = std::move(next);
    }
    for (VertexIndex v = 0; v < d.level_size(N); ++v)
        for (std::uint32_t i = 0; i < d.level_size(n); ++i)
            if (!cur[v][i]) return false;
    return true;
}

OrderedBratteliDiagram relabel(const OrderedBratteliDiagram& d,
                               const std::vector<std::vector<VertexIndex>>& perms) {
    std::vector<std::vector<IncomingList>> incoming(d.depth());
    for (int n = 0; n < d.depth(); ++n) {
        incoming[n].resize(d.level_size(n + 1));
        for (VertexIndex v = 0; v < d.level_size(n + 1); ++v) {
            std::vector<EdgeRun> runs;
            for (const EdgeRun& r : d.incoming(n, v).runs()) {
                EdgeRun nr = r;
                for (VertexIndex& s : nr.sources) s = perms[n][s];
                runs.push_back(std::move(nr));
            }
            incoming[n][perms[n + 1][v]] = IncomingList::from_runs(std::move(runs));
        }
    }
    OrderedBratteliDiagram out(d.level_sizes(), std::move(incoming));
    if (d.has_copy_meta()) {
        std::vector<std::vector<CopyMeta>> meta(d.depth());
        for (int n = 1; n <= d.depth(); ++n) {
            meta[n - 1].resize(d.level_size(n));
            for (VertexIndex v = 0; v < d.level_size(n); ++v)
                meta[n - 1][perms[n][v]] = d.copy_meta(n, v);
        }
        out.attach_copy_meta(std::move(meta));
    }
    return out;
}

namespace {

// Start vertex at `down_to` of the extremal path into (level, v).
VertexIndex extremal_chain(const OrderedBratteliDiagram& d, int level, VertexIndex v, int down_to,
                           bool maximal) {
    VertexIndex cur = v;
    for (int lev = level - 1; lev >= down_to; --lev) {
        const IncomingList& in = d.incoming(lev, cur);
        cur = in.source_at(maximal ? in.degree() - 1 : 0);
    }
    return cur;
}

}  // namespace

NormalizeResult extremal_source_normalize(const OrderedBratteliDiagram& d,
                                          const NormalizeOptions& opts) {
    if (d.depth() == 0) return NormalizeResult{d, {0}, false};
    std::vector<int> cuts{0};
    int cur = 0;
    while (cur < d.depth()) {
        bool placed = false;
        for (int w = 1; w <= opts.max_window && cur + w <= d.depth(); ++w) {
            const int next = cur + w;
            bool ok = true;
            if (opts.require_min) {
                VertexIndex first = extremal_chain(d, next, 0, cur, false);
                for (VertexIndex v = 1; v < d.level_size(next) && ok; ++v)
                    ok = extremal_chain(d, next, v, cur, false) == first;
            }
            if (ok && opts.require_max) {
                VertexIndex first = extremal_chain(d, next, 0, cur, true);
                for (VertexIndex v = 1; v < d.level_size(next) && ok; ++v)
                    ok = extremal_chain(d, next, v, cur, true) == first;
            }
            if (ok) {
                cuts.push_back(next);
                cur = next;
                placed = true;
                break;
            }
        }
        if (!placed) {
            std::ostringstream msg;
            msg << "no telescoping window above level " << cur
                << " unifies extremal-edge sources (max window " << opts.max_window << ")";
            throw BudgetExceeded(msg.str());
        }
        if (static_cast<int>(cuts.size()) > opts.max_depth)
            throw BudgetExceeded("normalization exceeded depth budget");
    }

    NormalizeResult res;
    res.cuts = cuts;
    OrderedBratteliDiagram t = telescope(d, cuts, opts.expansion_guard);

    // relabel so the unique minimal-edge source has index 0 on every level >= 1
    std::vector<std::vector<VertexIndex>> perms(t.depth() + 1);
    bool relabelled = false;
    for (int n = 0; n <= t.depth(); ++n) {
        perms[n].resize(t.level_size(n));
        std::iota(perms[n].begin(), perms[n].end(), 0);
        if (n >= 1 && n < t.depth()) {
            const VertexIndex min_src = t.incoming(n, 0).source_at(0);
            if (min_src != 0) {
                std::swap(perms[n][0], perms[n][min_src]);
                relabelled = true;
            }
        }
    }
    res.relabelled = relabelled;
    res.diagram = relabelled ? relabel(t, perms) : std::move(t);
    return res;
}

}  // namespace bvd
