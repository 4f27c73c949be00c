#include "bvd/window.hpp"

namespace bvd {

namespace {

// Sequential composition: `b` follows `acc` in rank order.
void append(WindowAggregate& acc, const WindowAggregate& b) {
    if (b.has_best) {
        const BigCount cand = acc.weighted + b.best;
        if (!acc.has_best || cand > acc.best) {
            acc.best = cand;
            acc.best_len = acc.count + b.best_len;
            acc.has_best = true;
        }
    }
    acc.count += b.count;
    acc.hits += b.hits;
    acc.weighted += b.weighted;
}

// `k` consecutive repetitions of one block.
WindowAggregate repeat(const WindowAggregate& block, const BigCount& k) {
    WindowAggregate out;
    if (k == 0) return out;
    out.count = block.count * k;
    out.hits = block.hits * k;
    out.weighted = block.weighted * k;
    if (block.has_best) {
        out.has_best = true;
        if (block.weighted > 0) {
            out.best = block.weighted * (k - 1) + block.best;
            out.best_len = block.count * (k - 1) + block.best_len;
        } else {
            out.best = block.best;
            out.best_len = block.best_len;
        }
    }
    return out;
}

}  // namespace

WindowCounter::WindowCounter(const OrderedBratteliDiagram& d, EdgePredicateAutomaton automaton,
                             int from_level, BigCount weight_hit, BigCount weight_step)
    : diagram_(&d),
      automaton_(std::move(automaton)),
      from_level_(from_level),
      w_hit_(std::move(weight_hit)),
      w_step_(std::move(weight_step)) {
    if (automaton_.states < 1 || automaton_.states > 8)
        throw InvalidInput("automaton must have 1..8 states");
    if (!automaton_.step) throw InvalidInput("automaton without step function");
    table_ = d.count_table(from_level_, d.depth());
}

WindowAggregate WindowCounter::base_case(GMask g) const {
    WindowAggregate out;
    const int hit = (g >> automaton_.initial) & 1;
    out.count = 1;
    out.hits = hit;
    out.weighted = w_step_ + (hit ? w_hit_ : BigCount(0));
    out.best = out.weighted;
    out.best_len = 1;
    out.has_best = true;
    return out;
}

WindowCounter::GMask WindowCounter::compose(GMask g, const EdgeContext& ctx) const {
    GMask out = 0;
    for (int q = 0; q < automaton_.states; ++q) {
        const int to = automaton_.step(q, ctx);
        if (to < 0 || to >= automaton_.states) throw InvalidInput("automaton step out of range");
        if ((g >> to) & 1) out |= static_cast<GMask>(1u << q);
    }
    return out;
}

WindowAggregate WindowCounter::full(int level, VertexIndex u, GMask g) {
    if (level == from_level_) return base_case(g);
    const auto key = std::make_tuple(level, u, g);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const IncomingList& in = diagram_->incoming(level - 1, u);
    WindowAggregate acc;

    if (automaton_.positional) {
        if (in.degree() > (1u << 16)) throw BudgetExceeded("positional automaton on a huge level");
        for (std::uint64_t m = 0; m < in.degree(); ++m) {
            EdgeContext ctx{level - 1, u,   in.source_at(m),          m,
                            in.class_at(m), m == 0, m == in.degree() - 1};
            append(acc, full(level - 1, ctx.source, compose(g, ctx)));
        }
        memo_.emplace(key, acc);
        return acc;
    }

    std::uint64_t base_pos = 0;
    for (const EdgeRun& r : in.runs()) {
        const std::size_t p = r.sources.size();
        std::vector<WindowAggregate> phase(p);
        for (std::size_t j = 0; j < p; ++j) {
            const std::uint64_t gpos = base_pos + j;
            EdgeContext ctx{level - 1, u,     r.sources[j],           gpos,
                            r.cls,     gpos == 0, gpos == in.degree() - 1};
            phase[j] = full(level - 1, r.sources[j], compose(g, ctx));
        }
        WindowAggregate cycle;
        for (const auto& ph : phase) append(cycle, ph);
        const std::uint64_t cycles = r.count / p;
        append(acc, repeat(cycle, BigCount(static_cast<unsigned long>(cycles))));
        for (std::uint64_t j = 0; j < r.count % p; ++j) append(acc, phase[j]);
        base_pos += r.count;
    }
    memo_.emplace(key, acc);
    return acc;
}

WindowAggregate WindowCounter::range(int level, VertexIndex u, GMask g, const BigCount& lo,
                                     const BigCount& hi) {
    const BigCount& total = table_[level][u];
    if (lo < 0 || hi > total || lo > hi) throw InvalidInput("window out of range");
    if (lo == hi) return {};
    if (lo == 0 && hi == total) return full(level, u, g);
    if (level == from_level_) return base_case(g);  // total == 1 here

    const IncomingList& in = diagram_->incoming(level - 1, u);
    const std::vector<BigCount>& w = table_[level - 1];
    WindowAggregate acc;
    BigCount t = 0;

    auto make_ctx = [&](const EdgeRun& r, std::uint64_t gpos, VertexIndex src) {
        return EdgeContext{level - 1, u,     src,
                           gpos,      r.cls, gpos == 0, gpos == in.degree() - 1};
    };

    std::uint64_t base_pos = 0;
    for (const EdgeRun& r : in.runs()) {
        if (t >= hi) break;
        const std::size_t p = r.sources.size();
        BigCount cycle_w = 0;
        for (VertexIndex s : r.sources) cycle_w += w[s];
        const std::uint64_t full_cycles = r.count / p;
        BigCount run_w = BigCount(static_cast<unsigned long>(full_cycles)) * cycle_w;
        for (std::uint64_t j = 0; j < r.count % p; ++j) run_w += w[r.sources[j]];
        if (t + run_w <= lo) {
            t += run_w;
            base_pos += r.count;
            continue;
        }

        // position-level walk inside this run, with whole-cycle batching
        std::uint64_t idx = 0;
        if (lo > t) {
            BigCount skip = (lo - t) / cycle_w;
            std::uint64_t skip_c = fits_u64(skip) ? to_u64(skip) : full_cycles;
            if (skip_c > full_cycles) skip_c = full_cycles;
            t += BigCount(static_cast<unsigned long>(skip_c)) * cycle_w;
            idx = skip_c * p;
        }
        WindowAggregate cycle_agg;
        bool cycle_agg_ready = false;
        while (idx < r.count && t < hi) {
            const VertexIndex src = r.sources[idx % p];
            const BigCount& wp = w[src];
            if (t + wp <= lo) {
                t += wp;
                ++idx;
                continue;
            }
            const bool starts_inside = t >= lo;
            const bool ends_inside = t + wp <= hi;
            if (starts_inside && ends_inside) {
                if (!automaton_.positional && idx % p == 0 && idx + p <= r.count &&
                    cycle_w <= hi - t) {
                    // batch whole cycles
                    if (!cycle_agg_ready) {
                        for (std::size_t j = 0; j < p; ++j) {
                            EdgeContext ctx = make_ctx(r, base_pos + idx + j, r.sources[j]);
                            append(cycle_agg,
                                   full(level - 1, r.sources[j], compose(g, ctx)));
                        }
                        cycle_agg_ready = true;
                    }
                    BigCount k = (hi - t) / cycle_w;
                    std::uint64_t kc = fits_u64(k) ? to_u64(k) : (r.count - idx) / p;
                    if (kc > (r.count - idx) / p) kc = (r.count - idx) / p;
                    append(acc, repeat(cycle_agg, BigCount(static_cast<unsigned long>(kc))));
                    t += BigCount(static_cast<unsigned long>(kc)) * cycle_w;
                    idx += kc * p;
                    continue;
                }
                EdgeContext ctx = make_ctx(r, base_pos + idx, src);
                append(acc, full(level - 1, src, compose(g, ctx)));
                t += wp;
                ++idx;
                continue;
            }
            // partial position: recurse into the sub-window
            EdgeContext ctx = make_ctx(r, base_pos + idx, src);
            const BigCount sub_lo = starts_inside ? BigCount(0) : lo - t;
            const BigCount sub_hi = ends_inside ? wp : hi - t;
            append(acc, range(level - 1, src, compose(g, ctx), sub_lo, sub_hi));
            t += wp;
            ++idx;
        }
        base_pos += r.count;
    }
    return acc;
}

WindowAggregate WindowCounter::window(VertexRef v, const BigCount& lo, const BigCount& hi) {
    if (v.level < from_level_ || v.level > diagram_->depth())
        throw InvalidInput("window vertex out of range");
    if (automaton_.positional) {
        // per-rank evaluation; small windows only
        if (hi - lo > BigCount(1u << 16))
            throw BudgetExceeded("positional automaton on a large window");
    }
    return range(v.level, v.index, automaton_.accept_mask, lo, hi);
}

BigCount WindowCounter::hits(VertexRef v, const BigCount& lo, const BigCount& hi) {
    return window(v, lo, hi).hits;
}

BigCount count_in_window(const OrderedBratteliDiagram& d, const EdgePredicateAutomaton& a,
                         VertexRef v, const BigCount& lo, const BigCount& hi, int from_level) {
    WindowCounter counter(d, a, from_level);
    return counter.hits(v, lo, hi);
}

}  // namespace bvd
