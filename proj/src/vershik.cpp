#include "bvd/vershik.hpp"

#include <sstream>

namespace bvd {

namespace {

// Refill levels [start_level, upto) of `p` with the minimal (or maximal)
// path into the vertex currently at `upto`.
void refill_below(const OrderedBratteliDiagram& d, FinitePath& p, int upto, bool maximal) {
    VertexIndex cur = p.trail[upto - p.start_level];
    for (int level = upto - 1; level >= p.start_level; --level) {
        const IncomingList& in = d.incoming(level, cur);
        const std::uint64_t m = maximal ? in.degree() - 1 : 0;
        p.picks[level - p.start_level] = m;
        cur = in.source_at(m);
        p.trail[level - p.start_level] = cur;
    }
}

}  // namespace

std::optional<FinitePath> successor(const OrderedBratteliDiagram& d, const FinitePath& path) {
    FinitePath p = path;
    for (std::size_t k = 0; k < p.picks.size(); ++k) {
        const int level = p.start_level + static_cast<int>(k);
        const IncomingList& in = d.incoming(level, p.trail[k + 1]);
        if (p.picks[k] + 1 < in.degree()) {
            p.picks[k] += 1;
            p.trail[k] = in.source_at(p.picks[k]);
            refill_below(d, p, level, false);
            return p;
        }
    }
    return std::nullopt;
}

std::optional<FinitePath> predecessor(const OrderedBratteliDiagram& d, const FinitePath& path) {
    FinitePath p = path;
    for (std::size_t k = 0; k < p.picks.size(); ++k) {
        const int level = p.start_level + static_cast<int>(k);
        const IncomingList& in = d.incoming(level, p.trail[k + 1]);
        if (p.picks[k] > 0) {
            p.picks[k] -= 1;
            p.trail[k] = in.source_at(p.picks[k]);
            refill_below(d, p, level, true);
            return p;
        }
    }
    return std::nullopt;
}

BigCount steps_to_max(const OrderedBratteliDiagram& d, const FinitePath& path) {
    if (path.start_level == 0)
        return d.path_count(path.end()) - 1 - rank(d, path);
    // prepend the maximal head into the source of the first edge
    const auto [mn, mx] = extremal_paths(d, {path.start_level, path.trail.front()}, 0);
    FinitePath full = mx;
    full.picks.insert(full.picks.end(), path.picks.begin(), path.picks.end());
    full.trail.insert(full.trail.end(), path.trail.begin() + 1, path.trail.end());
    return d.path_count(full.end()) - 1 - rank(d, full);
}

bool is_premaximal(const OrderedBratteliDiagram& d, const FinitePath& path) {
    for (std::size_t k = 0; k < path.picks.size(); ++k) {
        const int level = path.start_level + static_cast<int>(k);
        const IncomingList& in = d.incoming(level, path.trail[k + 1]);
        if (in.degree() < 2 || path.picks[k] != in.degree() - 2) return false;
    }
    return !path.picks.empty();
}

std::vector<FinitePath> premaximal_paths(const OrderedBratteliDiagram& d, int n, int N) {
    if (!(0 < n && n < N && N <= d.depth())) throw InvalidInput("premaximal window out of range");
    std::vector<FinitePath> out;
    for (VertexIndex v = 0; v < d.level_size(N); ++v) {
        FinitePath p;
        p.start_level = n;
        p.picks.assign(N - n, 0);
        p.trail.assign(N - n + 1, 0);
        p.trail.back() = v;
        VertexIndex cur = v;
        bool ok = true;
        for (int level = N - 1; level >= n; --level) {
            const IncomingList& in = d.incoming(level, cur);
            if (in.degree() < 2) {
                ok = false;
                break;
            }
            const std::uint64_t m = in.degree() - 2;
            p.picks[level - n] = m;
            cur = in.source_at(m);
            p.trail[level - n] = cur;
        }
        if (ok) out.push_back(std::move(p));
    }
    return out;
}

bool ScaleCertificate::holds() const {
    if (vacuous) return true;
    return min_premaximal_steps * delta.get_num() > max_base_steps * delta.get_den();
}

ScaleCertificate exceeds_on_scale(const OrderedBratteliDiagram& d, int n, int N,
                                  const Rational& delta) {
    if (!(0 < n && n < N && N <= d.depth())) throw InvalidInput("scale window out of range");
    if (sgn(delta) <= 0) throw InvalidInput("delta must be positive");
    ScaleCertificate cert;
    cert.n = n;
    cert.N = N;
    cert.delta = delta;

    cert.max_base_steps = 0;
    for (VertexIndex v = 0; v < d.level_size(n); ++v) {
        BigCount t = d.path_count({n, v}) - 1;
        if (t > cert.max_base_steps) cert.max_base_steps = t;
    }

    const auto premax = premaximal_paths(d, n, N);
    if (premax.empty()) {
        cert.vacuous = true;
        cert.ok = true;
        return cert;
    }
    bool first = true;
    for (const FinitePath& g : premax) {
        BigCount t = steps_to_max(d, g);
        if (first || t < cert.min_premaximal_steps) cert.min_premaximal_steps = t;
        first = false;
    }
    cert.ok = cert.holds();
    return cert;
}

int find_exceeding_level(const OrderedBratteliDiagram& d, int n, const Rational& delta,
                         int max_depth) {
    if (max_depth > d.depth()) max_depth = d.depth();
    for (int N = n + 1; N <= max_depth; ++N)
        if (exceeds_on_scale(d, n, N, delta).ok) return N;
    std::ostringstream msg;
    msg << "no level <= " << max_depth << " exceeds " << n << " on scale "
        << rational_string(delta);
    throw BudgetExceeded(msg.str());
}

OrbitCursor::OrbitCursor(const OrderedBratteliDiagram& d, FinitePath start)
    : diagram_(&d), current_(std::move(start)), steps_(0) {
    if (current_.start_level != 0) throw InvalidInput("orbit cursor needs a level-0 path");
    remaining_ = steps_to_max(d, current_);
}

bool OrbitCursor::advance() {
    if (remaining_ == 0) return false;
    auto next = successor(*diagram_, current_);
    if (!next) return false;
    current_ = std::move(*next);
    steps_ += 1;
    remaining_ -= 1;
    return true;
}

IterateResult iterate(OrbitCursor& cursor, const BigCount& steps,
                      const std::function<void(const FinitePath&, const BigCount&)>& visitor) {
    IterateResult res;
    res.steps_done = 0;
    if (visitor) visitor(cursor.current(), cursor.steps_taken());
    while (res.steps_done < steps) {
        if (!cursor.advance()) {
            res.horizon_exhausted = true;
            return res;
        }
        res.steps_done += 1;
        if (visitor) visitor(cursor.current(), cursor.steps_taken());
    }
    return res;
}

}  // namespace bvd
