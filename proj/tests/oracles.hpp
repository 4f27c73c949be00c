#pragma once

// Brute-force reference implementations used only by tests. They re-derive
// the order semantics directly from its definition (top edge most
// significant) and never share code with the library paths they check.

#include <cstdint>
#include <random>
#include <vector>

#include "bvd/diagram.hpp"

namespace oracles {

using bvd::FinitePath;
using bvd::IncomingList;
using bvd::OrderedBratteliDiagram;
using bvd::VertexIndex;
using bvd::VertexRef;

// All paths from `from_level` into v, listed in increasing order.
inline std::vector<FinitePath> enumerate_paths(const OrderedBratteliDiagram& d, VertexRef v,
                                               int from_level = 0) {
    if (v.level == from_level) {
        FinitePath p;
        p.start_level = from_level;
        p.trail = {v.index};
        return {p};
    }
    std::vector<FinitePath> out;
    const IncomingList& in = d.incoming(v.level - 1, v.index);
    for (std::uint64_t m = 0; m < in.degree(); ++m) {
        for (FinitePath sub : enumerate_paths(d, {v.level - 1, in.source_at(m)}, from_level)) {
            sub.picks.push_back(m);
            sub.trail.push_back(v.index);
            out.push_back(std::move(sub));
        }
    }
    return out;
}

// Uniformly random valid diagram within the acceptance envelope
// (depth <= 4, <= 3 vertices per level, <= 4 edges per vertex).
inline OrderedBratteliDiagram random_diagram(std::mt19937_64& rng, int max_depth = 4,
                                             int max_vertices = 3, int max_edges = 4) {
    std::uniform_int_distribution<int> depth_d(2, max_depth);
    const int depth = depth_d(rng);
    std::vector<std::uint32_t> sizes(depth + 1);
    sizes[0] = 1;
    std::uniform_int_distribution<int> size_d(1, max_vertices);
    for (int n = 1; n <= depth; ++n) sizes[n] = static_cast<std::uint32_t>(size_d(rng));

    std::vector<std::vector<IncomingList>> incoming(depth);
    std::uniform_int_distribution<int> deg_d(1, max_edges);
    for (int n = 0; n < depth; ++n) {
        std::vector<std::vector<VertexIndex>> lists(sizes[n + 1]);
        std::uniform_int_distribution<VertexIndex> src_d(0, sizes[n] - 1);
        for (auto& l : lists) {
            const int deg = deg_d(rng);
            for (int i = 0; i < deg; ++i) l.push_back(src_d(rng));
        }
        // patch source surjectivity: give every lower vertex one outgoing edge
        for (VertexIndex u = 0; u < sizes[n]; ++u) {
            bool used = false;
            for (const auto& l : lists)
                for (VertexIndex s : l) used = used || (s == u);
            if (!used) {
                std::uniform_int_distribution<std::size_t> pick(0, lists.size() - 1);
                auto& l = lists[pick(rng)];
                std::uniform_int_distribution<std::size_t> pos(0, l.size());
                l.insert(l.begin() + pos(rng), u);
            }
        }
        incoming[n].reserve(lists.size());
        for (auto& l : lists) incoming[n].push_back(IncomingList::from_sources(l));
    }
    return OrderedBratteliDiagram(std::move(sizes), std::move(incoming));
}

}  // namespace oracles
