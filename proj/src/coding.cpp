#include "bvd/coding.hpp"

#include <unordered_set>

#include "bvd/vershik.hpp"

namespace bvd {

OrderedBratteliDiagram odometer_diagram(const std::vector<std::uint64_t>& edge_counts) {
    if (edge_counts.empty()) throw InvalidInput("odometer needs at least one level");
    std::vector<std::uint32_t> sizes(edge_counts.size() + 1, 1);
    std::vector<std::vector<IncomingList>> incoming;
    for (std::uint64_t r : edge_counts) {
        if (r < 2) throw InvalidInput("odometer levels need at least 2 edges");
        incoming.push_back({IncomingList::from_runs({EdgeRun{r, EdgeClass::Plain, {0}}})});
    }
    return OrderedBratteliDiagram(std::move(sizes), std::move(incoming));
}

OrderedBratteliDiagram sturmian_diagram(const std::vector<std::uint64_t>& coefficients) {
    if (coefficients.empty()) throw InvalidInput("sturmian needs at least one coefficient");
    for (std::uint64_t a : coefficients)
        if (a < 1) throw InvalidInput("sturmian coefficients must be >= 1");

    std::vector<std::uint32_t> sizes(coefficients.size() + 2, 2);
    sizes[0] = 1;
    std::vector<std::vector<IncomingList>> incoming;
    incoming.push_back({IncomingList::from_sources({0}), IncomingList::from_sources({0})});
    for (std::uint64_t a : coefficients) {
        std::vector<EdgeRun> into0;
        into0.push_back(EdgeRun{a, EdgeClass::Plain, {0}});
        into0.push_back(EdgeRun{1, EdgeClass::Plain, {1}});
        incoming.push_back({IncomingList::from_runs(std::move(into0)),
                            IncomingList::from_sources({0})});
    }
    return OrderedBratteliDiagram(std::move(sizes), std::move(incoming));
}

std::uint32_t level0_alphabet_size(const OrderedBratteliDiagram& d) {
    std::uint64_t total = 0;
    for (VertexIndex v = 0; v < d.level_size(1); ++v) total += d.edge_count_into(0, v);
    if (total > 0xffffffffu) throw BudgetExceeded("level-0 alphabet too large");
    return static_cast<std::uint32_t>(total);
}

std::uint32_t level0_symbol(const OrderedBratteliDiagram& d, const FinitePath& path) {
    if (path.start_level != 0 || path.picks.empty())
        throw InvalidInput("symbol needs a level-0 path");
    std::uint64_t offset = 0;
    for (VertexIndex v = 0; v < path.trail[1]; ++v) offset += d.edge_count_into(0, v);
    return static_cast<std::uint32_t>(offset + path.picks[0]);
}

SymbolWord to_word(const OrderedBratteliDiagram& d, const FinitePath& start,
                   std::uint64_t window) {
    if (window == 0) throw InvalidInput("window must be positive");
    if (BigCount(static_cast<unsigned long>(window)) > steps_to_max(d, start) + 1)
        throw WindowExceedsHorizon("word window exceeds the unambiguous orbit");
    SymbolWord w;
    w.alphabet_size = level0_alphabet_size(d);
    w.symbols.reserve(window);
    OrbitCursor cur(d, start);
    w.symbols.push_back(level0_symbol(d, cur.current()));
    for (std::uint64_t i = 1; i < window; ++i) {
        cur.advance();
        w.symbols.push_back(level0_symbol(d, cur.current()));
    }
    return w;
}

std::uint64_t factor_complexity(const SymbolWord& word, std::size_t len) {
    if (len > word.symbols.size()) throw InvalidInput("factor longer than word");
    if (len == 0) return 1;
    std::unordered_set<std::string> seen;
    std::string key;
    for (std::size_t i = 0; i + len <= word.symbols.size(); ++i) {
        key.assign(reinterpret_cast<const char*>(word.symbols.data() + i),
                   len * sizeof(std::uint32_t));
        seen.insert(key);
    }
    return seen.size();
}

std::map<std::uint32_t, Rational> symbol_frequency(const SymbolWord& word) {
    if (word.symbols.empty()) throw InvalidInput("empty word");
    std::map<std::uint32_t, std::uint64_t> counts;
    for (std::uint32_t s : word.symbols) counts[s] += 1;
    std::map<std::uint32_t, Rational> out;
    for (const auto& [s, c] : counts)
        out[s] = make_rational(BigCount(static_cast<unsigned long>(c)),
                               BigCount(static_cast<unsigned long>(word.symbols.size())));
    return out;
}

}  // namespace bvd
