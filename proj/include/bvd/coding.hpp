#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bvd/diagram.hpp"
#include "bvd/numeric.hpp"

namespace bvd {

/// Level-0 edge reading of an orbit window. Symbols are flat level-0 edge
/// ids: offset of the level-1 range vertex plus the order index.
struct SymbolWord {
    std::uint32_t alphabet_size = 0;
    std::vector<std::uint32_t> symbols;
    std::string origin;
};

/// Single vertex per level, edge_counts[k] totally ordered edges from level
/// k; the successor map is mixed-radix counting.
OrderedBratteliDiagram odometer_diagram(const std::vector<std::uint64_t>& edge_counts);

/// Two vertices per level above the root, one root edge to each. At level
/// n >= 1, vertex 0 receives coefficients[n-1] edges from vertex 0 followed
/// by a maximal edge from vertex 1; vertex 1 receives a single edge from
/// vertex 0. Validated downstream by the factor-complexity oracle.
OrderedBratteliDiagram sturmian_diagram(const std::vector<std::uint64_t>& coefficients);

/// Flat id of the level-0 edge of a level-0 path.
std::uint32_t level0_symbol(const OrderedBratteliDiagram& d, const FinitePath& path);
std::uint32_t level0_alphabet_size(const OrderedBratteliDiagram& d);

/// Reads `window` symbols along the orbit of `start`.
SymbolWord to_word(const OrderedBratteliDiagram& d, const FinitePath& start,
                   std::uint64_t window);

/// Number of distinct length-len factors of the word.
std::uint64_t factor_complexity(const SymbolWord& word, std::size_t len);

/// Exact per-symbol frequencies; they sum to 1.
std::map<std::uint32_t, Rational> symbol_frequency(const SymbolWord& word);

}  // namespace bvd
