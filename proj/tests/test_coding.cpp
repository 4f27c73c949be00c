#include <cmath>

#include "bvd/coding.hpp"
#include "bvd/vershik.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bvd;

namespace {

// Independent circle-rotation oracle: the Sturmian coding of the golden
// rotation, s(i) = floor((i+2)*rho) - floor((i+1)*rho) with rho = 2 - phi.
std::vector<std::uint32_t> golden_rotation_word(std::uint64_t n) {
    const long double rho = 2.0L - (1.0L + std::sqrt(5.0L)) / 2.0L;
    std::vector<std::uint32_t> w(n);
    for (std::uint64_t i = 0; i < n; ++i)
        w[i] = static_cast<std::uint32_t>(std::floor((i + 2) * rho) - std::floor((i + 1) * rho));
    return w;
}

}  // namespace

TEST_CASE("to_word on the 2-adic odometer") {
    auto d = odometer_diagram({2, 2, 2});
    auto [mn, mx] = extremal_paths(d, {3, 0}, 0);
    auto w = to_word(d, mn, 4);
    CHECK(w.symbols == std::vector<std::uint32_t>{0, 1, 0, 1});
    CHECK(to_word(d, mn, 1).symbols == std::vector<std::uint32_t>{0});
    CHECK_THROWS_AS(to_word(d, mx, 2), WindowExceedsHorizon);
}

TEST_CASE("to_word commutes with the shift") {
    auto d = sturmian_diagram({1, 2, 1, 2});
    auto [mn, mx] = extremal_paths(d, {d.depth(), 0}, 0);
    auto w = to_word(d, mn, 12);
    auto s = successor(d, mn);
    REQUIRE(s.has_value());
    auto w2 = to_word(d, *s, 11);
    CHECK(std::vector<std::uint32_t>(w.symbols.begin() + 1, w.symbols.end()) == w2.symbols);
}

TEST_CASE("word is invariant under telescoping above level 1") {
    auto d = odometer_diagram({3, 2, 2, 2});
    auto t = telescope(d, {0, 1, 4});
    auto wd = to_word(d, extremal_paths(d, {4, 0}, 0).first, 20);
    auto wt = to_word(t, extremal_paths(t, {2, 0}, 0).first, 20);
    CHECK(wd.symbols == wt.symbols);
}

TEST_CASE("factor complexity") {
    SymbolWord constant;
    constant.alphabet_size = 2;
    constant.symbols.assign(30, 1);
    CHECK(factor_complexity(constant, 5) == 1);

    // periodic word with period 3 has complexity <= 3
    SymbolWord periodic;
    periodic.alphabet_size = 3;
    for (int i = 0; i < 30; ++i) periodic.symbols.push_back(i % 3);
    CHECK(factor_complexity(periodic, 7) <= 3);

    SymbolWord fib;
    fib.alphabet_size = 2;
    fib.symbols = golden_rotation_word(200);
    CHECK(factor_complexity(fib, 5) == 6);
}

TEST_CASE("sturmian builder passes the complexity oracle") {
    auto d = sturmian_diagram({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    auto w = to_word(d, extremal_paths(d, {d.depth(), 0}, 0).first, 200);
    for (std::size_t l = 1; l <= 12; ++l) CHECK(factor_complexity(w, l) == l + 1);

    // non-constant coefficients stay Sturmian
    auto d2 = sturmian_diagram({2, 1, 3, 1, 2, 2, 1, 3});
    auto w2 = to_word(d2, extremal_paths(d2, {d2.depth(), 0}, 0).first, 400);
    for (std::size_t l = 1; l <= 12; ++l) CHECK(factor_complexity(w2, l) == l + 1);
}

TEST_CASE("fibonacci word matches the rotation oracle and golden frequency") {
    auto d = sturmian_diagram(std::vector<std::uint64_t>(25, 1));
    REQUIRE(d.path_count({d.depth(), 0}) > 100000);
    auto w = to_word(d, extremal_paths(d, {d.depth(), 0}, 0).first, 100000);

    auto freq = symbol_frequency(w);
    Rational total = 0;
    for (const auto& [s, f] : freq) total += f;
    CHECK(total == 1);

    const double golden = 2.0 - (1.0 + std::sqrt(5.0)) / 2.0;  // 0.3819660...
    CHECK(std::abs(rational_double(freq.at(1)) - golden) < 1e-3);

    // prefix agreement with the rotation coding
    auto oracle = golden_rotation_word(4000);
    std::vector<std::uint32_t> prefix(w.symbols.begin(), w.symbols.begin() + 4000);
    CHECK(prefix == oracle);
}
