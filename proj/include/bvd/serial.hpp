#pragma once

#include <iosfwd>
#include <string>

#include "bvd/coding.hpp"
#include "bvd/extension.hpp"
#include "bvd/spectra.hpp"

#include "json.hpp"

namespace bvd {

using Json = nlohmann::ordered_json;

/// Diagram documents carry {schema, depth, level_sizes, incoming,
/// edge_class?, copy_meta?}. Lists expand to explicit source arrays up to
/// `explicit_limit` positions per vertex; wider lists serialize their run
/// encoding verbatim under "incoming_runs". Round-trips are bit-exact on
/// the arrays either way.
Json diagram_to_json(const OrderedBratteliDiagram& d, std::uint64_t explicit_limit = 65536);
OrderedBratteliDiagram diagram_from_json(const Json& j);

Json triple_to_json(const ExtensionTriple& t, std::uint64_t explicit_limit = 65536);
ExtensionTriple triple_from_json(const Json& j);

void write_json_file(const Json& j, const std::string& path);
Json read_json_file(const std::string& path);

/// Trace CSV: step,S_D,S,in_D with exact "p/q" columns and float columns.
void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out);

/// Plain-text word: one symbol per token, space separated.
void write_word_text(const SymbolWord& word, std::ostream& out);

/// Run-length JSON: {schema, alphabet, runs: [[symbol, count], ...]}.
Json word_to_json(const SymbolWord& word);
SymbolWord word_from_json(const Json& j);

std::string rational_json(const Rational& r);     // "p/q"
Rational rational_from_string(const std::string& s);  // "p/q", integer, or decimal

}  // namespace bvd
