#pragma once

// File formats:
//   series   {"truncation": N, "coeffs": [[re, im], ...]}          coeffs[0] = a_1
//   symbol   {"characteristic": c, "phi": <series>}
//   koenigs  {"d1": [re, im], "tail": [[re, im], ...]}              tail[0] = d_2

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dflow/koenigs.hpp"
#include "dflow/series.hpp"
#include "dflow/symbol.hpp"

namespace dflow::io {

using nlohmann::json;

/// Malformed input. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

json series_to_json(const Series& f);
/// Rejects coeffs length != truncation and non-finite entries.
Series series_from_json(const json& j);

json symbol_to_json(const Symbol& sym);
Symbol symbol_from_json(const json& j);

json koenigs_to_json(const KoenigsFunction& h);
KoenigsFunction koenigs_from_json(const json& j);

/// Parses JSON text, reporting syntax errors with their line number.
json parse_json(const std::string& text);
json read_json_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dflow::io
