#pragma once

#include <optional>
#include <string>

#include "scsl/ast.hpp"
#include "scsl/source.hpp"

namespace scsl {

struct ParseResult {
  std::optional<Specification> spec;  // set iff no error diagnostics
  Diagnostics diags;
  bool ok() const { return spec.has_value(); }
};

// Parses SCSL source text into a Specification, or diagnostics — never both.
ParseResult parse(const std::string& source, const std::string& file = "<input>");

ParseResult parse_file(const std::string& path);

// Prints a Specification in concrete SCSL syntax such that
// parse(render(s)) is structurally equal to s.
std::string render(const Specification& spec);

} // namespace scsl
