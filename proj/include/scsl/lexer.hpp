#pragma once

#include <string>
#include <vector>

#include "scsl/source.hpp"

namespace scsl {

enum class TokKind {
  Ident,
  Int,
  Real,
  String,
  Punct,   // operators and punctuation, stored verbatim in text
  End,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t int_val = 0;
  double real_val = 0.0;
  SourceSpan span;
};

// Tokenizes SCSL source. Comments run from `--` to end of line. Never throws:
// unrecognized characters are reported as diagnostics and skipped.
std::vector<Token> lex(const std::string& source, const std::string& file, Diagnostics& diags);

} // namespace scsl
