#pragma once

#include <string>
#include <vector>

namespace scsl {

struct SourceSpan {
  std::string file;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  static SourceSpan at(std::string file, int line, int col) {
    return SourceSpan{std::move(file), line, col, line, col};
  }
  std::string str() const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  static Diagnostic error(std::string msg, SourceSpan sp = {}) {
    return Diagnostic{Severity::Error, std::move(msg), std::move(sp)};
  }
  static Diagnostic warning(std::string msg, SourceSpan sp = {}) {
    return Diagnostic{Severity::Warning, std::move(msg), std::move(sp)};
  }
  std::string str() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);

} // namespace scsl
