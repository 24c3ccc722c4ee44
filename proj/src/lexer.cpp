#include "scsl/lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace scsl {

std::vector<Token> lex(const std::string& src, const std::string& file, Diagnostics& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  const std::size_t n = src.size();

  auto span_here = [&](int len) {
    SourceSpan sp;
    sp.file = file;
    sp.start_line = line;
    sp.start_col = col;
    sp.end_line = line;
    sp.end_col = col + len;
    return sp;
  };
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count && i < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    // comment: -- to end of line
    if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      while (i < n && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      Token t;
      t.kind = TokKind::Ident;
      t.text = src.substr(i, j - i);
      t.span = span_here(static_cast<int>(j - i));
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      bool is_real = false;
      // a '.' starts a fraction only if followed by a digit ('..' is a range)
      if (j < n && src[j] == '.' && j + 1 < n && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        is_real = true;
        ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < n && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_real = true;
          j = k;
          while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      Token t;
      t.text = src.substr(i, j - i);
      t.span = span_here(static_cast<int>(j - i));
      if (is_real) {
        t.kind = TokKind::Real;
        t.real_val = std::strtod(t.text.c_str(), nullptr);
      } else {
        t.kind = TokKind::Int;
        t.int_val = std::strtoll(t.text.c_str(), nullptr, 10);
      }
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      std::string text;
      bool closed = false;
      while (j < n) {
        if (src[j] == '"') {
          closed = true;
          break;
        }
        if (src[j] == '\n') break;
        text.push_back(src[j]);
        ++j;
      }
      if (!closed) {
        diags.push_back(Diagnostic::error("unterminated string literal", span_here(1)));
        advance(j - i);
        continue;
      }
      Token t;
      t.kind = TokKind::String;
      t.text = std::move(text);
      t.span = span_here(static_cast<int>(j + 1 - i));
      out.push_back(std::move(t));
      advance(j + 1 - i);
      continue;
    }
    // multi-char punctuation, longest match first
    static const char* puncts[] = {
        "<=>", "..", "&&", "||", "=>", "!=", "<=", ">=", ":=",
        "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "|", "!",
        "=", "<", ">", "+", "-", "*", "/", "%", "#", "\\",
    };
    bool matched = false;
    for (const char* p : puncts) {
      std::size_t len = std::char_traits<char>::length(p);
      if (src.compare(i, len, p) == 0) {
        Token t;
        t.kind = TokKind::Punct;
        t.text = p;
        t.span = span_here(static_cast<int>(len));
        out.push_back(std::move(t));
        advance(len);
        matched = true;
        break;
      }
    }
    if (!matched) {
      diags.push_back(Diagnostic::error(std::string("unrecognized character '") + c + "'",
                                        span_here(1)));
      advance(1);
    }
  }

  Token end;
  end.kind = TokKind::End;
  end.span = span_here(0);
  out.push_back(std::move(end));
  return out;
}

} // namespace scsl
