#include <functional>

#include "doctest.h"
#include "scsl/ltl_eval.hpp"
#include "scsl/monitor.hpp"

using namespace scsl;

namespace {

// trace over two boolean atoms "p" and "q"; each position is a 2-bit mask
struct BitTrace : LtlTraceView {
  std::vector<unsigned> masks;
  std::size_t length() const override { return masks.size(); }
  bool atom_holds(const ExprPtr& atom, std::size_t pos) const override {
    unsigned m = masks[pos - 1];
    if (atom->kind == ExprKind::Ident && atom->str_val == "p") return m & 1u;
    if (atom->kind == ExprKind::Ident && atom->str_val == "q") return m & 2u;
    return false;
  }
};

LtlPtr P() { return LtlFormula::make_atom(Expr::ident("p")); }
LtlPtr Q() { return LtlFormula::make_atom(Expr::ident("q")); }

Verdict run_monitor(const LtlPtr& f, const BitTrace& t, int c) {
  Monitor m(f, c);
  for (unsigned mask : t.masks) {
    std::vector<bool> atoms;
    for (const auto& a : m.atoms()) {
      if (a->kind == ExprKind::Ident && a->str_val == "p")
        atoms.push_back(mask & 1u);
      else if (a->kind == ExprKind::Ident && a->str_val == "q")
        atoms.push_back(mask & 2u);
      else
        atoms.push_back(false);
    }
    m.step(atoms);
  }
  return m.finalize();
}

} // namespace

TEST_CASE("globally holds when the atom holds everywhere") {
  BitTrace t;
  t.masks = {1, 1, 1, 1};
  CHECK(eval_finite(LtlFormula::globally(P()), t, 1));
  t.masks = {1, 1, 0, 1};
  CHECK(!eval_finite(LtlFormula::globally(P()), t, 1));
}

TEST_CASE("finally fails on a trace where the atom never holds") {
  BitTrace t;
  t.masks = {0, 0, 0, 0, 0};
  CHECK(!eval_finite(LtlFormula::finally_(P()), t, 1));
  t.masks = {0, 0, 1, 0, 0};
  CHECK(eval_finite(LtlFormula::finally_(P()), t, 1));
}

TEST_CASE("widened next admits satisfaction across the cycle window") {
  // c=2: window {i+1, ..., i+3}; p first true at position 4 from position 1
  BitTrace t;
  t.masks = {0, 0, 0, 1, 0};
  CHECK(eval_finite(LtlFormula::next(P()), t, 1, 2));
  // c=1: window is exactly {2}
  CHECK(!eval_finite(LtlFormula::next(P()), t, 1, 1));
  // brute-force window enumeration oracle
  for (int c = 1; c <= 3; ++c) {
    for (std::size_t first_true = 1; first_true <= 5; ++first_true) {
      BitTrace tr;
      tr.masks.assign(5, 0);
      tr.masks[first_true - 1] = 1;
      bool expected = false;
      std::size_t hi = std::min<std::size_t>(5, 1 + 2 * static_cast<std::size_t>(c) - 1);
      for (std::size_t l = 2; l <= hi; ++l)
        if (l == first_true) expected = true;
      CHECK(eval_finite(LtlFormula::next(P()), tr, 1, c) == expected);
    }
  }
}

TEST_CASE("next at the last position is false") {
  BitTrace t;
  t.masks = {1};
  CHECK(!eval_finite(LtlFormula::next(P()), t, 1, 1));
  CHECK(!eval_finite(LtlFormula::next(P()), t, 1, 3));
}

TEST_CASE("until needs the prefix to hold up to the discharge") {
  // (t_hat < 10) U (count >= 2) over an abstract trace: p = clock-ok, q = discharged
  BitTrace reaches_in_time;   // q at a position where p held throughout before
  reaches_in_time.masks = {1, 1, 1, 1, 1, 1, 1, 1, 3};  // q true at t=8 (pos 9)
  CHECK(eval_finite(LtlFormula::until(P(), Q()), reaches_in_time, 1));
  CHECK(run_monitor(LtlFormula::until(P(), Q()), reaches_in_time, 1).pass());

  BitTrace too_late;  // p drops at position 11 (t=10), q only at position 13
  too_late.masks = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 2};
  CHECK(!eval_finite(LtlFormula::until(P(), Q()), too_late, 1));
  Verdict v = run_monitor(LtlFormula::until(P(), Q()), too_late, 1);
  CHECK(v.fail());
  CHECK(v.reason == "Temporal Violation");
}

TEST_CASE("monitor progression matches the spec examples") {
  SUBCASE("safety violation fails immediately") {
    Monitor m(LtlFormula::globally(P()), 1);
    Verdict v = m.step({false});
    CHECK(v.fail());
    // monotone: every later verdict stays FAIL
    v = m.step({true});
    CHECK(v.fail());
    CHECK(m.finalize().fail());
  }
  SUBCASE("discharged eventuality passes") {
    Monitor m(LtlFormula::finally_(P()), 1);
    Verdict v = m.step({true});
    CHECK(v.pass());
    CHECK(m.finalize().pass());
  }
  SUBCASE("undischarged eventuality fails at finalize") {
    Monitor m(LtlFormula::finally_(P()), 1);
    m.step({false});
    m.step({false});
    CHECK(m.current().kind == VerdictKind::Inconclusive);
    Verdict v = m.finalize();
    CHECK(v.fail());
  }
  SUBCASE("globally never violated passes at finalize") {
    Monitor m(LtlFormula::globally(P()), 1);
    for (int i = 0; i < 5; ++i) m.step({true});
    CHECK(m.finalize().pass());
  }
  SUBCASE("empty obligation set is a pass") {
    Monitor m(LtlFormula::make_atom(Expr::make_bool(true)), 1);
    m.step({});
    CHECK(m.current().pass());
    CHECK(m.finalize().pass());
  }
}

namespace {

// exhaustive formula enumeration over {atom, not, and, or, X, U, F, G}
// to a given depth, over atoms p and q
void enumerate_formulas(int depth, std::vector<LtlPtr>& out) {
  if (depth == 0) {
    out.push_back(P());
    out.push_back(Q());
    return;
  }
  std::vector<LtlPtr> smaller;
  enumerate_formulas(depth - 1, smaller);
  out = smaller;
  std::size_t base = smaller.size();
  for (std::size_t i = 0; i < base; ++i) {
    out.push_back(LtlFormula::make_not(smaller[i]));
    out.push_back(LtlFormula::next(smaller[i]));
    out.push_back(LtlFormula::finally_(smaller[i]));
    out.push_back(LtlFormula::globally(smaller[i]));
  }
  for (std::size_t i = 0; i < base; ++i)
    for (std::size_t j = 0; j < base; ++j) {
      out.push_back(LtlFormula::make_and(smaller[i], smaller[j]));
      out.push_back(LtlFormula::make_or(smaller[i], smaller[j]));
      out.push_back(LtlFormula::until(smaller[i], smaller[j]));
    }
}

} // namespace

TEST_CASE("progression finalize agrees with eval_finite exhaustively at small scale") {
  std::vector<LtlPtr> formulas;
  enumerate_formulas(2, formulas);  // depth <= 2 over the full op set here
  int checked = 0;
  for (int c = 1; c <= 3; ++c) {
    for (const auto& f : formulas) {
      for (std::size_t len = 1; len <= 4; ++len) {
        for (unsigned code = 0; code < (1u << (2 * len)); ++code) {
          BitTrace t;
          for (std::size_t i = 0; i < len; ++i) t.masks.push_back((code >> (2 * i)) & 3u);
          bool ref = eval_finite(f, t, 1, c);
          Verdict v = run_monitor(f, t, c);
          if (v.pass() != ref) {
            CAPTURE(ltl_str(f));
            CAPTURE(len);
            CAPTURE(code);
            CAPTURE(c);
          }
          REQUIRE(v.pass() == ref);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 100000);
}

TEST_CASE("intermediate finalize agrees with eval_finite on every prefix") {
  std::vector<LtlPtr> formulas;
  enumerate_formulas(1, formulas);
  for (const auto& f : formulas) {
    for (unsigned code = 0; code < 256; ++code) {
      BitTrace full;
      for (std::size_t i = 0; i < 4; ++i) full.masks.push_back((code >> (2 * i)) & 3u);
      Monitor m(f, 1);
      for (std::size_t prefix = 1; prefix <= 4; ++prefix) {
        std::vector<bool> atoms;
        for (const auto& a : m.atoms()) {
          unsigned mask = full.masks[prefix - 1];
          if (a->kind == ExprKind::Ident && a->str_val == "p")
            atoms.push_back(mask & 1u);
          else
            atoms.push_back(mask & 2u);
        }
        m.step(atoms);
        BitTrace cut;
        cut.masks.assign(full.masks.begin(), full.masks.begin() + static_cast<long>(prefix));
        REQUIRE(m.finalize().pass() == eval_finite(f, cut, 1, 1));
      }
    }
  }
}

TEST_CASE("derived operator identities hold extensionally") {
  std::vector<LtlPtr> formulas;
  enumerate_formulas(1, formulas);
  for (const auto& f : formulas) {
    for (std::size_t len = 1; len <= 5; ++len) {
      for (unsigned code = 0; code < (1u << (2 * len)); ++code) {
        BitTrace t;
        for (std::size_t i = 0; i < len; ++i) t.masks.push_back((code >> (2 * i)) & 3u);
        // F phi  ==  true U phi
        LtlPtr truef = LtlFormula::make_atom(Expr::make_bool(true));
        CHECK(eval_finite(LtlFormula::finally_(f), t, 1) ==
              eval_finite(LtlFormula::until(truef, f), t, 1));
        // G phi  ==  !F!phi
        CHECK(eval_finite(LtlFormula::globally(f), t, 1) ==
              eval_finite(LtlFormula::make_not(
                              LtlFormula::finally_(LtlFormula::make_not(f))),
                          t, 1));
      }
    }
  }
}
