#include <functional>
#include <random>

#include "doctest.h"
#include "scsl/parser.hpp"
#include "scsl/typecheck.hpp"

using namespace scsl;

namespace {

const char* kListing1 = R"(
enum
 RoverCommands : { goToDst, returnToDst, pickUpItem };
 Status : { initial, approaching, stuck, fault, atDst, itemLoaded,
            returning, returningWithItem, returned, returnedWithItem };
end enum
)";

const char* kMiniSpec = R"(
enum
  Status : { idle, busy };
end enum

composite
  Location : record( x : real, y : real );
  Zone : record( vertices : list of Location );
end composite

global const
  n : nat := 3;
  m : nat := 2;
  k : nat := 1;
  constraint
    k <= m <= n;
  end constraint
  t_end : real := 40.0;
  allIds : list of ItemId := ["a", "b"];
  constraint
    #allIds = m;
  end constraint
end const

global function
  isCloseTo( a : Location, b : Location ) : bool := builtin;
  busyCount( w : Worker[n], S : set of Status ) : nat :=
    #{ i : 0..(n-1) | w[i] != null && w[i].s in S };
end function

object type Worker( in cmd : Status, out s : Status )
  cycletime 1
end type

elementary scenario Watch( w : Worker, const target : Location )
  precondition w.s = idle;
  spec G ( (w.s = busy) => X !active );
  spec F ( w.s = busy || t_hat > t_end );
  initact frame := {}; aux_seen := 0;
  cndact [ w.s = busy ] /
    aux_seen := aux_seen + 1;
end scenario

elementary scenario Drive( w : Worker, const i : nat )
  precondition true;
  spec G ( w != null => (w.s = idle => w.cmd = idle) );
  initact frame := { w.cmd };
  cndact [ w != null && w.s = idle ] /
    w.cmd := idle;
end scenario

systemtest
  coll : collaboration
    w : Worker[n];
    interface Is[i] from w[i].s to w[i].cmd for i : 0..(n-1);
  end collaboration

  schedule
    par i : 0..(n-1) . ( Watch(coll.w[i], (0.0, 0.0)) ; Drive(coll.w[i], i) )
    || Drive(coll.w[0], 0)
  end schedule
end systemtest

instance slowWatch of scenario Watch( target := (1.0, 2.0) );
)";

} // namespace

TEST_CASE("listing 1 enums parse with all literals") {
  ParseResult r = parse(kListing1);
  REQUIRE(r.ok());
  const EnumDecl* status = r.spec->find_enum("Status");
  REQUIRE(status != nullptr);
  CHECK(status->literals.size() == 10);
  CHECK(status->literals.front() == "initial");
  CHECK(status->literals.back() == "returnedWithItem");
  const EnumDecl* cmds = r.spec->find_enum("RoverCommands");
  REQUIRE(cmds != nullptr);
  CHECK(cmds->literals.size() == 3);
}

TEST_CASE("empty file parses to an empty specification") {
  ParseResult r = parse("");
  REQUIRE(r.ok());
  CHECK(r.spec->enums.empty());
  CHECK(r.spec->scenarios.empty());
  CHECK(!r.spec->systest.has_value());
}

TEST_CASE("duplicate enum literal is a diagnostic") {
  ParseResult r = parse("enum E : { a, a }; end enum");
  REQUIRE(!r.ok());
  REQUIRE(!r.diags.empty());
  CHECK(r.diags[0].message.find("duplicate enum literal") != std::string::npos);
}

TEST_CASE("mini spec parses, typechecks, and round-trips") {
  ParseResult r = parse(kMiniSpec);
  if (!r.ok())
    for (const auto& d : r.diags) MESSAGE(d.str());
  REQUIRE(r.ok());

  Diagnostics tc = typecheck(*r.spec);
  for (const auto& d : tc) MESSAGE(d.str());
  CHECK(tc.empty());

  std::string rendered = render(*r.spec);
  ParseResult r2 = parse(rendered);
  if (!r2.ok())
    for (const auto& d : r2.diags) MESSAGE(d.str());
  REQUIRE(r2.ok());
  CHECK(spec_equal(*r.spec, *r2.spec));

  // idempotence: render of the reparse is identical text
  CHECK(render(*r2.spec) == rendered);
}

TEST_CASE("render emits the declared constant syntax") {
  ParseResult r = parse("global const n : nat := 3; end const");
  REQUIRE(r.ok());
  std::string text = render(*r.spec);
  CHECK(text.find("n : nat := 3") != std::string::npos);
}

TEST_CASE("violated constant constraint is reported") {
  const char* bad = R"(
global const
  k : nat := 3;
  m : nat := 2;
  n : nat := 5;
  constraint
    k <= m <= n;
  end constraint
end const
)";
  ParseResult r = parse(bad);
  REQUIRE(r.ok());
  Diagnostics tc = typecheck(*r.spec);
  REQUIRE(!tc.empty());
  bool found = false;
  for (const auto& d : tc)
    if (d.message.find("constant constraint violated") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("interface sourced from an in parameter is rejected") {
  const char* bad = R"(
object type A( in x : int, out y : int )
  cycletime 1
end type

systemtest
  coll : collaboration
    a : A;
    b : A;
    interface I from a.x to b.x;
  end collaboration
  schedule
    Nothing()
  end schedule
end systemtest

elementary scenario Nothing( )
  precondition true;
  spec G true;
end scenario
)";
  ParseResult r = parse(bad);
  REQUIRE(r.ok());
  Diagnostics tc = typecheck(*r.spec);
  bool found = false;
  for (const auto& d : tc)
    if (d.message.find("interface source must be an out parameter") != std::string::npos)
      found = true;
  CHECK(found);
}

TEST_CASE("precondition may not reference auxiliaries") {
  const char* bad = R"(
object type A( out y : int ) cycletime 1 end type
elementary scenario S( a : A )
  precondition aux_x = 1;
  spec G true;
  initact aux_x := 1;
end scenario
)";
  ParseResult r = parse(bad);
  REQUIRE(r.ok());
  Diagnostics tc = typecheck(*r.spec);
  bool found = false;
  for (const auto& d : tc)
    if (d.message.find("precondition references auxiliary") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("parser never crashes on arbitrary input") {
  std::mt19937 rng(20240811);
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      " \t\n(){}[];:.,|&=<>!+-*/%#\\\"_";
  for (int round = 0; round < 300; ++round) {
    std::uniform_int_distribution<int> len_dist(0, 200);
    std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
    std::string junk;
    int len = len_dist(rng);
    for (int i = 0; i < len; ++i) junk.push_back(alphabet[ch(rng)]);
    ParseResult r = parse(junk);
    // either a spec or diagnostics, never both, never a crash
    if (r.ok())
      CHECK(!has_errors(r.diags));
    else
      CHECK(has_errors(r.diags));
  }
}

TEST_CASE("quantified temporal specs expand over constant ranges") {
  const char* text = R"(
global const n : nat := 3; end const
object type A( out s : int ) cycletime 1 end type
elementary scenario S( a : A[n] )
  precondition true;
  spec forall i : 0..(n-1) . G ( a[i] != null => a[i].s >= 0 );
end scenario
)";
  ParseResult r = parse(text);
  REQUIRE(r.ok());
  const ScenarioTypeDecl* sc = r.spec->find_scenario("S");
  REQUIRE(sc != nullptr);
  REQUIRE(sc->specs.size() == 1);
  // conjunction of three G formulas
  const LtlPtr& f = sc->specs[0];
  CHECK(f->kind == LtlKind::And);
  int globally_count = 0;
  std::function<void(const LtlPtr&)> walk = [&](const LtlPtr& g) {
    if (!g) return;
    if (g->kind == LtlKind::Globally) ++globally_count;
    walk(g->lhs);
    walk(g->rhs);
  };
  walk(f);
  CHECK(globally_count == 3);
}
