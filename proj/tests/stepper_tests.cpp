#include <functional>

#include "doctest.h"
#include "scsl/parser.hpp"
#include "scsl/trace_laws.hpp"
#include "scsl/typecheck.hpp"
#include "scsl/world.hpp"

using namespace scsl;

namespace {

// a small SUT: one producer object ticking a counter output, one echo object
const char* kPipelineSpec = R"(
global const
  limit : nat := 6;
end const

object type Producer( in enable : bool, out v : int )
  cycletime 1
end type

object type Echo( in v : int, out w : int )
  cycletime 1
end type

elementary scenario Watch( p : Producer, e : Echo )
  precondition true;
  spec G ( e.w >= 0 );
  spec G ( (p.v >= limit) => X !active );
  initact frame := {};
end scenario

elementary scenario Kicker( p : Producer )
  precondition true;
  spec G true;
  initact frame := { p.enable };
  cndact [ true ] / p.enable := true;
end scenario

systemtest
  coll : collaboration
    p : Producer;
    e : Echo;
    interface Iv from p.v to e.v;
  end collaboration
  schedule
    Watch(coll.p, coll.e) || Kicker(coll.p)
  end schedule
end systemtest
)";

class CounterSut : public SutModel {
 public:
  void tick(World& w) override {
    const Value* enable = w.symbol("p.enable");
    const Value* v = w.symbol("p.v");
    if (enable && enable->kind() == ValueKind::Bool && enable->as_bool() && v) {
      w.stage_object_output("p", "v", Value::integer(v->as_int() + 1));
    }
    const Value* ev = w.symbol("e.v");
    if (ev) w.stage_object_output("e", "w", Value::integer(ev->as_int() * 10));
  }
};

World make_world(const Specification& spec, const std::map<std::string, Value>& consts,
                 std::unique_ptr<SutModel> sut, WorldConfig cfg = {}) {
  return World(spec, consts, cfg, std::move(sut));
}

} // namespace

TEST_CASE("pipeline world: interfaces, cycles, and termination") {
  ParseResult pr = parse(kPipelineSpec);
  if (!pr.ok())
    for (auto& d : pr.diags) MESSAGE(d.str());
  REQUIRE(pr.ok());
  Diagnostics tc = typecheck(*pr.spec);
  for (auto& d : tc) MESSAGE(d.str());
  REQUIRE(tc.empty());

  std::map<std::string, Value> consts;
  bind_constants(*pr.spec, {}, consts);
  WorldConfig cfg;
  cfg.max_ticks = 40;
  World w(*pr.spec, consts, cfg, std::make_unique<CounterSut>());
  Diagnostics sd = w.setup();
  REQUIRE(sd.empty());
  RunResult r = w.run_to_end();

  // Watch terminates via its engine-enforced pattern when p.v hits the limit
  REQUIRE(r.verdicts.count("Watch"));
  REQUIRE(r.verdicts.count("Kicker"));
  CHECK(r.verdicts.at("Watch").pass());
  CHECK(r.verdicts.at("Kicker").pass());
  CHECK(!r.aborted);

  // interface law holds on the produced trace
  TraceLawReport laws = check_trace_laws(*pr.spec, consts, r);
  for (const auto& v : laws.violations) MESSAGE(v);
  CHECK(laws.ok());
  CHECK(laws.interface_pairs_checked > 0);

  // p.v ticked up once enabled, e.v trails p.v by one tick
  bool saw_growth = false;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    const Value* pv = r.trace[i].find("p.v");
    if (pv && pv->as_int() >= 3) saw_growth = true;
  }
  CHECK(saw_growth);
}

TEST_CASE("frame violation aborts the run") {
  const char* text = R"(
object type A( in x : int, out y : int ) cycletime 1 end type
elementary scenario Bad( a : A )
  precondition true;
  spec G true;
  initact frame := {};
  cndact [ true ] / a.x := 1;
end scenario
systemtest
  coll : collaboration
    a : A;
  end collaboration
  schedule
    Bad(coll.a)
  end schedule
end systemtest
)";
  ParseResult pr = parse(text);
  REQUIRE(pr.ok());
  std::map<std::string, Value> consts;
  WorldConfig cfg;
  cfg.max_ticks = 10;
  World w(*pr.spec, consts, cfg, nullptr);
  REQUIRE(w.setup().empty());
  RunResult r = w.run_to_end();
  CHECK(r.aborted);
  CHECK(r.abort_reason.find("FRAME-VIOLATION") != std::string::npos);
}

TEST_CASE("collaboration delete removes the object and its interfaces") {
  const char* text = R"(
object type A( in x : int, out y : int ) cycletime 1 end type
elementary scenario Deleter( a : A, coll : collaboration )
  precondition true;
  spec G ( (t_hat >= 3.0) => X !active );
  initact frame := {}; aux_done := false;
  cndact [ t_hat = 2.0 && !aux_done ] / coll.delete(a); aux_done := true;
end scenario
elementary scenario Idle( b : A )
  precondition true;
  spec G ( (t_hat >= 6.0) => X !active );
  initact frame := {};
end scenario
systemtest
  coll : collaboration
    a : A;
    b : A;
    interface I1 from a.y to b.x;
    interface I2 from b.y to a.x;
  end collaboration
  schedule
    Deleter(coll.a, coll) || Idle(coll.b)
  end schedule
end systemtest
)";
  ParseResult pr = parse(text);
  if (!pr.ok())
    for (auto& d : pr.diags) MESSAGE(d.str());
  REQUIRE(pr.ok());
  std::map<std::string, Value> consts;
  WorldConfig cfg;
  cfg.max_ticks = 20;
  World w(*pr.spec, consts, cfg, nullptr);
  REQUIRE(w.setup().empty());
  RunResult r = w.run_to_end();
  CHECK(!r.aborted);

  // after the deletion tick the object's parameter symbols are gone and the
  // slot reads null
  bool saw_deleted = false;
  for (const auto& sigma : r.trace) {
    const Value* handle = sigma.find("a");
    if (handle && handle->is_null()) {
      saw_deleted = true;
      CHECK(sigma.find("a.x") == nullptr);
      CHECK(sigma.find("a.y") == nullptr);
    }
  }
  CHECK(saw_deleted);
  // both interfaces touching `a` were removed with it
  int removed = 0;
  for (const auto& ev : r.events)
    if (ev.kind == WorldEvent::Kind::Mutation && ev.text.find("delete a") != std::string::npos) {
      CHECK(ev.text.find("+2 interfaces") != std::string::npos);
      ++removed;
    }
  CHECK(removed == 1);

  // a second delete of the same object would be a no-op (idempotence): the
  // engine treats delete-of-null as no mutation
}

TEST_CASE("sequential composition gates the successor") {
  const char* text = R"(
object type A( in x : int, out y : int ) cycletime 1 end type
elementary scenario First( a : A )
  precondition a.y >= 2;
  spec G ( (a.y >= 4) => X !active );
  initact frame := {};
end scenario
elementary scenario Second( a : A )
  precondition a.y >= 5;
  spec G ( (a.y >= 8) => X !active );
  initact frame := {};
end scenario
systemtest
  coll : collaboration
    a : A;
  end collaboration
  schedule
    ( First(coll.a) ; Second(coll.a) )
  end schedule
end systemtest
)";
  struct Counter : SutModel {
    void tick(World& w) override {
      const Value* v = w.symbol("a.y");
      if (v) w.stage_object_output("a", "y", Value::integer(v->as_int() + 1));
    }
  };
  ParseResult pr = parse(text);
  REQUIRE(pr.ok());
  std::map<std::string, Value> consts;
  WorldConfig cfg;
  cfg.max_ticks = 30;
  World w(*pr.spec, consts, cfg, std::make_unique<Counter>());
  REQUIRE(w.setup().empty());

  std::int64_t first_active = -1, first_done = -1, second_active = -1;
  while (w.step()) {
    for (const auto& inst : w.instances()) {
      if (inst.spec.name == "First" && inst.lifecycle == Lifecycle::Active &&
          first_active < 0)
        first_active = w.tick();
      if (inst.spec.name == "First" && inst.lifecycle == Lifecycle::Terminated &&
          first_done < 0)
        first_done = w.tick();
      if (inst.spec.name == "Second" && inst.lifecycle == Lifecycle::Active &&
          second_active < 0)
        second_active = w.tick();
    }
  }
  RunResult r = w.take_result();
  CHECK(!r.aborted);
  REQUIRE(first_active >= 0);
  REQUIRE(first_done >= 0);
  REQUIRE(second_active >= 0);
  CHECK(first_active < first_done);
  CHECK(first_done < second_active);
  CHECK(r.verdicts.at("First").pass());
  CHECK(r.verdicts.at("Second").pass());
}

TEST_CASE("a never-activating predecessor keeps the successor passive") {
  const char* text = R"(
object type A( in x : int, out y : int ) cycletime 1 end type
elementary scenario Never( a : A )
  precondition a.y < 0;
  spec F ( a.y < 0 );
  initact frame := {};
end scenario
elementary scenario After( a : A )
  precondition true;
  spec G true;
  initact frame := {};
end scenario
elementary scenario Clock( a : A )
  precondition true;
  spec G ( (t_hat >= 5.0) => X EoT );
  initact frame := {};
end scenario
systemtest
  coll : collaboration
    a : A;
  end collaboration
  schedule
    ( Never(coll.a) ; After(coll.a) ) || Clock(coll.a)
  end schedule
end systemtest
)";
  ParseResult pr = parse(text);
  REQUIRE(pr.ok());
  std::map<std::string, Value> consts;
  WorldConfig cfg;
  cfg.max_ticks = 30;
  World w(*pr.spec, consts, cfg, nullptr);
  REQUIRE(w.setup().empty());
  RunResult r = w.run_to_end();
  CHECK(!r.aborted);
  // run ended at EoT with Never still runnable, After never runnable
  bool never_runnable = false;
  for (const auto& inst : w.instances()) (void)inst;
  // verdicts: never-activated instances pass vacuously
  CHECK(r.verdicts.at("Never").pass());
  CHECK(r.verdicts.at("After").pass());
  CHECK(r.verdicts.at("Clock").pass());
  (void)never_runnable;
  // EoT exactly at the end
  TraceLawReport laws = check_trace_laws(*pr.spec, consts, r);
  CHECK(laws.eot_only_at_end);
}

TEST_CASE("output constancy with a slow object") {
  const char* text = R"(
object type Slow( in x : int, out y : int ) cycletime 3 end type
elementary scenario Clock( s : Slow )
  precondition true;
  spec G ( (t_hat >= 12.0) => X EoT );
  initact frame := {};
end scenario
systemtest
  coll : collaboration
    s : Slow;
  end collaboration
  schedule
    Clock(coll.s)
  end schedule
end systemtest
)";
  struct SlowSut : SutModel {
    void tick(World& w) override {
      const Value* v = w.symbol("s.y");
      if (v) w.stage_object_output("s", "y", Value::integer(v->as_int() + 1));
    }
  };
  ParseResult pr = parse(text);
  REQUIRE(pr.ok());
  std::map<std::string, Value> consts;
  WorldConfig cfg;
  cfg.max_ticks = 40;
  World w(*pr.spec, consts, cfg, std::make_unique<SlowSut>());
  REQUIRE(w.setup().empty());
  RunResult r = w.run_to_end();
  CHECK(!r.aborted);
  TraceLawReport laws = check_trace_laws(*pr.spec, consts, r);
  for (const auto& v : laws.violations) MESSAGE(v);
  CHECK(laws.constancy_violations == 0);
  CHECK(laws.constancy_checks > 0);
  // y actually changes across cycle boundaries
  const Value* first = r.trace.front().find("s.y");
  const Value* last = r.trace.back().find("s.y");
  REQUIRE(first);
  REQUIRE(last);
  CHECK(last->as_int() > first->as_int());
}

TEST_CASE("determinism: identical spec and seed give identical traces") {
  ParseResult pr = parse(kPipelineSpec);
  REQUIRE(pr.ok());
  std::map<std::string, Value> consts;
  bind_constants(*pr.spec, {}, consts);
  auto run = [&]() {
    WorldConfig cfg;
    cfg.max_ticks = 40;
    cfg.seed = 7;
    World w(*pr.spec, consts, cfg, std::make_unique<CounterSut>());
    REQUIRE(w.setup().empty());
    return w.run_to_end();
  };
  RunResult a = run();
  RunResult b = run();
  CHECK(trace_to_ndjson(a.trace) == trace_to_ndjson(b.trace));
}
