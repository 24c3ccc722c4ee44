#include "doctest.h"
#include "scsl/agents.hpp"
#include "scsl/parser.hpp"
#include "scsl/transport.hpp"

using namespace scsl;

TEST_CASE("wire messages round-trip and reject junk") {
  WireMessage m;
  m.sender = "world";
  m.tick = 17;
  m.seq = 42;
  m.state = nlohmann::ordered_json{{"sym:r[0].s", "approaching"}, {"tick", 17}};
  auto parsed = WireMessage::parse(m.serialize());
  REQUIRE(parsed.has_value());
  CHECK(parsed->sender == "world");
  CHECK(parsed->tick == 17);
  CHECK(parsed->seq == 42);
  CHECK(parsed->state["tick"] == 17);

  CHECK(!WireMessage::parse("not json").has_value());
  CHECK(!WireMessage::parse("{}").has_value());  // sender missing
}

TEST_CASE("in-process hub delivers to every other endpoint") {
  InProcHub hub;
  auto a = hub.endpoint("a");
  auto b = hub.endpoint("b");
  auto c = hub.endpoint("c");
  WireMessage m;
  m.sender = "a";
  m.seq = 1;
  m.state = nlohmann::ordered_json{{"x", 1}};
  a->send(m);
  CHECK(!a->poll().has_value());  // no self-delivery
  auto rb = b->poll();
  auto rc = c->poll();
  REQUIRE(rb.has_value());
  REQUIRE(rc.has_value());
  CHECK(rb->sender == "a");
  CHECK(!b->poll().has_value());
}

TEST_CASE("instance split separates observers from simulations") {
  const char* text = R"(
object type A( in x : int, out y : int ) cycletime 1 end type
elementary scenario Obs( a : A )
  precondition true;
  spec G ( a.y >= 0 );
  initact frame := {}; aux_n := 0;
  cndact [ true ] / aux_n := aux_n + 1;
end scenario
elementary scenario Sim( a : A )
  precondition true;
  spec G true;
  initact frame := { a.x };
  cndact [ true ] / a.x := 1;
end scenario
elementary scenario Obs2( a : A )
  precondition true;
  spec F ( a.y > 2 );
  initact frame := {};
end scenario
elementary scenario EmergentPropertyChecker( a : A )
  spec F ( a.y > 0 );
  initact frame := {};
end scenario
systemtest
  coll : collaboration
    a : A;
  end collaboration
  schedule
    ( Obs(coll.a) ; Obs2(coll.a) ) || Sim(coll.a) || EmergentPropertyChecker(coll.a)
  end schedule
end systemtest
)";
  ParseResult pr = parse(text);
  REQUIRE(pr.ok());
  REQUIRE(pr.spec->find_scenario("Sim"));
  CHECK(scenario_is_simulation(*pr.spec->find_scenario("Sim")));
  CHECK(!scenario_is_simulation(*pr.spec->find_scenario("Obs")));
  CHECK(!scenario_is_simulation(*pr.spec->find_scenario("EmergentPropertyChecker")));

  std::map<std::string, Value> consts;
  Diagnostics d;
  auto instances = instantiate_schedule(*pr.spec, consts, d);
  REQUIRE(d.empty());
  AgentSplit split = split_instances(*pr.spec, instances);
  REQUIRE(split.oracle_chains.size() == 1);
  CHECK(split.oracle_chains[0] == std::vector<std::string>{"Obs", "Obs2"});
  CHECK(split.world_instances == std::vector<std::string>{"Sim"});
  CHECK(split.epm_instances == std::vector<std::string>{"EmergentPropertyChecker"});
}

TEST_CASE("a mutating scenario counts as a simulation") {
  const char* text = R"(
object type A( in x : int, out y : int ) cycletime 1 end type
elementary scenario Mishap( a : A, coll : collaboration )
  spec G ( (a.y > 5) => X !active );
  cndact chg( a.y > 5 ) / coll.delete(a);
end scenario
)";
  ParseResult pr = parse(text);
  REQUIRE(pr.ok());
  CHECK(scenario_is_simulation(*pr.spec->find_scenario("Mishap")));
}
