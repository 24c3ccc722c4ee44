#include <cmath>
#include <random>

#include "doctest.h"
#include "scsl/eval.hpp"
#include "scsl/geometry.hpp"
#include "scsl/parser.hpp"

using namespace scsl;

namespace {

// Independent winding-number oracle for point-in-polygon.
bool winding_number_inside(const Point& p, const std::vector<Point>& poly) {
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (point_on_segment(p, poly[i], poly[(i + 1) % poly.size()])) return true;
  double angle = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    double x1 = a.first - p.first, y1 = a.second - p.second;
    double x2 = b.first - p.first, y2 = b.second - p.second;
    angle += std::atan2(x1 * y2 - y1 * x2, x1 * x2 + y1 * y2);
  }
  return std::abs(angle) > 3.141592653589793;  // ~2pi inside, ~0 outside
}

// Random simple polygon: points on a circle with jittered radii, sorted by angle.
std::vector<Point> random_simple_polygon(std::mt19937& rng) {
  std::uniform_int_distribution<int> nd(3, 9);
  std::uniform_real_distribution<double> rd(0.5, 3.0);
  int n = nd(rng);
  std::vector<double> angles;
  std::uniform_real_distribution<double> ad(0.0, 2 * 3.141592653589793);
  for (int i = 0; i < n; ++i) angles.push_back(ad(rng));
  std::sort(angles.begin(), angles.end());
  std::vector<Point> poly;
  for (double a : angles) {
    double r = rd(rng);
    poly.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return poly;
}

Specification rover_env_spec() {
  const char* text = R"(
enum
  Status : { initial, approaching, stuck, fault, atDst, itemLoaded,
             returning, returningWithItem, returned, returnedWithItem };
end enum
composite
  Location : record( x : real, y : real );
  Zone : record( vertices : list of Location );
end composite
global const n : nat := 3; end const
object type Rover( in cmd : Status, out s : Status ) cycletime 1 end type
global function
  numRovers( r : Rover[n], S : set of Status ) : nat :=
    #{ i : 0..(n-1) | r[i] != null && r[i].s in S };
end function
)";
  ParseResult r = parse(text);
  REQUIRE(r.ok());
  return *r.spec;
}

Value enum_status(const Specification& spec, const std::string& lit) {
  auto found = spec.find_enum_literal(lit);
  REQUIRE(found.has_value());
  return Value::enum_lit(found->first, found->second, lit);
}

} // namespace

TEST_CASE("numRovers counts live rovers in the given states") {
  Specification spec = rover_env_spec();
  Valuation sigma;
  sigma.set("r", Value::array({Value::object("r[0]"), Value::object("r[1]"), Value::null()}));
  sigma.set("r[0].s", enum_status(spec, "approaching"));
  sigma.set("r[1].s", enum_status(spec, "atDst"));

  std::map<std::string, Value> consts{{"n", Value::integer(3)}};
  std::map<std::string, Value> locals;
  EvalContext ctx;
  ctx.sigma = &sigma;
  ctx.consts = &consts;
  ctx.locals = &locals;
  ctx.spec = &spec;

  ParseResult pr = parse("");  // unused; keep the expression ad hoc
  (void)pr;
  ExprPtr call = Expr::call(
      "numRovers", {Expr::ident("r"), Expr::set_lit({Expr::ident("atDst")})});
  Value v = eval_expr(call, ctx);
  CHECK(v.as_int() == 1);

  // purity: identical result on re-evaluation
  Value v2 = eval_expr(call, ctx);
  CHECK(v.compare(v2) == 0);
}

TEST_CASE("ray casting matches the winding-number oracle") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-3.5, 3.5);
  int checked = 0;
  for (int pi = 0; pi < 20; ++pi) {
    std::vector<Point> poly = random_simple_polygon(rng);
    for (int i = 0; i < 1000; ++i) {
      Point p{coord(rng), coord(rng)};
      bool ray = point_in_polygon(p, poly);
      bool wind = winding_number_inside(p, poly);
      if (ray != wind) {
        CAPTURE(p.first);
        CAPTURE(p.second);
      }
      CHECK(ray == wind);
      ++checked;
    }
  }
  CHECK(checked == 20000);
}

TEST_CASE("inExclusionZone on the unit square") {
  Specification spec = rover_env_spec();
  std::map<std::string, Value> consts;
  std::map<std::string, Value> locals;
  EvalContext ctx;
  ctx.consts = &consts;
  ctx.locals = &locals;
  ctx.spec = &spec;

  Value square = Value::record(
      "Zone", {{"vertices", Value::list({make_location(0, 0), make_location(1, 0),
                                         make_location(1, 1), make_location(0, 1)})}});
  locals["zones"] = Value::array({square});
  locals["p_in"] = make_location(0.5, 0.5);
  locals["p_out"] = make_location(2, 2);
  locals["p_edge"] = make_location(0, 0.5);

  auto in_zone = [&](const char* sym) {
    ExprPtr e = Expr::call("inExclusionZone", {Expr::ident(sym), Expr::ident("zones")});
    return eval_expr(e, ctx).as_bool();
  };
  CHECK(in_zone("p_in"));
  CHECK(!in_zone("p_out"));
  // points on an edge count as inside
  CHECK(in_zone("p_edge"));
}

TEST_CASE("isCloseTo is reflexive and symmetric") {
  Specification spec = rover_env_spec();
  std::map<std::string, Value> consts;
  std::map<std::string, Value> locals;
  EvalContext ctx;
  ctx.consts = &consts;
  ctx.locals = &locals;
  ctx.spec = &spec;

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-10, 10);
  for (int i = 0; i < 200; ++i) {
    locals["a"] = make_location(coord(rng), coord(rng));
    locals["b"] = make_location(coord(rng), coord(rng));
    ExprPtr ab = Expr::call("isCloseTo", {Expr::ident("a"), Expr::ident("b")});
    ExprPtr ba = Expr::call("isCloseTo", {Expr::ident("b"), Expr::ident("a")});
    ExprPtr aa = Expr::call("isCloseTo", {Expr::ident("a"), Expr::ident("a")});
    CHECK(eval_expr(ab, ctx).as_bool() == eval_expr(ba, ctx).as_bool());
    CHECK(eval_expr(aa, ctx).as_bool());
  }
  locals["a"] = make_location(5, 5);
  locals["b"] = make_location(5, 5);
  ExprPtr ab = Expr::call("isCloseTo", {Expr::ident("a"), Expr::ident("b")});
  CHECK(eval_expr(ab, ctx).as_bool());
}

TEST_CASE("popfront returns the head and shortens the list") {
  Specification spec = rover_env_spec();
  std::map<std::string, Value> consts;
  std::map<std::string, Value> locals;
  EvalContext ctx;
  ctx.consts = &consts;
  ctx.locals = &locals;
  ctx.spec = &spec;

  locals["l"] = Value::list({Value::token("a"), Value::token("b"), Value::token("c")});
  ExprPtr pf = Expr::call("popfront", {Expr::ident("l")});
  Value head = eval_expr(pf, ctx);
  CHECK(head.token_value() == "a");
  CHECK(locals["l"].elements().size() == 2);
  CHECK(locals["l"].elements()[0].token_value() == "b");

  locals["l"] = Value::list({Value::token("x")});
  head = eval_expr(pf, ctx);
  CHECK(head.token_value() == "x");
  CHECK(locals["l"].elements().empty());

  CHECK_THROWS_AS(eval_expr(pf, ctx), RuntimeError);

  // #allIds = m constraint shape: popping one from a 3-list leaves length 2
  locals["allIds"] =
      Value::list({Value::token("id1"), Value::token("id2"), Value::token("id3")});
  ExprPtr pf2 = Expr::call("popfront", {Expr::ident("allIds")});
  Value first = eval_expr(pf2, ctx);
  CHECK(first.token_value() == "id1");
  CHECK(locals["allIds"].elements().size() == 2);
}

TEST_CASE("set operations") {
  Specification spec = rover_env_spec();
  std::map<std::string, Value> consts{{"n", Value::integer(3)}};
  std::map<std::string, Value> locals;
  Valuation sigma;
  sigma.set("r", Value::array({Value::object("r[0]"), Value::object("r[1]"),
                               Value::object("r[2]")}));
  sigma.set("r[0].s", enum_status(spec, "approaching"));
  sigma.set("r[1].s", enum_status(spec, "atDst"));
  sigma.set("r[2].s", enum_status(spec, "atDst"));
  EvalContext ctx;
  ctx.sigma = &sigma;
  ctx.consts = &consts;
  ctx.locals = &locals;
  ctx.spec = &spec;

  SUBCASE("min of a set") {
    locals["s"] = Value::set({Value::integer(2), Value::integer(5), Value::integer(1)});
    CHECK(eval_expr(Expr::call("min", {Expr::ident("s")}), ctx).as_int() == 1);
    locals["s"] = Value::set({});
    CHECK_THROWS_AS(eval_expr(Expr::call("min", {Expr::ident("s")}), ctx), RuntimeError);
  }
  SUBCASE("set difference") {
    locals["a"] = Value::set({Value::integer(0), Value::integer(1), Value::integer(2)});
    locals["b"] = Value::set({Value::integer(1)});
    Value d = eval_expr(
        Expr::binary(BinOp::SetMinus, Expr::ident("a"), Expr::ident("b")), ctx);
    CHECK(d.elements().size() == 2);
    CHECK(d.elements()[0].as_int() == 0);
    CHECK(d.elements()[1].as_int() == 2);
  }
  SUBCASE("comprehension over rover states") {
    // states [approaching, atDst, atDst] -> {1, 2}
    ExprPtr pred = Expr::binary(
        BinOp::And,
        Expr::binary(BinOp::Ne, Expr::index(Expr::ident("r"), Expr::ident("i")),
                     Expr::make_null()),
        Expr::binary(BinOp::Eq,
                     Expr::field(Expr::index(Expr::ident("r"), Expr::ident("i")), "s"),
                     Expr::ident("atDst")));
    ExprPtr comp = Expr::set_comp("i", Expr::make_int(0), Expr::make_int(2), pred);
    Value s = eval_expr(comp, ctx);
    REQUIRE(s.elements().size() == 2);
    CHECK(s.elements()[0].as_int() == 1);
    CHECK(s.elements()[1].as_int() == 2);
  }
  SUBCASE("comprehension is null safe through the guard conjunct") {
    sigma.set("r", Value::array({Value::object("r[0]"), Value::null(), Value::object("r[2]")}));
    sigma.symbols.erase("r[1].s");
    ExprPtr pred = Expr::binary(
        BinOp::And,
        Expr::binary(BinOp::Ne, Expr::index(Expr::ident("r"), Expr::ident("i")),
                     Expr::make_null()),
        Expr::binary(BinOp::Eq,
                     Expr::field(Expr::index(Expr::ident("r"), Expr::ident("i")), "s"),
                     Expr::ident("atDst")));
    ExprPtr comp = Expr::set_comp("i", Expr::make_int(0), Expr::make_int(2), pred);
    Value s = eval_expr(comp, ctx);
    REQUIRE(s.elements().size() == 1);
    CHECK(s.elements()[0].as_int() == 2);
  }
}

TEST_CASE("field access through a null object is a runtime error") {
  Specification spec = rover_env_spec();
  Valuation sigma;
  sigma.set("r[0]", Value::null());
  std::map<std::string, Value> consts;
  std::map<std::string, Value> locals;
  std::map<std::string, std::string> bindings{{"r", "r[0]"}};
  EvalContext ctx;
  ctx.sigma = &sigma;
  ctx.consts = &consts;
  ctx.locals = &locals;
  ctx.symbol_bindings = &bindings;
  ctx.spec = &spec;

  ExprPtr e = Expr::field(Expr::ident("r"), "s");
  try {
    eval_expr(e, ctx);
    FAIL("expected a runtime error");
  } catch (const RuntimeError& err) {
    CHECK(err.error_kind == RuntimeErrorKind::NullDeref);
  }
}
