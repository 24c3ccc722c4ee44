#include "scsl/rover_world.hpp"

#include <cmath>
#include <cstdio>

#include "scsl/geometry.hpp"

namespace scsl {

namespace {

std::pair<double, double> location_xy(const Value& v) {
  if (v.kind() == ValueKind::Record && v.fields().size() >= 2)
    return {v.fields()[0].second.as_real(), v.fields()[1].second.as_real()};
  return {0, 0};
}

std::string fmt_coord(double v) {
  if (v == std::floor(v)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string display_status(const std::string& s) {
  if (s == "fault") return "DEAD";
  std::string out = s;
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

} // namespace

void RoverWorld::init(World& w) {
  const auto& consts = w.consts();
  auto start = consts.find("startPos");
  std::size_t n = 0;
  if (auto it = consts.find("n"); it != consts.end()) n = static_cast<std::size_t>(it->second.as_int());
  rovers_.assign(n, {});
  if (start != consts.end() && start->second.kind() == ValueKind::Array) {
    const auto& es = start->second.elements();
    for (std::size_t i = 0; i < rovers_.size() && i < es.size(); ++i) {
      auto [x, y] = location_xy(es[i]);
      rovers_[i].tx = x;
      rovers_[i].ty = y;
    }
  }
  if (auto it = consts.find("epsilon"); it != consts.end()) epsilon_ = it->second.as_real();
  auto item_pos = consts.find("itemPos");
  auto ids = consts.find("allIds");
  if (item_pos != consts.end() && item_pos->second.kind() == ValueKind::Array) {
    const auto& es = item_pos->second.elements();
    for (std::size_t j = 0; j < es.size(); ++j) {
      ItemState item;
      auto [x, y] = location_xy(es[j]);
      item.x = x;
      item.y = y;
      item.id = "item" + std::to_string(j + 1);
      if (ids != consts.end() && j < ids->second.elements().size())
        item.id = ids->second.elements()[j].token_value();
      item.placed = opts_.auto_place_items;
      items_.push_back(std::move(item));
    }
  }
  auto zones = consts.find("exclusionZone");
  if (zones != consts.end() && zones->second.kind() == ValueKind::Array) {
    for (const auto& z : zones->second.elements()) {
      if (z.kind() != ValueKind::Record || z.fields().empty()) continue;
      Zone zone;
      for (const auto& v : z.fields()[0].second.elements()) zone.vertices.push_back(location_xy(v));
      zones_.push_back(std::move(zone));
    }
  }
  has_test_control_ = w.find_object("tc") != nullptr;
  started_ = !has_test_control_;  // without a start gate the mission runs immediately

  // initial GPS positions are part of sigma_0
  for (std::size_t i = 0; i < rovers_.size(); ++i) {
    std::string name = "r[" + std::to_string(i) + "]";
    w.seed_symbol(name + ".pos", make_location(rovers_[i].tx, rovers_[i].ty));
  }
}

void RoverWorld::apply_stimulus(World& w, const std::map<std::string, Value>& stim) {
  for (const auto& [key, value] : stim) {
    if (key == "simulation_start") {
      started_ = true;
      if (has_test_control_) w.stage_engine_feed("tc.start", Value::boolean(true));
      w.log_line(clock_stamp(w) + " [INFO] simulation_start");
      continue;
    }
    if (key.rfind("set_item", 0) == 0) {
      std::string rest = key.substr(8);
      auto underscore = rest.find('_');
      std::size_t idx = static_cast<std::size_t>(std::atoll(
          (underscore == std::string::npos ? rest : rest.substr(0, underscore)).c_str()));
      if (idx == 0) continue;
      while (items_.size() < idx) {
        ItemState item;
        item.id = "item" + std::to_string(items_.size() + 1);
        items_.push_back(item);
      }
      ItemState& item = items_[idx - 1];
      if (underscore == std::string::npos) {
        item.placed = value.kind() == ValueKind::Bool ? value.as_bool() : true;
      } else if (rest.substr(underscore + 1) == "x") {
        item.x = value.as_real();
      } else if (rest.substr(underscore + 1) == "y") {
        item.y = value.as_real();
      }
      continue;
    }
    if (key.rfind("set_zone", 0) == 0) {
      // zones are normally fixed constants; stimulus-added zones extend them
      std::string rest = key.substr(8);
      auto underscore = rest.find('_');
      std::size_t idx = static_cast<std::size_t>(std::atoll(
          (underscore == std::string::npos ? rest : rest.substr(0, underscore)).c_str()));
      if (idx == 0) continue;
      while (zones_.size() < idx) zones_.push_back({});
      if (underscore != std::string::npos) {
        // set_zoneZ_vK_x / _y
        std::string v = rest.substr(underscore + 1);
        if (v.size() > 1 && v[0] == 'v') {
          auto second = v.find('_');
          if (second != std::string::npos) {
            std::size_t vi = static_cast<std::size_t>(std::atoll(v.substr(1, second - 1).c_str()));
            Zone& zone = zones_[idx - 1];
            while (zone.vertices.size() < vi) zone.vertices.push_back({0, 0});
            if (v.substr(second + 1) == "x")
              zone.vertices[vi - 1].first = value.as_real();
            else
              zone.vertices[vi - 1].second = value.as_real();
          }
        }
      }
      continue;
    }
  }
}

bool RoverWorld::in_zone(double x, double y) const {
  for (const auto& z : zones_)
    if (z.vertices.size() >= 3 && point_in_polygon({x, y}, z.vertices)) return true;
  return false;
}

// one unit grid step toward the goal, planned from the (possibly stale)
// reported position; avoids cells the rover believes are in a zone
std::optional<std::pair<double, double>> RoverWorld::plan_step(double sx, double sy, double gx,
                                                               double gy) const {
  double dx = gx - sx, dy = gy - sy;
  if (dx == 0 && dy == 0) return std::nullopt;
  auto sign = [](double v) { return v > 0 ? 1.0 : v < 0 ? -1.0 : 0.0; };
  std::vector<std::pair<double, double>> tries;
  std::pair<double, double> primary =
      std::abs(dy) >= std::abs(dx) && dy != 0 ? std::make_pair(0.0, sign(dy))
                                              : std::make_pair(sign(dx), 0.0);
  std::pair<double, double> secondary =
      primary.second != 0 ? std::make_pair(sign(dx), 0.0) : std::make_pair(0.0, sign(dy));
  tries.push_back(primary);
  if (secondary.first != 0 || secondary.second != 0) tries.push_back(secondary);
  // perpendicular side-steps when both goal-directed moves are blocked
  if (primary.second != 0) {
    tries.push_back({-1.0, 0.0});
    tries.push_back({1.0, 0.0});
  } else {
    tries.push_back({0.0, -1.0});
    tries.push_back({0.0, 1.0});
  }
  for (const auto& t : tries) {
    if (!in_zone(sx + t.first, sy + t.second)) return t;
  }
  return std::nullopt;  // boxed in: stay put
}

void RoverWorld::publish_status(World& w, std::size_t i, const std::string& status) {
  rovers_[i].status = status;
  auto lit = w.spec().find_enum_literal(status);
  if (!lit) return;
  w.stage_object_output("r[" + std::to_string(i) + "]", "s",
                        Value::enum_lit(lit->first, lit->second, status));
}

std::string RoverWorld::clock_stamp(const World& w) const {
  double t = static_cast<double>(w.tick()) * w.config().seconds_per_tick;
  int hours = static_cast<int>(t / 3600);
  int mins = static_cast<int>(t / 60) % 60;
  double secs = t - hours * 3600 - mins * 60;
  char buf[32];
  std::snprintf(buf, sizeof buf, "[%02d:%02d:%06.3f]", hours, mins, secs);
  return buf;
}

void RoverWorld::log_rover(World& w, std::size_t i, double px, double py,
                           const std::string& status) {
  w.log_line(clock_stamp(w) + " [INFO] Rover " + std::to_string(i + 1) + " Pos (" +
             fmt_coord(px) + "," + fmt_coord(py) + ") (State: " + display_status(status) + ")");
}

void RoverWorld::rover_tick(World& w, std::size_t i) {
  std::string name = "r[" + std::to_string(i) + "]";
  ObjectRuntime* obj = w.find_object(name);
  if (!obj || !obj->alive) return;
  RoverState& rv = rovers_[i];

  const Value* pos_v = w.symbol(name + ".pos");
  const Value* cmd_v = w.symbol(name + ".cmd");
  const Value* dst_v = w.symbol(name + ".dst");
  const Value* id_v = w.symbol(name + ".id");
  if (!pos_v || !cmd_v) return;
  auto [px, py] = location_xy(*pos_v);
  std::string cmd = cmd_v->kind() == ValueKind::Enum ? cmd_v->enum_literal() : "idle";

  log_rover(w, i, px, py, rv.status);

  if (rv.destroyed) {
    publish_status(w, i, "fault");
    w.stage_engine_feed(name + ".pos", make_location(rv.tx, rv.ty));
    return;
  }

  // the rover detects a zone around its *reported* position; entering on the
  // true position destroys it
  if (in_zone(px, py) || in_zone(rv.tx, rv.ty)) {
    rv.destroyed = true;
    publish_status(w, i, "fault");
    w.stage_engine_feed(name + ".pos", make_location(rv.tx, rv.ty));
    return;
  }

  double gx = 0, gy = 0;
  bool has_goal = false;
  std::string next_status = rv.status;

  auto goal_from_dst = [&]() {
    if (dst_v) {
      auto [x, y] = location_xy(*dst_v);
      gx = x;
      gy = y;
      has_goal = true;
    }
  };

  if (rv.status == "initial") {
    if (started_ && cmd == "goToDst") next_status = "approaching";
  } else if (rv.status == "approaching") {
    goal_from_dst();
    if (has_goal && euclidean_distance({px, py}, {gx, gy}) <= epsilon_) {
      next_status = "atDst";
      has_goal = false;
    } else if (cmd == "returnToDst") {
      next_status = "returning";
    }
  } else if (rv.status == "atDst") {
    if (cmd == "pickUpItem" && id_v && id_v->kind() == ValueKind::Token &&
        !id_v->token_value().empty()) {
      const std::string& want = id_v->token_value();
      for (std::size_t j = 0; j < items_.size(); ++j) {
        ItemState& item = items_[j];
        if (item.id != want || !item.placed || item.loaded) continue;
        if (euclidean_distance({px, py}, {item.x, item.y}) <= epsilon_) {
          item.loaded = true;
          item.assigned_rover = static_cast<int>(i);
          rv.carried_item = static_cast<int>(j);
          next_status = "itemLoaded";
        } else {
          gx = item.x;
          gy = item.y;
          has_goal = true;
        }
        break;
      }
    } else if (cmd == "returnToDst") {
      next_status = "returning";
    }
  } else if (rv.status == "itemLoaded") {
    if (cmd == "returnToDst") next_status = "returningWithItem";
  } else if (rv.status == "returning" || rv.status == "returningWithItem") {
    goal_from_dst();
    if (has_goal && euclidean_distance({px, py}, {gx, gy}) <= epsilon_) {
      has_goal = false;
      if (rv.status == "returningWithItem") {
        next_status = "returnedWithItem";
        if (rv.carried_item >= 0) {
          ItemState& item = items_[static_cast<std::size_t>(rv.carried_item)];
          item.salvaged = true;
          w.log_line(clock_stamp(w) + " [CommandCentre] Salvaged Item " +
                     std::to_string(rv.carried_item + 1) + " by Rover " + std::to_string(i + 1));
          rv.carried_item = -1;
        }
      } else {
        next_status = "returned";
      }
    }
  } else if (rv.status == "returned" || rv.status == "returnedWithItem") {
    // a reassignment sends the rover back out for another item
    if (cmd == "pickUpItem" && id_v && id_v->kind() == ValueKind::Token &&
        !id_v->token_value().empty()) {
      next_status = "atDst";
    }
  }

  if (has_goal) {
    auto step = plan_step(px, py, gx, gy);
    if (step) {
      rv.tx += step->first;
      rv.ty += step->second;
    }
  }
  // destruction on true-position zone entry: the rover halts where it died
  if (in_zone(rv.tx, rv.ty)) {
    rv.destroyed = true;
    next_status = "fault";
  }
  publish_status(w, i, next_status);
  w.stage_engine_feed(name + ".pos", make_location(rv.tx, rv.ty));
}

void RoverWorld::command_centre_tick(World& w) {
  if (!w.find_object("cc")) return;
  // track assignments visible at the cc outputs
  const Value* ids = w.symbol("cc.id");
  if (ids && ids->kind() == ValueKind::Array) {
    for (std::size_t i = 0; i < ids->elements().size(); ++i) {
      const Value& v = ids->elements()[i];
      if (v.kind() != ValueKind::Token || v.token_value().empty()) continue;
      for (auto& item : items_)
        if (item.id == v.token_value() && item.assigned_rover < 0)
          item.assigned_rover = static_cast<int>(i);
    }
  }
  // reassign orphaned items to a returned rover
  for (std::size_t j = 0; j < items_.size(); ++j) {
    ItemState& item = items_[j];
    if (!item.placed || item.loaded || item.salvaged) continue;
    bool orphaned = false;
    if (item.assigned_rover >= 0) {
      ObjectRuntime* assigned =
          w.find_object("r[" + std::to_string(item.assigned_rover) + "]");
      orphaned = !assigned || !assigned->alive ||
                 rovers_[static_cast<std::size_t>(item.assigned_rover)].destroyed;
    } else {
      // unassigned: orphaned once nobody is still approaching the target area
      bool anyone_coming = false;
      for (std::size_t i = 0; i < rovers_.size(); ++i) {
        ObjectRuntime* obj = w.find_object("r[" + std::to_string(i) + "]");
        if (!obj || !obj->alive || rovers_[i].destroyed) continue;
        const std::string& s = rovers_[i].status;
        if (s == "initial" || s == "approaching" || s == "atDst") anyone_coming = true;
      }
      orphaned = !anyone_coming;
    }
    if (!orphaned) continue;
    // candidate: the lowest-index returned rover
    for (std::size_t i = 0; i < rovers_.size(); ++i) {
      ObjectRuntime* obj = w.find_object("r[" + std::to_string(i) + "]");
      if (!obj || !obj->alive || rovers_[i].destroyed) continue;
      if (rovers_[i].status != "returned" && rovers_[i].status != "returnedWithItem") continue;
      auto pickup = w.spec().find_enum_literal("pickUpItem");
      if (!pickup) break;
      std::string idx = std::to_string(i);
      w.stage_object_output("cc", "cmd[" + idx + "]",
                            Value::enum_lit(pickup->first, pickup->second, "pickUpItem"));
      w.stage_object_output("cc", "id[" + idx + "]", Value::token(item.id));
      w.stage_object_output("cc", "dst[" + idx + "]", make_location(item.x, item.y));
      item.assigned_rover = static_cast<int>(i);
      w.log_line(clock_stamp(w) + " [CommandCentre] Reschedule Item " + std::to_string(j + 1) +
                 " (" + fmt_coord(item.x) + ", " + fmt_coord(item.y) + ") to Rover " +
                 std::to_string(i + 1));
      WorldEvent ev;
      ev.tick = w.tick() + 1;
      ev.kind = WorldEvent::Kind::Log;
      ev.instance = "CommandCentre";
      ev.symbol = "reassign";
      ev.text = "Reschedule Item " + std::to_string(j + 1) + " to Rover " + std::to_string(i + 1);
      w.post_event(std::move(ev));
      break;
    }
  }
}

void RoverWorld::tick(World& w) {
  for (std::size_t i = 0; i < rovers_.size(); ++i) rover_tick(w, i);
  command_centre_tick(w);
}

int RoverWorld::items_salvaged() const {
  int n = 0;
  for (const auto& item : items_)
    if (item.salvaged) ++n;
  return n;
}

int RoverWorld::rovers_operative() const {
  int n = 0;
  for (const auto& r : rovers_)
    if (!r.destroyed) ++n;
  return n;
}

} // namespace scsl
