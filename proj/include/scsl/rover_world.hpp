#pragma once

// Reference SUT for desk-scale runs: unit-step grid rovers with simple
// obstacle avoidance, GPS feed with true-position tracking, pickup/return
// state machine over the Status enum, and a command-centre stub that
// reassigns orphaned items to returned rovers.

#include <optional>

#include "scsl/world.hpp"

namespace scsl {

struct RoverWorldOptions {
  bool auto_place_items = false;  // place items from constants without a suite
};

class RoverWorld : public SutModel {
 public:
  explicit RoverWorld(RoverWorldOptions opts = {}) : opts_(opts) {}

  void init(World& w) override;
  void apply_stimulus(World& w, const std::map<std::string, Value>& stim) override;
  void tick(World& w) override;

  int items_salvaged() const;
  int rovers_operative() const;

 private:
  struct RoverState {
    double tx = 0, ty = 0;  // true position (the engine tracks it)
    bool destroyed = false;
    std::string status = "initial";
    int carried_item = -1;
  };
  struct ItemState {
    std::string id;
    double x = 0, y = 0;
    bool placed = false;
    bool loaded = false;
    bool salvaged = false;
    int assigned_rover = -1;
  };
  struct Zone {
    std::vector<std::pair<double, double>> vertices;
  };

  RoverWorldOptions opts_;
  std::vector<RoverState> rovers_;
  std::vector<ItemState> items_;
  std::vector<Zone> zones_;
  bool started_ = false;
  bool has_test_control_ = false;
  double epsilon_ = 1.0;

  bool in_zone(double x, double y) const;
  std::optional<std::pair<double, double>> plan_step(double sx, double sy, double gx,
                                                     double gy) const;
  void publish_status(World& w, std::size_t i, const std::string& status);
  void rover_tick(World& w, std::size_t i);
  void command_centre_tick(World& w);
  void log_rover(World& w, std::size_t i, double px, double py, const std::string& status);
  std::string clock_stamp(const World& w) const;
};

} // namespace scsl
