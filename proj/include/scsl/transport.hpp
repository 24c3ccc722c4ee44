#pragma once

// Blackboard transport: JSON state datagrams on a shared bus. The UDP flavor
// uses multicast on the loopback interface (falling back to unicast fan-out
// when multicast is unavailable); the in-process flavor is a deterministic
// queue hub with the same one-tick delivery pipeline.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scsl/vendor_json.hpp"

namespace scsl {

struct WireMessage {
  std::string sender;
  std::int64_t tick = 0;
  std::uint64_t seq = 0;
  nlohmann::ordered_json state;  // flat symbol -> JSON value

  std::string serialize() const;
  static std::optional<WireMessage> parse(const std::string& datagram);
};

class Bus {
 public:
  virtual ~Bus() = default;
  virtual void send(const WireMessage& msg) = 0;
  virtual std::optional<WireMessage> poll() = 0;
};

// Deterministic in-process hub: every message sent is delivered to every
// other endpoint's queue.
class InProcHub {
 public:
  std::shared_ptr<Bus> endpoint(const std::string& name);

  struct Shared;

 private:
  std::shared_ptr<Shared> shared_ = init();
  static std::shared_ptr<Shared> init();
};

struct UdpBusOptions {
  std::string group = "239.255.77.42";
  int port = 47842;
  // unicast fan-out ports when multicast cannot be joined
  std::vector<int> fanout_ports;
  int own_port = 0;  // fan-out receive port
  int drop_percent = 0;      // induced datagram loss (send side)
  std::uint64_t drop_seed = 0;
  std::size_t max_datagram = 8192;
};

std::shared_ptr<Bus> make_udp_bus(const UdpBusOptions& opts, std::string& error);

} // namespace scsl
