#include "scsl/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <deque>
#include <map>
#include <random>

namespace scsl {

std::string WireMessage::serialize() const {
  nlohmann::ordered_json j;
  j["sender"] = sender;
  j["tick"] = tick;
  j["seq"] = seq;
  j["state"] = state;
  return j.dump();
}

std::optional<WireMessage> WireMessage::parse(const std::string& datagram) {
  try {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(datagram);
    WireMessage m;
    m.sender = j.value("sender", "");
    m.tick = j.value("tick", 0);
    m.seq = j.value("seq", 0ull);
    if (j.contains("state")) m.state = j["state"];
    if (m.sender.empty()) return std::nullopt;
    return m;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // malformed datagrams are dropped
  }
}

// ---------------------------------------------------------------------------
// In-process hub

struct InProcHub::Shared {
  std::mutex mu;
  std::map<std::string, std::deque<WireMessage>> inboxes;
};

std::shared_ptr<InProcHub::Shared> InProcHub::init() { return std::make_shared<Shared>(); }

namespace {

class InProcBusImpl : public Bus {
 public:
  InProcBusImpl(std::shared_ptr<InProcHub::Shared> shared, std::string name)
      : shared_(std::move(shared)), name_(std::move(name)) {
    std::lock_guard<std::mutex> lock(shared_->mu);
    shared_->inboxes.emplace(name_, std::deque<WireMessage>{});
  }

  void send(const WireMessage& msg) override {
    std::lock_guard<std::mutex> lock(shared_->mu);
    for (auto& [name, box] : shared_->inboxes) {
      if (name == name_) continue;
      box.push_back(msg);
    }
  }

  std::optional<WireMessage> poll() override {
    std::lock_guard<std::mutex> lock(shared_->mu);
    auto& box = shared_->inboxes[name_];
    if (box.empty()) return std::nullopt;
    WireMessage m = std::move(box.front());
    box.pop_front();
    return m;
  }

 private:
  std::shared_ptr<InProcHub::Shared> shared_;
  std::string name_;
};

} // namespace

std::shared_ptr<Bus> InProcHub::endpoint(const std::string& name) {
  return std::make_shared<InProcBusImpl>(shared_, name);
}

// ---------------------------------------------------------------------------
// UDP

namespace {

class UdpBusImpl : public Bus {
 public:
  UdpBusImpl(const UdpBusOptions& opts, std::string& error) : opts_(opts) {
    rx_ = socket(AF_INET, SOCK_DGRAM, 0);
    tx_ = socket(AF_INET, SOCK_DGRAM, 0);
    if (rx_ < 0 || tx_ < 0) {
      error = "cannot create UDP sockets";
      return;
    }
    int one = 1;
    setsockopt(rx_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
#ifdef SO_REUSEPORT
    setsockopt(rx_, SOL_SOCKET, SO_REUSEPORT, &one, sizeof one);
#endif
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(
        opts_.own_port > 0 ? opts_.own_port : opts_.port));
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    if (bind(rx_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      error = "cannot bind UDP receive socket";
      return;
    }
    if (opts_.fanout_ports.empty()) {
      ip_mreq mreq{};
      mreq.imr_multiaddr.s_addr = inet_addr(opts_.group.c_str());
      mreq.imr_interface.s_addr = htonl(INADDR_LOOPBACK);
      if (setsockopt(rx_, IPPROTO_IP, IP_ADD_MEMBERSHIP, &mreq, sizeof mreq) != 0) {
        error = "multicast join failed";
        return;
      }
      in_addr ifaddr{};
      ifaddr.s_addr = htonl(INADDR_LOOPBACK);
      setsockopt(tx_, IPPROTO_IP, IP_MULTICAST_IF, &ifaddr, sizeof ifaddr);
      int loop = 1;
      setsockopt(tx_, IPPROTO_IP, IP_MULTICAST_LOOP, &loop, sizeof loop);
    }
    int flags = fcntl(rx_, F_GETFL, 0);
    fcntl(rx_, F_SETFL, flags | O_NONBLOCK);
    int bufsz = 1 << 21;
    setsockopt(rx_, SOL_SOCKET, SO_RCVBUF, &bufsz, sizeof bufsz);
    rng_.seed(opts_.drop_seed ^ 0x5c510011ULL);
    ok_ = true;
  }

  ~UdpBusImpl() override {
    if (rx_ >= 0) close(rx_);
    if (tx_ >= 0) close(tx_);
  }

  bool ok() const { return ok_; }

  void send(const WireMessage& msg) override {
    std::string payload = msg.serialize();
    // drop injection happens per datagram on the send side
    auto deliver = [&](const std::string& chunk) {
      if (opts_.drop_percent > 0) {
        std::uniform_int_distribution<int> dist(0, 99);
        if (dist(rng_) < opts_.drop_percent) return;
      }
      if (opts_.fanout_ports.empty()) {
        sockaddr_in dst{};
        dst.sin_family = AF_INET;
        dst.sin_port = htons(static_cast<std::uint16_t>(opts_.port));
        dst.sin_addr.s_addr = inet_addr(opts_.group.c_str());
        sendto(tx_, chunk.data(), chunk.size(), 0, reinterpret_cast<sockaddr*>(&dst),
               sizeof dst);
      } else {
        for (int port : opts_.fanout_ports) {
          sockaddr_in dst{};
          dst.sin_family = AF_INET;
          dst.sin_port = htons(static_cast<std::uint16_t>(port));
          dst.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
          sendto(tx_, chunk.data(), chunk.size(), 0, reinterpret_cast<sockaddr*>(&dst),
                 sizeof dst);
        }
      }
    };
    if (payload.size() <= opts_.max_datagram) {
      deliver(payload);
      return;
    }
    // oversized states split by symbol prefix into part messages
    std::vector<nlohmann::ordered_json> parts;
    nlohmann::ordered_json cur = nlohmann::ordered_json::object();
    std::size_t budget = opts_.max_datagram / 2;
    std::size_t used = 0;
    for (auto it = msg.state.begin(); it != msg.state.end(); ++it) {
      std::size_t sz = it.key().size() + it.value().dump().size() + 8;
      if (used + sz > budget && !cur.empty()) {
        parts.push_back(std::move(cur));
        cur = nlohmann::ordered_json::object();
        used = 0;
      }
      cur[it.key()] = it.value();
      used += sz;
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    for (std::size_t p = 0; p < parts.size(); ++p) {
      WireMessage part = msg;
      part.state = std::move(parts[p]);
      part.seq = msg.seq * 1000 + p;  // distinct sequence per part
      deliver(part.serialize());
    }
  }

  std::optional<WireMessage> poll() override {
    char buf[65536];
    ssize_t n = recv(rx_, buf, sizeof buf, 0);
    if (n <= 0) return std::nullopt;
    return WireMessage::parse(std::string(buf, static_cast<std::size_t>(n)));
  }

 private:
  UdpBusOptions opts_;
  int rx_ = -1;
  int tx_ = -1;
  bool ok_ = false;
  std::mt19937_64 rng_;
};

} // namespace

std::shared_ptr<Bus> make_udp_bus(const UdpBusOptions& opts, std::string& error) {
  auto bus = std::make_shared<UdpBusImpl>(opts, error);
  if (!bus->ok()) return nullptr;
  error.clear();
  return bus;
}

} // namespace scsl
