#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "acst/config.hpp"
#include "acst/messages.hpp"
#include "acst/rng.hpp"

namespace acst {

struct NoLinkError : std::runtime_error {
  NoLinkError(PeerId src, PeerId dst)
      : std::runtime_error("no link " + std::to_string(src) + " -> " +
                           std::to_string(dst)) {}
};

struct LivelockError : std::runtime_error {
  explicit LivelockError(std::uint64_t cap)
      : std::runtime_error("event cap exceeded: " + std::to_string(cap)) {}
};

// Directed-link shaping. Parameters may change between events; a transmission
// already serialized keeps the rate it started with.
struct LinkParams {
  double bandwidth_kbps = 1'000.0;
  SimTime delay_us = 0;
  bool active = true;
};

enum class TimerTag : std::uint8_t {
  HandshakeTimeout,
  Announce,
  TransferStall,
  Generic,
};

// Per-peer counters kept by the simulator itself; message bytes are counted
// where the wire sees them so conservation can be checked independently of
// node-level bookkeeping.
struct WireCounters {
  std::uint64_t msgs_sent = 0;
  std::uint64_t msgs_received = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t msgs_dropped = 0;   // deliveries dropped (peer inactive)
  std::uint64_t bytes_dropped = 0;
  std::uint64_t send_drops = 0;     // sends swallowed by an inactive link
};

class PeerHandler {
 public:
  virtual ~PeerHandler() = default;
  virtual void on_message(const Message& msg) = 0;
  virtual void on_timer(TimerTag tag, const std::optional<ContentId>& cid) = 0;
};

// Deterministic discrete-event network simulator. Single-threaded: all
// handlers run inside dispatch, and every random choice draws from the one
// seeded generator, so a (topology, seed) pair fixes the whole trace.
class Simulator {
 public:
  explicit Simulator(std::uint64_t seed, std::uint64_t max_events = 20'000'000)
      : rng_(seed), max_events_(max_events) {}

  void add_peer(PeerId id, PeerHandler* handler,
                std::optional<double> downlink_kbps = std::nullopt);

  // Upsert; creates the directed link when absent.
  void set_link(PeerId src, PeerId dst, const LinkParams& params);
  const LinkParams* link(PeerId src, PeerId dst) const;

  // Deactivated peers neither receive (in-flight deliveries are dropped at
  // delivery time) nor should send; nodes check is_active before emitting.
  void set_peer_active(PeerId id, bool active);
  bool is_active(PeerId id) const;

  // FIFO per directed link: serialization starts when the link frees, runs at
  // the link rate, then the message propagates for the link delay. When the
  // destination has a downlink cap the message additionally queues through
  // the receiver's aggregate downlink, FIFO by arrival.
  void transmit(const Message& msg);

  void schedule_timer(PeerId peer, SimTime at, TimerTag tag,
                      std::optional<ContentId> cid = std::nullopt);

  SimTime now() const { return clock_; }
  std::uint64_t events_dispatched() const { return dispatched_; }

  // Dispatches the next event; false when the queue is empty.
  bool step();

  // Dispatches everything scheduled up to and including horizon, then
  // advances the clock to horizon.
  std::uint64_t run_until(SimTime horizon);

  // Dispatches until the queue empties. Periodic timers must be stopped
  // first or the LivelockError cap will trip.
  std::uint64_t run_to_quiescence();

  const WireCounters& counters(PeerId id) const;
  const std::map<PeerId, WireCounters>& all_counters() const { return counters_; }

  Rng& rng() { return rng_; }

  void set_trace(std::vector<std::string>* sink) { trace_ = sink; }

 private:
  struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;
    // 0 = deliver, 1 = downlink enqueue (internal stage), 2 = timer
    int kind = 0;
    Message msg;
    PeerId timer_peer = 0;
    TimerTag tag = TimerTag::Generic;
    std::optional<ContentId> cid;
  };
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  struct PeerState {
    PeerHandler* handler = nullptr;
    bool active = true;
    std::optional<double> downlink_kbps;
    SimTime downlink_busy_until = 0;
  };

  void push(Event ev);
  void dispatch(const Event& ev);
  void trace_line(const Event& ev, const char* kind);

  static SimTime serialization_us(std::uint64_t wire_size, double kbps);

  Rng rng_;
  std::uint64_t max_events_;
  SimTime clock_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::map<PeerId, PeerState> peers_;
  std::map<std::pair<PeerId, PeerId>, LinkParams> links_;
  std::map<std::pair<PeerId, PeerId>, SimTime> link_busy_until_;
  std::map<PeerId, WireCounters> counters_;
  std::vector<std::string>* trace_ = nullptr;
};

}  // namespace acst
