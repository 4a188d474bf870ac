#include "acst/netsim.hpp"

#include <cmath>

namespace acst {

void Simulator::add_peer(PeerId id, PeerHandler* handler,
                         std::optional<double> downlink_kbps) {
  PeerState state;
  state.handler = handler;
  state.downlink_kbps = downlink_kbps;
  peers_[id] = state;
  counters_.emplace(id, WireCounters{});
}

void Simulator::set_link(PeerId src, PeerId dst, const LinkParams& params) {
  links_[{src, dst}] = params;
}

const LinkParams* Simulator::link(PeerId src, PeerId dst) const {
  auto it = links_.find({src, dst});
  return it == links_.end() ? nullptr : &it->second;
}

void Simulator::set_peer_active(PeerId id, bool active) {
  auto it = peers_.find(id);
  if (it == peers_.end()) {
    return;  // unknown peer: no-op
  }
  it->second.active = active;
}

bool Simulator::is_active(PeerId id) const {
  auto it = peers_.find(id);
  return it != peers_.end() && it->second.active;
}

SimTime Simulator::serialization_us(std::uint64_t wire_size, double kbps) {
  // kbit/s == bit/ms; us = bits * 1000 / kbps, rounded up so busy time is
  // never lost to truncation.
  const double bits = static_cast<double>(wire_size) * 8.0;
  return static_cast<SimTime>(std::ceil(bits * 1000.0 / kbps));
}

void Simulator::push(Event ev) {
  ev.seq = next_seq_++;
  queue_.push(std::move(ev));
}

void Simulator::transmit(const Message& msg) {
  auto it = links_.find({msg.src, msg.dst});
  if (it == links_.end()) {
    throw NoLinkError(msg.src, msg.dst);
  }
  const LinkParams& lp = it->second;
  if (!lp.active) {
    counters_[msg.src].send_drops++;
    return;
  }

  SimTime& busy = link_busy_until_[{msg.src, msg.dst}];
  const SimTime start = std::max(clock_, busy);
  const SimTime finish = start + serialization_us(msg.wire_size, lp.bandwidth_kbps);
  busy = finish;
  const SimTime arrival = finish + lp.delay_us;

  WireCounters& src_counters = counters_[msg.src];
  src_counters.msgs_sent++;
  src_counters.bytes_sent += msg.wire_size;

  Event ev;
  ev.time = arrival;
  ev.msg = msg;
  auto dst_it = peers_.find(msg.dst);
  const bool capped = dst_it != peers_.end() &&
                      dst_it->second.downlink_kbps.has_value();
  ev.kind = capped ? 1 : 0;
  push(std::move(ev));
}

void Simulator::schedule_timer(PeerId peer, SimTime at, TimerTag tag,
                               std::optional<ContentId> cid) {
  Event ev;
  ev.time = std::max(at, clock_);
  ev.kind = 2;
  ev.timer_peer = peer;
  ev.tag = tag;
  ev.cid = std::move(cid);
  push(std::move(ev));
}

void Simulator::trace_line(const Event& ev, const char* kind) {
  if (!trace_) {
    return;
  }
  std::string line = std::to_string(ev.time);
  line += ',';
  line += std::to_string(ev.seq);
  line += ',';
  line += kind;
  line += ',';
  if (ev.kind == 2) {
    line += std::to_string(ev.timer_peer);
    line += ',';
    line += std::to_string(ev.timer_peer);
    line += ',';
    line += ev.cid ? ev.cid->to_string() : std::string("-");
    line += ",0";
  } else {
    line += std::to_string(ev.msg.src);
    line += ',';
    line += std::to_string(ev.msg.dst);
    line += ',';
    const auto cid = message_cid(ev.msg.body);
    line += cid ? cid->to_string() : std::string("-");
    line += ',';
    line += std::to_string(ev.msg.wire_size);
  }
  trace_->push_back(std::move(line));
}

void Simulator::dispatch(const Event& ev) {
  if (++dispatched_ > max_events_) {
    throw LivelockError(max_events_);
  }
  clock_ = std::max(clock_, ev.time);

  if (ev.kind == 2) {
    trace_line(ev, "timer");
    auto it = peers_.find(ev.timer_peer);
    if (it != peers_.end() && it->second.handler) {
      it->second.handler->on_timer(ev.tag, ev.cid);
    }
    return;
  }

  auto it = peers_.find(ev.msg.dst);
  if (ev.kind == 1) {
    // Receiver-side aggregate downlink stage, FIFO by arrival time.
    Event deliver = ev;
    deliver.kind = 0;
    if (it != peers_.end() && it->second.downlink_kbps.has_value()) {
      PeerState& st = it->second;
      const SimTime start = std::max(clock_, st.downlink_busy_until);
      const SimTime finish =
          start + serialization_us(ev.msg.wire_size, *st.downlink_kbps);
      st.downlink_busy_until = finish;
      deliver.time = finish;
    } else {
      deliver.time = clock_;
    }
    push(std::move(deliver));
    return;
  }

  if (it == peers_.end() || !it->second.active || !it->second.handler) {
    WireCounters& c = counters_[ev.msg.dst];
    c.msgs_dropped++;
    c.bytes_dropped += ev.msg.wire_size;
    trace_line(ev, "drop");
    return;
  }
  WireCounters& c = counters_[ev.msg.dst];
  c.msgs_received++;
  c.bytes_received += ev.msg.wire_size;
  trace_line(ev, "deliver");
  it->second.handler->on_message(ev.msg);
}

bool Simulator::step() {
  if (queue_.empty()) {
    return false;
  }
  Event ev = queue_.top();
  queue_.pop();
  dispatch(ev);
  return true;
}

std::uint64_t Simulator::run_until(SimTime horizon) {
  std::uint64_t n = 0;
  while (!queue_.empty() && queue_.top().time <= horizon) {
    Event ev = queue_.top();
    queue_.pop();
    dispatch(ev);
    ++n;
  }
  clock_ = std::max(clock_, horizon);
  return n;
}

std::uint64_t Simulator::run_to_quiescence() {
  std::uint64_t n = 0;
  while (step()) {
    ++n;
  }
  return n;
}

const WireCounters& Simulator::counters(PeerId id) const {
  static const WireCounters kEmpty{};
  auto it = counters_.find(id);
  return it == counters_.end() ? kEmpty : it->second;
}

}  // namespace acst
