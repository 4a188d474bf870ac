#include "acst/harness.hpp"

#include <algorithm>
#include <memory>

#include "acst/node.hpp"
#include "acst/rng.hpp"

namespace acst {

namespace {

SwarmKey cluster_key() {
  SwarmKey key{};
  key.fill(0x42);
  return key;
}

SwarmKey outsider_key(PeerId peer) {
  SwarmKey key{};
  key.fill(0xA5);
  key[0] = static_cast<std::uint8_t>(peer);
  return key;
}

struct Cluster {
  Simulator sim;
  std::vector<std::unique_ptr<Node>> nodes;

  Cluster(const Scenario& s, std::uint64_t seed)
      : sim(seed, s.config.max_events) {
    const SwarmKey good = cluster_key();
    for (PeerId id = 0; id < s.peer_count; ++id) {
      const bool wrong =
          std::find(s.wrong_key.begin(), s.wrong_key.end(), id) !=
          s.wrong_key.end();
      nodes.push_back(std::make_unique<Node>(
          sim, id, s.config, wrong ? outsider_key(id) : good,
          id == s.bootstrap));
      sim.add_peer(id, nodes.back().get(), s.downlink_kbps);
    }
    for (PeerId a = 0; a < s.peer_count; ++a) {
      for (PeerId b = 0; b < s.peer_count; ++b) {
        if (a != b) {
          sim.set_link(a, b, make_link(s.default_link));
        }
      }
    }
    // Overrides apply in order; later entries win on shared pairs.
    for (const LinkOverride& o : s.link_overrides) {
      if (o.peer) {
        for (PeerId other = 0; other < s.peer_count; ++other) {
          if (other != *o.peer) {
            apply_override(*o.peer, other, o);
            apply_override(other, *o.peer, o);
          }
        }
      } else {
        apply_override(*o.src, *o.dst, o);
      }
    }
    nodes[s.bootstrap]->start();
  }

  static LinkParams make_link(const LinkSpec& spec) {
    LinkParams lp;
    lp.bandwidth_kbps = spec.bandwidth_kbps;
    lp.delay_us = static_cast<SimTime>(spec.delay_ms * 1000.0);
    return lp;
  }

  void apply_override(PeerId src, PeerId dst, const LinkOverride& o) {
    LinkParams lp = *sim.link(src, dst);
    if (o.bandwidth_kbps) {
      lp.bandwidth_kbps = *o.bandwidth_kbps;
    }
    if (o.delay_ms) {
      lp.delay_us = static_cast<SimTime>(*o.delay_ms * 1000.0);
    }
    sim.set_link(src, dst, lp);
  }

  Node& node(PeerId id) { return *nodes[id]; }

  // Runs until pred holds or the horizon passes. False on timeout.
  template <typename Pred>
  bool run_until_pred(Pred pred, SimTime horizon) {
    while (!pred()) {
      if (sim.now() > horizon || !sim.step()) {
        return pred();
      }
    }
    return true;
  }
};

struct PhaseFailure {
  std::string cause;
};

class ScenarioRunner {
 public:
  ScenarioRunner(const Scenario& s, std::uint64_t seed, const RunOptions& opt)
      : scenario_(s), seed_(seed), options_(opt), cluster_(s, seed) {
    if (options_.trace) {
      cluster_.sim.set_trace(&trace_lines_);
    }
    report_.scenario_name = s.name;
    report_.scenario_digest = s.digest();
    report_.seed = seed;
    report_.config = s.config;
  }

  RunOutput run() {
    for (const Phase& phase : scenario_.phases) {
      PhaseResult result;
      result.op = phase.op;
      result.peer = phase.peer;
      result.start_us = cluster_.sim.now();
      try {
        execute(phase);
        result.ok = true;
      } catch (const PhaseFailure& failure) {
        result.ok = false;
        result.detail = failure.cause;
      } catch (const std::exception& e) {
        result.ok = false;
        result.detail = e.what();
      }
      result.end_us = cluster_.sim.now();
      report_.phases.push_back(result);
      if (!result.ok) {
        report_.ok = false;
        report_.failure_phase = phase_op_name(phase.op);
        report_.failure_cause = result.detail;
        break;
      }
    }
    finalize();
    return RunOutput{std::move(report_), std::move(trace_lines_)};
  }

 private:
  void execute(const Phase& phase) {
    switch (phase.op) {
      case PhaseOp::Join:
        run_join();
        break;
      case PhaseOp::Add:
        run_add(*phase.peer);
        break;
      case PhaseOp::ClusterPin:
        run_cluster_pin(*phase.peer);
        break;
      case PhaseOp::AwaitPinned:
        run_await_pinned();
        break;
      case PhaseOp::Delete:
        run_delete(*phase.peer);
        break;
      case PhaseOp::Get:
        run_get(*phase.peer);
        break;
      case PhaseOp::Deactivate:
        cluster_.node(*phase.peer).deactivate();
        cluster_.sim.run_until(cluster_.sim.now() +
                               scenario_.config.liveness_timeout +
                               scenario_.config.provider_interval + kUsPerSec);
        break;
      case PhaseOp::ProbeWant:
        run_probe(*phase.peer);
        break;
    }
  }

  bool joinable(PeerId id) const {
    return id != scenario_.bootstrap &&
           std::find(scenario_.wrong_key.begin(), scenario_.wrong_key.end(),
                     id) == scenario_.wrong_key.end();
  }

  void run_join() {
    for (PeerId id = 0; id < scenario_.peer_count; ++id) {
      if (id != scenario_.bootstrap) {
        cluster_.node(id).begin_join(scenario_.bootstrap);
      }
    }
    const auto terminal = [&] {
      for (PeerId id = 0; id < scenario_.peer_count; ++id) {
        if (id == scenario_.bootstrap) continue;
        const MemberState st = cluster_.node(id).member_state();
        if (st == MemberState::Handshaking || st == MemberState::Unjoined) {
          return false;
        }
      }
      return true;
    };
    cluster_.run_until_pred(
        terminal, cluster_.sim.now() + 3 * scenario_.config.handshake_timeout +
                      60 * kUsPerSec);

    bool all = true;
    std::string detail;
    for (PeerId id = 0; id < scenario_.peer_count; ++id) {
      if (joinable(id) &&
          cluster_.node(id).member_state() != MemberState::Joined) {
        all = false;
        detail += "peer " + std::to_string(id) + " " +
                  member_state_name(cluster_.node(id).member_state()) + "; ";
      }
    }
    report_.all_joined = all;
    if (!all) {
      throw PhaseFailure{"join incomplete: " + detail};
    }
  }

  void run_add(PeerId peer) {
    file_bytes_ = generate_file(scenario_.file_size, scenario_.file_seed);
    root_ = cluster_.node(peer).add_file(file_bytes_);
    report_.root = root_->to_string();
  }

  void run_cluster_pin(PeerId peer) {
    if (!root_) {
      throw PhaseFailure{"cluster_pin before add: no root"};
    }
    pin_origin_ = peer;
    cluster_.node(peer).cluster_pin(*root_);
  }

  void run_await_pinned() {
    if (!root_ || !pin_origin_) {
      throw PhaseFailure{"await_pinned before cluster_pin"};
    }
    Node& origin = cluster_.node(*pin_origin_);
    const ContentId root = *root_;
    const bool done = cluster_.run_until_pred(
        [&] { return origin.pin_tracking(root).terminal(); },
        cluster_.sim.now() + 4LL * 3600 * kUsPerSec);
    if (!done) {
      throw PhaseFailure{"pin did not reach a terminal state"};
    }
    report_.pin_complete = origin.pin_tracking(root).complete();
  }

  void run_delete(PeerId peer) {
    if (!root_) {
      throw PhaseFailure{"delete before add: no root"};
    }
    Node& node = cluster_.node(peer);
    node.store().unpin(*root_);
    node.store().gc();
  }

  void run_get(PeerId peer) {
    if (!root_) {
      throw PhaseFailure{"get before add: no root"};
    }
    Node& node = cluster_.node(peer);
    const ContentId root = *root_;
    const std::uint64_t duplicates_before = node.duplicates_received();
    node.request_dag(root);
    const bool done = cluster_.run_until_pred(
        [&] {
          const Transfer* t = node.transfer(root);
          return t && t->state != TransferState::Active;
        },
        cluster_.sim.now() + 2LL * 3600 * kUsPerSec);

    const Transfer* t = node.transfer(root);
    GetMetrics get;
    get.peer = peer;
    get.state = t ? transfer_state_name(t->state) : "missing";
    if (t) {
      get.duration_us = (done ? t->finished_at : cluster_.sim.now()) - t->started_at;
      get.providers = t->blocks_by_provider;
      get.duplicates = node.duplicates_received() - duplicates_before;
    }
    if (t && t->state == TransferState::Complete) {
      const std::vector<std::uint8_t> bytes = node.store().assemble(root);
      get.bytes = bytes.size();
      get.verified = (bytes == file_bytes_);
    }
    report_.get = get;
    if (!get.verified) {
      throw PhaseFailure{"get failed: transfer " + get.state};
    }
  }

  void run_probe(PeerId peer) {
    if (!root_) {
      throw PhaseFailure{"probe_want before add: no root"};
    }
    std::vector<PeerId> targets;
    for (PeerId id = 0; id < scenario_.peer_count; ++id) {
      if (id != peer) {
        targets.push_back(id);
      }
    }
    cluster_.node(peer).send_probe_wants(*root_, targets);
    cluster_.sim.run_until(cluster_.sim.now() + 5 * kUsPerSec);
  }

  void finalize() {
    for (auto& node : cluster_.nodes) {
      node->stop_announcements();
    }
    try {
      cluster_.sim.run_to_quiescence();
    } catch (const LivelockError& e) {
      report_.ok = false;
      if (report_.failure_cause.empty()) {
        report_.failure_phase = "drain";
        report_.failure_cause = e.what();
      }
    }

    for (PeerId id = 0; id < scenario_.peer_count; ++id) {
      const Node& node = cluster_.node(id);
      report_.member_states[id] = member_state_name(node.member_state());

      PeerMetrics pm;
      pm.peer = id;
      const WireCounters& wc = cluster_.sim.counters(id);
      pm.msgs_sent = wc.msgs_sent;
      pm.msgs_received = wc.msgs_received;
      pm.bytes_sent = wc.bytes_sent;
      pm.bytes_received = wc.bytes_received;
      pm.msgs_dropped = wc.msgs_dropped;
      pm.bytes_dropped = wc.bytes_dropped;
      pm.send_drops = wc.send_drops;
      pm.blocks_served = node.blocks_served();
      pm.duplicates = node.duplicates_received();
      pm.auth_drops = node.auth_drops();
      pm.misbehavior = node.misbehavior();
      pm.block_payload_bytes_received = node.block_payload_bytes_received();
      pm.stored_bytes = node.store().stored_bytes();
      pm.blocks_stored = node.store().block_count();
      pm.member_state = member_state_name(node.member_state());
      report_.peers.push_back(pm);

      report_.total_bytes_sent += pm.bytes_sent;
      report_.total_bytes_received += pm.bytes_received;
      report_.total_bytes_dropped += pm.bytes_dropped;
    }

    if (root_ && pin_origin_) {
      const Node& origin = cluster_.node(*pin_origin_);
      if (origin.has_pin_tracking(*root_)) {
        const ClusterPinTracking& tracking = origin.pin_tracking(*root_);
        for (const auto& [peer, state] : tracking.statuses) {
          report_.pin_statuses[peer] = pin_state_name(state);
        }
        for (const PinTimelineEntry& entry : tracking.timeline) {
          report_.pin_timeline.push_back(TimelineRow{
              entry.peer, entry.root.to_string(), pin_state_name(entry.state),
              entry.time});
        }
      }
    }

    report_.events_dispatched = cluster_.sim.events_dispatched();
    report_.end_time_us = cluster_.sim.now();
  }

  Scenario scenario_;
  std::uint64_t seed_;
  RunOptions options_;
  Cluster cluster_;
  MetricsReport report_;
  std::vector<std::string> trace_lines_;
  std::vector<std::uint8_t> file_bytes_;
  std::optional<ContentId> root_;
  std::optional<PeerId> pin_origin_;
};

}  // namespace

std::vector<std::uint8_t> generate_file(std::uint64_t size, std::uint64_t seed) {
  Rng rng(seed);
  return rng.bytes(static_cast<std::size_t>(size));
}

RunOutput run_scenario(const Scenario& scenario, std::uint64_t seed,
                       const RunOptions& options) {
  scenario.validate();
  ScenarioRunner runner(scenario, seed, options);
  return runner.run();
}

SweepResult sweep(const Scenario& base, const std::string& parameter,
                  const std::vector<double>& values) {
  if (values.empty()) {
    throw ScenarioError("sweep: values must be non-empty");
  }
  if (parameter != "bandwidth" && parameter != "delay") {
    throw ScenarioError("sweep: parameter must be 'bandwidth' or 'delay'");
  }
  SweepResult result;
  result.parameter = parameter;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Scenario s = base;
    if (parameter == "bandwidth") {
      s.default_link.bandwidth_kbps = values[i];
    } else {
      s.default_link.delay_ms = values[i];
    }
    const std::uint64_t row_seed = base.seed + i;
    s.seed = row_seed;
    SweepRow row;
    row.value = values[i];
    row.seed = row_seed;
    row.report = run_scenario(s, row_seed).report;
    result.rows.push_back(std::move(row));
  }
  if (parameter == "bandwidth") {
    for (const SweepRow& row : result.rows) {
      if (row.report.all_joined) {
        const double v = row.value;
        if (!result.join_threshold || v < *result.join_threshold) {
          result.join_threshold = v;
        }
      }
    }
  }
  return result;
}

}  // namespace acst
