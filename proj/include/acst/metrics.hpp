#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acst/config.hpp"
#include "acst/messages.hpp"
#include "acst/scenario.hpp"

namespace acst {

struct PhaseResult {
  PhaseOp op;
  std::optional<PeerId> peer;
  SimTime start_us = 0;
  SimTime end_us = 0;
  bool ok = true;
  std::string detail;

  double duration_ms() const {
    return static_cast<double>(end_us - start_us) / 1000.0;
  }
};

struct PeerMetrics {
  PeerId peer = 0;
  std::uint64_t msgs_sent = 0;
  std::uint64_t msgs_received = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t msgs_dropped = 0;
  std::uint64_t bytes_dropped = 0;
  std::uint64_t send_drops = 0;
  std::uint64_t blocks_served = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t auth_drops = 0;
  std::uint64_t misbehavior = 0;
  std::uint64_t block_payload_bytes_received = 0;
  std::uint64_t stored_bytes = 0;
  std::uint64_t blocks_stored = 0;
  std::string member_state;
};

struct TimelineRow {
  PeerId peer = 0;
  std::string root;
  std::string status;
  SimTime time_us = 0;
};

struct GetMetrics {
  PeerId peer = 0;
  std::string state;
  bool verified = false;
  std::uint64_t bytes = 0;
  SimTime duration_us = 0;
  std::map<PeerId, std::uint64_t> providers;
  std::uint64_t duplicates = 0;
};

// The full measurement output of one scenario run. A pure function of
// (scenario, seed): serializing twice yields identical bytes.
struct MetricsReport {
  std::string scenario_name;
  std::string scenario_digest;
  std::uint64_t seed = 0;
  Config config;

  bool ok = true;
  std::string failure_phase;
  std::string failure_cause;

  std::vector<PhaseResult> phases;

  bool all_joined = false;
  std::map<PeerId, std::string> member_states;

  std::string root;  // canonical cid of the scenario file, once added
  bool pin_complete = false;
  std::map<PeerId, std::string> pin_statuses;
  std::vector<TimelineRow> pin_timeline;

  std::optional<GetMetrics> get;

  std::vector<PeerMetrics> peers;

  std::uint64_t total_bytes_sent = 0;
  std::uint64_t total_bytes_received = 0;
  std::uint64_t total_bytes_dropped = 0;
  std::uint64_t events_dispatched = 0;
  SimTime end_time_us = 0;

  std::string to_json_text() const;

  // Fig.-2 analogue: one row per peer.
  // peer_id,msgs_sent,msgs_received,bytes_sent,bytes_received,blocks_served,
  // duplicates,stored_bytes
  std::string to_peer_load_csv() const;

  std::optional<PhaseResult> phase(PhaseOp op) const;
};

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  MetricsReport report;
};

struct SweepResult {
  std::string parameter;  // "bandwidth" | "delay"
  std::vector<SweepRow> rows;
  std::optional<double> join_threshold;  // least bandwidth with a full join

  std::string to_json_text() const;
  std::string to_csv() const;
};

// Writes report.json and peer_load.csv under out_dir; returns the paths.
std::vector<std::string> emit_report(const MetricsReport& report,
                                     const std::string& out_dir);
std::vector<std::string> emit_sweep(const SweepResult& sweep,
                                    const std::string& out_dir);
void write_file(const std::string& path, const std::string& contents);

}  // namespace acst
