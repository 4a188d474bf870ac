#include "acst/metrics.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace acst {

using nlohmann::ordered_json;

namespace {

ordered_json config_json(const Config& cfg) {
  ordered_json out;
  out["chunk_size"] = cfg.chunk_size;
  out["fanout"] = cfg.fanout;
  out["window"] = cfg.window;
  out["header_bytes"] = cfg.header_bytes;
  out["handshake_bytes"] = cfg.handshake_bytes;
  out["handshake_timeout_ms"] = cfg.handshake_timeout / kUsPerMs;
  out["provider_interval_s"] = cfg.provider_interval / kUsPerSec;
  out["liveness_timeout_s"] = cfg.liveness_timeout / kUsPerSec;
  out["stall_timeout_s"] = cfg.stall_timeout / kUsPerSec;
  out["max_events"] = cfg.max_events;
  return out;
}

}  // namespace

std::optional<PhaseResult> MetricsReport::phase(PhaseOp op) const {
  for (const PhaseResult& p : phases) {
    if (p.op == op) {
      return p;
    }
  }
  return std::nullopt;
}

std::string MetricsReport::to_json_text() const {
  ordered_json doc;
  doc["scenario"]["name"] = scenario_name;
  doc["scenario"]["digest"] = scenario_digest;
  doc["seed"] = seed;
  doc["config"] = config_json(config);
  doc["status"] = ok ? "ok" : "failed";
  if (!ok) {
    doc["failure"]["phase"] = failure_phase;
    doc["failure"]["cause"] = failure_cause;
  }

  doc["phases"] = ordered_json::array();
  for (const PhaseResult& p : phases) {
    ordered_json item;
    item["op"] = phase_op_name(p.op);
    if (p.peer) {
      item["peer"] = *p.peer;
    }
    item["start_us"] = p.start_us;
    item["end_us"] = p.end_us;
    item["duration_ms"] = p.duration_ms();
    item["status"] = p.ok ? "ok" : "failed";
    if (!p.detail.empty()) {
      item["detail"] = p.detail;
    }
    doc["phases"].push_back(item);
  }

  doc["join"]["all_joined"] = all_joined;
  for (const auto& [peer, state] : member_states) {
    doc["join"]["states"][std::to_string(peer)] = state;
  }

  if (!root.empty()) {
    doc["pin"]["root"] = root;
    doc["pin"]["complete"] = pin_complete;
    for (const auto& [peer, state] : pin_statuses) {
      doc["pin"]["statuses"][std::to_string(peer)] = state;
    }
    doc["pin"]["timeline"] = ordered_json::array();
    for (const TimelineRow& row : pin_timeline) {
      ordered_json item;
      item["peer"] = row.peer;
      item["root"] = row.root;
      item["status"] = row.status;
      item["time_us"] = row.time_us;
      doc["pin"]["timeline"].push_back(item);
    }
  }

  if (get) {
    doc["get"]["peer"] = get->peer;
    doc["get"]["state"] = get->state;
    doc["get"]["verified"] = get->verified;
    doc["get"]["bytes"] = get->bytes;
    doc["get"]["duration_ms"] = static_cast<double>(get->duration_us) / 1000.0;
    for (const auto& [peer, blocks] : get->providers) {
      doc["get"]["providers"][std::to_string(peer)] = blocks;
    }
    doc["get"]["duplicates"] = get->duplicates;
  }

  doc["peers"] = ordered_json::array();
  for (const PeerMetrics& pm : peers) {
    ordered_json item;
    item["peer"] = pm.peer;
    item["msgs_sent"] = pm.msgs_sent;
    item["msgs_received"] = pm.msgs_received;
    item["bytes_sent"] = pm.bytes_sent;
    item["bytes_received"] = pm.bytes_received;
    item["msgs_dropped"] = pm.msgs_dropped;
    item["bytes_dropped"] = pm.bytes_dropped;
    item["send_drops"] = pm.send_drops;
    item["blocks_served"] = pm.blocks_served;
    item["duplicates"] = pm.duplicates;
    item["auth_drops"] = pm.auth_drops;
    item["misbehavior"] = pm.misbehavior;
    item["block_payload_bytes_received"] = pm.block_payload_bytes_received;
    item["stored_bytes"] = pm.stored_bytes;
    item["blocks_stored"] = pm.blocks_stored;
    item["member_state"] = pm.member_state;
    doc["peers"].push_back(item);
  }

  doc["totals"]["bytes_sent"] = total_bytes_sent;
  doc["totals"]["bytes_received"] = total_bytes_received;
  doc["totals"]["bytes_dropped"] = total_bytes_dropped;
  doc["totals"]["events_dispatched"] = events_dispatched;
  doc["totals"]["end_time_us"] = end_time_us;

  return doc.dump(2) + "\n";
}

std::string MetricsReport::to_peer_load_csv() const {
  std::ostringstream out;
  out << "peer_id,msgs_sent,msgs_received,bytes_sent,bytes_received,"
         "blocks_served,duplicates,stored_bytes\n";
  for (const PeerMetrics& pm : peers) {
    out << pm.peer << ',' << pm.msgs_sent << ',' << pm.msgs_received << ','
        << pm.bytes_sent << ',' << pm.bytes_received << ',' << pm.blocks_served
        << ',' << pm.duplicates << ',' << pm.stored_bytes << '\n';
  }
  return out.str();
}

std::string SweepResult::to_json_text() const {
  ordered_json doc;
  doc["parameter"] = parameter;
  if (join_threshold) {
    doc["join_threshold_kbps"] = *join_threshold;
  }
  doc["rows"] = ordered_json::array();
  for (const SweepRow& row : rows) {
    ordered_json item;
    item["value"] = row.value;
    item["seed"] = row.seed;
    item["report"] = ordered_json::parse(row.report.to_json_text());
    doc["rows"].push_back(item);
  }
  return doc.dump(2) + "\n";
}

std::string SweepResult::to_csv() const {
  std::ostringstream out;
  out << "value,seed,status,all_joined,pin_duration_ms,get_duration_ms,"
         "get_verified,total_bytes_sent\n";
  for (const SweepRow& row : rows) {
    const MetricsReport& r = row.report;
    out << row.value << ',' << row.seed << ',' << (r.ok ? "ok" : "failed")
        << ',' << (r.all_joined ? 1 : 0) << ',';
    if (const auto p = r.phase(PhaseOp::AwaitPinned)) {
      out << p->duration_ms();
    }
    out << ',';
    if (r.get) {
      out << static_cast<double>(r.get->duration_us) / 1000.0;
    }
    out << ',' << (r.get && r.get->verified ? 1 : 0) << ','
        << r.total_bytes_sent << '\n';
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << contents;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::vector<std::string> emit_report(const MetricsReport& report,
                                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string json_path = out_dir + "/report.json";
  const std::string csv_path = out_dir + "/peer_load.csv";
  write_file(json_path, report.to_json_text());
  write_file(csv_path, report.to_peer_load_csv());
  return {json_path, csv_path};
}

std::vector<std::string> emit_sweep(const SweepResult& sweep,
                                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string json_path = out_dir + "/sweep.json";
  const std::string csv_path = out_dir + "/sweep.csv";
  write_file(json_path, sweep.to_json_text());
  write_file(csv_path, sweep.to_csv());
  return {json_path, csv_path};
}

}  // namespace acst
