#include "acst/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "acst/cid.hpp"

namespace acst {

using nlohmann::json;

const char* phase_op_name(PhaseOp op) {
  switch (op) {
    case PhaseOp::Join:
      return "join";
    case PhaseOp::Add:
      return "add";
    case PhaseOp::ClusterPin:
      return "cluster_pin";
    case PhaseOp::AwaitPinned:
      return "await_pinned";
    case PhaseOp::Delete:
      return "delete";
    case PhaseOp::Get:
      return "get";
    case PhaseOp::Deactivate:
      return "deactivate";
    case PhaseOp::ProbeWant:
      return "probe_want";
  }
  return "?";
}

namespace {

PhaseOp parse_phase_op(const std::string& name) {
  if (name == "join") return PhaseOp::Join;
  if (name == "add") return PhaseOp::Add;
  if (name == "cluster_pin") return PhaseOp::ClusterPin;
  if (name == "await_pinned") return PhaseOp::AwaitPinned;
  if (name == "delete") return PhaseOp::Delete;
  if (name == "get") return PhaseOp::Get;
  if (name == "deactivate") return PhaseOp::Deactivate;
  if (name == "probe_want") return PhaseOp::ProbeWant;
  throw ScenarioError("phases: unknown op '" + name + "'");
}

bool phase_needs_peer(PhaseOp op) {
  switch (op) {
    case PhaseOp::Add:
    case PhaseOp::ClusterPin:
    case PhaseOp::Delete:
    case PhaseOp::Get:
    case PhaseOp::Deactivate:
    case PhaseOp::ProbeWant:
      return true;
    default:
      return false;
  }
}

// Unknown fields are hard errors so experiments stay honest.
void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ScenarioError(where + ": unknown field '" + key + "'");
    }
  }
}

double require_positive(const json& v, const std::string& where) {
  if (!v.is_number() || v.get<double>() <= 0.0) {
    throw ScenarioError(where + ": must be a positive number");
  }
  return v.get<double>();
}

double require_non_negative(const json& v, const std::string& where) {
  if (!v.is_number() || v.get<double>() < 0.0) {
    throw ScenarioError(where + ": must be a non-negative number");
  }
  return v.get<double>();
}

}  // namespace

void Scenario::validate() const {
  if (peer_count < 1) {
    throw ScenarioError("peers.count: must be >= 1");
  }
  if (bootstrap >= peer_count) {
    throw ScenarioError("peers.bootstrap: undeclared peer");
  }
  for (PeerId p : wrong_key) {
    if (p >= peer_count) {
      throw ScenarioError("peers.wrong_key: undeclared peer");
    }
    if (p == bootstrap) {
      throw ScenarioError("peers.wrong_key: bootstrap cannot hold a wrong key");
    }
  }
  for (const LinkOverride& o : link_overrides) {
    const bool by_peer = o.peer.has_value();
    const bool by_pair = o.src.has_value() && o.dst.has_value();
    if (by_peer == by_pair) {
      throw ScenarioError("links.overrides: need either 'peer' or 'src'+'dst'");
    }
    if (by_peer && *o.peer >= peer_count) {
      throw ScenarioError("links.overrides.peer: undeclared peer");
    }
    if (by_pair && (*o.src >= peer_count || *o.dst >= peer_count)) {
      throw ScenarioError("links.overrides: undeclared peer");
    }
  }
  for (const Phase& phase : phases) {
    if (phase_needs_peer(phase.op)) {
      if (!phase.peer) {
        throw ScenarioError(std::string("phases.") + phase_op_name(phase.op) +
                            ": missing 'peer'");
      }
      if (*phase.peer >= peer_count) {
        throw ScenarioError(std::string("phases.") + phase_op_name(phase.op) +
                            ": undeclared peer");
      }
    }
  }
  config.validate();
}

Scenario Scenario::from_json_text(const std::string& text) {
  json doc = json::parse(text);  // parse_error carries byte position
  require_keys(doc, "scenario",
               {"name", "peers", "links", "file", "phases", "seed", "config"});

  Scenario s;
  if (doc.contains("name")) {
    s.name = doc.at("name").get<std::string>();
  }

  const json& peers = doc.at("peers");
  require_keys(peers, "peers", {"count", "bootstrap", "wrong_key", "downlink_kbps"});
  s.peer_count = peers.at("count").get<std::uint32_t>();
  if (peers.contains("bootstrap")) {
    s.bootstrap = peers.at("bootstrap").get<PeerId>();
  }
  if (peers.contains("wrong_key")) {
    s.wrong_key = peers.at("wrong_key").get<std::vector<PeerId>>();
  }
  if (peers.contains("downlink_kbps")) {
    s.downlink_kbps = require_positive(peers.at("downlink_kbps"),
                                       "peers.downlink_kbps");
  }

  const json& links = doc.at("links");
  require_keys(links, "links", {"default", "overrides"});
  const json& def = links.at("default");
  require_keys(def, "links.default", {"bandwidth_kbps", "delay_ms"});
  s.default_link.bandwidth_kbps =
      require_positive(def.at("bandwidth_kbps"), "links.default.bandwidth_kbps");
  s.default_link.delay_ms =
      require_non_negative(def.at("delay_ms"), "links.default.delay_ms");
  if (links.contains("overrides")) {
    for (const json& item : links.at("overrides")) {
      require_keys(item, "links.overrides",
                   {"peer", "src", "dst", "bandwidth_kbps", "delay_ms"});
      LinkOverride o;
      if (item.contains("peer")) o.peer = item.at("peer").get<PeerId>();
      if (item.contains("src")) o.src = item.at("src").get<PeerId>();
      if (item.contains("dst")) o.dst = item.at("dst").get<PeerId>();
      if (item.contains("bandwidth_kbps")) {
        o.bandwidth_kbps = require_positive(item.at("bandwidth_kbps"),
                                            "links.overrides.bandwidth_kbps");
      }
      if (item.contains("delay_ms")) {
        o.delay_ms = require_non_negative(item.at("delay_ms"),
                                          "links.overrides.delay_ms");
      }
      s.link_overrides.push_back(o);
    }
  }

  const json& file = doc.at("file");
  require_keys(file, "file", {"size_bytes", "seed"});
  s.file_size = file.at("size_bytes").get<std::uint64_t>();
  s.file_seed = file.contains("seed") ? file.at("seed").get<std::uint64_t>() : 0;

  for (const json& item : doc.at("phases")) {
    require_keys(item, "phases", {"op", "peer"});
    Phase phase;
    phase.op = parse_phase_op(item.at("op").get<std::string>());
    if (item.contains("peer")) {
      phase.peer = item.at("peer").get<PeerId>();
    }
    s.phases.push_back(phase);
  }

  if (doc.contains("seed")) {
    s.seed = doc.at("seed").get<std::uint64_t>();
  }

  if (doc.contains("config")) {
    const json& cfg = doc.at("config");
    require_keys(cfg, "config",
                 {"chunk_size", "fanout", "window", "header_bytes",
                  "handshake_bytes", "handshake_timeout_ms",
                  "provider_interval_s", "liveness_timeout_s",
                  "stall_timeout_s", "max_events"});
    if (cfg.contains("chunk_size")) {
      s.config.chunk_size = cfg.at("chunk_size").get<std::size_t>();
    }
    if (cfg.contains("fanout")) {
      s.config.fanout = cfg.at("fanout").get<std::size_t>();
    }
    if (cfg.contains("window")) {
      s.config.window = cfg.at("window").get<std::size_t>();
    }
    if (cfg.contains("header_bytes")) {
      s.config.header_bytes = cfg.at("header_bytes").get<std::uint64_t>();
    }
    if (cfg.contains("handshake_bytes")) {
      s.config.handshake_bytes = cfg.at("handshake_bytes").get<std::uint64_t>();
    }
    if (cfg.contains("handshake_timeout_ms")) {
      s.config.handshake_timeout =
          cfg.at("handshake_timeout_ms").get<SimTime>() * kUsPerMs;
    }
    if (cfg.contains("provider_interval_s")) {
      s.config.provider_interval =
          cfg.at("provider_interval_s").get<SimTime>() * kUsPerSec;
    }
    if (cfg.contains("liveness_timeout_s")) {
      s.config.liveness_timeout =
          cfg.at("liveness_timeout_s").get<SimTime>() * kUsPerSec;
    }
    if (cfg.contains("stall_timeout_s")) {
      s.config.stall_timeout =
          cfg.at("stall_timeout_s").get<SimTime>() * kUsPerSec;
    }
    if (cfg.contains("max_events")) {
      s.config.max_events = cfg.at("max_events").get<std::uint64_t>();
    }
  }

  s.validate();
  return s;
}

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string Scenario::to_canonical_json() const {
  json doc;
  doc["name"] = name;
  doc["peers"]["count"] = peer_count;
  doc["peers"]["bootstrap"] = bootstrap;
  doc["peers"]["wrong_key"] = wrong_key;
  if (downlink_kbps) {
    doc["peers"]["downlink_kbps"] = *downlink_kbps;
  }
  doc["links"]["default"]["bandwidth_kbps"] = default_link.bandwidth_kbps;
  doc["links"]["default"]["delay_ms"] = default_link.delay_ms;
  doc["links"]["overrides"] = json::array();
  for (const LinkOverride& o : link_overrides) {
    json item;
    if (o.peer) item["peer"] = *o.peer;
    if (o.src) item["src"] = *o.src;
    if (o.dst) item["dst"] = *o.dst;
    if (o.bandwidth_kbps) item["bandwidth_kbps"] = *o.bandwidth_kbps;
    if (o.delay_ms) item["delay_ms"] = *o.delay_ms;
    doc["links"]["overrides"].push_back(item);
  }
  doc["file"]["size_bytes"] = file_size;
  doc["file"]["seed"] = file_seed;
  doc["phases"] = json::array();
  for (const Phase& phase : phases) {
    json item;
    item["op"] = phase_op_name(phase.op);
    if (phase.peer) item["peer"] = *phase.peer;
    doc["phases"].push_back(item);
  }
  doc["seed"] = seed;
  doc["config"]["chunk_size"] = config.chunk_size;
  doc["config"]["fanout"] = config.fanout;
  doc["config"]["window"] = config.window;
  doc["config"]["header_bytes"] = config.header_bytes;
  doc["config"]["handshake_bytes"] = config.handshake_bytes;
  doc["config"]["handshake_timeout_ms"] = config.handshake_timeout / kUsPerMs;
  doc["config"]["provider_interval_s"] = config.provider_interval / kUsPerSec;
  doc["config"]["liveness_timeout_s"] = config.liveness_timeout / kUsPerSec;
  doc["config"]["stall_timeout_s"] = config.stall_timeout / kUsPerSec;
  doc["config"]["max_events"] = config.max_events;
  return doc.dump();  // nlohmann emits objects with sorted keys
}

std::string Scenario::digest() const {
  const std::string text = to_canonical_json();
  return to_hex(sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size())));
}

}  // namespace acst
