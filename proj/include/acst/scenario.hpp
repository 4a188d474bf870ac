#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acst/config.hpp"
#include "acst/messages.hpp"

namespace acst {

struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

enum class PhaseOp : std::uint8_t {
  Join,
  Add,
  ClusterPin,
  AwaitPinned,
  Delete,
  Get,
  Deactivate,
  ProbeWant,
};

const char* phase_op_name(PhaseOp op);

struct Phase {
  PhaseOp op;
  std::optional<PeerId> peer;  // required by peer-scoped ops
};

struct LinkSpec {
  double bandwidth_kbps = 1'000.0;
  double delay_ms = 0.0;
};

// Either a single directed link or every link touching one peer.
struct LinkOverride {
  std::optional<PeerId> peer;
  std::optional<PeerId> src;
  std::optional<PeerId> dst;
  std::optional<double> bandwidth_kbps;
  std::optional<double> delay_ms;
};

struct Scenario {
  std::string name = "scenario";
  std::uint32_t peer_count = 0;
  PeerId bootstrap = 0;
  std::vector<PeerId> wrong_key;          // peers holding a bad swarm key
  std::optional<double> downlink_kbps;    // per-peer aggregate downlink cap
  LinkSpec default_link;
  std::vector<LinkOverride> link_overrides;
  std::uint64_t file_size = 0;
  std::uint64_t file_seed = 0;
  std::vector<Phase> phases;
  std::uint64_t seed = 0;
  Config config;

  void validate() const;

  // Parses the strict JSON scenario document; unknown fields are errors.
  static Scenario from_json_text(const std::string& text);
  static Scenario from_file(const std::string& path);

  // Canonical serialization (sorted keys); its sha256 is the report digest.
  std::string to_canonical_json() const;
  std::string digest() const;
};

}  // namespace acst
