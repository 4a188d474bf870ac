#pragma once

#include <cstdint>
#include <stdexcept>

#include "acst/dag.hpp"

namespace acst {

using SimTime = std::int64_t;  // microseconds

constexpr SimTime kUsPerMs = 1'000;
constexpr SimTime kUsPerSec = 1'000'000;

// Tunables shared by the store, exchange, cluster, and harness. Flags beat a
// config file, which beats these built-ins.
struct Config {
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t fanout = kDefaultFanout;

  // Exchange
  std::size_t window = 16;           // outstanding wants per provider
  std::uint64_t header_bytes = 64;   // fixed per-message overhead
  SimTime stall_timeout = 60 * kUsPerSec;

  // Cluster
  std::uint64_t handshake_bytes = 62'500;
  SimTime handshake_timeout = 5 * kUsPerSec;
  SimTime provider_interval = 30 * kUsPerSec;
  SimTime liveness_timeout = 90 * kUsPerSec;  // 3 x provider_interval

  // Simulator
  std::uint64_t max_events = 20'000'000;

  void validate() const {
    if (chunk_size < 1 || chunk_size > kMaxBlockBytes) {
      throw std::invalid_argument("config: chunk_size out of range");
    }
    if (fanout < 2 || fanout > 20'000) {
      throw std::invalid_argument("config: fanout out of range");
    }
    if (window < 1) {
      throw std::invalid_argument("config: window must be >= 1");
    }
    if (handshake_timeout <= 0 || stall_timeout <= 0 ||
        provider_interval <= 0 || liveness_timeout <= 0) {
      throw std::invalid_argument("config: timeouts must be positive");
    }
  }
};

}  // namespace acst
