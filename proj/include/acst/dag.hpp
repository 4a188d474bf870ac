#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "acst/cid.hpp"

namespace acst {

constexpr std::size_t kDefaultChunkSize = 262'144;  // 256 KiB
constexpr std::size_t kDefaultFanout = 174;
constexpr std::size_t kMaxBlockBytes = 1'048'576;  // hard cap on any block

struct Block {
  ContentId cid;
  std::vector<std::uint8_t> bytes;

  static Block leaf(std::vector<std::uint8_t> bytes);
};

// Interior node: ordered child links in file-byte order. All children of one
// node are the same kind (leaves at the lowest interior level, nodes above),
// so the serialization carries a single child-kind tag.
struct DagLink {
  ContentId child;
  std::uint64_t subtree_bytes = 0;
};

struct DagNode {
  std::vector<DagLink> links;

  std::uint64_t total_bytes() const;

  // Canonical layout: u32 BE link count, u8 child kind, then per link a
  // 32-byte digest and u64 BE subtree size. Deterministic, so the node's
  // ContentId is reproducible.
  std::vector<std::uint8_t> serialize() const;
  static DagNode deserialize(std::span<const std::uint8_t> bytes);

  Block to_block() const;
};

// Splits bytes into fixed-size leaves; the last may be short. Empty input
// yields exactly one empty leaf so every file has a ContentId.
std::vector<Block> chunk(std::span<const std::uint8_t> bytes,
                         std::size_t chunk_size = kDefaultChunkSize);

struct DagBuildResult {
  ContentId root;
  std::vector<Block> blocks;  // leaves first, then interior levels bottom-up
  std::uint64_t total_bytes = 0;
};

// Groups leaves fanout-at-a-time into interior nodes, level by level, until a
// single root remains. A single leaf is its own root (no wrapper node).
DagBuildResult build_dag(std::vector<Block> leaves,
                         std::size_t fanout = kDefaultFanout);

}  // namespace acst
