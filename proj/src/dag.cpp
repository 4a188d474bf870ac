#include "acst/dag.hpp"

#include <stdexcept>

namespace acst {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

std::uint32_t get_u32_be(std::span<const std::uint8_t> in, std::size_t at) {
  return (static_cast<std::uint32_t>(in[at]) << 24) |
         (static_cast<std::uint32_t>(in[at + 1]) << 16) |
         (static_cast<std::uint32_t>(in[at + 2]) << 8) |
         static_cast<std::uint32_t>(in[at + 3]);
}

std::uint64_t get_u64_be(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    v = (v << 8) | in[at + i];
  }
  return v;
}

}  // namespace

Block Block::leaf(std::vector<std::uint8_t> bytes) {
  Block b;
  b.cid = cid_of(bytes, CidKind::Leaf);
  b.bytes = std::move(bytes);
  return b;
}

std::uint64_t DagNode::total_bytes() const {
  std::uint64_t total = 0;
  for (const DagLink& link : links) {
    total += link.subtree_bytes;
  }
  return total;
}

std::vector<std::uint8_t> DagNode::serialize() const {
  if (links.empty()) {
    throw std::invalid_argument("DagNode: interior nodes must have links");
  }
  const CidKind child_kind = links.front().child.kind;
  for (const DagLink& link : links) {
    if (link.child.kind != child_kind) {
      throw std::invalid_argument("DagNode: mixed child kinds");
    }
  }
  std::vector<std::uint8_t> out;
  out.reserve(5 + links.size() * 40);
  put_u32_be(out, static_cast<std::uint32_t>(links.size()));
  out.push_back(static_cast<std::uint8_t>(child_kind));
  for (const DagLink& link : links) {
    out.insert(out.end(), link.child.digest.begin(), link.child.digest.end());
    put_u64_be(out, link.subtree_bytes);
  }
  return out;
}

DagNode DagNode::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 5) {
    throw std::runtime_error("DagNode: truncated header");
  }
  const std::uint32_t count = get_u32_be(bytes, 0);
  const std::uint8_t kind_raw = bytes[4];
  if (count == 0) {
    throw std::runtime_error("DagNode: zero links");
  }
  if (kind_raw > 1) {
    throw std::runtime_error("DagNode: bad child kind");
  }
  if (bytes.size() != 5 + static_cast<std::size_t>(count) * 40) {
    throw std::runtime_error("DagNode: length mismatch");
  }
  DagNode node;
  node.links.reserve(count);
  const CidKind child_kind = static_cast<CidKind>(kind_raw);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = 5 + static_cast<std::size_t>(i) * 40;
    DagLink link;
    link.child.kind = child_kind;
    for (std::size_t j = 0; j < 32; ++j) {
      link.child.digest[j] = bytes[at + j];
    }
    link.subtree_bytes = get_u64_be(bytes, at + 32);
    node.links.push_back(link);
  }
  return node;
}

Block DagNode::to_block() const {
  Block b;
  b.bytes = serialize();
  b.cid = cid_of(b.bytes, CidKind::Node);
  return b;
}

std::vector<Block> chunk(std::span<const std::uint8_t> bytes,
                         std::size_t chunk_size) {
  if (chunk_size == 0) {
    throw std::invalid_argument("chunk: chunk_size must be >= 1");
  }
  std::vector<Block> leaves;
  if (bytes.empty()) {
    leaves.push_back(Block::leaf({}));
    return leaves;
  }
  leaves.reserve((bytes.size() + chunk_size - 1) / chunk_size);
  for (std::size_t at = 0; at < bytes.size(); at += chunk_size) {
    const std::size_t len = std::min(chunk_size, bytes.size() - at);
    leaves.push_back(Block::leaf(
        std::vector<std::uint8_t>(bytes.begin() + at, bytes.begin() + at + len)));
  }
  return leaves;
}

DagBuildResult build_dag(std::vector<Block> leaves, std::size_t fanout) {
  if (fanout < 2) {
    throw std::invalid_argument("build_dag: fanout must be >= 2");
  }
  if (leaves.empty()) {
    throw std::invalid_argument("build_dag: need at least one leaf");
  }

  DagBuildResult result;
  std::vector<DagLink> level;
  level.reserve(leaves.size());
  for (const Block& leaf : leaves) {
    result.total_bytes += leaf.bytes.size();
    level.push_back(DagLink{leaf.cid, leaf.bytes.size()});
  }
  result.blocks = std::move(leaves);

  if (level.size() == 1) {
    result.root = level.front().child;
    return result;
  }

  while (level.size() > 1) {
    std::vector<DagLink> next;
    next.reserve((level.size() + fanout - 1) / fanout);
    for (std::size_t at = 0; at < level.size(); at += fanout) {
      const std::size_t len = std::min(fanout, level.size() - at);
      DagNode node;
      node.links.assign(level.begin() + at, level.begin() + at + len);
      Block block = node.to_block();
      next.push_back(DagLink{block.cid, node.total_bytes()});
      result.blocks.push_back(std::move(block));
    }
    level = std::move(next);
  }
  result.root = level.front().child;
  return result;
}

}  // namespace acst
