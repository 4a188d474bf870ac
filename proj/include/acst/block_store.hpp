#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "acst/dag.hpp"

namespace acst {

struct NotFoundError : std::runtime_error {
  explicit NotFoundError(const ContentId& cid)
      : std::runtime_error("block not found: " + cid.to_string()), cid(cid) {}
  ContentId cid;
};

struct CidMismatchError : std::runtime_error {
  explicit CidMismatchError(const ContentId& cid)
      : std::runtime_error("block bytes do not hash to " + cid.to_string()),
        cid(cid) {}
  ContentId cid;
};

struct MissingBlockError : std::runtime_error {
  explicit MissingBlockError(const ContentId& cid)
      : std::runtime_error("DAG closure incomplete, missing " + cid.to_string()),
        cid(cid) {}
  ContentId cid;
};

struct BlockTooLargeError : std::runtime_error {
  explicit BlockTooLargeError(std::size_t size)
      : std::runtime_error("block exceeds max block size: " +
                           std::to_string(size)) {}
};

// In-memory block storage with pin-aware garbage collection. Single writer;
// the simulator drives it from one thread.
class BlockStore {
 public:
  // Verifies the cid against the bytes before storing. Returns false (and
  // leaves the store unchanged) when the block is already present.
  bool put_block(const Block& block);

  const Block& get_block(const ContentId& cid) const;
  bool has_block(const ContentId& cid) const;

  // Pinning requires the root's full closure to be local already.
  void pin(const ContentId& root);
  void unpin(const ContentId& root);
  bool is_pinned(const ContentId& root) const;

  // Removes every block unreachable from a pinned root; returns the count.
  std::size_t gc();

  // Full DAG closure of root (root included), in deterministic walk order.
  // Throws MissingBlockError when a member is absent.
  std::vector<ContentId> closure(const ContentId& root) const;

  // True when every closure member of root is present.
  bool has_closure(const ContentId& root) const;

  // Reassembles the original file bytes from a fully local DAG.
  std::vector<std::uint8_t> assemble(const ContentId& root) const;

  std::uint64_t stored_bytes() const { return stored_bytes_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::set<ContentId>& pins() const { return pins_; }

 private:
  void collect_closure(const ContentId& cid, std::set<ContentId>& seen,
                       std::vector<ContentId>& order, bool throw_on_missing) const;

  std::map<ContentId, Block> blocks_;
  std::set<ContentId> pins_;
  std::uint64_t stored_bytes_ = 0;
};

}  // namespace acst
