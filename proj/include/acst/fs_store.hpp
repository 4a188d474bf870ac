#pragma once

#include <filesystem>
#include <set>
#include <vector>

#include "acst/block_store.hpp"

namespace acst {

// On-disk block layout: one file per block under a two-level fan-out by hex
// digest (blocks/ab/cd/<64 hex>), each file holding a one-byte kind tag ('L'
// or 'N') followed by the block bytes, plus a `pins` manifest of canonical
// root ids, one per line.
class FsStore {
 public:
  explicit FsStore(std::filesystem::path root);

  bool put_block(const Block& block);
  Block get_block(const ContentId& cid) const;
  bool has_block(const ContentId& cid) const;

  void pin(const ContentId& root);
  void unpin(const ContentId& root);
  std::set<ContentId> pins() const;

  // Walks the DAG; collects any closure members that are absent.
  std::vector<ContentId> missing_closure(const ContentId& root) const;

  std::vector<std::uint8_t> assemble(const ContentId& root) const;

  std::size_t gc();

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path block_path(const ContentId& cid) const;
  void save_pins(const std::set<ContentId>& pins) const;
  void collect_missing(const ContentId& cid, std::set<ContentId>& seen,
                       std::vector<ContentId>& missing) const;
  void append_subtree(const ContentId& cid, std::vector<std::uint8_t>& out) const;
  void collect_live(const ContentId& cid, std::set<ContentId>& live) const;

  std::filesystem::path root_;
};

}  // namespace acst
