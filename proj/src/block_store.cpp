#include "acst/block_store.hpp"

namespace acst {

bool BlockStore::put_block(const Block& block) {
  if (block.bytes.size() > kMaxBlockBytes) {
    throw BlockTooLargeError(block.bytes.size());
  }
  if (cid_of(block.bytes, block.cid.kind) != block.cid) {
    throw CidMismatchError(block.cid);
  }
  auto [it, inserted] = blocks_.emplace(block.cid, block);
  if (inserted) {
    stored_bytes_ += block.bytes.size();
  }
  return inserted;
}

const Block& BlockStore::get_block(const ContentId& cid) const {
  auto it = blocks_.find(cid);
  if (it == blocks_.end()) {
    throw NotFoundError(cid);
  }
  return it->second;
}

bool BlockStore::has_block(const ContentId& cid) const {
  return blocks_.contains(cid);
}

void BlockStore::collect_closure(const ContentId& cid, std::set<ContentId>& seen,
                                 std::vector<ContentId>& order,
                                 bool throw_on_missing) const {
  if (!seen.insert(cid).second) {
    return;
  }
  auto it = blocks_.find(cid);
  if (it == blocks_.end()) {
    if (throw_on_missing) {
      throw MissingBlockError(cid);
    }
    return;
  }
  order.push_back(cid);
  if (cid.kind == CidKind::Node) {
    const DagNode node = DagNode::deserialize(it->second.bytes);
    for (const DagLink& link : node.links) {
      collect_closure(link.child, seen, order, throw_on_missing);
    }
  }
}

std::vector<ContentId> BlockStore::closure(const ContentId& root) const {
  std::set<ContentId> seen;
  std::vector<ContentId> order;
  collect_closure(root, seen, order, /*throw_on_missing=*/true);
  return order;
}

bool BlockStore::has_closure(const ContentId& root) const {
  try {
    closure(root);
    return true;
  } catch (const MissingBlockError&) {
    return false;
  }
}

void BlockStore::pin(const ContentId& root) {
  closure(root);  // throws MissingBlockError when incomplete
  pins_.insert(root);
}

void BlockStore::unpin(const ContentId& root) { pins_.erase(root); }

bool BlockStore::is_pinned(const ContentId& root) const {
  return pins_.contains(root);
}

std::size_t BlockStore::gc() {
  std::set<ContentId> live;
  std::vector<ContentId> order;
  for (const ContentId& root : pins_) {
    collect_closure(root, live, order, /*throw_on_missing=*/false);
  }
  std::size_t evicted = 0;
  for (auto it = blocks_.begin(); it != blocks_.end();) {
    if (live.contains(it->first)) {
      ++it;
    } else {
      stored_bytes_ -= it->second.bytes.size();
      it = blocks_.erase(it);
      ++evicted;
    }
  }
  return evicted;
}

namespace {
// Emits leaves in file order. Repeated links to one deduplicated block must
// each contribute their bytes, so this walks the tree, not the closure set.
void append_subtree(const BlockStore& store, const ContentId& cid,
                    std::vector<std::uint8_t>& out) {
  if (!store.has_block(cid)) {
    throw MissingBlockError(cid);
  }
  const Block& block = store.get_block(cid);
  if (cid.kind == CidKind::Leaf) {
    out.insert(out.end(), block.bytes.begin(), block.bytes.end());
    return;
  }
  const DagNode node = DagNode::deserialize(block.bytes);
  for (const DagLink& link : node.links) {
    append_subtree(store, link.child, out);
  }
}
}  // namespace

std::vector<std::uint8_t> BlockStore::assemble(const ContentId& root) const {
  std::vector<std::uint8_t> out;
  append_subtree(*this, root, out);
  return out;
}

}  // namespace acst
