#include "acst/fs_store.hpp"

#include <fstream>

namespace acst {

namespace fs = std::filesystem;

FsStore::FsStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "blocks");
}

fs::path FsStore::block_path(const ContentId& cid) const {
  const std::string hex = to_hex(cid.digest);
  return root_ / "blocks" / hex.substr(0, 2) / hex.substr(2, 2) / hex;
}

bool FsStore::put_block(const Block& block) {
  if (block.bytes.size() > kMaxBlockBytes) {
    throw BlockTooLargeError(block.bytes.size());
  }
  if (cid_of(block.bytes, block.cid.kind) != block.cid) {
    throw CidMismatchError(block.cid);
  }
  const fs::path path = block_path(block.cid);
  if (fs::exists(path)) {
    return false;
  }
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    const char tag = block.cid.kind == CidKind::Leaf ? 'L' : 'N';
    out.write(&tag, 1);
    out.write(reinterpret_cast<const char*>(block.bytes.data()),
              static_cast<std::streamsize>(block.bytes.size()));
  }
  fs::rename(tmp, path);
  return true;
}

bool FsStore::has_block(const ContentId& cid) const {
  return fs::exists(block_path(cid));
}

Block FsStore::get_block(const ContentId& cid) const {
  const fs::path path = block_path(cid);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw NotFoundError(cid);
  }
  char tag = 0;
  in.read(&tag, 1);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const CidKind kind = tag == 'L' ? CidKind::Leaf : CidKind::Node;
  Block block;
  block.cid = cid;
  block.bytes = std::move(bytes);
  if (kind != cid.kind || cid_of(block.bytes, cid.kind) != cid) {
    throw CidMismatchError(cid);  // on-disk corruption
  }
  return block;
}

std::set<ContentId> FsStore::pins() const {
  std::set<ContentId> out;
  std::ifstream in(root_ / "pins");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      out.insert(ContentId::parse(line));
    }
  }
  return out;
}

void FsStore::save_pins(const std::set<ContentId>& pins) const {
  std::ofstream out(root_ / "pins", std::ios::trunc);
  for (const ContentId& cid : pins) {
    out << cid.to_string() << '\n';
  }
}

void FsStore::pin(const ContentId& root) {
  const auto missing = missing_closure(root);
  if (!missing.empty()) {
    throw MissingBlockError(missing.front());
  }
  auto all = pins();
  all.insert(root);
  save_pins(all);
}

void FsStore::unpin(const ContentId& root) {
  auto all = pins();
  all.erase(root);
  save_pins(all);
}

void FsStore::collect_missing(const ContentId& cid, std::set<ContentId>& seen,
                              std::vector<ContentId>& missing) const {
  if (!seen.insert(cid).second) {
    return;
  }
  if (!has_block(cid)) {
    missing.push_back(cid);
    return;
  }
  if (cid.kind == CidKind::Node) {
    const DagNode node = DagNode::deserialize(get_block(cid).bytes);
    for (const DagLink& link : node.links) {
      collect_missing(link.child, seen, missing);
    }
  }
}

std::vector<ContentId> FsStore::missing_closure(const ContentId& root) const {
  std::set<ContentId> seen;
  std::vector<ContentId> missing;
  collect_missing(root, seen, missing);
  return missing;
}

void FsStore::append_subtree(const ContentId& cid,
                             std::vector<std::uint8_t>& out) const {
  if (!has_block(cid)) {
    throw MissingBlockError(cid);
  }
  const Block block = get_block(cid);
  if (cid.kind == CidKind::Leaf) {
    out.insert(out.end(), block.bytes.begin(), block.bytes.end());
    return;
  }
  const DagNode node = DagNode::deserialize(block.bytes);
  for (const DagLink& link : node.links) {
    append_subtree(link.child, out);
  }
}

std::vector<std::uint8_t> FsStore::assemble(const ContentId& root) const {
  std::vector<std::uint8_t> out;
  append_subtree(root, out);
  return out;
}

void FsStore::collect_live(const ContentId& cid, std::set<ContentId>& live) const {
  if (!live.insert(cid).second || !has_block(cid)) {
    return;
  }
  if (cid.kind == CidKind::Node) {
    const DagNode node = DagNode::deserialize(get_block(cid).bytes);
    for (const DagLink& link : node.links) {
      collect_live(link.child, live);
    }
  }
}

std::size_t FsStore::gc() {
  std::set<ContentId> live;
  for (const ContentId& root : pins()) {
    collect_live(root, live);
  }
  std::set<std::string> live_hex;
  for (const ContentId& cid : live) {
    live_hex.insert(to_hex(cid.digest));
  }

  std::size_t evicted = 0;
  const fs::path blocks = root_ / "blocks";
  if (!fs::exists(blocks)) {
    return 0;
  }
  std::vector<fs::path> dead;
  for (const auto& entry : fs::recursive_directory_iterator(blocks)) {
    if (entry.is_regular_file() &&
        !live_hex.contains(entry.path().filename().string())) {
      dead.push_back(entry.path());
    }
  }
  for (const fs::path& path : dead) {
    fs::remove(path);
    ++evicted;
  }
  return evicted;
}

}  // namespace acst
