#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstddef>
#include <vector>

#include "acst/block_store.hpp"
#include "acst/dag.hpp"
#include "acst/rng.hpp"

using namespace acst;

namespace {

std::vector<std::uint8_t> ascii(const char* s) {
  std::vector<std::uint8_t> out;
  for (const char* p = s; *p; ++p) {
    out.push_back(static_cast<std::uint8_t>(*p));
  }
  return out;
}

// Independent chunk-count oracle: plain ceiling division.
std::size_t expected_chunks(std::size_t len, std::size_t chunk_size) {
  if (len == 0) return 1;
  return (len + chunk_size - 1) / chunk_size;
}

// Independent grouping oracle: how many interior nodes a level-by-level
// build produces, and the total block count including leaves.
std::size_t expected_total_blocks(std::size_t leaves, std::size_t fanout) {
  std::size_t total = leaves;
  std::size_t level = leaves;
  while (level > 1) {
    level = (level + fanout - 1) / fanout;
    total += level;
  }
  return total;
}

}  // namespace

TEST_CASE("cid_of matches the reference sha256 test vectors") {
  // sha256("") and sha256("abc"), the canonical vectors.
  CHECK(cid_of({}, CidKind::Leaf).to_string() ==
        "L:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(cid_of(ascii("abc"), CidKind::Leaf).to_string() ==
        "L:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cid_of is deterministic and kind-separated") {
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    const auto bytes = rng.bytes(rng.next_below(2000));
    CHECK(cid_of(bytes, CidKind::Leaf) == cid_of(bytes, CidKind::Leaf));
    CHECK(cid_of(bytes, CidKind::Leaf).digest !=
          cid_of(bytes, CidKind::Node).digest);
  }
}

TEST_CASE("ContentId text form round-trips and rejects junk") {
  const auto cid = cid_of(ascii("abc"), CidKind::Node);
  CHECK(ContentId::parse(cid.to_string()) == cid);
  CHECK(cid.to_string().substr(0, 2) == "N:");
  CHECK_THROWS_AS(ContentId::parse("X:00"), std::invalid_argument);
  CHECK_THROWS_AS(
      ContentId::parse(
          "L:zz7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
      std::invalid_argument);
  CHECK_THROWS_AS(ContentId::parse("L:00"), std::invalid_argument);
}

TEST_CASE("chunk splits by ceiling division") {
  Rng rng(7);

  SUBCASE("1,000,000 bytes at 262,144") {
    const auto data = rng.bytes(1'000'000);
    const auto leaves = chunk(data, 262'144);
    REQUIRE(leaves.size() == 4);
    CHECK(leaves[0].bytes.size() == 262'144);
    CHECK(leaves[1].bytes.size() == 262'144);
    CHECK(leaves[2].bytes.size() == 262'144);
    CHECK(leaves[3].bytes.size() == 213'568);
  }

  SUBCASE("the 6,930,000-byte test file yields 27 chunks") {
    const auto data = rng.bytes(6'930'000);
    const auto leaves = chunk(data, 262'144);
    CHECK(leaves.size() == 27);
    CHECK(leaves.size() == expected_chunks(6'930'000, 262'144));
  }

  SUBCASE("exactly one chunk_size yields one chunk") {
    const auto data = rng.bytes(262'144);
    CHECK(chunk(data, 262'144).size() == 1);
  }

  SUBCASE("empty input yields one empty leaf") {
    const auto leaves = chunk({}, 262'144);
    REQUIRE(leaves.size() == 1);
    CHECK(leaves[0].bytes.empty());
  }

  SUBCASE("chunk-count law on random lengths") {
    for (int i = 0; i < 200; ++i) {
      const std::size_t len = rng.next_below(3'000'000);
      const std::size_t cs = 1 + rng.next_below(400'000);
      const auto data = rng.bytes(len);
      const auto leaves = chunk(data, cs);
      CHECK(leaves.size() == expected_chunks(len, cs));
      std::vector<std::uint8_t> glued;
      for (const auto& leaf : leaves) {
        glued.insert(glued.end(), leaf.bytes.begin(), leaf.bytes.end());
      }
      CHECK(glued == data);
    }
  }
}

TEST_CASE("build_dag grouping") {
  Rng rng(11);

  SUBCASE("single leaf is its own root") {
    const auto leaves = chunk(rng.bytes(100), 262'144);
    const auto dag = build_dag(leaves, 174);
    CHECK(dag.root == leaves[0].cid);
    CHECK(dag.blocks.size() == 1);
  }

  SUBCASE("27 leaves, fanout 174: one root with 27 links") {
    const auto data = rng.bytes(6'930'000);
    const auto dag = build_dag(chunk(data, 262'144), 174);
    CHECK(dag.root.kind == CidKind::Node);
    CHECK(dag.blocks.size() == 28);
    CHECK(dag.blocks.size() == expected_total_blocks(27, 174));
    const DagNode root = DagNode::deserialize(dag.blocks.back().bytes);
    CHECK(root.links.size() == 27);
    CHECK(root.total_bytes() == 6'930'000);
  }

  SUBCASE("200 leaves, fanout 174: two level-1 nodes plus a root") {
    std::vector<Block> leaves;
    for (int i = 0; i < 200; ++i) {
      leaves.push_back(Block::leaf(rng.bytes(1 + rng.next_below(64))));
    }
    std::uint64_t total = 0;
    for (const auto& leaf : leaves) total += leaf.bytes.size();

    const auto dag = build_dag(leaves, 174);
    CHECK(dag.blocks.size() == 203);
    CHECK(dag.blocks.size() == expected_total_blocks(200, 174));
    const DagNode level1_a = DagNode::deserialize(dag.blocks[200].bytes);
    const DagNode level1_b = DagNode::deserialize(dag.blocks[201].bytes);
    const DagNode root = DagNode::deserialize(dag.blocks[202].bytes);
    CHECK(level1_a.links.size() == 174);
    CHECK(level1_b.links.size() == 26);
    CHECK(root.links.size() == 2);
    CHECK(root.total_bytes() == total);
  }

  SUBCASE("node serialization round-trips") {
    DagNode node;
    for (int i = 0; i < 5; ++i) {
      node.links.push_back({cid_of(rng.bytes(10), CidKind::Leaf),
                            rng.next_below(1'000'000)});
    }
    const auto bytes = node.serialize();
    const DagNode back = DagNode::deserialize(bytes);
    REQUIRE(back.links.size() == node.links.size());
    for (std::size_t i = 0; i < node.links.size(); ++i) {
      CHECK(back.links[i].child == node.links[i].child);
      CHECK(back.links[i].subtree_bytes == node.links[i].subtree_bytes);
    }
    CHECK_THROWS(DagNode::deserialize(std::vector<std::uint8_t>{1, 2, 3}));
  }
}

TEST_CASE("assemble round-trips chunk + build_dag") {
  Rng rng(13);
  const std::size_t cs = 262'144;
  const std::vector<std::size_t> lengths = {0, 1, cs - 1, cs, cs + 1, 3'500'000};

  for (const std::size_t len : lengths) {
    CAPTURE(len);
    const auto data = rng.bytes(len);
    const auto dag = build_dag(chunk(data, cs), 174);
    BlockStore store;
    for (const auto& block : dag.blocks) {
      store.put_block(block);
    }
    CHECK(store.assemble(dag.root) == data);
  }

  SUBCASE("repeated identical chunks keep their multiplicity") {
    std::vector<std::uint8_t> data(2 * cs + 17, 0xAB);
    const auto dag = build_dag(chunk(data, cs), 174);
    BlockStore store;
    for (const auto& block : dag.blocks) {
      store.put_block(block);
    }
    CHECK(store.assemble(dag.root) == data);
  }

  SUBCASE("missing leaf raises MissingBlock") {
    const auto data = rng.bytes(cs + 1);
    const auto dag = build_dag(chunk(data, cs), 174);
    BlockStore store;
    for (std::size_t i = 1; i < dag.blocks.size(); ++i) {
      store.put_block(dag.blocks[i]);
    }
    CHECK_THROWS_AS(store.assemble(dag.root), MissingBlockError);
  }

  SUBCASE("small random cases, varying chunk size and fanout") {
    for (int i = 0; i < 200; ++i) {
      const std::size_t len = rng.next_below(40'000);
      const std::size_t chunk_size = 1 + rng.next_below(5'000);
      const std::size_t fanout = 2 + rng.next_below(10);
      const auto data = rng.bytes(len);
      const auto dag = build_dag(chunk(data, chunk_size), fanout);
      BlockStore store;
      for (const auto& block : dag.blocks) {
        store.put_block(block);
      }
      CHECK(store.assemble(dag.root) == data);
    }
  }
}

TEST_CASE("put_block / get_block") {
  BlockStore store;
  Rng rng(17);
  const Block b = Block::leaf(rng.bytes(1'000));

  CHECK(store.put_block(b));
  CHECK(store.get_block(b.cid).bytes == b.bytes);

  SUBCASE("second put is a no-op") {
    const auto before = store.stored_bytes();
    CHECK_FALSE(store.put_block(b));
    CHECK(store.stored_bytes() == before);
  }

  SUBCASE("unknown cid raises NotFound") {
    CHECK_THROWS_AS(store.get_block(cid_of(rng.bytes(4), CidKind::Leaf)),
                    NotFoundError);
  }

  SUBCASE("a single flipped bit is rejected") {
    for (int i = 0; i < 50; ++i) {
      Block bad = Block::leaf(rng.bytes(200 + rng.next_below(800)));
      const std::size_t byte = rng.next_below(bad.bytes.size());
      bad.bytes[byte] ^= static_cast<std::uint8_t>(1u << rng.next_below(8));
      CHECK_THROWS_AS(store.put_block(bad), CidMismatchError);
    }
  }

  SUBCASE("oversized blocks are rejected") {
    Block big = Block::leaf(rng.bytes(kMaxBlockBytes + 1));
    CHECK_THROWS_AS(store.put_block(big), BlockTooLargeError);
  }
}

TEST_CASE("pin / unpin / gc") {
  Rng rng(23);
  BlockStore store;

  SUBCASE("gc on an empty store evicts nothing") { CHECK(store.gc() == 0); }

  SUBCASE("pinned closure survives gc; unpinning releases it") {
    const auto data = rng.bytes(6'930'000);
    const auto dag = build_dag(chunk(data, 262'144), 174);
    for (const auto& block : dag.blocks) {
      store.put_block(block);
    }
    store.pin(dag.root);
    CHECK(store.gc() == 0);
    CHECK(store.block_count() == 28);
    CHECK(store.assemble(dag.root) == data);

    store.unpin(dag.root);
    CHECK(store.gc() == 28);
    CHECK(store.block_count() == 0);
    CHECK(store.stored_bytes() == 0);
  }

  SUBCASE("pin with incomplete closure fails") {
    const auto data = rng.bytes(600'000);
    const auto dag = build_dag(chunk(data, 262'144), 174);
    for (std::size_t i = 1; i < dag.blocks.size(); ++i) {
      store.put_block(dag.blocks[i]);
    }
    CHECK_THROWS_AS(store.pin(dag.root), MissingBlockError);
  }

  SUBCASE("adding the same file twice does not grow the store") {
    const auto data = rng.bytes(1'000'000);
    const auto dag1 = build_dag(chunk(data, 262'144), 174);
    for (const auto& block : dag1.blocks) {
      store.put_block(block);
    }
    const auto bytes_after_first = store.stored_bytes();
    const auto dag2 = build_dag(chunk(data, 262'144), 174);
    CHECK(dag2.root == dag1.root);
    for (const auto& block : dag2.blocks) {
      CHECK_FALSE(store.put_block(block));
    }
    CHECK(store.stored_bytes() == bytes_after_first);
  }
}

TEST_CASE("gc safety under random op sequences") {
  Rng rng(31);
  BlockStore store;
  std::vector<DagBuildResult> files;
  std::vector<bool> pinned;

  for (int i = 0; i < 8; ++i) {
    files.push_back(build_dag(chunk(rng.bytes(500 + rng.next_below(40'000)), 4'096), 5));
    pinned.push_back(false);
  }

  int ops = 0;
  for (int round = 0; round < 1200; ++round, ++ops) {
    const std::size_t which = rng.next_below(files.size());
    auto& dag = files[which];
    switch (rng.next_below(4)) {
      case 0:  // (re-)add all blocks
        for (const auto& block : dag.blocks) {
          if (!store.has_block(block.cid)) {
            store.put_block(block);
          }
        }
        break;
      case 1:  // pin when closure present
        if (store.has_closure(dag.root)) {
          store.pin(dag.root);
          pinned[which] = true;
        }
        break;
      case 2:
        store.unpin(dag.root);
        pinned[which] = false;
        break;
      case 3:
        store.gc();
        break;
    }
    // Every pinned root must stay fully retrievable after any op.
    std::uint64_t expect_bytes = 0;
    std::set<ContentId> counted;
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (pinned[i]) {
        for (const ContentId& cid : store.closure(files[i].root)) {
          CHECK(store.has_block(cid));
          if (counted.insert(cid).second) {
            expect_bytes += store.get_block(cid).bytes.size();
          }
        }
      }
    }
    CHECK(store.stored_bytes() >= expect_bytes);
  }
  CHECK(ops >= 1000);
}
