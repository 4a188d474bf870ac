#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace acst {

// Identifies a block by the SHA-256 of its bytes. Leaf digests are the plain
// hash of the chunk bytes (standard test vectors apply); interior-node digests
// are computed over a kind-tagged domain so a node can never alias a leaf.
enum class CidKind : std::uint8_t { Leaf = 0, Node = 1 };

struct ContentId {
  std::array<std::uint8_t, 32> digest{};
  CidKind kind = CidKind::Leaf;

  friend bool operator==(const ContentId&, const ContentId&) = default;
  friend auto operator<=>(const ContentId&, const ContentId&) = default;

  // Canonical text form: "L:<64 hex>" or "N:<64 hex>", lowercase.
  std::string to_string() const;
  static ContentId parse(std::string_view text);
};

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);

ContentId cid_of(std::span<const std::uint8_t> bytes, CidKind kind);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace acst
