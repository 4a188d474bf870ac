#include "acst/cid.hpp"

#include <openssl/evp.h>

#include <stdexcept>
#include <vector>

namespace acst {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, 32> out{};
  unsigned int out_len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &out_len,
                 EVP_sha256(), nullptr) != 1 ||
      out_len != out.size()) {
    throw std::runtime_error("sha256: digest computation failed");
  }
  return out;
}

ContentId cid_of(std::span<const std::uint8_t> bytes, CidKind kind) {
  ContentId cid;
  cid.kind = kind;
  if (kind == CidKind::Leaf) {
    cid.digest = sha256(bytes);
  } else {
    // Interior nodes hash a tagged copy so their digests live in a domain
    // separate from raw leaf content.
    std::vector<std::uint8_t> tagged;
    tagged.reserve(bytes.size() + 2);
    tagged.push_back(static_cast<std::uint8_t>('N'));
    tagged.push_back(static_cast<std::uint8_t>(':'));
    tagged.insert(tagged.end(), bytes.begin(), bytes.end());
    cid.digest = sha256(tagged);
  }
  return cid;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

std::string ContentId::to_string() const {
  std::string out = (kind == CidKind::Leaf) ? "L:" : "N:";
  out += to_hex(digest);
  return out;
}

ContentId ContentId::parse(std::string_view text) {
  if (text.size() != 2 + 64 || text[1] != ':' ||
      (text[0] != 'L' && text[0] != 'N')) {
    throw std::invalid_argument("ContentId: expected 'L:<64 hex>' or 'N:<64 hex>'");
  }
  ContentId cid;
  cid.kind = (text[0] == 'L') ? CidKind::Leaf : CidKind::Node;
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_nibble(text[2 + 2 * i]);
    const int lo = hex_nibble(text[3 + 2 * i]);
    if (hi < 0 || lo < 0) {
      throw std::invalid_argument("ContentId: invalid hex digit");
    }
    cid.digest[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return cid;
}

}  // namespace acst
