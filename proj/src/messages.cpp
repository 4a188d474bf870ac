#include "acst/messages.hpp"

namespace acst {

const char* pin_state_name(PinState s) {
  switch (s) {
    case PinState::Queued:
      return "queued";
    case PinState::Pinning:
      return "pinning";
    case PinState::Pinned:
      return "pinned";
    case PinState::Failed:
      return "failed";
  }
  return "?";
}

namespace {
struct KindNameVisitor {
  const char* operator()(const WantMsg&) const { return "want"; }
  const char* operator()(const HaveMsg&) const { return "have"; }
  const char* operator()(const BlockMsg&) const { return "block"; }
  const char* operator()(const CancelMsg&) const { return "cancel"; }
  const char* operator()(const HandshakeRequest&) const { return "hs_request"; }
  const char* operator()(const HandshakeAccept&) const { return "hs_accept"; }
  const char* operator()(const HandshakeReject&) const { return "hs_reject"; }
  const char* operator()(const MembershipUpdate&) const { return "member_update"; }
  const char* operator()(const ProviderAnnounce&) const { return "announce"; }
  const char* operator()(const PinCommand&) const { return "pin_command"; }
  const char* operator()(const PinStatusReport&) const { return "pin_status"; }
};
}  // namespace

const char* message_kind_name(const MessageBody& body) {
  return std::visit(KindNameVisitor{}, body);
}

std::optional<ContentId> message_cid(const MessageBody& body) {
  if (const auto* w = std::get_if<WantMsg>(&body)) return w->cid;
  if (const auto* h = std::get_if<HaveMsg>(&body)) return h->cid;
  if (const auto* b = std::get_if<BlockMsg>(&body)) return b->cid;
  if (const auto* c = std::get_if<CancelMsg>(&body)) return c->cid;
  if (const auto* p = std::get_if<PinCommand>(&body)) return p->root;
  if (const auto* s = std::get_if<PinStatusReport>(&body)) return s->root;
  return std::nullopt;
}

namespace {
struct WireSizeVisitor {
  std::uint64_t header;

  std::uint64_t operator()(const WantMsg&) const { return header; }
  std::uint64_t operator()(const HaveMsg&) const { return header; }
  std::uint64_t operator()(const BlockMsg& m) const {
    return header + m.payload.size();
  }
  std::uint64_t operator()(const CancelMsg&) const { return header; }
  std::uint64_t operator()(const HandshakeRequest& m) const {
    // The manifest + key proof is modeled, not materialized; its size is the
    // whole point (it sets the join threshold).
    return m.modeled_bytes;
  }
  std::uint64_t operator()(const HandshakeAccept& m) const {
    return header + 4 * m.peer_table.size();
  }
  std::uint64_t operator()(const HandshakeReject&) const { return header; }
  std::uint64_t operator()(const MembershipUpdate&) const { return header + 4; }
  std::uint64_t operator()(const ProviderAnnounce& m) const {
    return header + 32 * m.roots.size();
  }
  std::uint64_t operator()(const PinCommand&) const { return header + 32; }
  std::uint64_t operator()(const PinStatusReport&) const { return header + 33; }
};
}  // namespace

std::uint64_t wire_size_of(const MessageBody& body, std::uint64_t header_bytes) {
  return std::visit(WireSizeVisitor{header_bytes}, body);
}

}  // namespace acst
