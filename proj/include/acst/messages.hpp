#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "acst/cid.hpp"

namespace acst {

using PeerId = std::uint32_t;

using SwarmKey = std::array<std::uint8_t, 32>;

enum class PinState : std::uint8_t { Queued = 0, Pinning = 1, Pinned = 2, Failed = 3 };

const char* pin_state_name(PinState s);

// Block exchange ----------------------------------------------------------

struct WantMsg {
  ContentId cid;
};

// Reserved: a negative Have is modeled as no reply, so nothing emits this.
struct HaveMsg {
  ContentId cid;
};

struct BlockMsg {
  ContentId cid;
  std::vector<std::uint8_t> payload;
};

struct CancelMsg {
  ContentId cid;
};

// Private-cluster membership ----------------------------------------------

struct HandshakeRequest {
  SwarmKey key{};         // key proof; compared against the bootstrap's key
  std::uint64_t modeled_bytes = 0;  // wire size of the manifest + proof
};

struct HandshakeAccept {
  std::vector<PeerId> peer_table;
};

struct HandshakeReject {};

struct MembershipUpdate {
  PeerId joined = 0;
};

struct ProviderAnnounce {
  std::vector<ContentId> roots;  // sorted; full replacement of prior state
};

struct PinCommand {
  ContentId root;
  PeerId origin = 0;  // known holder of the full closure
};

struct PinStatusReport {
  ContentId root;
  PinState state = PinState::Queued;
};

using MessageBody =
    std::variant<WantMsg, HaveMsg, BlockMsg, CancelMsg, HandshakeRequest,
                 HandshakeAccept, HandshakeReject, MembershipUpdate,
                 ProviderAnnounce, PinCommand, PinStatusReport>;

struct Message {
  PeerId src = 0;
  PeerId dst = 0;
  std::uint64_t wire_size = 0;
  MessageBody body;
};

const char* message_kind_name(const MessageBody& body);

// cid carried by the message, when it has one (trace output).
std::optional<ContentId> message_cid(const MessageBody& body);

// Wire sizes: header_bytes plus the payload the message models.
std::uint64_t wire_size_of(const MessageBody& body, std::uint64_t header_bytes);

}  // namespace acst
