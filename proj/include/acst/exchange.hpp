#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "acst/config.hpp"
#include "acst/messages.hpp"
#include "acst/rng.hpp"

namespace acst {

struct WantAssignment {
  ContentId cid;
  PeerId provider = 0;
  SimTime issued_at = 0;
};

// The set of blocks a peer still needs. A cid is either unassigned (queued,
// FIFO) or assigned to exactly one provider; it leaves both on receipt.
class WantList {
 public:
  // False when the cid is already tracked.
  bool add(const ContentId& cid);

  bool contains(const ContentId& cid) const { return needed_.contains(cid); }
  bool empty() const { return needed_.empty(); }
  std::size_t size() const { return needed_.size(); }

  void assign(const ContentId& cid, PeerId provider, SimTime now);

  // Removes the cid entirely; returns the assignment it held, if any.
  std::optional<WantAssignment> clear(const ContentId& cid);

  // Puts an assigned cid back on the unassigned queue (provider lost).
  void unassign(const ContentId& cid);

  std::vector<ContentId> assigned_to(PeerId provider) const;
  const std::map<ContentId, WantAssignment>& assigned() const { return assigned_; }

  // Unassigned cids in FIFO order.
  std::vector<ContentId> unassigned() const;

 private:
  std::set<ContentId> needed_;
  std::map<ContentId, WantAssignment> assigned_;
  std::deque<ContentId> queue_;  // may hold stale entries; filtered lazily
};

// Per-remote transfer accounting.
struct LedgerCounters {
  std::uint64_t blocks_sent = 0;
  std::uint64_t blocks_received = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t duplicate_blocks_received = 0;
};

class Ledger {
 public:
  LedgerCounters& with(PeerId peer) { return peers_[peer]; }
  const std::map<PeerId, LedgerCounters>& peers() const { return peers_; }
  LedgerCounters totals() const;

 private:
  std::map<PeerId, LedgerCounters> peers_;
};

// Assigns unassigned wants to providers chosen uniformly at random among the
// eligible holders, keeping at most `window` outstanding per provider.
// Work-conserving when re-run after every slot release or holder change.
std::vector<WantAssignment> schedule_wants(
    WantList& wants,
    const std::function<std::vector<PeerId>(const ContentId&)>& holders_of,
    std::map<PeerId, std::size_t>& outstanding, std::size_t window,
    SimTime now, Rng& rng);

enum class TransferState : std::uint8_t {
  Active,
  Complete,
  NoProviders,
  Stalled,
};

const char* transfer_state_name(TransferState s);

// One DAG fetch in flight: walks the DAG top-down, wanting every missing
// block until the closure is local.
struct Transfer {
  ContentId root;
  WantList wants;
  TransferState state = TransferState::Active;
  SimTime started_at = 0;
  SimTime finished_at = 0;
  SimTime last_progress = 0;
  bool ever_had_holders = false;
  bool for_pin = false;  // fetch driven by a cluster pin command
  std::set<PeerId> holder_hints;  // e.g. the pin origin
  std::map<PeerId, std::uint64_t> blocks_by_provider;
  std::uint64_t blocks_received = 0;
};

}  // namespace acst
