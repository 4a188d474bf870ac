#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acst/block_store.hpp"
#include "acst/config.hpp"
#include "acst/exchange.hpp"
#include "acst/messages.hpp"
#include "acst/netsim.hpp"

namespace acst {

enum class MemberState : std::uint8_t {
  Unjoined,
  Handshaking,
  Joined,
  Rejected,
  TimedOut,
  Deactivated,
};

const char* member_state_name(MemberState s);

struct UnknownPinError : std::runtime_error {
  explicit UnknownPinError(const ContentId& root)
      : std::runtime_error("unknown pin: " + root.to_string()) {}
};

struct PinTimelineEntry {
  PeerId peer = 0;
  ContentId root;
  PinState state = PinState::Queued;
  SimTime time = 0;
};

// Origin-side view of one cluster-wide pin.
struct ClusterPinTracking {
  ContentId root;
  std::map<PeerId, PinState> statuses;
  std::vector<PinTimelineEntry> timeline;

  bool complete() const;  // every tracked peer reports Pinned
  bool terminal() const;  // every tracked peer reached Pinned or Failed
};

// One simulated cluster peer: block store, want-list exchange, private-swarm
// membership, pin orchestration. Pure event-handler state machine; every
// transition happens inside simulator dispatch.
class Node : public PeerHandler {
 public:
  Node(Simulator& sim, PeerId id, const Config& cfg, SwarmKey key,
       bool is_bootstrap);

  PeerId id() const { return id_; }
  BlockStore& store() { return store_; }
  const BlockStore& store() const { return store_; }

  // Bootstrap nodes are members from the start; call once to arm the
  // announce/liveness timer.
  void start();

  // Swarm-key handshake against the bootstrap peer.
  void begin_join(PeerId bootstrap);
  MemberState member_state() const { return member_state_; }
  const std::map<PeerId, SimTime>& known_peers() const { return peers_; }

  // Chunks bytes into the local store, builds the DAG, pins the root.
  ContentId add_file(std::span<const std::uint8_t> bytes);

  // Broadcasts a pin command to every joined peer. The origin must hold the
  // full closure already.
  void cluster_pin(const ContentId& root);
  std::map<PeerId, PinState> pin_status(const ContentId& root) const;
  const ClusterPinTracking& pin_tracking(const ContentId& root) const;
  bool has_pin_tracking(const ContentId& root) const;

  // Fetches the DAG closure of root from announced holders.
  void request_dag(const ContentId& root);
  const Transfer* transfer(const ContentId& root) const;

  void deactivate();
  void reactivate();
  bool active() const { return active_; }

  // Ends the measurement: stop announcing so the network can drain.
  void stop_announcements() { announcements_stopped_ = true; }

  // Unauthenticated probe: sends wants without being a member (used to
  // exercise the privacy gate).
  void send_probe_wants(const ContentId& root, const std::vector<PeerId>& targets);

  std::vector<PeerId> holders_of(const ContentId& root) const;

  // PeerHandler
  void on_message(const Message& msg) override;
  void on_timer(TimerTag tag, const std::optional<ContentId>& cid) override;

  // Node-level counters for the metrics report.
  const Ledger& ledger() const { return ledger_; }
  std::uint64_t blocks_served() const { return blocks_served_; }
  std::uint64_t duplicates_received() const { return duplicates_received_; }
  std::uint64_t auth_drops() const { return auth_drops_; }
  std::uint64_t misbehavior() const { return misbehavior_; }
  std::uint64_t block_payload_bytes_received() const {
    return block_payload_bytes_received_;
  }

 private:
  void send(PeerId dst, MessageBody body);
  void broadcast(const MessageBody& body);
  bool authenticated(PeerId src) const;

  void handle_handshake_request(PeerId from, const HandshakeRequest& req);
  void handle_handshake_accept(PeerId from, const HandshakeAccept& acc);
  void handle_membership_update(PeerId from, const MembershipUpdate& upd);
  void handle_announce(PeerId from, const ProviderAnnounce& ann);
  void handle_want(PeerId from, const ContentId& cid);
  void handle_cancel(PeerId from, const ContentId& cid);
  void handle_block(PeerId from, const BlockMsg& blk);
  void handle_pin_command(PeerId from, const PinCommand& cmd);
  void handle_pin_status(PeerId from, const PinStatusReport& rep);

  void announce_tick();
  void liveness_sweep();
  void drop_peer(PeerId peer);

  void add_missing_frontier(Transfer& t, const ContentId& cid);
  void schedule_transfer(Transfer& t);
  void release_assignments(Transfer& t);
  void finish_transfer(Transfer& t, TransferState state);
  void on_transfer_done(const Transfer& t);
  void serve_interest(const ContentId& cid);

  void record_pin_state(ClusterPinTracking& tracking, PeerId peer, PinState state);
  void report_pin_state(const ContentId& root, PinState state);

  Simulator& sim_;
  PeerId id_;
  Config cfg_;
  SwarmKey key_{};
  bool is_bootstrap_ = false;
  bool active_ = true;
  bool announcements_stopped_ = false;
  bool announce_armed_ = false;

  BlockStore store_;
  MemberState member_state_ = MemberState::Unjoined;
  std::map<PeerId, SimTime> peers_;  // member -> last_seen

  std::map<PeerId, std::set<ContentId>> announced_roots_;
  std::map<ContentId, Transfer> transfers_;
  std::map<PeerId, std::size_t> outstanding_;
  std::map<ContentId, std::set<PeerId>> interest_;  // deferred wants

  std::map<ContentId, ClusterPinTracking> pin_tracking_;   // origin side
  std::map<ContentId, PeerId> pin_origin_;                 // member side
  std::map<ContentId, PinState> pin_reported_;             // member side

  Ledger ledger_;
  std::uint64_t blocks_served_ = 0;
  std::uint64_t duplicates_received_ = 0;
  std::uint64_t auth_drops_ = 0;
  std::uint64_t misbehavior_ = 0;
  std::uint64_t block_payload_bytes_received_ = 0;
};

}  // namespace acst
