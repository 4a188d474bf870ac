#include "acst/node.hpp"

#include <algorithm>

namespace acst {

const char* member_state_name(MemberState s) {
  switch (s) {
    case MemberState::Unjoined:
      return "unjoined";
    case MemberState::Handshaking:
      return "handshaking";
    case MemberState::Joined:
      return "joined";
    case MemberState::Rejected:
      return "rejected";
    case MemberState::TimedOut:
      return "timed_out";
    case MemberState::Deactivated:
      return "deactivated";
  }
  return "?";
}

namespace {
int pin_rank(PinState s) {
  switch (s) {
    case PinState::Queued:
      return 0;
    case PinState::Pinning:
      return 1;
    case PinState::Pinned:
    case PinState::Failed:
      return 2;
  }
  return 0;
}
}  // namespace

bool ClusterPinTracking::complete() const {
  for (const auto& [peer, state] : statuses) {
    if (state != PinState::Pinned) {
      return false;
    }
  }
  return true;
}

bool ClusterPinTracking::terminal() const {
  for (const auto& [peer, state] : statuses) {
    if (state != PinState::Pinned && state != PinState::Failed) {
      return false;
    }
  }
  return true;
}

Node::Node(Simulator& sim, PeerId id, const Config& cfg, SwarmKey key,
           bool is_bootstrap)
    : sim_(sim), id_(id), cfg_(cfg), key_(key), is_bootstrap_(is_bootstrap) {
  if (is_bootstrap_) {
    member_state_ = MemberState::Joined;
  }
}

void Node::start() {
  if (member_state_ == MemberState::Joined && !announce_armed_) {
    announce_armed_ = true;
    sim_.schedule_timer(id_, sim_.now() + cfg_.provider_interval,
                        TimerTag::Announce);
  }
}

void Node::begin_join(PeerId bootstrap) {
  if (!active_ || member_state_ == MemberState::Joined) {
    return;
  }
  member_state_ = MemberState::Handshaking;
  HandshakeRequest req;
  req.key = key_;
  req.modeled_bytes = cfg_.handshake_bytes;
  send(bootstrap, req);
  sim_.schedule_timer(id_, sim_.now() + cfg_.handshake_timeout,
                      TimerTag::HandshakeTimeout);
}

ContentId Node::add_file(std::span<const std::uint8_t> bytes) {
  DagBuildResult dag = build_dag(chunk(bytes, cfg_.chunk_size), cfg_.fanout);
  for (Block& block : dag.blocks) {
    store_.put_block(block);
  }
  store_.pin(dag.root);
  return dag.root;
}

void Node::cluster_pin(const ContentId& root) {
  if (member_state_ != MemberState::Joined) {
    throw std::runtime_error("cluster_pin: origin is not a joined member");
  }
  store_.closure(root);  // throws MissingBlockError when incomplete
  if (!store_.is_pinned(root)) {
    store_.pin(root);
  }

  ClusterPinTracking tracking;
  tracking.root = root;
  tracking.statuses[id_] = PinState::Pinned;
  tracking.timeline.push_back({id_, root, PinState::Pinned, sim_.now()});
  for (const auto& [peer, last_seen] : peers_) {
    tracking.statuses[peer] = PinState::Queued;
    tracking.timeline.push_back({peer, root, PinState::Queued, sim_.now()});
  }
  pin_tracking_[root] = std::move(tracking);

  PinCommand cmd;
  cmd.root = root;
  cmd.origin = id_;
  broadcast(cmd);
}

std::map<PeerId, PinState> Node::pin_status(const ContentId& root) const {
  auto it = pin_tracking_.find(root);
  if (it == pin_tracking_.end()) {
    throw UnknownPinError(root);
  }
  return it->second.statuses;
}

const ClusterPinTracking& Node::pin_tracking(const ContentId& root) const {
  auto it = pin_tracking_.find(root);
  if (it == pin_tracking_.end()) {
    throw UnknownPinError(root);
  }
  return it->second;
}

bool Node::has_pin_tracking(const ContentId& root) const {
  return pin_tracking_.contains(root);
}

void Node::request_dag(const ContentId& root) {
  if (store_.has_closure(root)) {
    Transfer t;
    t.root = root;
    t.state = TransferState::Complete;
    t.started_at = t.finished_at = t.last_progress = sim_.now();
    transfers_[root] = std::move(t);
    return;
  }
  if (auto it = transfers_.find(root);
      it != transfers_.end() && it->second.state == TransferState::Active) {
    return;
  }
  Transfer t;
  t.root = root;
  t.started_at = t.last_progress = sim_.now();
  add_missing_frontier(t, root);
  transfers_[root] = std::move(t);
  schedule_transfer(transfers_[root]);
  sim_.schedule_timer(id_, sim_.now() + cfg_.stall_timeout,
                      TimerTag::TransferStall, root);
}

const Transfer* Node::transfer(const ContentId& root) const {
  auto it = transfers_.find(root);
  return it == transfers_.end() ? nullptr : &it->second;
}

void Node::deactivate() {
  active_ = false;
  member_state_ = MemberState::Deactivated;
  sim_.set_peer_active(id_, false);
}

void Node::reactivate() {
  active_ = true;
  member_state_ = MemberState::Unjoined;  // rejoin requires a new handshake
  sim_.set_peer_active(id_, true);
}

void Node::send_probe_wants(const ContentId& root,
                            const std::vector<PeerId>& targets) {
  for (PeerId target : targets) {
    send(target, WantMsg{root});
  }
}

std::vector<PeerId> Node::holders_of(const ContentId& root) const {
  std::vector<PeerId> out;
  for (const auto& [peer, roots] : announced_roots_) {
    if (peer != id_ && peers_.contains(peer) && roots.contains(root)) {
      out.push_back(peer);
    }
  }
  return out;
}

// --- internals -------------------------------------------------------------

void Node::send(PeerId dst, MessageBody body) {
  if (!active_) {
    return;
  }
  Message msg;
  msg.src = id_;
  msg.dst = dst;
  msg.wire_size = wire_size_of(body, cfg_.header_bytes);
  msg.body = std::move(body);

  if (std::holds_alternative<WantMsg>(msg.body) ||
      std::holds_alternative<BlockMsg>(msg.body) ||
      std::holds_alternative<CancelMsg>(msg.body)) {
    LedgerCounters& l = ledger_.with(dst);
    l.bytes_sent += msg.wire_size;
    if (std::holds_alternative<BlockMsg>(msg.body)) {
      l.blocks_sent++;
    }
  }
  sim_.transmit(msg);
}

void Node::broadcast(const MessageBody& body) {
  for (const auto& [peer, last_seen] : peers_) {
    send(peer, body);
  }
}

bool Node::authenticated(PeerId src) const {
  return member_state_ == MemberState::Joined && peers_.contains(src);
}

void Node::on_message(const Message& msg) {
  // Payload accounting happens before any gating so the privacy criterion
  // can assert a hard zero for outsiders.
  if (const auto* blk = std::get_if<BlockMsg>(&msg.body)) {
    block_payload_bytes_received_ += blk->payload.size();
  }

  if (const auto* req = std::get_if<HandshakeRequest>(&msg.body)) {
    handle_handshake_request(msg.src, *req);
    return;
  }
  if (const auto* acc = std::get_if<HandshakeAccept>(&msg.body)) {
    handle_handshake_accept(msg.src, *acc);
    return;
  }
  if (std::holds_alternative<HandshakeReject>(msg.body)) {
    if (member_state_ == MemberState::Handshaking) {
      member_state_ = MemberState::Rejected;
    }
    return;
  }

  // Everything else requires both sides to be swarm members.
  if (!authenticated(msg.src)) {
    auth_drops_++;
    return;
  }

  if (const auto* want = std::get_if<WantMsg>(&msg.body)) {
    ledger_.with(msg.src).bytes_received += msg.wire_size;
    handle_want(msg.src, want->cid);
  } else if (const auto* blk = std::get_if<BlockMsg>(&msg.body)) {
    ledger_.with(msg.src).bytes_received += msg.wire_size;
    handle_block(msg.src, *blk);
  } else if (const auto* cancel = std::get_if<CancelMsg>(&msg.body)) {
    ledger_.with(msg.src).bytes_received += msg.wire_size;
    handle_cancel(msg.src, cancel->cid);
  } else if (const auto* upd = std::get_if<MembershipUpdate>(&msg.body)) {
    handle_membership_update(msg.src, *upd);
  } else if (const auto* ann = std::get_if<ProviderAnnounce>(&msg.body)) {
    handle_announce(msg.src, *ann);
  } else if (const auto* cmd = std::get_if<PinCommand>(&msg.body)) {
    handle_pin_command(msg.src, *cmd);
  } else if (const auto* rep = std::get_if<PinStatusReport>(&msg.body)) {
    handle_pin_status(msg.src, *rep);
  }
}

void Node::on_timer(TimerTag tag, const std::optional<ContentId>& cid) {
  if (!active_) {
    return;
  }
  switch (tag) {
    case TimerTag::HandshakeTimeout:
      if (member_state_ == MemberState::Handshaking) {
        member_state_ = MemberState::TimedOut;
      }
      break;
    case TimerTag::Announce:
      announce_armed_ = false;
      announce_tick();
      break;
    case TimerTag::TransferStall: {
      if (!cid) {
        break;
      }
      auto it = transfers_.find(*cid);
      if (it == transfers_.end() || it->second.state != TransferState::Active) {
        break;
      }
      Transfer& t = it->second;
      if (sim_.now() - t.last_progress >= cfg_.stall_timeout) {
        finish_transfer(t, t.ever_had_holders ? TransferState::Stalled
                                              : TransferState::NoProviders);
      } else {
        sim_.schedule_timer(id_, t.last_progress + cfg_.stall_timeout,
                            TimerTag::TransferStall, t.root);
      }
      break;
    }
    case TimerTag::Generic:
      break;
  }
}

void Node::handle_handshake_request(PeerId from, const HandshakeRequest& req) {
  if (!is_bootstrap_ || member_state_ != MemberState::Joined) {
    return;
  }
  if (req.key != key_) {
    send(from, HandshakeReject{});
    return;
  }
  HandshakeAccept acc;
  acc.peer_table.push_back(id_);
  for (const auto& [peer, last_seen] : peers_) {
    acc.peer_table.push_back(peer);
  }
  // Existing members learn the newcomer before the accept confirms it; both
  // land well inside the same handshake round trip.
  MembershipUpdate upd;
  upd.joined = from;
  broadcast(upd);
  peers_[from] = sim_.now();
  send(from, acc);
}

void Node::handle_handshake_accept(PeerId from, const HandshakeAccept& acc) {
  if (member_state_ != MemberState::Handshaking) {
    return;
  }
  member_state_ = MemberState::Joined;
  peers_[from] = sim_.now();
  for (PeerId peer : acc.peer_table) {
    if (peer != id_) {
      peers_[peer] = sim_.now();
    }
  }
  start();
}

void Node::handle_membership_update(PeerId from, const MembershipUpdate& upd) {
  if (upd.joined != id_) {
    peers_[upd.joined] = sim_.now();
  }
  peers_[from] = sim_.now();
}

void Node::handle_announce(PeerId from, const ProviderAnnounce& ann) {
  peers_[from] = sim_.now();
  std::set<ContentId> fresh(ann.roots.begin(), ann.roots.end());
  std::set<ContentId> previous;
  if (auto it = announced_roots_.find(from); it != announced_roots_.end()) {
    previous = it->second;
  }
  announced_roots_[from] = fresh;

  // A provider that stopped announcing a root no longer serves it: pull back
  // whatever was assigned there and reschedule.
  for (auto& [root, t] : transfers_) {
    if (t.state != TransferState::Active) {
      continue;
    }
    if (previous.contains(root) && !fresh.contains(root)) {
      t.holder_hints.erase(from);
      for (const ContentId& cid : t.wants.assigned_to(from)) {
        t.wants.unassign(cid);
        if (outstanding_[from] > 0) {
          outstanding_[from]--;
        }
      }
    }
    if (fresh.contains(root) || !t.wants.unassigned().empty()) {
      schedule_transfer(t);
    }
  }
}

void Node::handle_want(PeerId from, const ContentId& cid) {
  if (store_.has_block(cid)) {
    BlockMsg blk;
    blk.cid = cid;
    blk.payload = store_.get_block(cid).bytes;
    blocks_served_++;
    send(from, std::move(blk));
    return;
  }
  interest_[cid].insert(from);
}

void Node::handle_cancel(PeerId from, const ContentId& cid) {
  auto it = interest_.find(cid);
  if (it != interest_.end()) {
    it->second.erase(from);
    if (it->second.empty()) {
      interest_.erase(it);
    }
  }
}

void Node::handle_block(PeerId from, const BlockMsg& blk) {
  if (cid_of(blk.payload, blk.cid.kind) != blk.cid) {
    misbehavior_++;
    return;
  }
  ledger_.with(from).blocks_received++;

  Transfer* owner = nullptr;
  for (auto& [root, t] : transfers_) {
    if (t.state == TransferState::Active && t.wants.contains(blk.cid)) {
      owner = &t;
      break;
    }
  }
  if (!owner) {
    if (store_.has_block(blk.cid)) {
      duplicates_received_++;
      ledger_.with(from).duplicate_blocks_received++;
    }
    return;
  }

  Transfer& t = *owner;
  if (auto assignment = t.wants.clear(blk.cid)) {
    if (outstanding_[assignment->provider] > 0) {
      outstanding_[assignment->provider]--;
    }
    if (assignment->provider != from) {
      send(assignment->provider, CancelMsg{blk.cid});
    }
  }

  Block block;
  block.cid = blk.cid;
  block.bytes = blk.payload;
  if (!store_.has_block(blk.cid)) {
    store_.put_block(block);
  }
  t.blocks_received++;
  t.blocks_by_provider[from]++;
  t.last_progress = sim_.now();

  if (blk.cid.kind == CidKind::Node) {
    const DagNode node = DagNode::deserialize(blk.payload);
    for (const DagLink& link : node.links) {
      add_missing_frontier(t, link.child);
    }
  }

  serve_interest(blk.cid);

  if (t.wants.empty()) {
    finish_transfer(t, TransferState::Complete);
  } else {
    schedule_transfer(t);
  }
}

void Node::handle_pin_command(PeerId from, const PinCommand& cmd) {
  if (pin_reported_.contains(cmd.root)) {
    return;
  }
  pin_origin_[cmd.root] = from;
  if (store_.has_closure(cmd.root)) {
    store_.pin(cmd.root);
    pin_reported_[cmd.root] = PinState::Pinned;
    send(from, PinStatusReport{cmd.root, PinState::Pinned});
    return;
  }
  pin_reported_[cmd.root] = PinState::Pinning;
  send(from, PinStatusReport{cmd.root, PinState::Pinning});

  Transfer t;
  t.root = cmd.root;
  t.for_pin = true;
  t.started_at = t.last_progress = sim_.now();
  t.holder_hints.insert(cmd.origin);
  add_missing_frontier(t, cmd.root);
  transfers_[cmd.root] = std::move(t);
  schedule_transfer(transfers_[cmd.root]);
  sim_.schedule_timer(id_, sim_.now() + cfg_.stall_timeout,
                      TimerTag::TransferStall, cmd.root);
}

void Node::handle_pin_status(PeerId from, const PinStatusReport& rep) {
  auto it = pin_tracking_.find(rep.root);
  if (it == pin_tracking_.end()) {
    return;
  }
  record_pin_state(it->second, from, rep.state);
}

void Node::record_pin_state(ClusterPinTracking& tracking, PeerId peer,
                            PinState state) {
  auto it = tracking.statuses.find(peer);
  if (it == tracking.statuses.end()) {
    return;  // not tracked (joined after the pin command)
  }
  if (pin_rank(state) <= pin_rank(it->second)) {
    return;  // statuses never move backward
  }
  it->second = state;
  tracking.timeline.push_back({peer, tracking.root, state, sim_.now()});
}

void Node::announce_tick() {
  if (member_state_ != MemberState::Joined || announcements_stopped_) {
    return;
  }
  liveness_sweep();

  ProviderAnnounce ann;
  ann.roots.assign(store_.pins().begin(), store_.pins().end());
  broadcast(ann);

  announce_armed_ = true;
  sim_.schedule_timer(id_, sim_.now() + cfg_.provider_interval,
                      TimerTag::Announce);
}

void Node::liveness_sweep() {
  std::vector<PeerId> stale;
  for (const auto& [peer, last_seen] : peers_) {
    if (sim_.now() - last_seen > cfg_.liveness_timeout) {
      stale.push_back(peer);
    }
  }
  for (PeerId peer : stale) {
    drop_peer(peer);
  }
}

void Node::drop_peer(PeerId peer) {
  peers_.erase(peer);
  announced_roots_.erase(peer);
  for (auto& [cid, waiting] : interest_) {
    waiting.erase(peer);
  }

  for (auto& [root, t] : transfers_) {
    if (t.state != TransferState::Active) {
      continue;
    }
    t.holder_hints.erase(peer);
    bool touched = false;
    for (const ContentId& cid : t.wants.assigned_to(peer)) {
      t.wants.unassign(cid);
      if (outstanding_[peer] > 0) {
        outstanding_[peer]--;
      }
      touched = true;
    }
    if (touched) {
      schedule_transfer(t);
    }
  }

  for (auto& [root, tracking] : pin_tracking_) {
    record_pin_state(tracking, peer, PinState::Failed);
  }
}

void Node::add_missing_frontier(Transfer& t, const ContentId& cid) {
  if (!store_.has_block(cid)) {
    t.wants.add(cid);
    return;
  }
  if (cid.kind == CidKind::Node) {
    const DagNode node = DagNode::deserialize(store_.get_block(cid).bytes);
    for (const DagLink& link : node.links) {
      add_missing_frontier(t, link.child);
    }
  }
}

void Node::schedule_transfer(Transfer& t) {
  std::vector<PeerId> holders = holders_of(t.root);
  for (PeerId hint : t.holder_hints) {
    if (hint != id_ && peers_.contains(hint) &&
        std::find(holders.begin(), holders.end(), hint) == holders.end()) {
      holders.push_back(hint);
    }
  }
  if (!holders.empty()) {
    t.ever_had_holders = true;
  }
  auto holders_fn = [&holders](const ContentId&) { return holders; };
  const std::vector<WantAssignment> issued = schedule_wants(
      t.wants, holders_fn, outstanding_, cfg_.window, sim_.now(), sim_.rng());
  for (const WantAssignment& a : issued) {
    send(a.provider, WantMsg{a.cid});
  }
}

void Node::release_assignments(Transfer& t) {
  for (const auto& [cid, a] : t.wants.assigned()) {
    if (outstanding_[a.provider] > 0) {
      outstanding_[a.provider]--;
    }
  }
}

void Node::finish_transfer(Transfer& t, TransferState state) {
  t.state = state;
  t.finished_at = sim_.now();
  if (state != TransferState::Complete) {
    release_assignments(t);
  }
  on_transfer_done(t);
}

void Node::on_transfer_done(const Transfer& t) {
  if (!t.for_pin) {
    return;  // a plain GET; the harness polls the transfer state
  }
  auto it = pin_origin_.find(t.root);
  if (it == pin_origin_.end()) {
    return;
  }
  const PeerId report_to = it->second;
  if (t.state == TransferState::Complete) {
    store_.pin(t.root);
    pin_reported_[t.root] = PinState::Pinned;
    send(report_to, PinStatusReport{t.root, PinState::Pinned});
  } else {
    pin_reported_[t.root] = PinState::Failed;
    send(report_to, PinStatusReport{t.root, PinState::Failed});
  }
}

void Node::serve_interest(const ContentId& cid) {
  auto it = interest_.find(cid);
  if (it == interest_.end()) {
    return;
  }
  const std::set<PeerId> waiting = it->second;
  interest_.erase(it);
  for (PeerId peer : waiting) {
    if (authenticated(peer) && store_.has_block(cid)) {
      BlockMsg blk;
      blk.cid = cid;
      blk.payload = store_.get_block(cid).bytes;
      blocks_served_++;
      send(peer, std::move(blk));
    }
  }
}

}  // namespace acst
