#include "acst/exchange.hpp"

#include <algorithm>

namespace acst {

bool WantList::add(const ContentId& cid) {
  if (!needed_.insert(cid).second) {
    return false;
  }
  queue_.push_back(cid);
  return true;
}

void WantList::assign(const ContentId& cid, PeerId provider, SimTime now) {
  assigned_[cid] = WantAssignment{cid, provider, now};
}

std::optional<WantAssignment> WantList::clear(const ContentId& cid) {
  if (needed_.erase(cid) == 0) {
    return std::nullopt;
  }
  auto it = assigned_.find(cid);
  if (it == assigned_.end()) {
    return std::nullopt;
  }
  WantAssignment a = it->second;
  assigned_.erase(it);
  return a;
}

void WantList::unassign(const ContentId& cid) {
  auto it = assigned_.find(cid);
  if (it == assigned_.end()) {
    return;
  }
  assigned_.erase(it);
  queue_.push_back(cid);
}

std::vector<ContentId> WantList::assigned_to(PeerId provider) const {
  std::vector<ContentId> out;
  for (const auto& [cid, a] : assigned_) {
    if (a.provider == provider) {
      out.push_back(cid);
    }
  }
  return out;
}

std::vector<ContentId> WantList::unassigned() const {
  std::vector<ContentId> out;
  std::set<ContentId> seen;
  for (const ContentId& cid : queue_) {
    if (needed_.contains(cid) && !assigned_.contains(cid) &&
        seen.insert(cid).second) {
      out.push_back(cid);
    }
  }
  return out;
}

LedgerCounters Ledger::totals() const {
  LedgerCounters t;
  for (const auto& [peer, c] : peers_) {
    t.blocks_sent += c.blocks_sent;
    t.blocks_received += c.blocks_received;
    t.bytes_sent += c.bytes_sent;
    t.bytes_received += c.bytes_received;
    t.duplicate_blocks_received += c.duplicate_blocks_received;
  }
  return t;
}

std::vector<WantAssignment> schedule_wants(
    WantList& wants,
    const std::function<std::vector<PeerId>(const ContentId&)>& holders_of,
    std::map<PeerId, std::size_t>& outstanding, std::size_t window,
    SimTime now, Rng& rng) {
  std::vector<WantAssignment> issued;
  for (const ContentId& cid : wants.unassigned()) {
    std::vector<PeerId> eligible;
    for (PeerId p : holders_of(cid)) {
      if (outstanding[p] < window) {
        eligible.push_back(p);
      }
    }
    if (eligible.empty()) {
      continue;
    }
    std::sort(eligible.begin(), eligible.end());
    const PeerId provider = rng.pick(eligible);
    outstanding[provider]++;
    wants.assign(cid, provider, now);
    issued.push_back(WantAssignment{cid, provider, now});
  }
  return issued;
}

const char* transfer_state_name(TransferState s) {
  switch (s) {
    case TransferState::Active:
      return "active";
    case TransferState::Complete:
      return "complete";
    case TransferState::NoProviders:
      return "no_providers";
    case TransferState::Stalled:
      return "stalled";
  }
  return "?";
}

}  // namespace acst
