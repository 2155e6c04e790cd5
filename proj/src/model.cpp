// Copyright 2026 The combex Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "combex/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "combex/market.hpp"

namespace combex {

Outcome Outcome::empty_for(const ExchangeInstance& instance) {
  Outcome o;
  o.buyer_bid.assign(instance.buyers.size(), std::nullopt);
  o.seller_ask.assign(instance.sellers.size(), std::nullopt);
  o.buyer_payment.assign(instance.buyers.size(), 0.0);
  o.seller_receipt.assign(instance.sellers.size(), 0.0);
  return o;
}

std::string Deviation::fingerprint() const {
  std::ostringstream os;
  for (const auto& t : buyer_trades) os << 'b' << t.buyer << ':' << t.bid << '|';
  for (const auto& t : seller_trades) os << 's' << t.seller << ':' << t.ask << '|';
  return os.str();
}

namespace {

void check_bundle(const std::string& owner, const PackageBid& bid,
                  const std::unordered_set<std::string>& items, bool is_ask,
                  std::vector<std::string>& out) {
  const char* kind = is_ask ? "ask" : "bid";
  if (bid.bundle.empty()) out.push_back(owner + ": empty " + kind + " bundle");
  std::set<std::string> seen;
  for (const auto& it : bid.bundle) {
    if (!items.contains(it)) out.push_back(owner + ": " + kind + " references unknown item '" + it + "'");
    if (!seen.insert(it).second) out.push_back(owner + ": duplicate item '" + it + "' in " + kind);
  }
  if (!(bid.value >= 0.0) || !std::isfinite(bid.value)) {
    out.push_back(owner + ": " + kind + " value must be finite and non-negative");
  }
}

void check_unique_bundles(const std::string& owner, const std::vector<PackageBid>& bids,
                          std::vector<std::string>& out) {
  std::set<std::set<std::string>> seen;
  for (const auto& b : bids) {
    std::set<std::string> key(b.bundle.begin(), b.bundle.end());
    if (!seen.insert(key).second) out.push_back(owner + ": duplicate bundle");
  }
}

}  // namespace

std::vector<std::string> validate(const ExchangeInstance& instance) {
  std::vector<std::string> out;
  std::unordered_set<std::string> items;
  for (const auto& it : instance.items) {
    if (it.empty()) out.push_back("item with empty id");
    if (!items.insert(it).second) out.push_back("duplicate item id '" + it + "'");
  }

  std::unordered_set<std::string> bidder_ids;
  for (const auto& b : instance.buyers) {
    if (b.id.empty()) out.push_back("buyer with empty id");
    if (!bidder_ids.insert(b.id).second) out.push_back("duplicate bidder id '" + b.id + "'");
    if (!(b.budget >= 0.0)) out.push_back("buyer " + b.id + ": negative budget");
    for (const auto& bid : b.bids) check_bundle("buyer " + b.id, bid, items, false, out);
    check_unique_bundles("buyer " + b.id, b.bids, out);
  }

  std::unordered_map<std::string, std::string> endowed_by;
  for (const auto& s : instance.sellers) {
    if (s.id.empty()) out.push_back("seller with empty id");
    if (!bidder_ids.insert(s.id).second) out.push_back("duplicate bidder id '" + s.id + "'");
    std::unordered_set<std::string> endowment;
    for (const auto& it : s.endowment) {
      if (!items.contains(it)) out.push_back("seller " + s.id + ": endowment references unknown item '" + it + "'");
      endowment.insert(it);
      auto [pos, fresh] = endowed_by.emplace(it, s.id);
      if (!fresh && pos->second != s.id) {
        out.push_back("item '" + it + "' endowed by both " + pos->second + " and " + s.id);
      }
    }
    for (const auto& ask : s.asks) {
      check_bundle("seller " + s.id, ask, items, true, out);
      for (const auto& it : ask.bundle) {
        if (!endowment.contains(it)) out.push_back("seller " + s.id + ": ask item '" + it + "' outside endowment");
      }
    }
    check_unique_bundles("seller " + s.id, s.asks, out);
  }
  for (const auto& it : instance.items) {
    if (!endowed_by.contains(it)) out.push_back("item '" + it + "' is not endowed by any seller");
  }
  return out;
}

std::vector<std::string> check_outcome(const ExchangeInstance& instance, const Outcome& outcome) {
  std::vector<std::string> out;
  const std::size_t nb = instance.buyers.size();
  const std::size_t ns = instance.sellers.size();
  if (outcome.buyer_bid.size() != nb || outcome.buyer_payment.size() != nb ||
      outcome.seller_ask.size() != ns || outcome.seller_receipt.size() != ns) {
    out.push_back("outcome shape does not match instance");
    return out;
  }
  const Market market(instance);
  std::vector<int> demand(instance.items.size(), 0);
  std::vector<int> supply(instance.items.size(), 0);
  Money paid = 0.0;
  Money received = 0.0;

  for (std::size_t i = 0; i < nb; ++i) {
    const auto& buyer = instance.buyers[i];
    const Money p = outcome.buyer_payment[i];
    if (!std::isfinite(p)) {
      out.push_back("BC: buyer " + buyer.id + " payment not finite");
      continue;
    }
    paid += p;
    if (!outcome.buyer_bid[i]) {
      if (std::abs(p) > kFeasTol) out.push_back("BC: non-winning buyer " + buyer.id + " pays " + std::to_string(p));
      continue;
    }
    const std::size_t k = *outcome.buyer_bid[i];
    if (k >= buyer.bids.size()) {
      out.push_back("XOR-B: buyer " + buyer.id + " bid index out of range");
      continue;
    }
    for (int item : market.bids()[market.bid_index(i, k)].items) ++demand[item];
    const Money cap = capped_value(buyer, buyer.bids[k]);
    if (p > cap + kFeasTol) out.push_back("BC: buyer " + buyer.id + " pays above min(budget, value)");
    if (p < -kFeasTol) out.push_back("BC: buyer " + buyer.id + " has negative payment");
  }
  for (std::size_t j = 0; j < ns; ++j) {
    const auto& seller = instance.sellers[j];
    const Money q = outcome.seller_receipt[j];
    if (!std::isfinite(q)) {
      out.push_back("IRS: seller " + seller.id + " receipt not finite");
      continue;
    }
    received += q;
    if (!outcome.seller_ask[j]) {
      if (std::abs(q) > kFeasTol) out.push_back("IRS: non-trading seller " + seller.id + " receives " + std::to_string(q));
      continue;
    }
    const std::size_t k = *outcome.seller_ask[j];
    if (k >= seller.asks.size()) {
      out.push_back("XOR-S: seller " + seller.id + " ask index out of range");
      continue;
    }
    for (int item : market.asks()[market.ask_index(j, k)].items) ++supply[item];
    if (q < seller.asks[k].value - kFeasTol) out.push_back("IRS: seller " + seller.id + " receives below reservation");
  }
  for (std::size_t k = 0; k < instance.items.size(); ++k) {
    if (demand[k] > supply[k]) out.push_back("Supply: item '" + instance.items[k] + "' over-allocated");
  }
  if (std::abs(paid - received) > kFeasTol) out.push_back("BB: payments and receipts differ");
  return out;
}

std::vector<Money> buyer_payoffs(const ExchangeInstance& instance, const Outcome& outcome) {
  std::vector<Money> out(instance.buyers.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (outcome.buyer_bid[i]) {
      out[i] = instance.buyers[i].bids[*outcome.buyer_bid[i]].value - outcome.buyer_payment[i];
    }
  }
  return out;
}

std::vector<Money> seller_payoffs(const ExchangeInstance& instance, const Outcome& outcome) {
  std::vector<Money> out(instance.sellers.size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (outcome.seller_ask[j]) {
      out[j] = outcome.seller_receipt[j] - instance.sellers[j].asks[*outcome.seller_ask[j]].value;
    }
  }
  return out;
}

void require_valid(const ExchangeInstance& instance) {
  auto errors = validate(instance);
  if (errors.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ValidationError(msg);
}

std::map<std::string, Money> payoffs(const ExchangeInstance& instance, const Outcome& outcome) {
  auto violations = check_outcome(instance, outcome);
  if (!violations.empty()) {
    std::string msg = "invalid outcome:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  std::map<std::string, Money> out;
  const auto pb = buyer_payoffs(instance, outcome);
  const auto ps = seller_payoffs(instance, outcome);
  for (std::size_t i = 0; i < pb.size(); ++i) out[instance.buyers[i].id] = pb[i];
  for (std::size_t j = 0; j < ps.size(); ++j) out[instance.sellers[j].id] = ps[j];
  return out;
}

Money welfare(const ExchangeInstance& instance, const Outcome& outcome) {
  Money w = 0.0;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    if (outcome.buyer_bid[i]) w += instance.buyers[i].bids[*outcome.buyer_bid[i]].value;
  }
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    if (outcome.seller_ask[j]) w -= instance.sellers[j].asks[*outcome.seller_ask[j]].value;
  }
  return w;
}

Coalition grand_coalition(const ExchangeInstance& instance) {
  Coalition c;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) c.buyers.push_back(i);
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) c.sellers.push_back(j);
  return c;
}

Money max_bid_value(const Buyer& buyer) {
  Money m = 0.0;
  for (const auto& b : buyer.bids) m = std::max(m, b.value);
  return m;
}

// ---------------------------------------------------------------------------

Market::Market(const ExchangeInstance& instance) : instance_(&instance) {
  for (std::size_t k = 0; k < instance.items.size(); ++k) item_ids_.emplace(instance.items[k], static_cast<int>(k));
  item_owner_.assign(instance.items.size(), -1);
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    for (const auto& it : instance.sellers[j].endowment) {
      const int k = item_index(it);
      if (k >= 0) item_owner_[k] = static_cast<int>(j);
    }
  }
  auto to_items = [this](const PackageBid& bid) {
    std::vector<int> items;
    items.reserve(bid.bundle.size());
    for (const auto& it : bid.bundle) {
      const int k = item_index(it);
      if (k < 0) throw ValidationError("bundle references unknown item '" + it + "'");
      items.push_back(k);
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return items;
  };

  buyer_bids_.resize(instance.buyers.size());
  max_value_.assign(instance.buyers.size(), 0.0);
  payment_bound_ = 1.0;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    const auto& b = instance.buyers[i];
    for (std::size_t k = 0; k < b.bids.size(); ++k) {
      buyer_bids_[i].push_back(bids_.size());
      bids_.push_back(Offer{i, k, to_items(b.bids[k]), b.bids[k].value});
      max_value_[i] = std::max(max_value_[i], b.bids[k].value);
    }
    payment_bound_ += std::min(b.budget, max_value_[i]);
  }
  seller_asks_.resize(instance.sellers.size());
  max_reservation_.assign(instance.sellers.size(), 0.0);
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    const auto& s = instance.sellers[j];
    for (std::size_t k = 0; k < s.asks.size(); ++k) {
      seller_asks_[j].push_back(asks_.size());
      asks_.push_back(Offer{j, k, to_items(s.asks[k]), s.asks[k].value});
      max_reservation_[j] = std::max(max_reservation_[j], s.asks[k].value);
    }
  }
}

int Market::item_index(const std::string& id) const {
  auto it = item_ids_.find(id);
  return it == item_ids_.end() ? -1 : it->second;
}

Money Market::capped(std::size_t bid) const {
  const auto& o = bids_[bid];
  return std::min(instance_->buyers[o.owner].budget, o.value);
}

}  // namespace combex
