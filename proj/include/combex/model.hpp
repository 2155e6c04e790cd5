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

#ifndef COMBEX_MODEL_HPP_
#define COMBEX_MODEL_HPP_

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace combex {

using Money = double;

// Shared numeric tolerances. Every module compares money against these.
inline constexpr double kFeasTol = 1e-6;
inline constexpr double kBlockTol = 1e-6;
inline constexpr Money kUnboundedBudget = std::numeric_limits<double>::infinity();

// Package bid (buyers) or ask (sellers). For an ask, `value` is the
// reservation price of supplying the whole bundle.
struct PackageBid {
  std::vector<std::string> bundle;
  Money value = 0.0;
};

struct Buyer {
  std::string id;
  Money budget = kUnboundedBudget;
  std::vector<PackageBid> bids;  // XOR
};

struct Seller {
  std::string id;
  std::vector<std::string> endowment;
  std::vector<PackageBid> asks;  // XOR, each bundle a subset of endowment
};

struct ExchangeInstance {
  std::vector<std::string> items;
  std::vector<Buyer> buyers;
  std::vector<Seller> sellers;
  std::map<std::string, std::string> metadata;
};

// A (possibly partial) market outcome. Vectors are aligned with
// instance.buyers / instance.sellers; an empty optional means "no trade".
// Payments are totals per bidder (personalized, non-anonymous prices).
struct Outcome {
  std::vector<std::optional<std::size_t>> buyer_bid;
  std::vector<std::optional<std::size_t>> seller_ask;
  std::vector<Money> buyer_payment;
  std::vector<Money> seller_receipt;

  static Outcome empty_for(const ExchangeInstance& instance);
};

// Bidder references use instance indices; buyers and sellers are separate
// index spaces.
struct Coalition {
  std::vector<std::size_t> buyers;   // sorted, unique
  std::vector<std::size_t> sellers;  // sorted, unique

  std::size_t size() const { return buyers.size() + sellers.size(); }
  bool empty() const { return buyers.empty() && sellers.empty(); }
  friend bool operator==(const Coalition&, const Coalition&) = default;
};

struct BuyerTrade {
  std::size_t buyer = 0;
  std::size_t bid = 0;
  Money payment = 0.0;
  friend bool operator==(const BuyerTrade&, const BuyerTrade&) = default;
};

struct SellerTrade {
  std::size_t seller = 0;
  std::size_t ask = 0;
  Money receipt = 0.0;
  friend bool operator==(const SellerTrade&, const SellerTrade&) = default;
};

// A coalition together with an internal allocation and transfer prices.
struct Deviation {
  Coalition coalition;
  std::vector<BuyerTrade> buyer_trades;    // sorted by buyer
  std::vector<SellerTrade> seller_trades;  // sorted by seller
  Money min_improvement = 0.0;

  // Canonical key of the allocation part ("b<i>:<bid>|s<j>:<ask>|...").
  std::string fingerprint() const;
};

// Thrown for outcomes or instances that break the model invariants when a
// caller required validity.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Returns one human-readable line per violated invariant; empty iff valid.
std::vector<std::string> validate(const ExchangeInstance& instance);
// Throws ValidationError listing every problem validate() finds.
void require_valid(const ExchangeInstance& instance);

// Checks XOR, Supply, BC, IRS and BB (within kFeasTol) for an outcome.
std::vector<std::string> check_outcome(const ExchangeInstance& instance, const Outcome& outcome);

// Payoff per bidder, keyed by bidder id. Throws ValidationError when the
// outcome is infeasible.
std::map<std::string, Money> payoffs(const ExchangeInstance& instance, const Outcome& outcome);

// Same quantities aligned with instance order; does not validate.
std::vector<Money> buyer_payoffs(const ExchangeInstance& instance, const Outcome& outcome);
std::vector<Money> seller_payoffs(const ExchangeInstance& instance, const Outcome& outcome);

// Gains from trade: winning buyer values minus sold ask reservations.
Money welfare(const ExchangeInstance& instance, const Outcome& outcome);

Coalition grand_coalition(const ExchangeInstance& instance);

// Capped value min(budget, value) of a buyer's bid.
inline Money capped_value(const Buyer& buyer, const PackageBid& bid) {
  return bid.value < buyer.budget ? bid.value : buyer.budget;
}

// Largest bid value of a buyer (0 without bids).
Money max_bid_value(const Buyer& buyer);

}  // namespace combex

#endif  // COMBEX_MODEL_HPP_
