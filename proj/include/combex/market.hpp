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

#ifndef COMBEX_MARKET_HPP_
#define COMBEX_MARKET_HPP_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "combex/model.hpp"

namespace combex {

// Index-based view of an instance used by the solvers: bundles become sorted
// item index lists. Built once per solve; the instance must outlive it.
class Market {
 public:
  struct Offer {
    std::size_t owner = 0;  // buyer or seller index
    std::size_t local = 0;  // bid/ask index within the owner
    std::vector<int> items;
    Money value = 0.0;
  };

  explicit Market(const ExchangeInstance& instance);

  const ExchangeInstance& instance() const { return *instance_; }
  std::size_t num_items() const { return instance_->items.size(); }
  std::size_t num_buyers() const { return instance_->buyers.size(); }
  std::size_t num_sellers() const { return instance_->sellers.size(); }

  // Flat lists in (owner, local) order.
  const std::vector<Offer>& bids() const { return bids_; }
  const std::vector<Offer>& asks() const { return asks_; }
  const std::vector<std::size_t>& bids_of(std::size_t buyer) const { return buyer_bids_[buyer]; }
  const std::vector<std::size_t>& asks_of(std::size_t seller) const { return seller_asks_[seller]; }
  std::size_t bid_index(std::size_t buyer, std::size_t local) const { return buyer_bids_[buyer][local]; }
  std::size_t ask_index(std::size_t seller, std::size_t local) const { return seller_asks_[seller][local]; }

  // Seller endowing each item, or -1 when no seller does.
  int item_owner(int item) const { return item_owner_[item]; }
  int item_index(const std::string& id) const;

  Money budget(std::size_t buyer) const { return instance_->buyers[buyer].budget; }
  Money capped(std::size_t bid) const;
  Money max_value(std::size_t buyer) const { return max_value_[buyer]; }
  Money max_reservation(std::size_t seller) const { return max_reservation_[seller]; }

  // Upper bound on any buyer payment / seller receipt.
  Money payment_bound() const { return payment_bound_; }

 private:
  const ExchangeInstance* instance_;
  std::unordered_map<std::string, int> item_ids_;
  std::vector<int> item_owner_;
  std::vector<Offer> bids_;
  std::vector<Offer> asks_;
  std::vector<std::vector<std::size_t>> buyer_bids_;
  std::vector<std::vector<std::size_t>> seller_asks_;
  std::vector<Money> max_value_;
  std::vector<Money> max_reservation_;
  Money payment_bound_ = 1.0;
};

}  // namespace combex

#endif  // COMBEX_MARKET_HPP_
