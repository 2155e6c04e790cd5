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

#ifndef COMBEX_TESTS_FIXTURES_HPP_
#define COMBEX_TESTS_FIXTURES_HPP_

#include <limits>
#include <string>
#include <vector>

#include "combex/model.hpp"

namespace combex::fixtures {

inline Seller single_item_seller(const std::string& id, const std::string& item, Money reserve) {
  return Seller{id, {item}, {PackageBid{{item}, reserve}}};
}

// Budget-poor b1 can only afford the cheap item; b2 can trade with either
// seller. Welfare 15 unconstrained, 9 in the core.
inline ExchangeInstance budget_dyad() {
  ExchangeInstance in;
  in.items = {"g1", "g2"};
  in.buyers.push_back(Buyer{"b1", 1.0, {PackageBid{{"g1"}, 10.0}}});
  in.buyers.push_back(Buyer{"b2", kUnboundedBudget, {PackageBid{{"g1"}, 9.0}, PackageBid{{"g2"}, 9.0}}});
  in.sellers.push_back(single_item_seller("s1", "g1", 0.0));
  in.sellers.push_back(single_item_seller("s2", "g2", 4.0));
  return in;
}

// Two complementary items; the core is empty with the listed budgets.
inline ExchangeInstance empty_core(bool with_budgets = true) {
  ExchangeInstance in;
  in.items = {"A", "B"};
  const Money inf = kUnboundedBudget;
  in.buyers.push_back(Buyer{"b1", with_budgets ? 3.0 : inf, {PackageBid{{"A", "B"}, 10.0}}});
  in.buyers.push_back(Buyer{"b2", with_budgets ? 2.0 : inf,
                            {PackageBid{{"A"}, 4.0}, PackageBid{{"B"}, 4.0}, PackageBid{{"A", "B"}, 4.0}}});
  in.sellers.push_back(single_item_seller("s1", "A", 0.0));
  in.sellers.push_back(single_item_seller("s2", "B", 0.0));
  return in;
}

// Capped and uncapped winner determination pick different allocations.
inline ExchangeInstance capped_gap() {
  ExchangeInstance in;
  in.items = {"A", "B"};
  in.buyers.push_back(Buyer{"b1", 3.0, {PackageBid{{"A"}, 2.0}, PackageBid{{"B"}, 10.0}}});
  in.buyers.push_back(Buyer{"b2", 2.0, {PackageBid{{"B"}, 2.0}}});
  in.sellers.push_back(single_item_seller("s1", "A", 0.0));
  in.sellers.push_back(single_item_seller("s2", "B", 0.0));
  return in;
}

}  // namespace combex::fixtures

#endif  // COMBEX_TESTS_FIXTURES_HPP_
