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

#include <random>

#include "combex/blocking.hpp"
#include "combex/wdp.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace combex;

TEST_CASE("welfare of the budget dyad") {
  const auto in = fixtures::budget_dyad();
  auto r = max_welfare(in, grand_coalition(in), false);
  CHECK(r.value == doctest::Approx(15.0));
  CHECK(r.witness.buyer_bid[0] == std::optional<std::size_t>(0));
  CHECK(r.witness.buyer_bid[1] == std::optional<std::size_t>(1));
}

TEST_CASE("capped welfare of the capped-gap instance") {
  const auto in = fixtures::capped_gap();
  CHECK(max_welfare(in, grand_coalition(in), true).value == doctest::Approx(4.0));
  auto q = capped_value_inequality_check(in, grand_coalition(in));
  CHECK(q.wP_of_p_witness == doctest::Approx(10.0));
  CHECK(q.wB_of_p_witness == doctest::Approx(3.0));
  CHECK(q.wB_optimum == doctest::Approx(4.0));
  CHECK(q.holds);
}

TEST_CASE("unprofitable trade yields the empty allocation") {
  ExchangeInstance in;
  in.items = {"g"};
  in.buyers.push_back(Buyer{"b", kUnboundedBudget, {PackageBid{{"g"}, 5.0}}});
  in.sellers.push_back(Seller{"s", {"g"}, {PackageBid{{"g"}, 7.0}}});
  auto r = max_welfare(in, grand_coalition(in), false);
  CHECK(r.value == 0.0);
  CHECK(r.witness == Allocation::empty_for(in));
}

TEST_CASE("enumeration counts") {
  ExchangeInstance one;
  one.items = {"g"};
  one.buyers.push_back(Buyer{"b", kUnboundedBudget, {PackageBid{{"g"}, 5.0}}});
  one.sellers.push_back(Seller{"s", {"g"}, {PackageBid{{"g"}, 1.0}}});
  // no trade, seller alone, trade
  CHECK(enumerate_allocations(one, grand_coalition(one)).size() == 3);

  const auto in = fixtures::empty_core();
  CHECK(enumerate_allocations(in, grand_coalition(in)).size() == 10);
}

TEST_CASE("enumeration refuses large coalitions") {
  ExchangeInstance in;
  in.items = {"g"};
  in.sellers.push_back(Seller{"s", {"g"}, {PackageBid{{"g"}, 0.0}}});
  for (int k = 0; k < 21; ++k) in.buyers.push_back(Buyer{"x" + std::to_string(k), 1.0, {PackageBid{{"g"}, 1.0}}});
  CHECK_THROWS_AS(enumerate_allocations(in, grand_coalition(in)), EnumerationRefused);
}

TEST_CASE("MILP optimum equals enumeration and capped inequality holds") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = oracle::random_tiny_instance(rng);
    REQUIRE(validate(in).empty());
    const auto grand = grand_coalition(in);
    double best_p = 0.0;
    double best_b = 0.0;
    for (const auto& a : enumerate_allocations(in, grand)) {
      CHECK(check_allocation(in, grand, a).empty());
      best_p = std::max(best_p, allocation_value(in, a, false));
      best_b = std::max(best_b, allocation_value(in, a, true));
      CHECK(allocation_value(in, a, true) <= allocation_value(in, a, false) + 1e-9);
    }
    auto p = max_welfare(in, grand, false);
    auto b = max_welfare(in, grand, true);
    CHECK(p.value == doctest::Approx(best_p).epsilon(1e-9));
    CHECK(b.value == doctest::Approx(best_b).epsilon(1e-9));
    CHECK(capped_value_inequality_check(in, grand).holds);
  }
}

TEST_CASE("welfare is monotone in the coalition") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = oracle::random_tiny_instance(rng);
    const auto all = enumerate_coalitions(in, std::nullopt);
    WdpOptions fast;
    fast.canonical = false;
    for (const auto& c : all) {
      const double base = max_welfare(in, c, false, fast).value;
      const double capped = max_welfare(in, c, true, fast).value;
      for (std::size_t i = 0; i < in.buyers.size(); ++i) {
        if (std::find(c.buyers.begin(), c.buyers.end(), i) != c.buyers.end()) continue;
        Coalition bigger = c;
        bigger.buyers.push_back(i);
        std::sort(bigger.buyers.begin(), bigger.buyers.end());
        CHECK(max_welfare(in, bigger, false, fast).value >= base - 1e-9);
        CHECK(max_welfare(in, bigger, true, fast).value >= capped - 1e-9);
      }
    }
  }
}

TEST_CASE("unbounded budgets make the capped inequality tight") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = oracle::random_tiny_instance(rng);
    for (auto& b : in.buyers) b.budget = kUnboundedBudget;
    auto q = capped_value_inequality_check(in, grand_coalition(in));
    CHECK(q.wB_of_p_witness == doctest::Approx(q.wP_of_p_witness));
    CHECK(q.wB_optimum == doctest::Approx(q.wB_of_p_witness));
  }
}

TEST_CASE("canonical witness is lexicographically smallest among optima") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    const auto in = oracle::random_tiny_instance(rng);
    const auto grand = grand_coalition(in);
    auto r = max_welfare(in, grand, false);
    std::vector<int> smallest;
    for (const auto& a : enumerate_allocations(in, grand)) {
      if (allocation_value(in, a, false) < r.value - 1e-7) continue;
      auto inc = incidence(in, a);
      if (smallest.empty() || inc < smallest) smallest = inc;
    }
    CHECK(incidence(in, r.witness) == smallest);
  }
}
