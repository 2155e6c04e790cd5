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
#include "combex/core_solver.hpp"
#include "combex/restricted.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace combex;

namespace {

ExchangeInstance one_item(std::vector<std::pair<Money, Money>> value_budget) {
  ExchangeInstance in;
  in.items = {"g"};
  in.sellers.push_back(fixtures::single_item_seller("s", "g", 0.0));
  for (std::size_t i = 0; i < value_budget.size(); ++i) {
    in.buyers.push_back(Buyer{"b" + std::to_string(i), value_budget[i].second, {PackageBid{{"g"}, value_budget[i].first}}});
  }
  return in;
}

// Every buyer subset with the seller: capped coalition value must not exceed
// what its members already get in capped terms.
bool capped_core_holds(const ExchangeInstance& in, const SingleSidedResult& r) {
  const std::size_t n = in.buyers.size();
  Money seller_gain = 0.0;
  std::vector<Money> capped_payoff(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.outcome.buyer_bid[i]) continue;
    const auto& b = in.buyers[i];
    capped_payoff[i] = capped_value(b, b.bids[*r.outcome.buyer_bid[i]]) - r.outcome.buyer_payment[i];
    seller_gain += r.outcome.buyer_payment[i];
  }
  if (r.outcome.seller_ask[0]) seller_gain -= in.sellers[0].asks[*r.outcome.seller_ask[0]].value;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    Coalition c;
    c.sellers = {0};
    Money held = seller_gain;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        c.buyers.push_back(i);
        held += capped_payoff[i];
      }
    }
    if (max_welfare(in, c, true).value > held + 1e-6) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single-sided: second-price-like core point") {
  auto r = solve_single_sided(one_item({{10.0, kUnboundedBudget}, {4.0, kUnboundedBudget}}));
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.z_star == doctest::Approx(10.0));
  CHECK(r.allocation.buyer_bid[0] == std::optional<std::size_t>(0));
  CHECK(r.prices[0] == doctest::Approx(4.0));
  CHECK(r.prices[1] == 0.0);
  CHECK(r.blocked_by_enumeration == std::optional<bool>(false));
}

TEST_CASE("single-sided: lone bidder pays nothing") {
  auto r = solve_single_sided(one_item({{7.0, kUnboundedBudget}}));
  CHECK(r.z_star == doctest::Approx(7.0));
  CHECK(r.prices[0] == doctest::Approx(0.0));
}

TEST_CASE("single-sided: welfare stage breaks revenue ties") {
  // both capped bids are 3; only b0's uncapped value is high
  auto in = one_item({{3.0, kUnboundedBudget}, {10.0, 3.0}});
  auto r = solve_single_sided(in);
  CHECK(r.z_star == doctest::Approx(3.0));
  CHECK(r.allocation.buyer_bid[1] == std::optional<std::size_t>(0));
  CHECK(r.welfare == doctest::Approx(10.0));
  CHECK(r.capped_revenue >= r.z_star - 1e-6);
}

TEST_CASE("single-sided: budget-bound competitor") {
  // Capped values 5 and 6; b0's uncapped value lets it outbid b1 in an
  // exchange deviation only up to its budget.
  auto in = one_item({{10.0, 5.0}, {6.0, kUnboundedBudget}});
  auto r = solve_single_sided(in);
  CHECK(r.allocation.buyer_bid[1] == std::optional<std::size_t>(0));
  CHECK(r.prices[1] == doctest::Approx(5.0));
  CHECK(r.blocked_by_enumeration == std::optional<bool>(false));
}

TEST_CASE("single-sided rejects exchanges") {
  CHECK_THROWS_AS(solve_single_sided(fixtures::budget_dyad()), std::invalid_argument);
}

TEST_CASE("single-sided decoupling on random instances") {
  std::mt19937_64 rng(41);
  int repaired = 0;
  int priced = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto in = oracle::random_tiny_instance(rng, true);
    auto r = solve_single_sided(in);
    const std::string label = "trial " + std::to_string(trial);
    REQUIRE_MESSAGE(r.status == SolveStatus::kOptimal, label);
    CHECK_MESSAGE(check_outcome(in, r.outcome).empty(), label);
    CHECK_MESSAGE(r.capped_revenue >= r.z_star - 1e-6, label);
    CHECK_MESSAGE(r.welfare >= r.revenue_allocation_welfare - 1e-9, label);
    CHECK_MESSAGE(r.z_star == doctest::Approx(max_welfare(in, grand_coalition(in), true).value), label);
    for (std::size_t i = 0; i < in.buyers.size(); ++i) {
      if (!r.outcome.buyer_bid[i]) continue;
      const auto& b = in.buyers[i];
      CHECK(r.prices[i] <= capped_value(b, b.bids[*r.outcome.buyer_bid[i]]) + 1e-9);
      priced += r.prices[i] > 1e-9;
    }
    CHECK_MESSAGE(capped_core_holds(in, r), label);
    REQUIRE(r.blocked_by_enumeration);
    CHECK_MESSAGE(!*r.blocked_by_enumeration, label);
    for (const auto& c : enumerate_coalitions(in, std::nullopt)) {
      CHECK_MESSAGE(oracle::lower_level_by_enumeration(in, r.outcome, c) <= kBlockTol, label);
    }
    repaired += r.repaired;
  }
  CHECK(priced > 20);
  MESSAGE("price repairs: " << repaired);
}

TEST_CASE("dyadic program on the budget dyad") {
  auto r = solve_dyadic(fixtures::budget_dyad());
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.welfare == doctest::Approx(9.0).epsilon(1e-9));
  CHECK_FALSE(membership_check(fixtures::budget_dyad(), *r.outcome, 2).blocked);
}

TEST_CASE("dyadic equals core with one buyer and one seller") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    auto in = oracle::random_tiny_instance(rng, true);
    in.buyers.resize(1);
    auto d = solve_dyadic(in);
    auto c = solve_core(in);
    REQUIRE(d.status == SolveStatus::kOptimal);
    REQUIRE(c.status == CoreStatus::kCoreOutcome);
    CHECK(d.welfare == doctest::Approx(c.welfare).epsilon(1e-9));
  }
}

TEST_CASE("dyadic outcomes are pair-stable and weakly dominate the core") {
  std::mt19937_64 rng(43);
  int infeasible = 0;
  for (int trial = 0; trial < 160; ++trial) {
    const auto in = trial % 2 ? oracle::random_tiny_instance(rng) : oracle::random_contested_instance(rng, 2, 1 + trial % 3);
    const std::string label = "trial " + std::to_string(trial);
    auto d = solve_dyadic(in);
    auto c = solve_core(in);
    if (d.status != SolveStatus::kOptimal) {
      REQUIRE_MESSAGE(d.status == SolveStatus::kInfeasible, label);
      CHECK_MESSAGE(c.status == CoreStatus::kCoreEmpty, label);
      ++infeasible;
      continue;
    }
    CHECK_MESSAGE(check_outcome(in, *d.outcome).empty(), label);
    CHECK_MESSAGE(!separate(in, *d.outcome, 2).blocked, label);
    for (const auto& co : enumerate_coalitions(in, 2)) {
      CHECK_MESSAGE(oracle::lower_level_by_enumeration(in, *d.outcome, co) <= kBlockTol, label);
    }
    // the cap-2 core has exactly the dyadic blocking structure
    const auto pairs = oracle::core_by_enumeration(in, 2);
    CHECK_MESSAGE(!pairs.empty, label);
    if (!pairs.empty) CHECK_MESSAGE(std::abs(pairs.welfare - d.welfare) <= 1e-6, label);
    if (c.status == CoreStatus::kCoreOutcome) CHECK_MESSAGE(d.welfare >= c.welfare - 1e-6, label);
  }
  MESSAGE("dyadic infeasible: " << infeasible);
}
