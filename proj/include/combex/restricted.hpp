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


#ifndef COMBEX_RESTRICTED_HPP_
#define COMBEX_RESTRICTED_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "combex/milp.hpp"
#include "combex/model.hpp"
#include "combex/wdp.hpp"

namespace combex {

struct SingleSidedOptions {
  SolveOptions milp;
  // Exhaustive coalition audit runs when buyers + sellers <= this.
  std::size_t audit_limit = 10;
};

struct SingleSidedResult {
  SolveStatus status = SolveStatus::kOptimal;
  // Stage 1: maximal capped revenue, net of the seller's reservation.
  Money z_star = 0.0;
  Allocation revenue_allocation;
  Money revenue_allocation_welfare = 0.0;
  // Stage 2: highest uncapped welfare among allocations reaching z_star.
  Allocation allocation;
  Money capped_revenue = 0.0;
  Money welfare = 0.0;
  // Stage 3: payments per buyer (0 for losers) and the resulting outcome.
  std::vector<Money> prices;
  Outcome outcome;
  std::size_t pricing_rounds = 0;
  // Set when capped-value core prices were blocked in the exchange sense
  // and had to be raised.
  bool repaired = false;
  std::optional<bool> blocked_by_enumeration;
};

// Throws std::invalid_argument unless the instance has exactly one seller.
SingleSidedResult solve_single_sided(const ExchangeInstance& instance, const SingleSidedOptions& options = {});

struct DyadicResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Outcome> outcome;
  Money welfare = 0.0;
  double wall_ms = 0.0;
};

// Welfare-maximising outcome that no buyer-seller pair can block.
DyadicResult solve_dyadic(const ExchangeInstance& instance, const SolveOptions& milp = {});

// Largest value buyer places on any bid inside `items` (free disposal);
// nullopt if none fits.
std::optional<Money> value_within(const Buyer& buyer, const std::vector<std::string>& items);

}  // namespace combex

#endif  // COMBEX_RESTRICTED_HPP_
