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

#ifndef COMBEX_BLOCKING_HPP_
#define COMBEX_BLOCKING_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "combex/milp.hpp"
#include "combex/model.hpp"
#include "combex/wdp.hpp"

namespace combex {

struct BlockingOptions {
  SolveOptions milp;
  // Improvement every member must exceed (0 for the core, > 0 for the
  // epsilon-core).
  Money epsilon = 0.0;
};

struct BlockReport {
  SolveStatus status = SolveStatus::kOptimal;
  bool blocked = false;
  std::optional<Deviation> best;
  Money surplus = 0.0;               // separation optimum at the given epsilon
  std::uint64_t scanned = 0;         // coalitions covered by the search
  std::optional<std::size_t> max_size;
  Money epsilon = 0.0;
};

// Largest d with every member of the deviation improving by d, for one
// fixed allocation: buyer values/budgets/payoffs and seller
// reservations/payoffs. -inf when no budget-balanced non-negative prices
// exist; +inf for an empty deviation.
Money max_min_improvement_for_allocation(const std::vector<Money>& values, const std::vector<Money>& budgets,
                                         const std::vector<Money>& reservations,
                                         const std::vector<Money>& buyer_payoffs,
                                         const std::vector<Money>& seller_payoffs);

struct DevisedPrices {
  std::vector<Money> payments;  // per deviating buyer
  std::vector<Money> receipts;  // per deviating seller
  Money improvement = 0.0;      // every member gains at least epsilon + this
};

// Transfer prices for a deviation with positive separation surplus.
// Throws std::invalid_argument when the surplus is not positive.
DevisedPrices devise_prices(const std::vector<Money>& values, const std::vector<Money>& budgets,
                            const std::vector<Money>& reservations, const std::vector<Money>& buyer_payoffs,
                            const std::vector<Money>& seller_payoffs, Money epsilon = 0.0);

struct LowerLevelResult {
  SolveStatus status = SolveStatus::kOptimal;
  Money d = 0.0;
  Deviation witness;
};

// Per-coalition deviation problem solved as one MILP.
LowerLevelResult lower_level(const ExchangeInstance& instance, const Outcome& outcome, const Coalition& coalition,
                             const BlockingOptions& options = {});

// Unified separation over every coalition of at most `max_size` members.
BlockReport separate(const ExchangeInstance& instance, const Outcome& outcome, std::optional<std::size_t> max_size,
                     const BlockingOptions& options = {});

// Validates the outcome, then runs separate().
BlockReport membership_check(const ExchangeInstance& instance, const Outcome& outcome,
                             std::optional<std::size_t> max_size, const BlockingOptions& options = {});

// Drops coalitions whose capped value is at most kFeasTol.
std::vector<Coalition> prune_unblockable(const ExchangeInstance& instance, const std::vector<Coalition>& coalitions,
                                         const WdpOptions& options = {});

// All non-empty coalitions with at most `max_size` members, by size then
// lexicographically (buyers before sellers).
std::vector<Coalition> enumerate_coalitions(const ExchangeInstance& instance, std::optional<std::size_t> max_size,
                                            bool include_grand = true);

// Number of non-empty coalitions with at most `max_size` members, saturating.
std::uint64_t count_coalitions(std::size_t bidders, std::optional<std::size_t> max_size);

}  // namespace combex

#endif  // COMBEX_BLOCKING_HPP_
