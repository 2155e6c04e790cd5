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

#ifndef COMBEX_WDP_HPP_
#define COMBEX_WDP_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "combex/milp.hpp"
#include "combex/model.hpp"

namespace combex {

// Allocation without prices, aligned with instance order.
struct Allocation {
  std::vector<std::optional<std::size_t>> buyer_bid;
  std::vector<std::optional<std::size_t>> seller_ask;

  static Allocation empty_for(const ExchangeInstance& instance);
  static Allocation of(const Outcome& outcome);
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Gains from trade of an allocation; `capped` values bids at min(budget, value).
Money allocation_value(const ExchangeInstance& instance, const Allocation& allocation, bool capped);

// XOR and Supply for an allocation that only uses members of `coalition`.
std::vector<std::string> check_allocation(const ExchangeInstance& instance, const Coalition& coalition,
                                          const Allocation& allocation);

// 0/1 incidence over every bid (instance order) followed by every ask.
std::vector<int> incidence(const ExchangeInstance& instance, const Allocation& allocation);

struct WelfareResult {
  SolveStatus status = SolveStatus::kOptimal;
  Money value = 0.0;
  Allocation witness;
};

struct WdpOptions {
  SolveOptions milp;
  // Pick the lexicographically smallest incidence vector among optima.
  bool canonical = true;
};

WelfareResult max_welfare(const ExchangeInstance& instance, const Coalition& coalition, bool capped,
                          const WdpOptions& options = {});

struct CoalitionValue {
  Coalition coalition;
  Money wP = 0.0;
  Money wB = 0.0;
  Allocation p_witness;
  Allocation b_witness;
  SolveStatus status = SolveStatus::kOptimal;
};

CoalitionValue coalition_value(const ExchangeInstance& instance, const Coalition& coalition,
                               const WdpOptions& options = {});

class EnumerationRefused : public std::runtime_error {
 public:
  explicit EnumerationRefused(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::size_t kEnumerationLimit = 20;

// Visits every allocation of the coalition obeying XOR and Supply exactly
// once. Refuses when the coalition holds more than kEnumerationLimit offers.
void enumerate_allocations(const ExchangeInstance& instance, const Coalition& coalition,
                           const std::function<void(const Allocation&)>& visit);
std::vector<Allocation> enumerate_allocations(const ExchangeInstance& instance, const Coalition& coalition);

struct CappedInequality {
  Money wP_of_p_witness = 0.0;
  Money wB_of_p_witness = 0.0;
  Money wB_optimum = 0.0;
  bool holds = true;
  SolveStatus status = SolveStatus::kOptimal;
};

CappedInequality capped_value_inequality_check(const ExchangeInstance& instance, const Coalition& coalition,
                                               const WdpOptions& options = {});

}  // namespace combex

#endif  // COMBEX_WDP_HPP_
