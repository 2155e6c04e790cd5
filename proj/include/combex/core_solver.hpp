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

#ifndef COMBEX_CORE_SOLVER_HPP_
#define COMBEX_CORE_SOLVER_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "combex/milp.hpp"
#include "combex/model.hpp"

namespace combex {

enum class CoreStatus { kCoreOutcome, kCoreEmpty, kTimeout };

const char* to_string(CoreStatus status);

// Forbids one deviation allocation from improving all its members by more
// than epsilon. big_m[t] belongs to buyer_trades[t]; 0 marks a buyer whose
// budget never binds, so its term stays linear.
struct MasterCut {
  Deviation deviation;
  std::vector<Money> big_m;
  Money epsilon = 0.0;
};

MasterCut build_master_cut(const Deviation& deviation, const ExchangeInstance& instance, Money epsilon = 0.0);

struct SeedStrategy {
  std::size_t max_coalition_size = 3;
  std::size_t count = 0;
};

// Deviations from the welfare-optimal allocations of small coalitions,
// ranked by welfare times Hamming distance to the grand allocation.
std::vector<MasterCut> seed_cuts(const ExchangeInstance& instance, std::size_t max_coalition_size,
                                 std::size_t count, const SolveOptions& milp = {});

struct IterationRecord {
  std::size_t iteration = 0;
  Money master_objective = 0.0;
  Money surplus = 0.0;
  bool blocked = false;
  std::string cut;  // fingerprint of the added cut
  double wall_ms = 0.0;
};

struct CoreOptions {
  std::optional<std::size_t> coalition_size_cap;
  Money epsilon = 0.0;
  SeedStrategy seed;
  std::optional<double> time_limit_ms;
  SolveOptions milp;
  // Minimise total buyer payments on the master allocation.
  bool tie_break = true;
  // When set, epsilon becomes a master variable Delta in [0, delta_max]
  // and the objective is welfare - delta_weight * Delta.
  std::optional<Money> delta_weight;
  Money delta_max = 0.0;
};

struct CoreResult {
  CoreStatus status = CoreStatus::kCoreEmpty;
  std::optional<Outcome> outcome;
  Money welfare = 0.0;
  std::optional<std::size_t> coalition_size_cap;
  Money epsilon = 0.0;
  std::size_t iterations = 0;
  std::vector<Deviation> cut_pool;
  std::vector<IterationRecord> trace;
  double wall_ms = 0.0;
};

CoreResult solve_core(const ExchangeInstance& instance, const CoreOptions& options = {});

struct LeastCoreResult {
  Money delta = 0.0;
  CoreResult result;
  std::size_t solves = 0;
  bool timed_out = false;
};

// Smallest epsilon with a non-empty epsilon-core, to within `tolerance`,
// and the welfare-maximising outcome there.
LeastCoreResult least_core(const ExchangeInstance& instance, const CoreOptions& options = {},
                           Money tolerance = 1e-4);

}  // namespace combex

#endif  // COMBEX_CORE_SOLVER_HPP_
