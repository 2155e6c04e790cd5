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


#ifndef COMBEX_GEN_HPP_
#define COMBEX_GEN_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "combex/model.hpp"

namespace combex {

// SplitMix64. split() derives an independent stream for a sub-task.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n);  // [0, n)
  SplitMix64 split(std::uint64_t stream) const;

 private:
  std::uint64_t state_;
};

struct AirportGenConfig {
  std::size_t num_bidders = 3;
  std::size_t num_items = 6;
  std::size_t num_airports = 4;
  std::uint64_t seed = 1;
  Money deviation_penalty = 0.5;
  Money duration_penalty = 0.25;
  std::size_t min_duration = 1;
  // budget ~ U(0, budget_fraction * max bundle value)
  double budget_fraction = 1.0;
  // reservation ~ U(0, reservation_fraction * max value of bundles holding the item)
  double reservation_fraction = 0.5;
};

// Throws std::invalid_argument naming the offending field.
void check_config(const AirportGenConfig& config);
// Reads keys bidders, items, airports, seed, deviation_penalty,
// duration_penalty, min_duration, budget_fraction, reservation_fraction.
AirportGenConfig airport_config_from(const std::map<std::string, std::string>& kv);

// Time-slot exchange: item k is slot k / airports at airport k % airports,
// each sold by its own seller.
ExchangeInstance gen_airport(const AirportGenConfig& config);

// Distance between two of the four airports, scaled to [1, 10].
Money airport_distance(std::size_t a, std::size_t b);

struct Literal {
  bool is_y = false;
  std::size_t index = 0;  // 0-based
  bool negated = false;
};

struct Dnf {
  std::size_t n = 0;  // x variables
  std::size_t m = 0;  // y variables
  std::vector<std::vector<Literal>> clauses;
};

// Throws std::invalid_argument on empty clauses or out-of-range indices.
void check_dnf(const Dnf& dnf);
// Parses e.g. "x1 & ~y2 | x2" (clauses split by '|', literals by '&').
Dnf parse_dnf(const std::string& text, std::size_t n, std::size_t m);
std::string to_string(const Dnf& dnf);

struct ReductionConstants {
  Money T = 0.0, U = 0.0, V = 0.0, W = 0.0;
};

enum class GammaValueRule { kCount, kSizeFormula };

struct Qsat2Instance {
  Dnf dnf;
  ExchangeInstance instance;
  ReductionConstants constants;
  Money threshold = 0.0;  // n * W
};

inline constexpr std::size_t kQsatMaxItems = 4000;
inline constexpr std::size_t kQsatMaxUnionBids = 4096;

ReductionConstants reduction_constants(const Dnf& dnf);
Qsat2Instance gen_qsat2(const Dnf& dnf, GammaValueRule rule = GammaValueRule::kCount);

// Structural checks on a claimed nW-equilibrium; empty iff both hold within
// kFeasTol. Every B^K_i must win a W-valued bundle. B^K_i and B^M_i must hold
// complementary chi items and S^chi_i must receive 2V with each of the two
// paying at least V, so both can route exactly V to S^chi_i.
std::vector<std::string> qsat2_equilibrium_violations(const Qsat2Instance& q, const Outcome& outcome);

// Exhaustive evaluation of "exists x forall y phi(x, y)"; needs n + m <= 16.
bool qsat2_bruteforce(const Dnf& dnf);
bool eval_dnf(const Dnf& dnf, std::uint64_t x, std::uint64_t y);

}  // namespace combex

#endif  // COMBEX_GEN_HPP_
