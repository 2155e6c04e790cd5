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

#include "combex/core_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "combex/blocking.hpp"
#include "combex/market.hpp"
#include "combex/wdp.hpp"
#include "master.hpp"

namespace combex {

namespace {

using detail::Master;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Deviation allocation_deviation(const ExchangeInstance& instance, const Allocation& a) {
  Deviation d;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    if (!a.buyer_bid[i]) continue;
    d.coalition.buyers.push_back(i);
    d.buyer_trades.push_back({i, *a.buyer_bid[i], 0.0});
  }
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    if (!a.seller_ask[j]) continue;
    d.coalition.sellers.push_back(j);
    d.seller_trades.push_back({j, *a.seller_ask[j], 0.0});
  }
  return d;
}

}  // namespace

const char* to_string(CoreStatus status) {
  switch (status) {
    case CoreStatus::kCoreOutcome: return "coreOutcome";
    case CoreStatus::kCoreEmpty: return "coreEmpty";
    case CoreStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

MasterCut build_master_cut(const Deviation& deviation, const ExchangeInstance& instance, Money epsilon) {
  MasterCut cut;
  cut.deviation = deviation;
  cut.epsilon = epsilon;
  for (const auto& bt : deviation.buyer_trades) {
    const auto& buyer = instance.buyers.at(bt.buyer);
    const Money v = buyer.bids.at(bt.bid).value;
    if (buyer.budget >= v) {
      cut.big_m.push_back(0.0);
    } else {
      cut.big_m.push_back(max_bid_value(buyer) + buyer.budget + epsilon + 1.0);
    }
  }
  return cut;
}

std::vector<MasterCut> seed_cuts(const ExchangeInstance& instance, std::size_t max_coalition_size, std::size_t count,
                                 const SolveOptions& milp) {
  std::vector<MasterCut> out;
  if (count == 0 || max_coalition_size == 0) return out;
  WdpOptions wopt;
  wopt.milp = milp;
  const auto grand = max_welfare(instance, grand_coalition(instance), false, wopt);
  const auto grand_inc = incidence(instance, grand.witness);
  auto coalitions = prune_unblockable(instance, enumerate_coalitions(instance, max_coalition_size, false), wopt);

  struct Ranked {
    Money score;
    Money wp;
    std::size_t order;
    Allocation witness;
  };
  std::vector<Ranked> ranked;
  for (std::size_t c = 0; c < coalitions.size(); ++c) {
    auto r = max_welfare(instance, coalitions[c], false, wopt);
    if (r.status != SolveStatus::kOptimal || r.value <= kFeasTol) continue;
    const auto inc = incidence(instance, r.witness);
    int hamming = 0;
    for (std::size_t k = 0; k < inc.size(); ++k) hamming += inc[k] != grand_inc[k];
    ranked.push_back({r.value * hamming, r.value, c, std::move(r.witness)});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.wp != b.wp) return a.wp > b.wp;
    return a.order < b.order;
  });
  std::set<std::string> seen;
  for (const auto& r : ranked) {
    if (out.size() >= count) break;
    Deviation d = allocation_deviation(instance, r.witness);
    if (d.buyer_trades.empty()) continue;
    if (!seen.insert(d.fingerprint()).second) continue;
    out.push_back(build_master_cut(d, instance));
  }
  return out;
}

CoreResult solve_core(const ExchangeInstance& instance, const CoreOptions& options) {
  const auto start = Clock::now();
  const Market market(instance);
  CoreResult res;
  res.coalition_size_cap = options.coalition_size_cap;
  res.epsilon = options.epsilon;

  auto remaining = [&]() -> std::optional<double> {
    if (!options.time_limit_ms) return std::nullopt;
    return std::max(1.0, *options.time_limit_ms - elapsed_ms(start));
  };
  auto out_of_time = [&]() { return options.time_limit_ms && elapsed_ms(start) >= *options.time_limit_ms; };
  auto finish = [&](CoreStatus status) {
    res.status = status;
    res.wall_ms = elapsed_ms(start);
    return res;
  };

  Master master(market, options);
  std::set<std::string> pool;
  const Money cut_eps = options.delta_weight ? options.delta_max : options.epsilon;
  auto push_cut = [&](const Deviation& d) {
    if (!pool.insert(d.fingerprint()).second) return false;
    Deviation stored = d;
    MasterCut cut = build_master_cut(d, instance, cut_eps);
    master.add_cut(cut);
    res.cut_pool.push_back(std::move(stored));
    return true;
  };

  if (options.seed.count > 0) {
    SolveOptions sopt = options.milp;
    sopt.time_limit_ms = remaining();
    for (const auto& cut : seed_cuts(instance, options.seed.max_coalition_size, options.seed.count, sopt)) {
      push_cut(cut.deviation);
    }
  }

  for (std::size_t iter = 1;; ++iter) {
    if (out_of_time()) return finish(CoreStatus::kTimeout);
    res.iterations = iter;
    SolveOptions mopt = options.milp;
    mopt.time_limit_ms = remaining();
    MilpSolution sol = solve(master.model(), mopt);
    if (sol.status == SolveStatus::kTimeout) {
      if (sol.has_solution()) res.outcome = master.decode(sol.values);
      return finish(CoreStatus::kTimeout);
    }
    if (sol.status == SolveStatus::kInfeasible) {
      res.outcome.reset();
      res.welfare = 0.0;
      return finish(CoreStatus::kCoreEmpty);
    }
    std::vector<double> values = sol.values;
    if (options.tie_break) {
      mopt.time_limit_ms = remaining();
      MilpSolution tb = master.tie_break(sol.values, mopt);
      if (tb.status == SolveStatus::kTimeout) {
        res.outcome = master.decode(values);
        return finish(CoreStatus::kTimeout);
      }
      if (tb.status == SolveStatus::kOptimal) values = tb.values;
    }
    Outcome outcome = master.decode(values);
    res.outcome = outcome;
    res.welfare = welfare(instance, outcome);

    BlockingOptions bopt;
    bopt.milp = options.milp;
    bopt.milp.time_limit_ms = remaining();
    bopt.epsilon = master.delta_value(values);
    BlockReport rep = separate(instance, outcome, options.coalition_size_cap, bopt);
    IterationRecord rec;
    rec.iteration = iter;
    rec.master_objective = sol.objective;
    rec.surplus = rep.surplus;
    rec.blocked = rep.blocked;
    if (rep.status == SolveStatus::kTimeout) {
      rec.wall_ms = elapsed_ms(start);
      res.trace.push_back(rec);
      return finish(CoreStatus::kTimeout);
    }
    if (!rep.blocked) {
      rec.wall_ms = elapsed_ms(start);
      res.trace.push_back(rec);
      res.epsilon = bopt.epsilon;
      return finish(CoreStatus::kCoreOutcome);
    }
    rec.cut = rep.best->fingerprint();
    rec.wall_ms = elapsed_ms(start);
    res.trace.push_back(rec);
    if (!push_cut(*rep.best)) {
      throw std::runtime_error("separation returned a deviation already in the cut pool: " + rec.cut);
    }
  }
}

LeastCoreResult least_core(const ExchangeInstance& instance, const CoreOptions& options, Money tolerance) {
  const auto start = Clock::now();
  LeastCoreResult out;
  auto run = [&](Money eps) {
    CoreOptions o = options;
    o.epsilon = eps;
    o.delta_weight.reset();
    if (options.time_limit_ms) o.time_limit_ms = std::max(1.0, *options.time_limit_ms - elapsed_ms(start));
    ++out.solves;
    return solve_core(instance, o);
  };

  if (options.delta_weight) {
    CoreOptions o = options;
    if (o.delta_max <= 0.0) {
      o.delta_max = max_welfare(instance, grand_coalition(instance), true, WdpOptions{options.milp, false}).value + 1.0;
    }
    ++out.solves;
    out.result = solve_core(instance, o);
    out.delta = out.result.epsilon;
    out.timed_out = out.result.status == CoreStatus::kTimeout;
    return out;
  }

  CoreResult at_zero = run(0.0);
  if (at_zero.status != CoreStatus::kCoreEmpty) {
    out.delta = 0.0;
    out.timed_out = at_zero.status == CoreStatus::kTimeout;
    out.result = std::move(at_zero);
    return out;
  }
  Money lo = 0.0;
  Money hi = max_welfare(instance, grand_coalition(instance), true, WdpOptions{options.milp, false}).value + 1.0;
  CoreResult best = run(hi);
  if (best.status == CoreStatus::kTimeout) {
    out.timed_out = true;
    out.delta = hi;
    out.result = std::move(best);
    return out;
  }
  while (hi - lo > tolerance) {
    const Money mid = 0.5 * (lo + hi);
    CoreResult r = run(mid);
    if (r.status == CoreStatus::kTimeout) {
      out.timed_out = true;
      break;
    }
    if (r.status == CoreStatus::kCoreOutcome) {
      hi = mid;
      best = std::move(r);
    } else {
      lo = mid;
    }
  }
  out.delta = hi;
  out.result = std::move(best);
  return out;
}

}  // namespace combex
