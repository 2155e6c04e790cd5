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

#include "combex/wdp.hpp"

#include <cmath>

#include "combex/market.hpp"

namespace combex {

namespace {

constexpr double kTieTol = 1e-7;

struct WdModel {
  MilpModel milp;
  std::vector<std::pair<std::size_t, int>> bid_vars;  // (flat bid, var)
  std::vector<std::pair<std::size_t, int>> ask_vars;  // (flat ask, var)
  std::vector<int> order;                             // incidence order of all vars
};

WdModel build(const Market& market, const Coalition& coalition, bool capped) {
  WdModel wd;
  auto& m = wd.milp;
  std::vector<std::vector<Term>> demand(market.num_items());
  std::vector<std::vector<Term>> supply(market.num_items());
  for (std::size_t i : coalition.buyers) {
    std::vector<Term> xor_row;
    for (std::size_t b : market.bids_of(i)) {
      const int v = m.add_binary("x" + std::to_string(b));
      m.set_objective_coef(v, capped ? market.capped(b) : market.bids()[b].value);
      wd.bid_vars.emplace_back(b, v);
      xor_row.push_back({v, 1.0});
      for (int k : market.bids()[b].items) demand[k].push_back({v, 1.0});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_b" + std::to_string(i), xor_row, RowSense::kLe, 1.0);
  }
  for (std::size_t j : coalition.sellers) {
    std::vector<Term> xor_row;
    for (std::size_t a : market.asks_of(j)) {
      const int v = m.add_binary("y" + std::to_string(a));
      m.set_objective_coef(v, -market.asks()[a].value);
      wd.ask_vars.emplace_back(a, v);
      xor_row.push_back({v, 1.0});
      for (int k : market.asks()[a].items) supply[k].push_back({v, 1.0});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_s" + std::to_string(j), xor_row, RowSense::kLe, 1.0);
  }
  for (std::size_t k = 0; k < market.num_items(); ++k) {
    if (demand[k].empty()) continue;
    std::vector<Term> row = demand[k];
    for (const auto& t : supply[k]) row.push_back({t.var, -1.0});
    m.add_constraint("supply" + std::to_string(k), row, RowSense::kLe, 0.0);
  }
  m.set_objective_sense(ObjSense::kMaximize);
  for (const auto& [b, v] : wd.bid_vars) wd.order.push_back(v);
  for (const auto& [a, v] : wd.ask_vars) wd.order.push_back(v);
  return wd;
}

Allocation decode(const Market& market, const WdModel& wd, const std::vector<double>& values) {
  Allocation a = Allocation::empty_for(market.instance());
  for (const auto& [b, v] : wd.bid_vars) {
    if (values[v] > 0.5) a.buyer_bid[market.bids()[b].owner] = market.bids()[b].local;
  }
  for (const auto& [k, v] : wd.ask_vars) {
    if (values[v] > 0.5) a.seller_ask[market.asks()[k].owner] = market.asks()[k].local;
  }
  return a;
}

}  // namespace

Allocation Allocation::empty_for(const ExchangeInstance& instance) {
  Allocation a;
  a.buyer_bid.assign(instance.buyers.size(), std::nullopt);
  a.seller_ask.assign(instance.sellers.size(), std::nullopt);
  return a;
}

Allocation Allocation::of(const Outcome& outcome) { return Allocation{outcome.buyer_bid, outcome.seller_ask}; }

Money allocation_value(const ExchangeInstance& instance, const Allocation& allocation, bool capped) {
  Money w = 0.0;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    if (!allocation.buyer_bid[i]) continue;
    const auto& bid = instance.buyers[i].bids[*allocation.buyer_bid[i]];
    w += capped ? capped_value(instance.buyers[i], bid) : bid.value;
  }
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    if (allocation.seller_ask[j]) w -= instance.sellers[j].asks[*allocation.seller_ask[j]].value;
  }
  return w;
}

std::vector<std::string> check_allocation(const ExchangeInstance& instance, const Coalition& coalition,
                                          const Allocation& allocation) {
  std::vector<std::string> out;
  const Market market(instance);
  std::vector<bool> in_b(instance.buyers.size(), false);
  std::vector<bool> in_s(instance.sellers.size(), false);
  for (auto i : coalition.buyers) in_b[i] = true;
  for (auto j : coalition.sellers) in_s[j] = true;
  std::vector<int> balance(instance.items.size(), 0);
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    if (!allocation.buyer_bid[i]) continue;
    if (!in_b[i]) out.push_back("buyer " + instance.buyers[i].id + " trades outside the coalition");
    for (int k : market.bids()[market.bid_index(i, *allocation.buyer_bid[i])].items) --balance[k];
  }
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    if (!allocation.seller_ask[j]) continue;
    if (!in_s[j]) out.push_back("seller " + instance.sellers[j].id + " trades outside the coalition");
    for (int k : market.asks()[market.ask_index(j, *allocation.seller_ask[j])].items) ++balance[k];
  }
  for (std::size_t k = 0; k < balance.size(); ++k) {
    if (balance[k] < 0) out.push_back("item '" + instance.items[k] + "' over-allocated");
  }
  return out;
}

std::vector<int> incidence(const ExchangeInstance& instance, const Allocation& allocation) {
  std::vector<int> v;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    for (std::size_t k = 0; k < instance.buyers[i].bids.size(); ++k) {
      v.push_back(allocation.buyer_bid[i] && *allocation.buyer_bid[i] == k ? 1 : 0);
    }
  }
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    for (std::size_t k = 0; k < instance.sellers[j].asks.size(); ++k) {
      v.push_back(allocation.seller_ask[j] && *allocation.seller_ask[j] == k ? 1 : 0);
    }
  }
  return v;
}

WelfareResult max_welfare(const ExchangeInstance& instance, const Coalition& coalition, bool capped,
                          const WdpOptions& options) {
  const Market market(instance);
  WdModel wd = build(market, coalition, capped);
  WelfareResult res;
  res.witness = Allocation::empty_for(instance);
  if (wd.milp.num_variables() == 0) return res;
  MilpSolution sol = solve(wd.milp, options.milp);
  if (sol.status != SolveStatus::kOptimal) {
    res.status = sol.status == SolveStatus::kTimeout ? SolveStatus::kTimeout : SolveStatus::kInfeasible;
    if (sol.has_solution()) res.witness = decode(market, wd, sol.values);
    return res;
  }
  std::vector<double> best = sol.values;
  const double target = sol.objective;
  if (options.canonical) {
    std::vector<Term> obj;
    for (int j = 0; j < wd.milp.num_variables(); ++j) {
      if (wd.milp.objective()[j] != 0.0) obj.push_back({j, wd.milp.objective()[j]});
    }
    wd.milp.add_constraint("welfare_floor", obj, RowSense::kGe, target - kTieTol);
    for (int v : wd.order) {
      if (best[v] < 0.5) {
        wd.milp.set_bounds(v, 0.0, 0.0);
        continue;
      }
      wd.milp.set_bounds(v, 0.0, 0.0);
      MilpSolution alt = solve(wd.milp, options.milp);
      if (alt.status == SolveStatus::kTimeout) {
        res.status = SolveStatus::kTimeout;
        break;
      }
      if (alt.status == SolveStatus::kOptimal) {
        best = alt.values;
      } else {
        wd.milp.set_bounds(v, 1.0, 1.0);
      }
    }
  }
  res.witness = decode(market, wd, best);
  res.value = allocation_value(instance, res.witness, capped);
  return res;
}

CoalitionValue coalition_value(const ExchangeInstance& instance, const Coalition& coalition,
                               const WdpOptions& options) {
  CoalitionValue cv;
  cv.coalition = coalition;
  auto p = max_welfare(instance, coalition, false, options);
  auto b = max_welfare(instance, coalition, true, options);
  cv.wP = p.value;
  cv.wB = b.value;
  cv.p_witness = std::move(p.witness);
  cv.b_witness = std::move(b.witness);
  if (p.status != SolveStatus::kOptimal) cv.status = p.status;
  if (b.status != SolveStatus::kOptimal) cv.status = b.status;
  return cv;
}

void enumerate_allocations(const ExchangeInstance& instance, const Coalition& coalition,
                           const std::function<void(const Allocation&)>& visit) {
  const Market market(instance);
  std::size_t offers = 0;
  for (auto i : coalition.buyers) offers += market.bids_of(i).size();
  for (auto j : coalition.sellers) offers += market.asks_of(j).size();
  if (offers > kEnumerationLimit) {
    throw EnumerationRefused("coalition holds " + std::to_string(offers) + " offers; enumeration limit is " +
                             std::to_string(kEnumerationLimit));
  }
  Allocation cur = Allocation::empty_for(instance);
  std::vector<int> free(market.num_items(), 0);

  std::function<void(std::size_t)> buyers = [&](std::size_t pos) {
    if (pos == coalition.buyers.size()) {
      visit(cur);
      return;
    }
    const std::size_t i = coalition.buyers[pos];
    cur.buyer_bid[i].reset();
    buyers(pos + 1);
    for (std::size_t b : market.bids_of(i)) {
      const auto& items = market.bids()[b].items;
      bool ok = true;
      for (int k : items) ok = ok && free[k] > 0;
      if (!ok) continue;
      for (int k : items) --free[k];
      cur.buyer_bid[i] = market.bids()[b].local;
      buyers(pos + 1);
      for (int k : items) ++free[k];
    }
    cur.buyer_bid[i].reset();
  };
  std::function<void(std::size_t)> sellers = [&](std::size_t pos) {
    if (pos == coalition.sellers.size()) {
      buyers(0);
      return;
    }
    const std::size_t j = coalition.sellers[pos];
    cur.seller_ask[j].reset();
    sellers(pos + 1);
    for (std::size_t a : market.asks_of(j)) {
      for (int k : market.asks()[a].items) ++free[k];
      cur.seller_ask[j] = market.asks()[a].local;
      sellers(pos + 1);
      for (int k : market.asks()[a].items) --free[k];
    }
    cur.seller_ask[j].reset();
  };
  sellers(0);
}

std::vector<Allocation> enumerate_allocations(const ExchangeInstance& instance, const Coalition& coalition) {
  std::vector<Allocation> out;
  enumerate_allocations(instance, coalition, [&](const Allocation& a) { out.push_back(a); });
  return out;
}

CappedInequality capped_value_inequality_check(const ExchangeInstance& instance, const Coalition& coalition,
                                               const WdpOptions& options) {
  CappedInequality out;
  auto p = max_welfare(instance, coalition, false, options);
  auto b = max_welfare(instance, coalition, true, options);
  if (p.status != SolveStatus::kOptimal) out.status = p.status;
  if (b.status != SolveStatus::kOptimal) out.status = b.status;
  out.wP_of_p_witness = p.value;
  out.wB_of_p_witness = allocation_value(instance, p.witness, true);
  out.wB_optimum = b.value;
  out.holds = out.wB_of_p_witness <= out.wB_optimum + kFeasTol;
  return out;
}

}  // namespace combex
