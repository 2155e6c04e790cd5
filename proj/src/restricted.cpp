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


#include "combex/restricted.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "combex/blocking.hpp"
#include "combex/market.hpp"
#include "master.hpp"

namespace combex {

namespace {

// Winner determination over one market with per-bid weights.
struct WdModel {
  MilpModel model;
  std::vector<int> x, y;
};

WdModel wd_model(const Market& mk, const std::vector<double>& weight) {
  WdModel w;
  auto& m = w.model;
  std::vector<std::vector<Term>> supply(mk.num_items());
  std::vector<Term> obj;
  for (std::size_t i = 0; i < mk.num_buyers(); ++i) {
    std::vector<Term> row;
    for (std::size_t b : mk.bids_of(i)) {
      const int x = m.add_binary("x" + std::to_string(b));
      w.x.push_back(x);
      row.push_back({x, 1.0});
      obj.push_back({x, weight[b]});
      for (int k : mk.bids()[b].items) supply[k].push_back({x, 1.0});
    }
    if (row.size() > 1) m.add_constraint("xor_b" + std::to_string(i), row, RowSense::kLe, 1.0);
  }
  for (std::size_t j = 0; j < mk.num_sellers(); ++j) {
    std::vector<Term> row;
    for (std::size_t a : mk.asks_of(j)) {
      const int y = m.add_binary("y" + std::to_string(a));
      w.y.push_back(y);
      row.push_back({y, 1.0});
      obj.push_back({y, -mk.asks()[a].value});
      for (int k : mk.asks()[a].items) supply[k].push_back({y, -1.0});
    }
    if (row.size() > 1) m.add_constraint("xor_s" + std::to_string(j), row, RowSense::kLe, 1.0);
  }
  for (std::size_t k = 0; k < mk.num_items(); ++k) {
    if (!supply[k].empty()) m.add_constraint("supply" + std::to_string(k), supply[k], RowSense::kLe, 0.0);
  }
  m.set_objective(ObjSense::kMaximize, obj);
  return w;
}

Allocation decode_allocation(const Market& mk, const WdModel& w, const std::vector<double>& values) {
  Allocation a = Allocation::empty_for(mk.instance());
  for (std::size_t b = 0; b < w.x.size(); ++b) {
    if (values[w.x[b]] > 0.5) a.buyer_bid[mk.bids()[b].owner] = mk.bids()[b].local;
  }
  for (std::size_t s = 0; s < w.y.size(); ++s) {
    if (values[w.y[s]] > 0.5) a.seller_ask[mk.asks()[s].owner] = mk.asks()[s].local;
  }
  return a;
}

struct Winner {
  std::size_t buyer;
  std::size_t bid;  // flat index
  Money capped;
};

// Capped-value core constraint: sum of payments of winners outside the
// blocking set must reach rhs.
struct DayRow {
  std::vector<std::size_t> outside;  // indices into the winner list
  Money rhs = 0.0;
  std::string key;
};

struct DayCheck {
  SolveStatus status = SolveStatus::kOptimal;
  std::optional<DayRow> row;
};

DayCheck day_violation(const Market& mk, const std::vector<Winner>& winners, const std::vector<Money>& prices,
                       Money reservation, const SolveOptions& milp) {
  std::vector<double> weight(mk.bids().size());
  std::vector<Money> slack(mk.num_buyers(), 0.0);
  Money revenue = -reservation;
  for (std::size_t w = 0; w < winners.size(); ++w) {
    slack[winners[w].buyer] = winners[w].capped - prices[w];
    revenue += prices[w];
  }
  for (std::size_t b = 0; b < weight.size(); ++b) weight[b] = mk.capped(b) - slack[mk.bids()[b].owner];
  WdModel wd = wd_model(mk, weight);
  MilpSolution sol = solve(wd.model, milp);
  DayCheck out;
  out.status = sol.status;
  if (sol.status != SolveStatus::kOptimal || sol.objective <= revenue + kBlockTol) return out;

  const Allocation a = decode_allocation(mk, wd, sol.values);
  std::vector<bool> inside(mk.num_buyers(), false);
  Money value = 0.0;
  for (std::size_t i = 0; i < mk.num_buyers(); ++i) {
    if (!a.buyer_bid[i]) continue;
    inside[i] = true;
    value += mk.capped(mk.bid_index(i, *a.buyer_bid[i]));
  }
  for (std::size_t j = 0; j < mk.num_sellers(); ++j) {
    if (a.seller_ask[j]) value -= mk.asks()[mk.ask_index(j, *a.seller_ask[j])].value;
  }
  DayRow row;
  row.rhs = value + reservation;
  for (std::size_t w = 0; w < winners.size(); ++w) {
    if (inside[winners[w].buyer]) {
      row.rhs -= winners[w].capped;
    } else {
      row.outside.push_back(w);
      row.key += std::to_string(w) + ",";
    }
  }
  out.row = std::move(row);
  return out;
}

Outcome priced_outcome(const ExchangeInstance& in, const Allocation& a, const std::vector<Winner>& winners,
                       const std::vector<Money>& prices) {
  Outcome o = Outcome::empty_for(in);
  Money total = 0.0;
  for (std::size_t w = 0; w < winners.size(); ++w) {
    const auto& bid_owner = winners[w].buyer;
    o.buyer_bid[bid_owner] = a.buyer_bid[bid_owner];
    o.buyer_payment[bid_owner] = std::clamp(prices[w], 0.0, winners[w].capped);
    total += o.buyer_payment[bid_owner];
  }
  if (!winners.empty()) {
    o.seller_ask = a.seller_ask;
    for (std::size_t j = 0; j < in.sellers.size(); ++j) {
      if (a.seller_ask[j]) o.seller_receipt[j] = total;
    }
  }
  return o;
}

}  // namespace

std::optional<Money> value_within(const Buyer& buyer, const std::vector<std::string>& items) {
  std::optional<Money> best;
  for (const auto& bid : buyer.bids) {
    const bool fits = std::all_of(bid.bundle.begin(), bid.bundle.end(), [&](const std::string& it) {
      return std::find(items.begin(), items.end(), it) != items.end();
    });
    if (fits && (!best || bid.value > *best)) best = bid.value;
  }
  return best;
}

SingleSidedResult solve_single_sided(const ExchangeInstance& instance, const SingleSidedOptions& options) {
  if (instance.sellers.size() != 1) {
    throw std::invalid_argument("single-sided solver needs exactly one seller, got " +
                                std::to_string(instance.sellers.size()));
  }
  require_valid(instance);
  const Market mk(instance);
  SingleSidedResult res;
  res.outcome = Outcome::empty_for(instance);
  res.prices.assign(instance.buyers.size(), 0.0);

  std::vector<double> capped(mk.bids().size()), plain(mk.bids().size());
  for (std::size_t b = 0; b < capped.size(); ++b) {
    capped[b] = mk.capped(b);
    plain[b] = mk.bids()[b].value;
  }

  // Stage 1: capped revenue.
  WdModel cas = wd_model(mk, capped);
  MilpSolution s1 = solve(cas.model, options.milp);
  if (s1.status != SolveStatus::kOptimal) {
    res.status = s1.status;
    return res;
  }
  res.z_star = s1.objective;
  res.revenue_allocation = decode_allocation(mk, cas, s1.values);
  res.revenue_allocation_welfare = allocation_value(instance, res.revenue_allocation, false);

  // Stage 2: uncapped welfare among revenue-maximal allocations.
  WdModel cab = wd_model(mk, plain);
  std::vector<Term> floor;
  for (std::size_t b = 0; b < cab.x.size(); ++b) floor.push_back({cab.x[b], capped[b]});
  for (std::size_t a = 0; a < cab.y.size(); ++a) floor.push_back({cab.y[a], -mk.asks()[a].value});
  cab.model.add_constraint("revenue", floor, RowSense::kGe, res.z_star - 1e-7);
  MilpSolution s2 = solve(cab.model, options.milp);
  if (s2.status != SolveStatus::kOptimal) {
    res.status = s2.status == SolveStatus::kTimeout ? s2.status : SolveStatus::kInfeasible;
    return res;
  }
  res.allocation = decode_allocation(mk, cab, s2.values);
  std::vector<Winner> winners;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    if (!res.allocation.buyer_bid[i]) continue;
    const std::size_t b = mk.bid_index(i, *res.allocation.buyer_bid[i]);
    winners.push_back({i, b, mk.capped(b)});
  }
  if (winners.empty()) res.allocation.seller_ask.assign(instance.sellers.size(), std::nullopt);
  res.capped_revenue = allocation_value(instance, res.allocation, true);
  res.welfare = allocation_value(instance, res.allocation, false);

  Money reservation = 0.0;
  if (res.allocation.seller_ask[0]) reservation = instance.sellers[0].asks[*res.allocation.seller_ask[0]].value;

  // Stage 3: capped-value core prices, minimal total then lexicographic.
  MilpModel lp;
  std::vector<int> pvars;
  std::vector<Term> irs;
  for (std::size_t w = 0; w < winners.size(); ++w) {
    pvars.push_back(lp.add_continuous("p" + std::to_string(w), 0.0, winners[w].capped));
    irs.push_back({pvars.back(), 1.0});
  }
  if (!irs.empty()) lp.add_constraint("irs", irs, RowSense::kGe, reservation);
  std::vector<DayRow> rows;
  std::set<std::string> seen;
  std::vector<Money> prices(winners.size(), 0.0);
  while (!winners.empty()) {
    ++res.pricing_rounds;
    MilpSolution sol = detail::lexicographic_min(lp, pvars, options.milp);
    if (sol.status != SolveStatus::kOptimal) {
      res.status = sol.status;
      return res;
    }
    for (std::size_t w = 0; w < winners.size(); ++w) prices[w] = sol.values[pvars[w]];
    DayCheck check = day_violation(mk, winners, prices, reservation, options.milp);
    if (check.status != SolveStatus::kOptimal) {
      res.status = check.status;
      return res;
    }
    if (!check.row) break;
    if (!seen.insert(check.row->key).second) {
      throw std::runtime_error("core pricing regenerated coalition row " + check.row->key);
    }
    std::vector<Term> terms;
    for (std::size_t w : check.row->outside) terms.push_back({pvars[w], 1.0});
    lp.add_constraint("day" + std::to_string(rows.size()), terms, RowSense::kGe, check.row->rhs);
    rows.push_back(*check.row);
  }
  res.outcome = priced_outcome(instance, res.allocation, winners, prices);

  // Stage 3b: raise prices until no exchange coalition blocks either.
  BlockingOptions bopt;
  bopt.milp = options.milp;
  BlockReport report = separate(instance, res.outcome, std::nullopt, bopt);
  if (report.status != SolveStatus::kOptimal) {
    res.status = report.status;
    return res;
  }
  if (report.blocked) {
    res.repaired = true;
    CoreOptions copt;
    copt.milp = options.milp;
    detail::Master master(mk, copt);
    master.fix_allocation(res.allocation);
    std::vector<int> pay;
    for (const auto& w : winners) pay.push_back(master.pay_var(w.bid));
    auto add_day = [&](const DayRow& row) {
      std::vector<Term> terms;
      for (std::size_t w : row.outside) terms.push_back({pay[w], 1.0});
      master.add_row("day_" + row.key, terms, RowSense::kGe, row.rhs);
    };
    for (const auto& row : rows) add_day(row);
    std::set<std::string> cuts;
    for (;;) {
      if (report.blocked) {
        if (!cuts.insert(report.best->fingerprint()).second) {
          throw std::runtime_error("price repair regenerated deviation " + report.best->fingerprint());
        }
        master.add_cut(build_master_cut(*report.best, instance));
      }
      ++res.pricing_rounds;
      MilpSolution sol = detail::lexicographic_min(master.model(), pay, options.milp);
      if (sol.status != SolveStatus::kOptimal) {
        res.status = sol.status;
        return res;
      }
      for (std::size_t w = 0; w < winners.size(); ++w) prices[w] = sol.values[pay[w]];
      res.outcome = priced_outcome(instance, res.allocation, winners, prices);
      DayCheck check = day_violation(mk, winners, prices, reservation, options.milp);
      if (check.status != SolveStatus::kOptimal) {
        res.status = check.status;
        return res;
      }
      if (check.row) {
        if (!seen.insert(check.row->key).second) {
          throw std::runtime_error("core pricing regenerated coalition row " + check.row->key);
        }
        add_day(*check.row);
      }
      report = separate(instance, res.outcome, std::nullopt, bopt);
      if (report.status != SolveStatus::kOptimal) {
        res.status = report.status;
        return res;
      }
      if (!check.row && !report.blocked) break;
    }
  }
  for (std::size_t w = 0; w < winners.size(); ++w) res.prices[winners[w].buyer] = res.outcome.buyer_payment[winners[w].buyer];

  if (instance.buyers.size() + instance.sellers.size() <= options.audit_limit) {
    bool blocked = false;
    for (const auto& c : enumerate_coalitions(instance, std::nullopt)) {
      LowerLevelResult ll = lower_level(instance, res.outcome, c, bopt);
      if (ll.status == SolveStatus::kOptimal && ll.d > kBlockTol) {
        blocked = true;
        break;
      }
    }
    res.blocked_by_enumeration = blocked;
  }
  return res;
}

DyadicResult solve_dyadic(const ExchangeInstance& instance, const SolveOptions& milp) {
  const auto start = std::chrono::steady_clock::now();
  require_valid(instance);
  const Market mk(instance);
  CoreOptions copt;
  copt.milp = milp;
  detail::Master master(mk, copt);
  for (std::size_t i = 0; i < mk.num_buyers(); ++i) {
    const Money budget = mk.budget(i);
    for (std::size_t j = 0; j < mk.num_sellers(); ++j) {
      for (std::size_t a : mk.asks_of(j)) {
        const auto& ask = mk.asks()[a];
        std::optional<Money> v;
        for (std::size_t b : mk.bids_of(i)) {
          const auto& bid = mk.bids()[b];
          if (std::includes(ask.items.begin(), ask.items.end(), bid.items.begin(), bid.items.end())) {
            v = std::max(v.value_or(bid.value), bid.value);
          }
        }
        if (!v || std::min(budget, *v) <= ask.value) continue;
        const std::string tag = std::to_string(i) + "_" + std::to_string(a);
        std::vector<Term> imp = master.seller_payoff(j);
        for (const auto& t : master.buyer_payoff(i)) imp.push_back(t);
        if (budget >= *v) {
          master.add_row("imp" + tag, imp, RowSense::kGe, *v - ask.value);
          continue;
        }
        // gamma = 1 releases the improvement row but then the seller's
        // floor must exceed the budget.
        const int gamma = master.add_binary("gamma" + tag);
        std::vector<Term> bud = master.seller_payoff(j);
        bud.push_back({gamma, -budget});
        master.add_row("blockb" + tag, bud, RowSense::kGe, -ask.value);
        imp.push_back({gamma, *v + 1.0});
        master.add_row("imp" + tag, imp, RowSense::kGe, *v - ask.value);
      }
    }
  }
  DyadicResult res;
  MilpSolution sol = solve(master.model(), milp);
  res.status = sol.status;
  if (sol.status == SolveStatus::kOptimal) {
    MilpSolution tb = master.tie_break(sol.values, milp);
    res.outcome = master.decode(tb.status == SolveStatus::kOptimal ? tb.values : sol.values);
    res.welfare = welfare(instance, *res.outcome);
  }
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace combex
