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

#include "combex/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "combex/market.hpp"

namespace combex {

namespace {

constexpr Money kInf = std::numeric_limits<Money>::infinity();

}  // namespace

Money max_min_improvement_for_allocation(const std::vector<Money>& values, const std::vector<Money>& budgets,
                                         const std::vector<Money>& reservations,
                                         const std::vector<Money>& buyer_payoffs,
                                         const std::vector<Money>& seller_payoffs) {
  const std::size_t nb = values.size();
  const std::size_t ns = reservations.size();
  if (nb == 0 && ns == 0) return kInf;
  auto f = [&](Money d) {
    Money s = 0.0;
    for (std::size_t i = 0; i < nb; ++i) s += std::min({budgets[i], values[i], values[i] - buyer_payoffs[i] - d});
    for (std::size_t j = 0; j < ns; ++j) s -= std::max(reservations[j], reservations[j] + seller_payoffs[j] + d);
    return s;
  };
  Money floor = 0.0;
  for (std::size_t i = 0; i < nb; ++i) floor += std::min(budgets[i], values[i]);
  for (std::size_t j = 0; j < ns; ++j) floor -= reservations[j];
  if (floor < 0.0) return -kInf;

  Money top = 0.0;
  for (Money p : buyer_payoffs) top = std::max(top, std::abs(p));
  for (Money p : seller_payoffs) top = std::max(top, std::abs(p));
  Money lo = -(top + 1.0);
  Money hi = 0.0;
  if (nb > 0) {
    hi = kInf;
    for (std::size_t i = 0; i < nb; ++i) hi = std::min(hi, values[i] - buyer_payoffs[i]);
  }
  if (hi < lo) lo = hi;
  if (f(hi) >= 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const Money mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0) lo = mid;
    else hi = mid;
  }
  return lo;
}

DevisedPrices devise_prices(const std::vector<Money>& values, const std::vector<Money>& budgets,
                            const std::vector<Money>& reservations, const std::vector<Money>& buyer_payoffs,
                            const std::vector<Money>& seller_payoffs, Money epsilon) {
  const std::size_t nb = values.size();
  const std::size_t ns = reservations.size();
  std::vector<Money> cap(nb);
  Money s = 0.0;
  Money min_cap = kInf;
  for (std::size_t i = 0; i < nb; ++i) {
    cap[i] = std::min(budgets[i], values[i] - buyer_payoffs[i] - epsilon);
    s += cap[i];
    min_cap = std::min(min_cap, cap[i]);
  }
  for (std::size_t j = 0; j < ns; ++j) s -= reservations[j] + seller_payoffs[j] + epsilon;
  if (!(s > 0.0) || nb == 0 || !(min_cap > 0.0)) {
    throw std::invalid_argument("devise_prices needs a positive separation surplus");
  }
  const Money members = static_cast<Money>(nb + ns);
  const Money d = std::min(s / (members + 1.0), 0.5 * min_cap);
  DevisedPrices out;
  out.improvement = d;
  Money pot = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    out.payments.push_back(cap[i] - d);
    pot += cap[i] - d;
  }
  Money base_total = 0.0;
  for (std::size_t j = 0; j < ns; ++j) {
    out.receipts.push_back(reservations[j] + seller_payoffs[j] + epsilon + d);
    base_total += out.receipts.back();
  }
  if (ns > 0) {
    const Money share = (pot - base_total) / static_cast<Money>(ns);
    for (auto& r : out.receipts) r += share;
  }
  return out;
}

// ---------------------------------------------------------------------------

LowerLevelResult lower_level(const ExchangeInstance& instance, const Outcome& outcome, const Coalition& coalition,
                             const BlockingOptions& options) {
  const Market market(instance);
  const auto pib = buyer_payoffs(instance, outcome);
  const auto pis = seller_payoffs(instance, outcome);
  const Money mpay = market.payment_bound();
  Money top = 0.0;
  for (Money p : pib) top = std::max(top, std::abs(p));
  for (Money p : pis) top = std::max(top, std::abs(p));
  Money vmax = 0.0;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) vmax = std::max(vmax, market.max_value(i));
  const Money dbig = mpay + top + vmax + 1.0;

  MilpModel m;
  const int d = m.add_continuous("d", -dbig, dbig);
  struct BidVar { std::size_t bid; int x; int pay; };
  struct AskVar { std::size_t ask; int y; int recv; };
  std::vector<BidVar> bids;
  std::vector<AskVar> asks;
  std::vector<std::vector<Term>> demand(market.num_items());
  std::vector<std::vector<Term>> supply(market.num_items());
  std::vector<Term> bb;

  for (std::size_t i : coalition.buyers) {
    std::vector<Term> xor_row;
    std::vector<Term> imp{{d, 1.0}};
    for (std::size_t b : market.bids_of(i)) {
      const Money capv = market.capped(b);
      const int x = m.add_binary("chi" + std::to_string(b));
      const int p = m.add_continuous("pay" + std::to_string(b), 0.0, capv);
      m.add_constraint("bc" + std::to_string(b), {{p, 1.0}, {x, -capv}}, RowSense::kLe, 0.0);
      bids.push_back({b, x, p});
      xor_row.push_back({x, 1.0});
      for (int k : market.bids()[b].items) demand[k].push_back({x, 1.0});
      imp.push_back({x, -market.bids()[b].value});
      imp.push_back({p, 1.0});
      bb.push_back({p, 1.0});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_b" + std::to_string(i), xor_row, RowSense::kLe, 1.0);
    m.add_constraint("imp_b" + std::to_string(i), imp, RowSense::kLe, -pib[i]);
  }
  for (std::size_t j : coalition.sellers) {
    std::vector<Term> xor_row;
    std::vector<Term> imp{{d, 1.0}};
    for (std::size_t a : market.asks_of(j)) {
      const Money r = market.asks()[a].value;
      const int y = m.add_binary("gamma" + std::to_string(a));
      const int q = m.add_continuous("recv" + std::to_string(a), 0.0, mpay);
      m.add_constraint("irs_lo" + std::to_string(a), {{q, 1.0}, {y, -r}}, RowSense::kGe, 0.0);
      m.add_constraint("irs_hi" + std::to_string(a), {{q, 1.0}, {y, -mpay}}, RowSense::kLe, 0.0);
      asks.push_back({a, y, q});
      xor_row.push_back({y, 1.0});
      for (int k : market.asks()[a].items) supply[k].push_back({y, 1.0});
      imp.push_back({q, -1.0});
      imp.push_back({y, r});
      bb.push_back({q, -1.0});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_s" + std::to_string(j), xor_row, RowSense::kLe, 1.0);
    m.add_constraint("imp_s" + std::to_string(j), imp, RowSense::kLe, -pis[j]);
  }
  for (std::size_t k = 0; k < market.num_items(); ++k) {
    if (demand[k].empty()) continue;
    std::vector<Term> row = demand[k];
    for (const auto& t : supply[k]) row.push_back({t.var, -1.0});
    m.add_constraint("supply" + std::to_string(k), row, RowSense::kLe, 0.0);
  }
  if (!bb.empty()) m.add_constraint("bb", bb, RowSense::kEq, 0.0);
  m.set_objective(ObjSense::kMaximize, {{d, 1.0}});

  LowerLevelResult res;
  res.witness.coalition = coalition;
  MilpSolution sol = solve(m, options.milp);
  if (sol.status != SolveStatus::kOptimal) {
    res.status = sol.status;
    return res;
  }
  res.d = sol.values[d];
  for (const auto& v : bids) {
    if (sol.values[v.x] > 0.5) {
      const auto& o = market.bids()[v.bid];
      res.witness.buyer_trades.push_back({o.owner, o.local, sol.values[v.pay]});
    }
  }
  for (const auto& v : asks) {
    if (sol.values[v.y] > 0.5) {
      const auto& o = market.asks()[v.ask];
      res.witness.seller_trades.push_back({o.owner, o.local, sol.values[v.recv]});
    }
  }
  res.witness.min_improvement = res.d;
  return res;
}

// ---------------------------------------------------------------------------

BlockReport separate(const ExchangeInstance& instance, const Outcome& outcome, std::optional<std::size_t> max_size,
                     const BlockingOptions& options) {
  const Market market(instance);
  const auto pib = buyer_payoffs(instance, outcome);
  const auto pis = seller_payoffs(instance, outcome);
  const Money eps = options.epsilon;
  const std::size_t bidders = instance.buyers.size() + instance.sellers.size();

  BlockReport report;
  report.max_size = max_size;
  report.epsilon = eps;
  report.scanned = count_coalitions(bidders, max_size);

  MilpModel m;
  std::vector<std::pair<std::size_t, int>> bid_vars;
  std::vector<std::pair<std::size_t, int>> ask_vars;
  std::vector<std::vector<Term>> demand(market.num_items());
  std::vector<std::vector<Term>> supply(market.num_items());
  std::vector<Term> all;
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    std::vector<Term> xor_row;
    for (std::size_t b : market.bids_of(i)) {
      const Money c = std::min(market.budget(i), market.bids()[b].value - pib[i] - eps);
      if (c <= 0.0) continue;
      const int x = m.add_binary("chi" + std::to_string(b));
      m.set_objective_coef(x, c);
      bid_vars.emplace_back(b, x);
      xor_row.push_back({x, 1.0});
      all.push_back({x, 1.0});
      for (int k : market.bids()[b].items) demand[k].push_back({x, 1.0});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_b" + std::to_string(i), xor_row, RowSense::kLe, 1.0);
  }
  if (bid_vars.empty()) return report;
  for (std::size_t j = 0; j < instance.sellers.size(); ++j) {
    std::vector<Term> xor_row;
    for (std::size_t a : market.asks_of(j)) {
      bool useful = false;
      for (int k : market.asks()[a].items) useful = useful || !demand[k].empty();
      if (!useful) continue;
      const int y = m.add_binary("gamma" + std::to_string(a));
      m.set_objective_coef(y, -(market.asks()[a].value + pis[j] + eps));
      ask_vars.emplace_back(a, y);
      xor_row.push_back({y, 1.0});
      all.push_back({y, 1.0});
      for (int k : market.asks()[a].items) supply[k].push_back({y, 1.0});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_s" + std::to_string(j), xor_row, RowSense::kLe, 1.0);
  }
  for (std::size_t k = 0; k < market.num_items(); ++k) {
    if (demand[k].empty()) continue;
    std::vector<Term> row = demand[k];
    for (const auto& t : supply[k]) row.push_back({t.var, -1.0});
    m.add_constraint("supply" + std::to_string(k), row, RowSense::kLe, 0.0);
  }
  if (max_size && *max_size < bidders) {
    m.add_constraint("cardinality", all, RowSense::kLe, static_cast<double>(*max_size));
  }
  m.set_objective_sense(ObjSense::kMaximize);

  MilpSolution sol = solve(m, options.milp);
  if (sol.status != SolveStatus::kOptimal) {
    report.status = sol.status;
    return report;
  }
  report.surplus = std::max(0.0, sol.objective);
  if (!(sol.objective > kBlockTol)) return report;

  // Coalition = trading members; drop sellers whose items nobody uses.
  std::vector<int> used(market.num_items(), 0);
  std::vector<std::size_t> chosen_bids;
  for (const auto& [b, x] : bid_vars) {
    if (sol.values[x] < 0.5) continue;
    chosen_bids.push_back(b);
    for (int k : market.bids()[b].items) used[k] = 1;
  }
  std::vector<std::size_t> chosen_asks;
  for (const auto& [a, y] : ask_vars) {
    if (sol.values[y] < 0.5) continue;
    bool needed = false;
    for (int k : market.asks()[a].items) needed = needed || used[k];
    if (needed) chosen_asks.push_back(a);
  }

  std::vector<Money> values, budgets, reservations, pb, ps;
  Deviation dev;
  for (std::size_t b : chosen_bids) {
    const auto& o = market.bids()[b];
    values.push_back(o.value);
    budgets.push_back(market.budget(o.owner));
    pb.push_back(pib[o.owner]);
    dev.coalition.buyers.push_back(o.owner);
  }
  for (std::size_t a : chosen_asks) {
    const auto& o = market.asks()[a];
    reservations.push_back(o.value);
    ps.push_back(pis[o.owner]);
    dev.coalition.sellers.push_back(o.owner);
  }
  const DevisedPrices prices = devise_prices(values, budgets, reservations, pb, ps, eps);
  Money worst = kInf;
  for (std::size_t t = 0; t < chosen_bids.size(); ++t) {
    const auto& o = market.bids()[chosen_bids[t]];
    dev.buyer_trades.push_back({o.owner, o.local, prices.payments[t]});
    worst = std::min(worst, o.value - prices.payments[t] - pb[t]);
  }
  for (std::size_t t = 0; t < chosen_asks.size(); ++t) {
    const auto& o = market.asks()[chosen_asks[t]];
    dev.seller_trades.push_back({o.owner, o.local, prices.receipts[t]});
    worst = std::min(worst, prices.receipts[t] - o.value - ps[t]);
  }
  dev.min_improvement = worst;
  report.blocked = true;
  report.best = std::move(dev);
  return report;
}

BlockReport membership_check(const ExchangeInstance& instance, const Outcome& outcome,
                             std::optional<std::size_t> max_size, const BlockingOptions& options) {
  auto violations = check_outcome(instance, outcome);
  if (!violations.empty()) {
    std::string msg = "membership_check needs a feasible outcome:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return separate(instance, outcome, max_size, options);
}

std::vector<Coalition> prune_unblockable(const ExchangeInstance& instance, const std::vector<Coalition>& coalitions,
                                         const WdpOptions& options) {
  WdpOptions fast = options;
  fast.canonical = false;
  std::vector<Coalition> out;
  for (const auto& c : coalitions) {
    if (c.buyers.empty() || c.sellers.empty()) continue;
    auto r = max_welfare(instance, c, true, fast);
    if (r.status != SolveStatus::kOptimal || r.value > kFeasTol) out.push_back(c);
  }
  return out;
}

std::vector<Coalition> enumerate_coalitions(const ExchangeInstance& instance, std::optional<std::size_t> max_size,
                                            bool include_grand) {
  const std::size_t nb = instance.buyers.size();
  const std::size_t n = nb + instance.sellers.size();
  const std::size_t cap = std::min(n, max_size.value_or(n));
  std::vector<Coalition> out;
  std::vector<std::size_t> pick;
  for (std::size_t size = 1; size <= cap; ++size) {
    if (size == n && !include_grand) break;
    pick.resize(size);
    for (std::size_t k = 0; k < size; ++k) pick[k] = k;
    while (true) {
      Coalition c;
      for (std::size_t v : pick) {
        if (v < nb) c.buyers.push_back(v);
        else c.sellers.push_back(v - nb);
      }
      out.push_back(std::move(c));
      std::size_t k = size;
      while (k > 0 && pick[k - 1] == n - size + k - 1) --k;
      if (k == 0) break;
      ++pick[k - 1];
      for (std::size_t t = k; t < size; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
  return out;
}

std::uint64_t count_coalitions(std::size_t bidders, std::optional<std::size_t> max_size) {
  const std::size_t cap = std::min(bidders, max_size.value_or(bidders));
  const std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  long double binom = 1.0L;
  for (std::size_t k = 1; k <= cap; ++k) {
    binom = binom * static_cast<long double>(bidders - k + 1) / static_cast<long double>(k);
    if (binom + static_cast<long double>(total) >= static_cast<long double>(kMax)) return kMax;
    total += static_cast<std::uint64_t>(std::llround(binom));
  }
  return total;
}

}  // namespace combex
