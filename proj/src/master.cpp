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


#include "master.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace combex::detail {

Master::Master(const Market& market, const CoreOptions& options) : market_(market), options_(options) {
  auto& m = model_;
  const Money mpay = market.payment_bound();
  std::vector<std::vector<Term>> demand(market.num_items());
  std::vector<std::vector<Term>> supply(market.num_items());
  std::vector<Term> bb;
  std::vector<Term> obj;
  buyer_terms_.resize(market.num_buyers());
  seller_terms_.resize(market.num_sellers());
  for (std::size_t i = 0; i < market.num_buyers(); ++i) {
    std::vector<Term> xor_row;
    for (std::size_t b : market.bids_of(i)) {
      const Money capv = market.capped(b);
      const Money v = market.bids()[b].value;
      const int x = m.add_binary("x" + std::to_string(b));
      const int p = m.add_continuous("p" + std::to_string(b), 0.0, capv);
      m.add_constraint("bc" + std::to_string(b), {{p, 1.0}, {x, -capv}}, RowSense::kLe, 0.0);
      x_.push_back(x);
      pay_.push_back(p);
      xor_row.push_back({x, 1.0});
      for (int k : market.bids()[b].items) demand[k].push_back({x, 1.0});
      bb.push_back({p, 1.0});
      obj.push_back({x, v});
      buyer_terms_[i].push_back({x, v});
      buyer_terms_[i].push_back({p, -1.0});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_b" + std::to_string(i), xor_row, RowSense::kLe, 1.0);
  }
  for (std::size_t j = 0; j < market.num_sellers(); ++j) {
    std::vector<Term> xor_row;
    for (std::size_t a : market.asks_of(j)) {
      const Money r = market.asks()[a].value;
      const int y = m.add_binary("y" + std::to_string(a));
      const int q = m.add_continuous("q" + std::to_string(a), 0.0, mpay);
      m.add_constraint("irs_lo" + std::to_string(a), {{q, 1.0}, {y, -r}}, RowSense::kGe, 0.0);
      m.add_constraint("irs_hi" + std::to_string(a), {{q, 1.0}, {y, -mpay}}, RowSense::kLe, 0.0);
      y_.push_back(y);
      recv_.push_back(q);
      xor_row.push_back({y, 1.0});
      for (int k : market.asks()[a].items) supply[k].push_back({y, 1.0});
      bb.push_back({q, -1.0});
      obj.push_back({y, -r});
      seller_terms_[j].push_back({q, 1.0});
      seller_terms_[j].push_back({y, -r});
    }
    if (xor_row.size() > 1) m.add_constraint("xor_s" + std::to_string(j), xor_row, RowSense::kLe, 1.0);
  }
  for (std::size_t k = 0; k < market.num_items(); ++k) {
    if (demand[k].empty()) continue;
    std::vector<Term> row = demand[k];
    for (const auto& t : supply[k]) row.push_back({t.var, -1.0});
    m.add_constraint("supply" + std::to_string(k), row, RowSense::kLe, 0.0);
  }
  if (!bb.empty()) m.add_constraint("bb", bb, RowSense::kEq, 0.0);
  if (options.delta_weight) {
    delta_ = m.add_continuous("delta", 0.0, options.delta_max);
    obj.push_back({delta_, -*options.delta_weight});
  }
  m.set_objective(ObjSense::kMaximize, obj);
}

void Master::add_cut(const MasterCut& cut) {
  auto& m = model_;
  const int id = cuts_++;
  const std::string tag = std::to_string(id);
  std::vector<Term> row;
  double rhs = 0.0;
  const Money eps = options_.epsilon;
  auto add_eps = [&](double coef) {
    // coef * E on the left-hand side
    if (delta_ >= 0) row.push_back({delta_, coef});
    else rhs -= coef * eps;
  };
  for (std::size_t t = 0; t < cut.deviation.buyer_trades.size(); ++t) {
    const auto& bt = cut.deviation.buyer_trades[t];
    const Money v = market_.bids()[market_.bid_index(bt.buyer, bt.bid)].value;
    const Money budget = market_.budget(bt.buyer);
    if (cut.big_m[t] <= 0.0) {
      // v - pi_i - E
      rhs -= v;
      for (const auto& term : buyer_terms_[bt.buyer]) row.push_back({term.var, -term.coef});
      add_eps(-1.0);
      continue;
    }
    const Money big_m = cut.big_m[t];
    const Money vmax = market_.max_value(bt.buyer);
    const int tv = m.add_continuous("t" + tag + "_" + std::to_string(t), -(vmax + epsilon_bound() + 1.0), vmax + 1.0);
    const int u = m.add_binary("u" + tag + "_" + std::to_string(t));
    m.add_constraint("cap" + tag + "_" + std::to_string(t), {{tv, 1.0}, {u, -big_m}}, RowSense::kGe, budget - big_m);
    std::vector<Term> lin{{tv, 1.0}, {u, big_m}};
    for (const auto& term : buyer_terms_[bt.buyer]) lin.push_back(term);
    double lin_rhs = v;
    if (delta_ >= 0) lin.push_back({delta_, 1.0});
    else lin_rhs -= eps;
    m.add_constraint("val" + tag + "_" + std::to_string(t), lin, RowSense::kGe, lin_rhs);
    row.push_back({tv, 1.0});
  }
  for (const auto& st : cut.deviation.seller_trades) {
    const Money r = market_.asks()[market_.ask_index(st.seller, st.ask)].value;
    rhs += r;
    for (const auto& term : seller_terms_[st.seller]) row.push_back({term.var, -term.coef});
    add_eps(-1.0);
  }
  m.add_constraint("cut" + tag, row, RowSense::kLe, rhs);
}

void Master::fix_allocation(const Allocation& allocation) {
  for (std::size_t b = 0; b < x_.size(); ++b) {
    const auto& bid = market_.bids()[b];
    const double on = allocation.buyer_bid[bid.owner] == std::optional<std::size_t>(bid.local) ? 1.0 : 0.0;
    model_.set_bounds(x_[b], on, on);
  }
  for (std::size_t a = 0; a < y_.size(); ++a) {
    const auto& ask = market_.asks()[a];
    const double on = allocation.seller_ask[ask.owner] == std::optional<std::size_t>(ask.local) ? 1.0 : 0.0;
    model_.set_bounds(y_[a], on, on);
  }
}

int Master::add_row(const std::string& name, std::vector<Term> terms, RowSense sense, double rhs) {
  return model_.add_constraint(name, std::move(terms), sense, rhs);
}

MilpSolution Master::tie_break(const std::vector<double>& values, const SolveOptions& opts) const {
  MilpModel m = model_;
  for (int x : x_) m.set_bounds(x, std::round(values[x]), std::round(values[x]));
  for (int y : y_) m.set_bounds(y, std::round(values[y]), std::round(values[y]));
  if (delta_ >= 0) m.set_bounds(delta_, values[delta_], values[delta_]);
  std::vector<Term> obj;
  for (int p : pay_) obj.push_back({p, 1.0});
  m.set_objective(ObjSense::kMinimize, obj);
  return solve(m, opts);
}

Outcome Master::decode(const std::vector<double>& values) const {
  Outcome o = Outcome::empty_for(market_.instance());
  for (std::size_t b = 0; b < x_.size(); ++b) {
    if (values[x_[b]] < 0.5) continue;
    const auto& bid = market_.bids()[b];
    o.buyer_bid[bid.owner] = bid.local;
    o.buyer_payment[bid.owner] = std::clamp(values[pay_[b]], 0.0, market_.capped(b));
  }
  for (std::size_t a = 0; a < y_.size(); ++a) {
    if (values[y_[a]] < 0.5) continue;
    const auto& ask = market_.asks()[a];
    o.seller_ask[ask.owner] = ask.local;
    o.seller_receipt[ask.owner] = std::max(values[recv_[a]], ask.value);
  }
  return o;
}

MilpSolution lexicographic_min(MilpModel model, const std::vector<int>& vars, const SolveOptions& opts, double tol) {
  std::vector<Term> total;
  for (int v : vars) total.push_back({v, 1.0});
  model.set_objective(ObjSense::kMinimize, total);
  MilpSolution sol = solve(model, opts);
  if (sol.status != SolveStatus::kOptimal) return sol;
  model.add_constraint("lex_total", total, RowSense::kLe, sol.objective + tol);
  for (int v : vars) {
    model.set_objective(ObjSense::kMinimize, {{v, 1.0}});
    MilpSolution next = solve(model, opts);
    if (next.status != SolveStatus::kOptimal) return next.status == SolveStatus::kTimeout ? next : sol;
    sol = std::move(next);
    const auto& var = model.variables()[v];
    model.set_bounds(v, var.lb, std::max(var.lb, sol.values[v] + tol));
  }
  return sol;
}

}  // namespace combex::detail
