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


#ifndef COMBEX_SRC_MASTER_HPP_
#define COMBEX_SRC_MASTER_HPP_

#include <optional>
#include <vector>

#include "combex/core_solver.hpp"
#include "combex/market.hpp"
#include "combex/milp.hpp"
#include "combex/wdp.hpp"

namespace combex::detail {

// Master program: allocation, linearised payments and the cut pool.
class Master {
 public:
  Master(const Market& market, const CoreOptions& options);

  Money epsilon_bound() const { return delta_ >= 0 ? options_.delta_max : options_.epsilon; }

  void add_cut(const MasterCut& cut);
  // Pins x and y to the given allocation.
  void fix_allocation(const Allocation& allocation);
  int add_row(const std::string& name, std::vector<Term> terms, RowSense sense, double rhs);
  int add_binary(const std::string& name) { return model_.add_binary(name); }

  const MilpModel& model() const { return model_; }
  const Market& market() const { return market_; }
  // pi_i and pi_j as linear expressions.
  const std::vector<Term>& buyer_payoff(std::size_t buyer) const { return buyer_terms_[buyer]; }
  const std::vector<Term>& seller_payoff(std::size_t seller) const { return seller_terms_[seller]; }
  int pay_var(std::size_t bid) const { return pay_[bid]; }
  const std::vector<int>& pay_vars() const { return pay_; }

  // Re-solves with the allocation fixed, minimising total buyer payments.
  MilpSolution tie_break(const std::vector<double>& values, const SolveOptions& opts) const;
  Outcome decode(const std::vector<double>& values) const;
  Money delta_value(const std::vector<double>& values) const {
    return delta_ >= 0 ? values[delta_] : options_.epsilon;
  }

 private:
  const Market& market_;
  CoreOptions options_;
  MilpModel model_;
  std::vector<int> x_, pay_, y_, recv_;
  std::vector<std::vector<Term>> buyer_terms_;
  std::vector<std::vector<Term>> seller_terms_;
  int delta_ = -1;
  int cuts_ = 0;
};

// Minimises the sum of `vars`, then each var in order, holding earlier
// optima within `tol`. Returns the last solve.
MilpSolution lexicographic_min(MilpModel model, const std::vector<int>& vars, const SolveOptions& opts,
                               double tol = 1e-7);

}  // namespace combex::detail

#endif  // COMBEX_SRC_MASTER_HPP_
