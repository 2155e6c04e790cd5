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

#ifndef COMBEX_LP_HPP_
#define COMBEX_LP_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "combex/milp.hpp"

namespace combex {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kTimeout, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;              // in the model's sense, constant included
  std::vector<double> x;               // structural values
  std::vector<double> duals;           // one per row, model sense
  std::vector<double> reduced_costs;   // one per structural, model sense
  std::int64_t iterations = 0;
  bool bland = false;                  // anti-cycling rule was engaged
};

// Basis snapshot: basic variable per row, and for every variable
// (structurals then row slacks) 0 = basic, 1 = at lower, 2 = at upper,
// 3 = free at zero.
struct Basis {
  std::vector<int> head;
  std::vector<signed char> status;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

// Dense bounded-variable primal simplex on the continuous relaxation of a
// model. Rows become  a.x + s = rhs  with the slack bounded by the sense.
class LpSolver {
 public:
  explicit LpSolver(const MilpModel& model);

  // Bounds are for the structural variables only.
  LpResult solve(const std::vector<double>& lb, const std::vector<double>& ub,
                 const Basis* warm = nullptr, Deadline deadline = std::nullopt);
  LpResult solve(Deadline deadline = std::nullopt);

  Basis basis() const { return Basis{head_, status_}; }
  int num_rows() const { return m_; }
  int num_cols() const { return n_; }

 private:
  bool refactor();
  void slack_basis();
  void place_nonbasic(int j);
  void recompute_basics();
  void pivot(int row, int col);
  double column_entry(int row, int col) const;

  const MilpModel* model_;
  int n_ = 0;
  int m_ = 0;
  int width_ = 0;
  std::vector<double> a_;     // m x n, row-major
  std::vector<double> b_;
  std::vector<double> cost_;  // minimization costs, width_
  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<double> t_;     // tableau B^-1 [A | I], m x width_
  std::vector<double> x_;
  std::vector<int> head_;
  std::vector<signed char> status_;
};

LpResult solve_lp(const MilpModel& model, Deadline deadline = std::nullopt);

}  // namespace combex

#endif  // COMBEX_LP_HPP_
