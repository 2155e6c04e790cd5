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

#ifndef COMBEX_MILP_HPP_
#define COMBEX_MILP_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace combex {

enum class VarKind { kContinuous, kBinary };
enum class ObjSense { kMaximize, kMinimize };
enum class RowSense { kLe, kGe, kEq };
enum class SolveStatus { kOptimal, kInfeasible, kTimeout };

const char* to_string(SolveStatus status);

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lb = 0.0;
  double ub = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
};

class ModelError : public std::invalid_argument {
 public:
  explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

// Bounded mixed-binary linear program.
class MilpModel {
 public:
  int add_variable(std::string name, VarKind kind, double lb, double ub);
  int add_binary(std::string name) { return add_variable(std::move(name), VarKind::kBinary, 0.0, 1.0); }
  int add_continuous(std::string name, double lb, double ub) {
    return add_variable(std::move(name), VarKind::kContinuous, lb, ub);
  }
  int add_constraint(std::string name, std::vector<Term> terms, RowSense sense, double rhs);

  void set_objective(ObjSense sense, std::vector<Term> terms, double constant = 0.0);
  void set_objective_sense(ObjSense sense) { sense_ = sense; }
  void set_objective_coef(int var, double coef);
  void set_bounds(int var, double lb, double ub);
  void set_time_limit_ms(std::optional<double> ms) { time_limit_ms_ = ms; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<double>& objective() const { return obj_; }
  double objective_constant() const { return obj_constant_; }
  ObjSense sense() const { return sense_; }
  std::optional<double> time_limit_ms() const { return time_limit_ms_; }

  // Throws ModelError naming the first offending variable or constraint.
  void validate() const;

  // Objective value and maximum constraint / bound violation of a point.
  double evaluate(const std::vector<double>& values) const;
  double max_violation(const std::vector<double>& values) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> obj_;
  double obj_constant_ = 0.0;
  ObjSense sense_ = ObjSense::kMaximize;
  std::optional<double> time_limit_ms_;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;  // empty unless an incumbent exists
  std::int64_t nodes = 0;
  double wall_ms = 0.0;

  bool has_solution() const { return !values.empty(); }
};

struct SolveOptions {
  // Empty selects the process default backend ("builtin" unless changed).
  std::string backend;
  // Overrides the model's own limit when set.
  std::optional<double> time_limit_ms;
};

MilpSolution solve(const MilpModel& model, const SolveOptions& options = {});

// Built-in branch and bound, bypassing the backend registry.
MilpSolution solve_builtin(const MilpModel& model, std::optional<double> time_limit_ms);

class MilpBackend {
 public:
  virtual ~MilpBackend() = default;
  virtual std::string name() const = 0;
  virtual MilpSolution solve(const MilpModel& model, std::optional<double> time_limit_ms) = 0;
};

// Throws std::invalid_argument on a duplicate (or reserved "builtin") name.
void register_backend(std::shared_ptr<MilpBackend> backend);
bool unregister_backend(const std::string& name);
std::vector<std::string> backend_names();
void set_default_backend(const std::string& name);
std::string default_backend();

// CPLEX-style LP text, fixed-point with 9 decimals.
std::string export_lp(const MilpModel& model);

}  // namespace combex

#endif  // COMBEX_MILP_HPP_
