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

#include "combex/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>

#include "combex/lp.hpp"

namespace combex {

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kPruneTol = 1e-7;

std::string var_label(const MilpModel& model, int j) {
  const auto& name = model.variables()[j].name;
  return name.empty() ? "#" + std::to_string(j) : "'" + name + "'";
}

std::string row_label(const MilpModel& model, int r) {
  const auto& name = model.constraints()[r].name;
  return name.empty() ? "#" + std::to_string(r) : "'" + name + "'";
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

int MilpModel::add_variable(std::string name, VarKind kind, double lb, double ub) {
  vars_.push_back(Variable{std::move(name), kind, lb, ub});
  obj_.push_back(0.0);
  return static_cast<int>(vars_.size()) - 1;
}

int MilpModel::add_constraint(std::string name, std::vector<Term> terms, RowSense sense, double rhs) {
  rows_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

void MilpModel::set_objective(ObjSense sense, std::vector<Term> terms, double constant) {
  sense_ = sense;
  std::fill(obj_.begin(), obj_.end(), 0.0);
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw ModelError("objective references undeclared variable #" + std::to_string(t.var));
    }
    obj_[t.var] += t.coef;
  }
  obj_constant_ = constant;
}

void MilpModel::set_objective_coef(int var, double coef) {
  if (var < 0 || var >= num_variables()) throw ModelError("objective references undeclared variable #" + std::to_string(var));
  obj_[var] = coef;
}

void MilpModel::set_bounds(int var, double lb, double ub) {
  if (var < 0 || var >= num_variables()) throw ModelError("bounds for undeclared variable #" + std::to_string(var));
  vars_[var].lb = lb;
  vars_[var].ub = ub;
}

void MilpModel::validate() const {
  for (int j = 0; j < num_variables(); ++j) {
    const auto& v = vars_[j];
    if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub) {
      throw ModelError("variable " + var_label(*this, j) + " has inconsistent bounds");
    }
    if (v.kind == VarKind::kContinuous && (!std::isfinite(v.lb) || !std::isfinite(v.ub))) {
      throw ModelError("continuous variable " + var_label(*this, j) + " needs finite bounds");
    }
    if (v.kind == VarKind::kBinary && (v.lb < 0.0 || v.ub > 1.0)) {
      throw ModelError("binary variable " + var_label(*this, j) + " has bounds outside [0,1]");
    }
    if (!std::isfinite(obj_[j])) throw ModelError("objective coefficient of " + var_label(*this, j) + " is not finite");
  }
  for (int r = 0; r < num_constraints(); ++r) {
    const auto& row = rows_[r];
    if (!std::isfinite(row.rhs)) throw ModelError("constraint " + row_label(*this, r) + " has non-finite right-hand side");
    for (const auto& t : row.terms) {
      if (t.var < 0 || t.var >= num_variables()) {
        throw ModelError("constraint " + row_label(*this, r) + " references undeclared variable #" + std::to_string(t.var));
      }
      if (!std::isfinite(t.coef)) throw ModelError("constraint " + row_label(*this, r) + " has a non-finite coefficient");
    }
  }
  if (time_limit_ms_ && !(*time_limit_ms_ >= 0.0)) throw ModelError("negative time limit");
}

double MilpModel::evaluate(const std::vector<double>& values) const {
  double v = obj_constant_;
  for (int j = 0; j < num_variables(); ++j) v += obj_[j] * values[j];
  return v;
}

double MilpModel::max_violation(const std::vector<double>& values) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, vars_[j].lb - values[j]);
    worst = std::max(worst, values[j] - vars_[j].ub);
    if (vars_[j].kind == VarKind::kBinary) worst = std::max(worst, std::abs(values[j] - std::round(values[j])));
  }
  for (const auto& row : rows_) {
    double act = 0.0;
    for (const auto& t : row.terms) act += t.coef * values[t.var];
    if (row.sense != RowSense::kGe) worst = std::max(worst, act - row.rhs);
    if (row.sense != RowSense::kLe) worst = std::max(worst, row.rhs - act);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

struct Node {
  std::int64_t id = 0;
  double bound = 0.0;  // parent relaxation value, maximization sense
  std::vector<double> lb;
  std::vector<double> ub;
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

}  // namespace

MilpSolution solve_builtin(const MilpModel& model, std::optional<double> time_limit_ms) {
  const auto start = std::chrono::steady_clock::now();
  model.validate();
  MilpSolution sol;
  auto finish = [&](SolveStatus status) {
    sol.status = status;
    sol.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return sol;
  };
  if (!time_limit_ms) time_limit_ms = model.time_limit_ms();
  Deadline deadline;
  if (time_limit_ms) deadline = start + std::chrono::microseconds(static_cast<std::int64_t>(*time_limit_ms * 1000.0));

  const int n = model.num_variables();
  const double sign = model.sense() == ObjSense::kMaximize ? 1.0 : -1.0;
  LpSolver lp(model);

  std::vector<int> binaries;
  for (int j = 0; j < n; ++j) {
    if (model.variables()[j].kind == VarKind::kBinary) binaries.push_back(j);
  }

  double incumbent = -std::numeric_limits<double>::infinity();
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t next_id = 0;
  {
    Node root;
    root.id = next_id++;
    root.bound = std::numeric_limits<double>::infinity();
    root.lb.resize(n);
    root.ub.resize(n);
    for (int j = 0; j < n; ++j) {
      root.lb[j] = model.variables()[j].lb;
      root.ub[j] = model.variables()[j].ub;
      if (model.variables()[j].kind == VarKind::kBinary) {
        root.lb[j] = std::ceil(root.lb[j] - kIntTol);
        root.ub[j] = std::floor(root.ub[j] + kIntTol);
        if (root.lb[j] > root.ub[j]) return finish(SolveStatus::kInfeasible);
      }
    }
    open.push(std::move(root));
  }

  while (!open.empty()) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) return finish(SolveStatus::kTimeout);
    Node node = open.top();
    open.pop();
    if (node.bound <= incumbent + kPruneTol) continue;
    ++sol.nodes;
    LpResult rel = lp.solve(node.lb, node.ub, node.basis.get(), deadline);
    if (rel.status == LpStatus::kTimeout || rel.status == LpStatus::kIterationLimit) {
      return finish(SolveStatus::kTimeout);
    }
    if (rel.status != LpStatus::kOptimal) continue;
    const double value = sign * rel.objective;
    if (value <= incumbent + kPruneTol) continue;

    int branch = -1;
    double most = kIntTol;
    for (int j : binaries) {
      const double v = rel.x[j];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > most) {
        most = frac;
        branch = j;
      }
    }
    auto basis = std::make_shared<const Basis>(lp.basis());

    if (branch < 0) {
      std::vector<double> lb = node.lb;
      std::vector<double> ub = node.ub;
      for (int j : binaries) lb[j] = ub[j] = std::round(rel.x[j]);
      LpResult polished = lp.solve(lb, ub, basis.get(), deadline);
      if (polished.status == LpStatus::kTimeout || polished.status == LpStatus::kIterationLimit) {
        return finish(SolveStatus::kTimeout);
      }
      const LpResult& use = polished.status == LpStatus::kOptimal ? polished : rel;
      const double v = sign * use.objective;
      if (v > incumbent) {
        incumbent = v;
        sol.values = use.x;
        for (int j : binaries) sol.values[j] = std::round(sol.values[j]);
        sol.objective = model.evaluate(sol.values);
      }
      continue;
    }

    Node down;
    down.id = next_id++;
    down.bound = value;
    down.lb = node.lb;
    down.ub = node.ub;
    down.ub[branch] = 0.0;
    down.basis = basis;
    Node up;
    up.id = next_id++;
    up.bound = value;
    up.lb = std::move(node.lb);
    up.ub = std::move(node.ub);
    up.lb[branch] = 1.0;
    up.basis = basis;
    open.push(std::move(down));
    open.push(std::move(up));
  }
  return finish(sol.has_solution() ? SolveStatus::kOptimal : SolveStatus::kInfeasible);
}

// ---------------------------------------------------------------------------
// Backend registry

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<MilpBackend>> backends;
  std::string default_name = "builtin";
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_backend(std::shared_ptr<MilpBackend> backend) {
  if (!backend) throw std::invalid_argument("null backend");
  const std::string name = backend->name();
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  if (name.empty() || name == "builtin" || r.backends.contains(name)) {
    throw std::invalid_argument("duplicate backend name '" + name + "'");
  }
  r.backends.emplace(name, std::move(backend));
}

bool unregister_backend(const std::string& name) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  if (r.default_name == name) r.default_name = "builtin";
  return r.backends.erase(name) > 0;
}

std::vector<std::string> backend_names() {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  std::vector<std::string> out{"builtin"};
  for (const auto& [name, b] : r.backends) out.push_back(name);
  return out;
}

void set_default_backend(const std::string& name) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  if (name != "builtin" && !r.backends.contains(name)) throw std::invalid_argument("unknown backend '" + name + "'");
  r.default_name = name;
}

std::string default_backend() {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  return r.default_name;
}

MilpSolution solve(const MilpModel& model, const SolveOptions& options) {
  std::optional<double> limit = options.time_limit_ms ? options.time_limit_ms : model.time_limit_ms();
  std::string name = options.backend.empty() ? default_backend() : options.backend;
  if (name == "builtin") return solve_builtin(model, limit);
  std::shared_ptr<MilpBackend> backend;
  {
    auto& r = registry();
    std::lock_guard<std::mutex> lock(r.mu);
    auto it = r.backends.find(name);
    if (it == r.backends.end()) throw std::invalid_argument("unknown backend '" + name + "'");
    backend = it->second;
  }
  model.validate();
  return backend->solve(model, limit);
}

// ---------------------------------------------------------------------------
// LP export

namespace {

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

std::string lp_name(const MilpModel& model, int j) {
  std::string name = model.variables()[j].name;
  if (name.empty()) return "x" + std::to_string(j);
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') c = '_';
  }
  return name + "_" + std::to_string(j);
}

void write_expr(std::ostringstream& os, const MilpModel& model, const std::vector<Term>& terms) {
  if (terms.empty()) {
    os << " 0 " << lp_name(model, 0);
    return;
  }
  for (const auto& t : terms) {
    os << (t.coef < 0 ? " - " : " + ") << fixed9(std::abs(t.coef)) << ' ' << lp_name(model, t.var);
  }
}

}  // namespace

std::string export_lp(const MilpModel& model) {
  model.validate();
  std::ostringstream os;
  os << (model.sense() == ObjSense::kMaximize ? "Maximize" : "Minimize") << "\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.objective()[j] != 0.0) obj.push_back({j, model.objective()[j]});
  }
  if (obj.empty() && model.num_variables() == 0) {
    os << " 0";
  } else {
    write_expr(os, model, obj);
  }
  if (model.objective_constant() != 0.0) {
    os << (model.objective_constant() < 0 ? " - " : " + ") << fixed9(std::abs(model.objective_constant()));
  }
  os << "\nSubject To\n";
  for (int r = 0; r < model.num_constraints(); ++r) {
    const auto& row = model.constraints()[r];
    os << " c" << r << ':';
    write_expr(os, model, row.terms);
    os << (row.sense == RowSense::kLe ? " <= " : row.sense == RowSense::kGe ? " >= " : " = ") << fixed9(row.rhs)
       << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variables()[j];
    os << ' ' << fixed9(v.lb) << " <= " << lp_name(model, j) << " <= " << fixed9(v.ub) << '\n';
  }
  bool any_binary = false;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].kind != VarKind::kBinary) continue;
    if (!any_binary) os << "Binaries\n";
    any_binary = true;
    os << ' ' << lp_name(model, j) << '\n';
  }
  os << "End\n";
  return os.str();
}

}  // namespace combex
