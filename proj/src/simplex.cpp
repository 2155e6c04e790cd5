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

#include <algorithm>
#include <cmath>
#include <limits>

#include "combex/lp.hpp"

namespace combex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr int kRefactorEvery = 50;

enum : signed char { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeZero = 3 };

}  // namespace

LpSolver::LpSolver(const MilpModel& model) : model_(&model) {
  model.validate();
  n_ = model.num_variables();
  m_ = model.num_constraints();
  width_ = n_ + m_;
  a_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
  b_.assign(m_, 0.0);
  cost_.assign(width_, 0.0);
  lb_.assign(width_, 0.0);
  ub_.assign(width_, 0.0);
  const double sign = model.sense() == ObjSense::kMaximize ? -1.0 : 1.0;
  for (int j = 0; j < n_; ++j) {
    cost_[j] = sign * model.objective()[j];
    lb_[j] = model.variables()[j].lb;
    ub_[j] = model.variables()[j].ub;
  }
  for (int r = 0; r < m_; ++r) {
    const auto& row = model.constraints()[r];
    for (const auto& t : row.terms) a_[static_cast<std::size_t>(r) * n_ + t.var] += t.coef;
    b_[r] = row.rhs;
    switch (row.sense) {
      case RowSense::kLe: lb_[n_ + r] = 0.0; ub_[n_ + r] = kInf; break;
      case RowSense::kGe: lb_[n_ + r] = -kInf; ub_[n_ + r] = 0.0; break;
      case RowSense::kEq: lb_[n_ + r] = 0.0; ub_[n_ + r] = 0.0; break;
    }
  }
  t_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
  x_.assign(width_, 0.0);
  slack_basis();
}

double LpSolver::column_entry(int row, int col) const {
  if (col < n_) return a_[static_cast<std::size_t>(row) * n_ + col];
  return col - n_ == row ? 1.0 : 0.0;
}

void LpSolver::place_nonbasic(int j) {
  signed char s = status_[j];
  if (s == kAtLower && !std::isfinite(lb_[j])) s = std::isfinite(ub_[j]) ? kAtUpper : kFreeZero;
  if (s == kAtUpper && !std::isfinite(ub_[j])) s = std::isfinite(lb_[j]) ? kAtLower : kFreeZero;
  if (s == kFreeZero && std::isfinite(lb_[j])) s = kAtLower;
  if (s == kFreeZero && std::isfinite(ub_[j])) s = kAtUpper;
  status_[j] = s;
  x_[j] = s == kAtLower ? lb_[j] : s == kAtUpper ? ub_[j] : 0.0;
}

void LpSolver::slack_basis() {
  head_.resize(m_);
  status_.assign(width_, kAtLower);
  for (int r = 0; r < m_; ++r) {
    head_[r] = n_ + r;
    status_[n_ + r] = kBasic;
  }
  for (int r = 0; r < m_; ++r) {
    double* row = &t_[static_cast<std::size_t>(r) * width_];
    for (int j = 0; j < n_; ++j) row[j] = a_[static_cast<std::size_t>(r) * n_ + j];
    for (int k = 0; k < m_; ++k) row[n_ + k] = k == r ? 1.0 : 0.0;
  }
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
  recompute_basics();
}

void LpSolver::recompute_basics() {
  for (int r = 0; r < m_; ++r) {
    const double* row = &t_[static_cast<std::size_t>(r) * width_];
    double v = 0.0;
    for (int k = 0; k < m_; ++k) v += row[n_ + k] * b_[k];
    for (int j = 0; j < width_; ++j) {
      if (status_[j] != kBasic && x_[j] != 0.0) v -= row[j] * x_[j];
    }
    x_[head_[r]] = v;
  }
}

bool LpSolver::refactor() {
  // Gauss-Jordan with partial pivoting on [B | A I].
  std::vector<double> work(static_cast<std::size_t>(m_) * (m_ + width_), 0.0);
  const int w = m_ + width_;
  for (int r = 0; r < m_; ++r) {
    double* row = &work[static_cast<std::size_t>(r) * w];
    for (int k = 0; k < m_; ++k) row[k] = column_entry(r, head_[k]);
    for (int j = 0; j < width_; ++j) row[m_ + j] = column_entry(r, j);
  }
  std::vector<int> perm(m_);
  for (int k = 0; k < m_; ++k) perm[k] = k;
  for (int c = 0; c < m_; ++c) {
    int best = -1;
    double best_abs = kSingularTol;
    for (int r = c; r < m_; ++r) {
      const double v = std::abs(work[static_cast<std::size_t>(r) * w + c]);
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best < 0) return false;
    if (best != c) {
      std::swap_ranges(work.begin() + static_cast<std::ptrdiff_t>(best) * w,
                       work.begin() + static_cast<std::ptrdiff_t>(best + 1) * w,
                       work.begin() + static_cast<std::ptrdiff_t>(c) * w);
    }
    double* prow = &work[static_cast<std::size_t>(c) * w];
    const double inv = 1.0 / prow[c];
    for (int j = c; j < w; ++j) prow[j] *= inv;
    for (int r = 0; r < m_; ++r) {
      if (r == c) continue;
      double* row = &work[static_cast<std::size_t>(r) * w];
      const double f = row[c];
      if (f == 0.0) continue;
      for (int j = c; j < w; ++j) row[j] -= f * prow[j];
    }
  }
  // Row c of the reduced system now belongs to basic variable head_[c].
  for (int r = 0; r < m_; ++r) {
    std::copy_n(&work[static_cast<std::size_t>(r) * w + m_], width_, &t_[static_cast<std::size_t>(r) * width_]);
  }
  recompute_basics();
  return true;
}

void LpSolver::pivot(int row, int col) {
  double* prow = &t_[static_cast<std::size_t>(row) * width_];
  const double inv = 1.0 / prow[col];
  for (int j = 0; j < width_; ++j) prow[j] *= inv;
  prow[col] = 1.0;
  for (int r = 0; r < m_; ++r) {
    if (r == row) continue;
    double* other = &t_[static_cast<std::size_t>(r) * width_];
    const double f = other[col];
    if (f == 0.0) continue;
    for (int j = 0; j < width_; ++j) other[j] -= f * prow[j];
    other[col] = 0.0;
  }
}

LpResult LpSolver::solve(Deadline deadline) {
  std::vector<double> lb(lb_.begin(), lb_.begin() + n_);
  std::vector<double> ub(ub_.begin(), ub_.begin() + n_);
  for (int j = 0; j < n_; ++j) {
    lb[j] = model_->variables()[j].lb;
    ub[j] = model_->variables()[j].ub;
  }
  return solve(lb, ub, nullptr, deadline);
}

LpResult LpSolver::solve(const std::vector<double>& lb, const std::vector<double>& ub, const Basis* warm,
                         Deadline deadline) {
  for (int j = 0; j < n_; ++j) {
    lb_[j] = lb[j];
    ub_[j] = ub[j];
  }
  if (warm != nullptr && static_cast<int>(warm->head.size()) == m_ &&
      static_cast<int>(warm->status.size()) == width_) {
    const bool same = warm->head == head_;
    head_ = warm->head;
    status_ = warm->status;
    for (int j = 0; j < width_; ++j) {
      if (status_[j] != kBasic) place_nonbasic(j);
    }
    if (same) {
      recompute_basics();
    } else if (!refactor()) {
      slack_basis();
    }
  } else {
    slack_basis();
  }

  LpResult res;
  std::vector<double> d(width_, 0.0);
  std::vector<double> wrow(m_, 0.0);
  std::vector<double> alpha(m_, 0.0);
  bool bland = false;
  bool fresh = true;
  std::int64_t degenerate = 0;
  const std::int64_t bland_after = 10LL * width_;
  const std::int64_t max_iter = 200000LL + 100LL * width_;
  int since_refactor = 0;

  for (std::int64_t iter = 0;; ++iter) {
    if (iter >= max_iter) {
      res.status = LpStatus::kIterationLimit;
      res.iterations = iter;
      return res;
    }
    if (deadline && (iter & 31) == 0 && std::chrono::steady_clock::now() > *deadline) {
      res.status = LpStatus::kTimeout;
      res.iterations = iter;
      return res;
    }
    if (since_refactor >= kRefactorEvery) {
      if (!refactor()) slack_basis();
      since_refactor = 0;
      fresh = true;
    }

    bool phase1 = false;
    for (int r = 0; r < m_; ++r) {
      const int h = head_[r];
      const double v = x_[h];
      double g = 0.0;
      if (v < lb_[h] - kPrimalTol) g = -1.0;
      else if (v > ub_[h] + kPrimalTol) g = 1.0;
      if (g != 0.0) phase1 = true;
      wrow[r] = g;
    }
    if (phase1) {
      for (int r = 0; r < m_; ++r) wrow[r] = -wrow[r];
      std::fill(d.begin(), d.end(), 0.0);
    } else {
      for (int r = 0; r < m_; ++r) wrow[r] = -cost_[head_[r]];
      d = cost_;
    }
    for (int r = 0; r < m_; ++r) {
      const double wr = wrow[r];
      if (wr == 0.0) continue;
      const double* row = &t_[static_cast<std::size_t>(r) * width_];
      for (int j = 0; j < width_; ++j) d[j] += wr * row[j];
    }

    int enter = -1;
    double best = 0.0;
    for (int j = 0; j < width_; ++j) {
      const signed char s = status_[j];
      if (s == kBasic) continue;
      if (lb_[j] == ub_[j] && s != kFreeZero) continue;
      const double dj = d[j];
      bool eligible = false;
      if (s == kAtLower) eligible = dj < -kDualTol;
      else if (s == kAtUpper) eligible = dj > kDualTol;
      else eligible = std::abs(dj) > kDualTol;
      if (!eligible) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        enter = j;
      }
    }

    if (enter < 0) {
      if (!fresh) {
        if (!refactor()) slack_basis();
        since_refactor = 0;
        fresh = true;
        continue;
      }
      res.iterations = iter;
      res.bland = bland;
      if (phase1) {
        res.status = LpStatus::kInfeasible;
        return res;
      }
      res.status = LpStatus::kOptimal;
      res.x.assign(x_.begin(), x_.begin() + n_);
      const double sign = model_->sense() == ObjSense::kMaximize ? -1.0 : 1.0;
      double obj = model_->objective_constant();
      for (int j = 0; j < n_; ++j) obj += model_->objective()[j] * x_[j];
      res.objective = obj;
      res.duals.resize(m_);
      for (int r = 0; r < m_; ++r) res.duals[r] = -sign * d[n_ + r];
      res.reduced_costs.resize(n_);
      for (int j = 0; j < n_; ++j) res.reduced_costs[j] = sign * d[j];
      return res;
    }

    const double dir = d[enter] < 0.0 ? 1.0 : -1.0;
    double theta = kInf;
    int leave = -1;          // row index, or -1 for a bound flip
    signed char leave_to = kAtLower;
    double leave_alpha = 0.0;
    if (std::isfinite(lb_[enter]) && std::isfinite(ub_[enter])) theta = ub_[enter] - lb_[enter];
    for (int r = 0; r < m_; ++r) {
      const double a = -dir * t_[static_cast<std::size_t>(r) * width_ + enter];
      alpha[r] = a;
      if (std::abs(a) < kPivotTol) continue;
      const int h = head_[r];
      const double v = x_[h];
      double limit = kInf;
      signed char to = kAtLower;
      if (v < lb_[h] - kPrimalTol) {
        if (a > 0.0) { limit = (lb_[h] - v) / a; to = kAtLower; }
      } else if (v > ub_[h] + kPrimalTol) {
        if (a < 0.0) { limit = (ub_[h] - v) / a; to = kAtUpper; }
      } else if (a > 0.0) {
        if (std::isfinite(ub_[h])) { limit = std::max(0.0, (ub_[h] - v) / a); to = kAtUpper; }
      } else {
        if (std::isfinite(lb_[h])) { limit = std::max(0.0, (lb_[h] - v) / a); to = kAtLower; }
      }
      if (!std::isfinite(limit)) continue;
      bool take = false;
      if (limit < theta - 1e-12) {
        take = true;
      } else if (limit <= theta + 1e-12 && leave >= 0) {
        take = bland ? h < head_[leave] : std::abs(a) > std::abs(leave_alpha);
      }
      if (take) {
        theta = limit;
        leave = r;
        leave_to = to;
        leave_alpha = a;
      }
    }
    if (!std::isfinite(theta)) {
      if (!fresh) {
        if (!refactor()) slack_basis();
        since_refactor = 0;
        fresh = true;
        continue;
      }
      res.status = phase1 ? LpStatus::kInfeasible : LpStatus::kUnbounded;
      res.iterations = iter;
      return res;
    }

    if (theta < 1e-12) {
      if (++degenerate > bland_after) bland = true;
    }
    for (int r = 0; r < m_; ++r) {
      if (alpha[r] != 0.0) x_[head_[r]] += alpha[r] * theta;
    }
    if (leave < 0) {
      status_[enter] = status_[enter] == kAtUpper ? kAtLower : kAtUpper;
      x_[enter] = status_[enter] == kAtUpper ? ub_[enter] : lb_[enter];
    } else {
      x_[enter] += dir * theta;
      const int out = head_[leave];
      status_[out] = leave_to;
      x_[out] = leave_to == kAtUpper ? ub_[out] : lb_[out];
      head_[leave] = enter;
      status_[enter] = kBasic;
      pivot(leave, enter);
      ++since_refactor;
    }
    fresh = false;
  }
}

LpResult solve_lp(const MilpModel& model, Deadline deadline) {
  LpSolver solver(model);
  return solver.solve(deadline);
}

}  // namespace combex
