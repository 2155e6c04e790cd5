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

#include <cmath>
#include <random>

#include "combex/lp.hpp"
#include "combex/milp.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace combex;

TEST_CASE("single-constraint LP") {
  MilpModel m;
  int x = m.add_continuous("x", 0, 10);
  m.add_constraint("cap", {{x, 1.0}}, RowSense::kLe, 3.0);
  m.set_objective(ObjSense::kMaximize, {{x, 1.0}});
  auto s = solve(m);
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("two-item knapsack") {
  MilpModel m;
  int a = m.add_binary("a");
  int b = m.add_binary("b");
  m.add_constraint("one", {{a, 1}, {b, 1}}, RowSense::kLe, 1);
  m.set_objective(ObjSense::kMaximize, {{a, 5}, {b, 4}});
  auto s = solve(m);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(5.0));
  CHECK(s.values[a] == 1.0);
  CHECK(s.values[b] == 0.0);
}

TEST_CASE("infeasible and minimization") {
  MilpModel m;
  int a = m.add_binary("a");
  int y = m.add_continuous("y", -4, 4);
  m.add_constraint("r1", {{a, 1}, {y, 1}}, RowSense::kGe, 6);
  m.set_objective(ObjSense::kMinimize, {{y, 1}});
  CHECK(solve(m).status == SolveStatus::kInfeasible);

  MilpModel k;
  a = k.add_binary("a");
  y = k.add_continuous("y", -4, 4);
  k.add_constraint("r1", {{a, 2}, {y, 1}}, RowSense::kGe, 1.5);
  k.add_constraint("r2", {{a, 1}, {y, -1}}, RowSense::kEq, 0.25);
  k.set_objective(ObjSense::kMinimize, {{y, 1}, {a, 3}});
  auto s = solve(k);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(3.75));
}

TEST_CASE("malformed models name the offender") {
  MilpModel m;
  int x = m.add_continuous("flow", 0, std::numeric_limits<double>::infinity());
  m.set_objective(ObjSense::kMaximize, {{x, 1}});
  try {
    solve(m);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("flow") != std::string::npos);
  }
  MilpModel k;
  k.add_binary("a");
  k.add_constraint("bad_row", {{7, 1.0}}, RowSense::kLe, 1);
  try {
    solve(k);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("bad_row") != std::string::npos);
  }
}

TEST_CASE("branch and bound equals exhaustive enumeration on random models") {
  std::mt19937_64 rng(20261019);
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    MilpModel m = oracle::random_milp(rng, 12);
    auto s = solve(m);
    auto ref = oracle::enumerate_milp(m);
    REQUIRE_MESSAGE(s.status == ref.status, "trial " << trial);
    if (s.status == SolveStatus::kOptimal) {
      ++optimal;
      CHECK_MESSAGE(std::abs(s.objective - ref.objective) <= 1e-6, "trial " << trial);
      CHECK(m.max_violation(s.values) <= 1e-6);
    }
  }
  CHECK(optimal > 100);
}

TEST_CASE("LP optima are dual feasible") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    MilpModel m = oracle::random_milp(rng, 10);
    auto r = solve_lp(m);
    if (r.status != LpStatus::kOptimal) continue;
    ++checked;
    CHECK(oracle::relaxation(m).max_violation(r.x) <= 1e-6);
    const double sgn = m.sense() == ObjSense::kMaximize ? -1.0 : 1.0;
    // d = c - A^T y in minimization sense; sign conditions per bound position.
    for (int j = 0; j < m.num_variables(); ++j) {
      double dj = m.objective()[j];
      for (int r2 = 0; r2 < m.num_constraints(); ++r2) {
        for (const auto& t : m.constraints()[r2].terms) {
          if (t.var == j) dj -= r.duals[r2] * t.coef;
        }
      }
      CHECK(std::abs(dj - r.reduced_costs[j]) <= 1e-6);
      const double dmin = sgn * dj;
      const auto& v = m.variables()[j];
      if (r.x[j] > v.lb + 1e-7) CHECK(dmin <= 1e-6);
      if (r.x[j] < v.ub - 1e-7) CHECK(dmin >= -1e-6);
    }
    for (int r2 = 0; r2 < m.num_constraints(); ++r2) {
      const double y = sgn * r.duals[r2];
      const auto sense = m.constraints()[r2].sense;
      if (sense == RowSense::kLe) CHECK(y <= 1e-6);
      if (sense == RowSense::kGe) CHECK(y >= -1e-6);
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("degenerate LP terminates") {
  // Degenerate vertex at the origin with many tied ratios.
  MilpModel m;
  std::vector<int> x;
  for (int j = 0; j < 6; ++j) x.push_back(m.add_continuous("x" + std::to_string(j), 0, 10));
  for (int r = 0; r < 12; ++r) {
    std::vector<Term> t;
    for (int j = 0; j < 6; ++j) t.push_back({x[j], static_cast<double>(((r + 1) * (j + 2)) % 5) - 1.0});
    m.add_constraint("d" + std::to_string(r), t, RowSense::kLe, 0.0);
  }
  std::vector<Term> obj;
  for (int j = 0; j < 6; ++j) obj.push_back({x[j], 1.0 + j % 3});
  m.set_objective(ObjSense::kMaximize, obj);
  auto r = solve_lp(m);
  CHECK(r.status == LpStatus::kOptimal);
  CHECK(m.max_violation(r.x) <= 1e-6);
}

TEST_CASE("determinism") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    MilpModel m = oracle::random_milp(rng, 10);
    auto a = solve(m);
    auto b = solve(m);
    CHECK(a.status == b.status);
    CHECK(a.values == b.values);
    CHECK(a.nodes == b.nodes);
  }
}

namespace {

class Passthrough : public MilpBackend {
 public:
  std::string name() const override { return "passthrough"; }
  MilpSolution solve(const MilpModel& model, std::optional<double> limit) override {
    ++calls;
    return solve_builtin(model, limit);
  }
  int calls = 0;
};

class Enumerating : public MilpBackend {
 public:
  std::string name() const override { return "enumerate"; }
  MilpSolution solve(const MilpModel& model, std::optional<double>) override { return oracle::enumerate_milp(model); }
};

}  // namespace

TEST_CASE("backend registry") {
  auto pass = std::make_shared<Passthrough>();
  register_backend(pass);
  CHECK_THROWS_AS(register_backend(std::make_shared<Passthrough>()), std::invalid_argument);

  MilpModel m;
  int a = m.add_binary("a");
  int b = m.add_binary("b");
  m.add_constraint("one", {{a, 1}, {b, 1}}, RowSense::kLe, 1);
  m.set_objective(ObjSense::kMaximize, {{a, 5}, {b, 4}});
  auto direct = solve(m);
  SolveOptions via;
  via.backend = "passthrough";
  auto routed = solve(m, via);
  CHECK(pass->calls == 1);
  CHECK(routed.objective == direct.objective);
  CHECK(routed.values == direct.values);
  CHECK(solve(m).objective == direct.objective);
  CHECK(unregister_backend("passthrough"));
}

TEST_CASE("differential test against an enumerating backend") {
  register_backend(std::make_shared<Enumerating>());
  std::mt19937_64 rng(4242);
  SolveOptions alt;
  alt.backend = "enumerate";
  for (int trial = 0; trial < 100; ++trial) {
    MilpModel m = oracle::random_milp(rng, 8);
    auto a = solve(m);
    auto b = solve(m, alt);
    REQUIRE(a.status == b.status);
    if (a.status == SolveStatus::kOptimal) CHECK(std::abs(a.objective - b.objective) <= 1e-6);
  }
  unregister_backend("enumerate");
}

TEST_CASE("LP export uses nine decimals") {
  MilpModel m;
  int a = m.add_binary("a");
  int y = m.add_continuous("y", 0, 2.5);
  m.add_constraint("r", {{a, 1.0 / 3.0}, {y, -1}}, RowSense::kGe, -1);
  m.set_objective(ObjSense::kMinimize, {{y, 1}});
  const std::string lp = export_lp(m);
  CHECK(lp.find("Minimize") == 0);
  CHECK(lp.find("0.333333333 a_0") != std::string::npos);
  CHECK(lp.find(">= -1.000000000") != std::string::npos);
  CHECK(lp.find("Binaries") != std::string::npos);
}
