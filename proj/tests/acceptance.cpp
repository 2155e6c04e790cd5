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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. --grid runs the bench sweep on every grid cell instead
// of the desk-scale cells.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "combex/bench.hpp"
#include "combex/blocking.hpp"
#include "combex/core_solver.hpp"
#include "combex/gen.hpp"
#include "combex/restricted.hpp"
#include "combex/wdp.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace combex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      problems.push_back(what);
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

bool near(double a, double b, double tol = 1e-6) { return std::abs(a - b) <= tol; }

// Bench results shared by the nesting and desk-scale criteria.
BenchReport sweep;
bool sweep_done = false;
std::string sweep_error;
bool full_grid = false;

void run_sweep() {
  if (sweep_done) return;
  sweep_done = true;
  BenchConfig c;
  c.bidders = full_grid ? std::vector<std::size_t>{3, 7, 11} : std::vector<std::size_t>{3, 7};
  c.items = full_grid ? std::vector<std::size_t>{6, 12, 18, 24} : std::vector<std::size_t>{6, 12};
  c.caps = {3, 5, std::nullopt};
  c.seeds = 50;
  c.time_limit_ms = full_grid ? 300000.0 : 60000.0;
  c.output_dir = (std::filesystem::temp_directory_path() / "combex_acceptance_bench").string();
  try {
    sweep = run_bench(c);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
}

Verdict worked_examples() {
  Verdict v;
  const auto in = fixtures::budget_dyad();
  auto t = Clock::now();
  const auto wd = max_welfare(in, grand_coalition(in), false);
  const double t_wd = seconds_since(t);
  t = Clock::now();
  const auto core = solve_core(in);
  const double t_core = seconds_since(t);
  t = Clock::now();
  const auto dy = solve_dyadic(in);
  const double t_dy = seconds_since(t);
  v.require(near(wd.value, 15.0), "max welfare " + fmt(wd.value) + " != 15");
  v.require(core.status == CoreStatus::kCoreOutcome && near(core.welfare, 9.0),
            std::string("core ") + to_string(core.status) + " welfare " + fmt(core.welfare));
  v.require(dy.status == SolveStatus::kOptimal && near(dy.welfare, 9.0), "dyadic welfare " + fmt(dy.welfare));
  v.require(t_wd < 5.0 && t_core < 5.0 && t_dy < 5.0, "a solve took 5 s or more");
  v.detail = "max welfare " + fmt(wd.value) + ", core welfare " + fmt(core.welfare) + ", dyadic welfare " +
             fmt(dy.welfare) + "; " + fmt(t_wd + t_core + t_dy) + " s";
  return v;
}

Verdict empty_core() {
  Verdict v;
  auto t = Clock::now();
  const auto with = solve_core(fixtures::empty_core(true));
  const double t1 = seconds_since(t);
  t = Clock::now();
  const auto without = solve_core(fixtures::empty_core(false));
  const double t2 = seconds_since(t);
  v.require(with.status == CoreStatus::kCoreEmpty, std::string("with budgets: ") + to_string(with.status));
  v.require(without.status == CoreStatus::kCoreOutcome && near(without.welfare, 10.0),
            std::string("without budgets: ") + to_string(without.status) + " welfare " + fmt(without.welfare));
  v.require(t1 < 5.0 && t2 < 5.0, "a solve took 5 s or more");
  v.detail = std::string("with budgets ") + to_string(with.status) + "; unbounded budgets " +
             to_string(without.status) + " with welfare " + fmt(without.welfare);
  return v;
}

Verdict capped_values() {
  Verdict v;
  const auto in = fixtures::capped_gap();
  const auto q = capped_value_inequality_check(in, grand_coalition(in));
  v.require(q.wP_of_p_witness == 10.0, "wP(alpha) = " + fmt(q.wP_of_p_witness));
  v.require(q.wB_of_p_witness == 3.0, "wB(alpha) = " + fmt(q.wB_of_p_witness));
  v.require(q.wB_optimum == 4.0, "wB(beta) = " + fmt(q.wB_optimum));
  std::mt19937_64 rng(301);
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = oracle::random_tiny_instance(rng);
    const auto alpha = max_welfare(r, grand_coalition(r), false);
    const auto beta = max_welfare(r, grand_coalition(r), true);
    if (allocation_value(r, alpha.witness, true) > beta.value + 1e-6) ++violations;
  }
  v.require(violations == 0, std::to_string(violations) + " sweep violations");
  v.detail = "wP(alpha) " + fmt(q.wP_of_p_witness) + ", wB(alpha) " + fmt(q.wB_of_p_witness) + ", wB(beta) " +
             fmt(q.wB_optimum) + "; 500-instance sweep violations " + std::to_string(violations);
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  const auto start = Clock::now();
  std::mt19937_64 rng(401);
  int instances = 0, verdicts = 0, blocked = 0, empties = 0, mismatches = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto in = trial % 2 ? oracle::random_tiny_instance(rng, trial % 6 == 1)
                              : oracle::random_contested_instance(rng, 2 + trial % 2, 1 + trial % 2);
    ++instances;
    // (a) unified separation against the per-coalition maximum
    const auto o = oracle::random_outcome(rng, in);
    double best = -INFINITY;
    for (const auto& c : enumerate_coalitions(in, std::nullopt)) best = std::max(best, lower_level(in, o, c).d);
    const auto rep = separate(in, o, std::nullopt);
    ++verdicts;
    blocked += rep.blocked;
    if (rep.blocked != (best > kBlockTol)) {
      ++mismatches;
      v.require(false, "separation verdict differs on instance " + std::to_string(trial));
    }
    // (b) solver against allocation enumeration
    const auto got = solve_core(in);
    const auto want = oracle::core_by_enumeration(in, std::nullopt);
    empties += want.empty;
    const bool same = (got.status == CoreStatus::kCoreEmpty) == want.empty &&
                      got.status != CoreStatus::kTimeout && (want.empty || near(got.welfare, want.welfare));
    if (!same) {
      ++mismatches;
      v.require(false, "core verdict differs on instance " + std::to_string(trial));
    }
  }
  const double secs = seconds_since(start);
  v.require(secs < 600.0, "suite took " + fmt(secs) + " s");
  v.detail = std::to_string(instances) + " instances (" + std::to_string(blocked) + " blocked outcomes, " +
             std::to_string(empties) + " empty cores), " + std::to_string(mismatches) + " mismatches, " +
             fmt(secs) + " s";
  return v;
}

Verdict nesting() {
  Verdict v;
  std::mt19937_64 rng(501);
  int full_outcomes = 0, monotone_checks = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const auto in = trial % 2 ? oracle::random_tiny_instance(rng) : oracle::random_contested_instance(rng, 3, 2);
    const auto r = solve_core(in);
    if (r.status == CoreStatus::kCoreOutcome) {
      ++full_outcomes;
      v.require(!membership_check(in, *r.outcome, 5).blocked, "core outcome blocked at cap 5");
      v.require(!membership_check(in, *r.outcome, 3).blocked, "core outcome blocked at cap 3");
    }
    const auto o = oracle::random_outcome(rng, in);
    const std::size_t n = in.buyers.size() + in.sellers.size();
    bool prev = false;
    for (std::size_t k = 1; k <= n; ++k) {
      const bool now = separate(in, o, k).blocked;
      ++monotone_checks;
      v.require(!prev || now, "blocked at cap " + std::to_string(k - 1) + " but not at " + std::to_string(k));
      prev = now;
    }
  }
  run_sweep();
  v.require(sweep_error.empty(), "bench failed: " + sweep_error);
  std::size_t tallied = 0, records = 0;
  for (const auto& row : sweep.rows) {
    v.require(row.in_core <= row.in_5core && row.in_5core <= row.in_3core,
              "row tallies not nested for " + std::to_string(row.bidders) + "x" + std::to_string(row.items));
    for (const auto& rec : row.records) {
      ++records;
      if (rec.in_core.value_or(false)) v.require(rec.in_5core.value_or(false), "in core but not in 5-core");
      if (rec.in_5core.value_or(false)) v.require(rec.in_3core.value_or(false), "in 5-core but not in 3-core");
      if (!rec.outcome_file.empty()) {
        ++tallied;
        // an outcome computed at cap k lies in every n-core with n <= k
        const std::size_t k = rec.cap.value_or(SIZE_MAX);
        if (k >= 3 && rec.in_3core) v.require(*rec.in_3core, "outcome at cap " + cap_label(rec.cap) + " not in 3-core");
        if (k >= 5 && rec.in_5core) v.require(*rec.in_5core, "outcome at cap " + cap_label(rec.cap) + " not in 5-core");
        if (!rec.cap && rec.in_core) v.require(*rec.in_core, "core outcome fails the full membership check");
      }
    }
  }
  v.detail = std::to_string(full_outcomes) + " core outcomes pass caps 5 and 3, " + std::to_string(monotone_checks) +
             " monotonicity checks, bench sweep " + std::to_string(sweep.rows.size()) + " rows / " +
             std::to_string(records) + " records / " + std::to_string(tallied) + " tallied outcomes nested";
  return v;
}

Verdict least_core_criterion() {
  Verdict v;
  std::mt19937_64 rng(601);
  int zero_cases = 0;
  std::vector<ExchangeInstance> nonempty{fixtures::budget_dyad(), fixtures::empty_core(false), fixtures::capped_gap()};
  for (int trial = 0; trial < 80 && nonempty.size() < 30; ++trial) {
    auto in = oracle::random_tiny_instance(rng);
    if (!oracle::core_by_enumeration(in, std::nullopt).empty) nonempty.push_back(std::move(in));
  }
  for (const auto& in : nonempty) {
    const auto lc = least_core(in);
    ++zero_cases;
    v.require(std::abs(lc.delta) <= 1e-4, "delta " + fmt(lc.delta) + " on a non-empty core");
  }
  const auto in = fixtures::empty_core(true);
  const auto lc = least_core(in);
  const double grid = oracle::least_core_by_grid(in, 0.25);
  // bisection on the enumeration oracle
  double lo = 0.0, hi = 10.0;
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    (oracle::core_by_enumeration(in, std::nullopt, mid).empty ? lo : hi) = mid;
  }
  v.require(lc.delta > 0.0, "delta not positive on the empty-core instance");
  v.require(std::abs(lc.delta - grid) <= 1e-3, "delta " + fmt(lc.delta) + " vs grid " + fmt(grid));
  v.require(std::abs(lc.delta - hi) <= 1e-3, "delta " + fmt(lc.delta) + " vs enumeration " + fmt(hi));
  v.detail = "delta 0 on " + std::to_string(zero_cases) + " non-empty cores; empty-core delta " + fmt(lc.delta) +
             " (grid " + fmt(grid) + ", enumeration " + fmt(hi) + ")";
  return v;
}

Verdict desk_bench() {
  Verdict v;
  run_sweep();
  v.require(sweep_error.empty(), "bench failed: " + sweep_error);
  const BenchRow* cell = nullptr;
  for (const auto& row : sweep.rows) {
    if (row.bidders == 3 && row.items == 6 && !row.cap) cell = &row;
  }
  if (!cell) {
    v.require(false, "cell 3x6 unbounded missing");
    return v;
  }
  v.require(cell->seeds == 50, "seeds " + std::to_string(cell->seeds));
  v.require(cell->solved == 50, "solved " + std::to_string(cell->solved) + "/50");
  for (const auto& r : cell->records) v.require(r.runtime_s < 60.0, "an instance exceeded 60 s");
  std::ostringstream others;
  for (const auto& row : sweep.rows) {
    if (&row == cell) continue;
    others << " " << row.bidders << "x" << row.items << "/" << cap_label(row.cap) << ":" << row.solved << "/"
           << row.seeds;
  }
  v.detail = "3x6 unbounded solved " + std::to_string(cell->solved) + "/50, avg " +
             fmt(cell->avg_runtime_s.value_or(0.0)) + " s; other cells" + others.str();
  return v;
}

Verdict qsat_reduction() {
  Verdict v;
  std::mt19937_64 rng(801);
  int generated = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 3, m = 1 + rng() % 3, L = 1 + rng() % 3;
    Dnf f{n, m, {}};
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<Literal> c{Literal{false, rng() % n, bool(rng() % 2)}};
      if (rng() % 2) c.push_back(Literal{true, rng() % m, bool(rng() % 2)});
      f.clauses.push_back(c);
    }
    const auto q = gen_qsat2(f);
    ++generated;
    const auto& k = q.constants;
    v.require(k.T < 1.0 / n && k.U > double(n * L) && k.V > 4 * k.U && k.W > 7 * n * k.V,
              "constant inequality fails for " + to_string(f));
    v.require(q.instance.items.size() == 2 * n + n * n * L + (2 * m + n * L) + 4 * n,
              "item count off for " + to_string(f));
    v.require(q.instance.buyers.size() == 6 * n + m, "buyer count off for " + to_string(f));
    v.require(q.instance.sellers.size() == n + L + 2, "seller count off for " + to_string(f));
    v.require(validate(q.instance).empty(), "invalid instance for " + to_string(f));
  }
  std::string verdicts;
  for (const char* text : {"x1", "x1 & y1"}) {
    const auto f = parse_dnf(text, 1, 1);
    const auto q = gen_qsat2(f);
    const auto r = solve_core(q.instance);
    const bool equilibrium = r.status == CoreStatus::kCoreOutcome && r.welfare >= q.threshold - kFeasTol;
    const bool truth = qsat2_bruteforce(f);
    v.require(r.status != CoreStatus::kTimeout, std::string(text) + ": timeout");
    v.require(equilibrium == truth, std::string(text) + ": solver and brute force disagree");
    if (equilibrium) {
      for (const auto& p : qsat2_equilibrium_violations(q, *r.outcome)) v.require(false, std::string(text) + ": " + p);
    }
    verdicts += std::string(verdicts.empty() ? "" : ", ") + "{" + text + "} welfare " + fmt(r.welfare) + " vs nW " +
                fmt(q.threshold) + " -> " + (equilibrium ? "true" : "false") + " (brute force " +
                (truth ? "true" : "false") + ")";
  }
  v.detail = std::to_string(generated) + " reductions checked; " + verdicts;
  return v;
}

Verdict single_sided() {
  Verdict v;
  std::mt19937_64 rng(901);
  int audited = 0, repaired = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto in = oracle::random_tiny_instance(rng, true);
    const auto r = solve_single_sided(in);
    if (r.status != SolveStatus::kOptimal) {
      v.require(false, "trial " + std::to_string(trial) + ": " + to_string(r.status));
      continue;
    }
    repaired += r.repaired;
    v.require(check_outcome(in, r.outcome).empty(), "infeasible outcome");
    // weak-core audit by exhaustive coalition enumeration
    double best = -INFINITY;
    for (const auto& c : enumerate_coalitions(in, std::nullopt)) {
      best = std::max(best, oracle::lower_level_by_enumeration(in, r.outcome, c));
    }
    ++audited;
    v.require(best <= kBlockTol, "trial " + std::to_string(trial) + ": blocked with surplus " + fmt(best));
    v.require(r.capped_revenue >= r.z_star - 1e-6, "capped revenue below z*");
    v.require(r.welfare >= r.revenue_allocation_welfare - 1e-6, "welfare below the revenue-optimal allocation");
  }
  v.detail = std::to_string(audited) + " single-seller outcomes pass exhaustive audits (" + std::to_string(repaired) +
             " needed exchange price repair); revenue and welfare bounds hold";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  for (int a = 1; a < argc; ++a) {
    if (std::string(argv[a]) == "--grid") full_grid = true;
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"worked examples", worked_examples},
      {"budgets empty the core", empty_core},
      {"capped-value quantities", capped_values},
      {"oracle equivalence", oracle_equivalence},
      {"n-core nesting", nesting},
      {"least core", least_core_criterion},
      {"desk-scale benchmark", desk_bench},
      {"hardness reduction", qsat_reduction},
      {"single-sided decoupling", single_sided},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    const auto t = Clock::now();
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.problems.push_back(std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::printf("%s %zu %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                v.detail.c_str(), seconds_since(t));
    for (std::size_t p = 0; p < v.problems.size() && p < 5; ++p) std::printf("    %s\n", v.problems[p].c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
