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


// combex command-line front end. Talks to the solver only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "combex/combex.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitEmpty = 2;
constexpr int kExitTimeout = 3;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("cannot write " + path);
  out << text;
}

void check(combex_status s, const char* what) {
  if (s != COMBEX_OK) throw CliError(std::string(what) + ": " + combex_last_error());
}

// Owning wrappers for the C handles.
struct Instance {
  combex_instance* h = nullptr;
  ~Instance() { combex_instance_free(h); }
};

struct Result {
  combex_result* h = nullptr;
  ~Result() { combex_result_free(h); }
};

struct CString {
  char* s = nullptr;
  ~CString() { combex_string_free(s); }
};

void load(Instance& in, const std::string& path) { check(combex_instance_from_json(read_file(path).c_str(), &in.h), path.c_str()); }

int exit_for(combex_verdict v) {
  switch (v) {
    case COMBEX_VERDICT_EMPTY: return kExitEmpty;
    case COMBEX_VERDICT_TIMEOUT: return kExitTimeout;
    default: return kExitOk;
  }
}

// Prints the summary, optionally the JSON, and maps the verdict.
int report(const Result& r, const std::string& out, bool json) {
  if (json) {
    std::cout << combex_result_json(r.h) << "\n";
  } else {
    std::cout << combex_result_summary(r.h);
  }
  if (!out.empty()) write_text(out, std::string(combex_result_json(r.h)) + "\n");
  return exit_for(combex_result_verdict(r.h));
}

combex_solve_options parse_mode(const std::string& mode) {
  combex_solve_options o;
  combex_solve_options_init(&o);
  if (mode == "core") {
    o.mode = COMBEX_MODE_CORE;
  } else if (mode.rfind("ncore:", 0) == 0) {
    o.mode = COMBEX_MODE_NCORE;
    try {
      std::size_t pos = 0;
      const long k = std::stol(mode.substr(6), &pos);
      if (pos != mode.size() - 6 || k < 1) throw std::invalid_argument(mode);
      o.coalition_cap = static_cast<std::size_t>(k);
    } catch (const std::exception&) {
      throw CliError("--mode ncore:K needs a positive integer K, got '" + mode + "'");
    }
  } else if (mode == "dyadic") {
    o.mode = COMBEX_MODE_DYADIC;
  } else if (mode == "single-sided") {
    o.mode = COMBEX_MODE_SINGLE_SIDED;
  } else {
    throw CliError("unknown --mode '" + mode + "' (core, ncore:K, dyadic, single-sided)");
  }
  return o;
}

// Sets key = value in key = value text, replacing earlier settings.
void set_key(std::string& text, const std::string& key, const std::string& value) {
  std::stringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    std::string k = eq == std::string::npos ? "" : line.substr(0, eq);
    k.erase(0, k.find_first_not_of(" \t"));
    k.erase(k.find_last_not_of(" \t") + 1);
    if (k != key) out += line + "\n";
  }
  text = out + key + " = " + value + "\n";
}

std::size_t parse_cap(const std::string& cap) {
  if (cap == "inf" || cap == "0") return 0;
  try {
    std::size_t pos = 0;
    const long k = std::stol(cap, &pos);
    if (pos == cap.size() && k >= 1) return static_cast<std::size_t>(k);
  } catch (const std::exception&) {
  }
  throw CliError("--cap needs a positive integer or 'inf', got '" + cap + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combex: core outcomes for combinatorial exchanges with budgets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(combex_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  std::string kind = "airport", gen_out, gen_config, formula;
  std::vector<std::string> sets;
  long long seed = -1, bidders = -1, items = -1;
  std::size_t qn = 1, qm = 1;
  bool size_formula = false;
  gen->add_option("--kind", kind, "airport or qsat2")->check(CLI::IsMember({"airport", "qsat2"}));
  gen->add_option("--seed", seed, "Random seed (airport)");
  gen->add_option("--bidders", bidders, "Bidder count (airport)");
  gen->add_option("--items", items, "Item count (airport)");
  gen->add_option("--config", gen_config, "key = value generator config file (airport)");
  gen->add_option("--set", sets, "Extra key=value generator setting (airport)");
  gen->add_option("--formula", formula, "DNF formula, e.g. \"x1 & ~y1 | x2\" (qsat2)");
  gen->add_option("--n", qn, "Number of x variables (qsat2)");
  gen->add_option("--m", qm, "Number of y variables (qsat2)");
  gen->add_flag("--size-formula", size_formula, "Size-based clause valuation (qsat2)");
  gen->add_option("--out,-o", gen_out, "Output file (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "Compute an outcome");
  std::string solve_in, mode = "core", solve_out;
  double epsilon = 0.0, time_limit = 0.0;
  std::size_t seed_cuts = 0, seed_size = 3;
  bool solve_json = false;
  solve->add_option("--in,-i", solve_in, "Instance JSON")->required();
  solve->add_option("--mode", mode, "core | ncore:K | dyadic | single-sided");
  solve->add_option("--epsilon", epsilon, "Epsilon-core threshold")->check(CLI::NonNegativeNumber);
  solve->add_option("--time-limit-ms", time_limit, "Wall-clock limit (0 = none)")->check(CLI::NonNegativeNumber);
  solve->add_option("--seed-cuts", seed_cuts, "Seed cuts added up front");
  solve->add_option("--seed-size", seed_size, "Largest coalition considered for seed cuts");
  solve->add_option("--out,-o", solve_out, "Write the result JSON here");
  solve->add_flag("--json", solve_json, "Print the JSON result instead of the summary");

  // check
  auto* chk = app.add_subcommand("check", "Test an outcome for blocking coalitions");
  std::string chk_in, chk_outcome, cap = "inf", chk_out;
  double chk_eps = 0.0;
  bool chk_json = false;
  chk->add_option("--in,-i", chk_in, "Instance JSON")->required();
  chk->add_option("--outcome", chk_outcome, "Outcome JSON or solve result")->required();
  chk->add_option("--cap", cap, "Coalition size cap (inf = unbounded)");
  chk->add_option("--epsilon", chk_eps, "Epsilon-core threshold")->check(CLI::NonNegativeNumber);
  chk->add_option("--out,-o", chk_out, "Write the report JSON here");
  chk->add_flag("--json", chk_json, "Print the JSON report instead of the summary");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the benchmark grid");
  std::string bench_config, bench_dir;
  bool quiet = false;
  bench->add_option("--config,-c", bench_config, "key = value bench config file")->required();
  bench->add_option("--out-dir", bench_dir, "Override output_dir");
  bench->add_flag("--quiet,-q", quiet, "No progress on stderr");

  // leastcore
  auto* lc = app.add_subcommand("leastcore", "Smallest epsilon with a non-empty epsilon-core");
  std::string lc_in, lc_out;
  double lc_limit = 0.0;
  bool lc_json = false;
  lc->add_option("--in,-i", lc_in, "Instance JSON")->required();
  lc->add_option("--time-limit-ms", lc_limit, "Wall-clock limit (0 = none)")->check(CLI::NonNegativeNumber);
  lc->add_option("--out,-o", lc_out, "Write the result JSON here");
  lc->add_flag("--json", lc_json, "Print the JSON result instead of the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (gen->parsed()) {
      Instance in;
      if (kind == "airport") {
        if (!formula.empty()) throw CliError("--formula only applies to --kind qsat2");
        std::string cfg = gen_config.empty() ? "" : read_file(gen_config) + "\n";
        for (const auto& s : sets) {
          const auto eq = s.find('=');
          if (eq == std::string::npos) throw CliError("--set needs key=value, got '" + s + "'");
          std::string key = s.substr(0, eq);
          key.erase(key.find_last_not_of(" \t") + 1);
          set_key(cfg, key, s.substr(eq + 1));
        }
        if (seed >= 0) set_key(cfg, "seed", std::to_string(seed));
        if (bidders >= 0) set_key(cfg, "bidders", std::to_string(bidders));
        if (items >= 0) set_key(cfg, "items", std::to_string(items));
        check(combex_gen_airport(cfg.c_str(), &in.h), "gen");
      } else {
        if (formula.empty()) throw CliError("--kind qsat2 needs --formula");
        double threshold = 0.0;
        int truth = 0;
        check(combex_gen_qsat2(formula.c_str(), qn, qm, size_formula ? 1 : 0, &in.h, &threshold), "gen");
        std::cerr << "threshold nW = " << threshold;
        if (qn + qm <= 16) {
          check(combex_qsat2_bruteforce(formula.c_str(), qn, qm, &truth), "gen");
          std::cerr << "; formula is " << (truth ? "true" : "false") << " (brute force)";
        }
        std::cerr << "\n";
      }
      CString text;
      check(combex_instance_to_json(in.h, &text.s), "gen");
      write_text(gen_out, std::string(text.s) + "\n");
      return kExitOk;
    }
    if (solve->parsed()) {
      Instance in;
      load(in, solve_in);
      combex_solve_options o = parse_mode(mode);
      o.epsilon = epsilon;
      o.time_limit_ms = time_limit;
      o.seed_count = seed_cuts;
      o.seed_max_size = seed_size;
      Result r;
      check(combex_solve(in.h, &o, &r.h), "solve");
      return report(r, solve_out, solve_json);
    }
    if (chk->parsed()) {
      Instance in;
      load(in, chk_in);
      Result r;
      check(combex_check(in.h, read_file(chk_outcome).c_str(), parse_cap(cap), chk_eps, &r.h), "check");
      return report(r, chk_out, chk_json);
    }
    if (bench->parsed()) {
      Result r;
      combex_progress_fn progress = nullptr;
      if (!quiet) {
        progress = [](std::size_t done, std::size_t total, void*) {
          std::fprintf(stderr, "\r%zu/%zu instances", done, total);
          if (done == total) std::fprintf(stderr, "\n");
        };
      }
      check(combex_bench(read_file(bench_config).c_str(), bench_dir.empty() ? nullptr : bench_dir.c_str(), progress,
                         nullptr, &r.h),
            "bench");
      std::cout << combex_result_summary(r.h);
      return exit_for(combex_result_verdict(r.h));
    }
    if (lc->parsed()) {
      Instance in;
      load(in, lc_in);
      combex_solve_options o;
      combex_solve_options_init(&o);
      o.time_limit_ms = lc_limit;
      Result r;
      check(combex_least_core(in.h, &o, &r.h), "leastcore");
      return report(r, lc_out, lc_json);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
