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


#include "combex/combex.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "combex/bench.hpp"
#include "combex/blocking.hpp"
#include "combex/core_solver.hpp"
#include "combex/gen.hpp"
#include "combex/json_io.hpp"
#include "combex/restricted.hpp"
#include "json.hpp"

struct combex_instance {
  combex::ExchangeInstance value;
};

struct combex_result {
  combex_verdict verdict = COMBEX_VERDICT_OK;
  double value = 0.0;
  std::string json;
  std::string summary;
};

namespace {

using namespace combex;

thread_local std::string last_error;

combex_status fail(combex_status code, const std::string& what) {
  last_error = what;
  return code;
}

// Maps exceptions thrown by the core onto status codes.
template <typename F>
combex_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const ParseError& e) {
    return fail(COMBEX_ERR_PARSE, e.what());
  } catch (const ValidationError& e) {
    return fail(COMBEX_ERR_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(COMBEX_ERR_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    return fail(COMBEX_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(COMBEX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(COMBEX_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string money(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // summaries show micro-units; the JSON keeps full precision
  const double shown = std::round(v * 1e6) / 1e6;
  std::ostringstream os;
  os.precision(12);
  os << (shown == 0.0 ? 0.0 : shown);
  return os.str();
}

std::string bundle(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? " " : "") + items[k];
  return out + "]";
}

void describe_trades(std::ostringstream& os, const ExchangeInstance& in, const Outcome& o) {
  for (std::size_t i = 0; i < in.buyers.size(); ++i) {
    if (!o.buyer_bid[i]) continue;
    os << "  " << in.buyers[i].id << " buys " << bundle(in.buyers[i].bids[*o.buyer_bid[i]].bundle) << " pays "
       << money(o.buyer_payment[i]) << "\n";
  }
  for (std::size_t j = 0; j < in.sellers.size(); ++j) {
    if (!o.seller_ask[j]) continue;
    os << "  " << in.sellers[j].id << " sells " << bundle(in.sellers[j].asks[*o.seller_ask[j]].bundle)
       << " receives " << money(o.seller_receipt[j]) << "\n";
  }
}

combex_verdict verdict_of(CoreStatus s) {
  switch (s) {
    case CoreStatus::kCoreOutcome: return COMBEX_VERDICT_OK;
    case CoreStatus::kCoreEmpty: return COMBEX_VERDICT_EMPTY;
    case CoreStatus::kTimeout: return COMBEX_VERDICT_TIMEOUT;
  }
  return COMBEX_VERDICT_OK;
}

combex_verdict verdict_of(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return COMBEX_VERDICT_OK;
    case SolveStatus::kInfeasible: return COMBEX_VERDICT_EMPTY;
    case SolveStatus::kTimeout: return COMBEX_VERDICT_TIMEOUT;
  }
  return COMBEX_VERDICT_OK;
}

std::string core_summary(const ExchangeInstance& in, const CoreResult& r) {
  std::ostringstream os;
  os << "status: " << to_string(r.status);
  if (r.status == CoreStatus::kCoreEmpty) os << " (core empty)";
  if (r.status == CoreStatus::kTimeout) os << " (time limit reached)";
  os << "\n";
  if (r.status == CoreStatus::kCoreOutcome) os << "welfare: " << money(r.welfare) << "\n";
  os << "coalition cap: " << cap_label(r.coalition_size_cap) << "\n";
  os << "epsilon: " << money(r.epsilon) << "\n";
  os << "iterations: " << r.iterations << ", cuts: " << r.cut_pool.size() << "\n";
  os << "wall: " << money(r.wall_ms) << " ms\n";
  if (r.status == CoreStatus::kCoreOutcome && r.outcome) {
    os << "trades:\n";
    describe_trades(os, in, *r.outcome);
  }
  return os.str();
}

CoreOptions core_options(const combex_solve_options* o) {
  CoreOptions c;
  if (!o) return c;
  if (o->mode == COMBEX_MODE_NCORE) {
    if (o->coalition_cap < 1) throw std::invalid_argument("n-core mode needs coalition_cap >= 1");
    c.coalition_size_cap = o->coalition_cap;
  }
  if (!(o->epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  c.epsilon = o->epsilon;
  if (o->time_limit_ms > 0.0) {
    c.time_limit_ms = o->time_limit_ms;
    c.milp.time_limit_ms = o->time_limit_ms;
  }
  c.seed.count = o->seed_count;
  c.seed.max_coalition_size = o->seed_max_size;
  return c;
}

}  // namespace

extern "C" {

const char* combex_version(void) { return "1.0.0"; }

const char* combex_last_error(void) { return last_error.c_str(); }

void combex_string_free(char* s) { std::free(s); }

combex_status combex_instance_from_json(const char* json, combex_instance** out) {
  if (!json || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto in = instance_from_json(json);
    require_valid(in);
    *out = new combex_instance{std::move(in)};
    return COMBEX_OK;
  });
}

combex_status combex_instance_to_json(const combex_instance* instance, char** out) {
  if (!instance || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(instance_to_json(instance->value));
    return COMBEX_OK;
  });
}

combex_status combex_instance_validate(const combex_instance* instance, char** problems_json) {
  if (!instance || !problems_json) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *problems_json = dup(nlohmann::json(validate(instance->value)).dump());
    return COMBEX_OK;
  });
}

void combex_instance_free(combex_instance* instance) { delete instance; }

combex_status combex_gen_airport(const char* config, combex_instance** out) {
  if (!config || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new combex_instance{gen_airport(airport_config_from(parse_kv(config)))};
    return COMBEX_OK;
  });
}

combex_status combex_gen_qsat2(const char* formula, size_t n, size_t m, int size_formula, combex_instance** out,
                               double* threshold) {
  if (!formula || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    Dnf dnf;
    try {
      dnf = parse_dnf(formula, n, m);
    } catch (const std::invalid_argument& e) {
      return fail(COMBEX_ERR_PARSE, e.what());
    }
    auto q = gen_qsat2(dnf, size_formula ? GammaValueRule::kSizeFormula : GammaValueRule::kCount);
    if (threshold) *threshold = q.threshold;
    *out = new combex_instance{std::move(q.instance)};
    return COMBEX_OK;
  });
}

combex_status combex_qsat2_bruteforce(const char* formula, size_t n, size_t m, int* truth) {
  if (!formula || !truth) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    Dnf dnf;
    try {
      dnf = parse_dnf(formula, n, m);
    } catch (const std::invalid_argument& e) {
      return fail(COMBEX_ERR_PARSE, e.what());
    }
    *truth = qsat2_bruteforce(dnf) ? 1 : 0;
    return COMBEX_OK;
  });
}

combex_status combex_qsat2_equilibrium_check(const char* formula, size_t n, size_t m, const char* outcome_json,
                                       char** violations_json) {
  if (!formula || !outcome_json || !violations_json) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto q = gen_qsat2(parse_dnf(formula, n, m));
    const auto o = outcome_from_json(q.instance, outcome_json);
    *violations_json = dup(nlohmann::json(qsat2_equilibrium_violations(q, o)).dump());
    return COMBEX_OK;
  });
}

void combex_solve_options_init(combex_solve_options* options) {
  if (!options) return;
  options->mode = COMBEX_MODE_CORE;
  options->coalition_cap = 0;
  options->epsilon = 0.0;
  options->time_limit_ms = 0.0;
  options->seed_count = 0;
  options->seed_max_size = 3;
}

combex_status combex_solve(const combex_instance* instance, const combex_solve_options* options,
                           combex_result** out) {
  if (!instance || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& in = instance->value;
    const combex_mode mode = options ? options->mode : COMBEX_MODE_CORE;
    auto res = std::make_unique<combex_result>();
    if (mode == COMBEX_MODE_CORE || mode == COMBEX_MODE_NCORE) {
      const CoreResult r = solve_core(in, core_options(options));
      res->verdict = verdict_of(r.status);
      res->value = r.welfare;
      res->json = core_result_to_json(in, r);
      res->summary = core_summary(in, r);
    } else if (mode == COMBEX_MODE_DYADIC) {
      SolveOptions milp;
      if (options && options->time_limit_ms > 0.0) milp.time_limit_ms = options->time_limit_ms;
      const DyadicResult r = solve_dyadic(in, milp);
      res->verdict = verdict_of(r.status);
      res->value = r.welfare;
      res->json = dyadic_to_json(in, r);
      std::ostringstream os;
      os << "status: " << to_string(r.status) << (r.status == SolveStatus::kInfeasible ? " (infeasible)" : "")
         << "\n";
      if (r.outcome) {
        os << "welfare: " << money(r.welfare) << "\ntrades:\n";
        describe_trades(os, in, *r.outcome);
      }
      res->summary = os.str();
    } else if (mode == COMBEX_MODE_SINGLE_SIDED) {
      SingleSidedOptions so;
      if (options && options->time_limit_ms > 0.0) so.milp.time_limit_ms = options->time_limit_ms;
      const SingleSidedResult r = solve_single_sided(in, so);
      res->verdict = verdict_of(r.status);
      res->value = r.welfare;
      res->json = single_sided_to_json(in, r);
      std::ostringstream os;
      os << "status: " << to_string(r.status) << "\n";
      os << "max capped revenue: " << money(r.z_star) << "\n";
      os << "welfare: " << money(r.welfare) << " (revenue-optimal allocation: " << money(r.revenue_allocation_welfare)
         << ")\n";
      os << "pricing rounds: " << r.pricing_rounds << (r.repaired ? ", prices raised for exchange stability" : "")
         << "\n";
      if (r.blocked_by_enumeration) {
        os << "exhaustive audit: " << (*r.blocked_by_enumeration ? "blocked" : "not blocked") << "\n";
      }
      os << "trades:\n";
      describe_trades(os, in, r.outcome);
      res->summary = os.str();
    } else {
      return fail(COMBEX_ERR_ARGUMENT, "unknown mode");
    }
    *out = res.release();
    return COMBEX_OK;
  });
}

combex_status combex_least_core(const combex_instance* instance, const combex_solve_options* options,
                                combex_result** out) {
  if (!instance || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& in = instance->value;
    combex_solve_options o;
    combex_solve_options_init(&o);
    if (options) o = *options;
    o.epsilon = 0.0;
    const LeastCoreResult r = least_core(in, core_options(&o));
    auto res = std::make_unique<combex_result>();
    res->verdict = r.timed_out ? COMBEX_VERDICT_TIMEOUT : verdict_of(r.result.status);
    res->value = r.delta;
    res->json = least_core_to_json(in, r);
    std::ostringstream os;
    os << "least core delta: " << money(r.delta) << (r.timed_out ? " (time limit reached, upper bound)" : "")
       << "\nsolves: " << r.solves << "\n"
       << core_summary(in, r.result);
    res->summary = os.str();
    *out = res.release();
    return COMBEX_OK;
  });
}

combex_status combex_check(const combex_instance* instance, const char* outcome_json, size_t coalition_cap,
                           double epsilon, combex_result** out) {
  if (!instance || !outcome_json || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& in = instance->value;
    const Outcome o = outcome_from_json(in, outcome_json);
    BlockingOptions bopt;
    if (!(epsilon >= 0.0)) return fail(COMBEX_ERR_ARGUMENT, "epsilon must be >= 0");
    bopt.epsilon = epsilon;
    const std::optional<std::size_t> cap =
        coalition_cap == 0 ? std::nullopt : std::optional<std::size_t>(coalition_cap);
    const BlockReport rep = membership_check(in, o, cap, bopt);
    auto res = std::make_unique<combex_result>();
    res->verdict = rep.status == SolveStatus::kTimeout ? COMBEX_VERDICT_TIMEOUT
                   : rep.blocked                       ? COMBEX_VERDICT_BLOCKED
                                                       : COMBEX_VERDICT_OK;
    res->value = rep.surplus;
    res->json = block_report_to_json(in, rep);
    std::ostringstream os;
    if (rep.status == SolveStatus::kTimeout) {
      os << "time limit reached\n";
    } else if (!rep.blocked) {
      os << "not blocked (coalition cap " << cap_label(cap) << ", surplus " << money(rep.surplus) << ")\n";
    } else {
      os << "blocked by {";
      const auto& d = *rep.best;
      bool first = true;
      for (auto i : d.coalition.buyers) {
        os << (first ? "" : ", ") << in.buyers[i].id;
        first = false;
      }
      for (auto j : d.coalition.sellers) {
        os << (first ? "" : ", ") << in.sellers[j].id;
        first = false;
      }
      os << "} (coalition cap " << cap_label(cap) << ", surplus " << money(rep.surplus) << ", min improvement "
         << money(d.min_improvement) << ")\n";
    }
    res->summary = os.str();
    *out = res.release();
    return COMBEX_OK;
  });
}

combex_status combex_bench(const char* config, const char* output_dir, combex_progress_fn progress, void* user,
                           combex_result** out) {
  if (!config || !out) return fail(COMBEX_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto kv = parse_kv(config);
    if (output_dir) kv["output_dir"] = output_dir;
    const BenchConfig cfg = bench_config_from(kv);
    BenchProgress cb;
    if (progress) cb = [&](std::size_t done, std::size_t total) { progress(done, total, user); };
    const BenchReport rep = run_bench(cfg, cb);
    auto res = std::make_unique<combex_result>();
    std::ostringstream os;
    os << "bidders items cap   seeds solved avg_runtime_s in_3core in_5core in_core\n";
    std::size_t unsolved = 0;
    nlohmann::ordered_json files = rep.files;
    for (const auto& row : rep.rows) {
      char line[160];
      std::snprintf(line, sizeof line, "%7zu %5zu %-5s %5zu %6zu %13s %8zu %8zu %7zu\n", row.bidders, row.items,
                    cap_label(row.cap).c_str(), row.seeds, row.solved,
                    row.avg_runtime_s ? money(*row.avg_runtime_s).c_str() : "-", row.in_3core, row.in_5core,
                    row.in_core);
      os << line;
      unsolved += row.seeds - row.solved;
    }
    for (const auto& f : rep.files) os << "wrote " << f << "\n";
    res->verdict = unsolved ? COMBEX_VERDICT_TIMEOUT : COMBEX_VERDICT_OK;
    res->value = static_cast<double>(unsolved);
    res->json = nlohmann::ordered_json{{"files", files}, {"unsolved", unsolved}}.dump(2);
    res->summary = os.str();
    *out = res.release();
    return COMBEX_OK;
  });
}

combex_verdict combex_result_verdict(const combex_result* result) {
  return result ? result->verdict : COMBEX_VERDICT_OK;
}

double combex_result_value(const combex_result* result) { return result ? result->value : 0.0; }

const char* combex_result_json(const combex_result* result) { return result ? result->json.c_str() : ""; }

const char* combex_result_summary(const combex_result* result) { return result ? result->summary.c_str() : ""; }

void combex_result_free(combex_result* result) { delete result; }

}  // extern "C"
