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


#ifndef COMBEX_BENCH_HPP_
#define COMBEX_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "combex/gen.hpp"

namespace combex {

struct BenchConfig {
  std::vector<std::size_t> bidders{3};
  std::vector<std::size_t> items{6};
  std::vector<std::optional<std::size_t>> caps{3, 5, std::nullopt};  // nullopt = unbounded
  std::size_t seeds = 50;
  std::uint64_t seed_base = 1;
  double time_limit_ms = 300000.0;
  std::string output_dir = "bench_out";
  // 0 reads COMBEX_WORKERS, falling back to 1.
  std::size_t workers = 0;
  // Generator settings other than bidders, items and seed.
  AirportGenConfig generator;
};

// Throws std::invalid_argument naming the offending field.
void check_config(const BenchConfig& config);

// Flat "key = value" text; '#' starts a comment. Throws on malformed lines.
std::map<std::string, std::string> parse_kv(const std::string& text);

// Keys: bidders, items, caps (e.g. "3,5,inf"), seeds, seed_base,
// time_limit_ms, output_dir, workers, plus the airport generator keys.
BenchConfig bench_config_from(const std::map<std::string, std::string>& kv);

struct InstanceRecord {
  std::size_t bidders = 0;
  std::size_t items = 0;
  std::optional<std::size_t> cap;
  std::uint64_t seed = 0;
  std::string status;  // coreOutcome, coreEmpty, timeout or error
  double welfare = 0.0;
  std::size_t iterations = 0;
  double runtime_s = 0.0;
  // Membership of the outcome in the 3-core, 5-core and core; unset when
  // there is no outcome or the check timed out.
  std::optional<bool> in_3core, in_5core, in_core;
  std::string outcome_file;  // relative to the output directory
  std::string error;
};

struct BenchRow {
  std::size_t bidders = 0;
  std::size_t items = 0;
  std::optional<std::size_t> cap;
  std::size_t seeds = 0;
  std::size_t solved = 0;
  std::optional<double> avg_runtime_s;  // over solved instances
  std::size_t in_3core = 0, in_5core = 0, in_core = 0;
  std::vector<InstanceRecord> records;  // seed order
};

struct BenchReport {
  std::vector<BenchRow> rows;  // cell order, then cap order
  std::vector<std::string> files;
};

// Called after each finished (cell, seed) task with done / total counts.
using BenchProgress = std::function<void(std::size_t done, std::size_t total)>;

// Writes solved.csv, membership.csv, instances.csv, report.json and one outcome
// file per solved record into config.output_dir. Throws std::runtime_error
// on I/O failure.
BenchReport run_bench(const BenchConfig& config, const BenchProgress& progress = {});

std::string cap_label(const std::optional<std::size_t>& cap);

}  // namespace combex

#endif  // COMBEX_BENCH_HPP_
