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


#include "combex/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "combex/blocking.hpp"
#include "combex/core_solver.hpp"
#include "combex/json_io.hpp"
#include "json.hpp"

namespace combex {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos == v.size() && x >= 0) return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "' needs a non-negative integer, got '" + v + "'");
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& p : split_list(v)) out.push_back(to_size(key, p));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string flag(const std::optional<bool>& b) { return b ? (*b ? "1" : "0") : ""; }

std::string record_line(const InstanceRecord& r) {
  std::ostringstream os;
  os << r.bidders << ',' << r.items << ',' << cap_label(r.cap) << ',' << r.seed << ',' << r.status << ','
     << num(r.welfare) << ',' << r.iterations << ',' << flag(r.in_3core) << ',' << flag(r.in_5core) << ','
     << flag(r.in_core) << ',' << csv_field(r.outcome_file) << ',' << csv_field(r.error) << ','
     << num(r.runtime_s) << "\r\n";
  return os.str();
}

constexpr const char* kRecordHeader =
    "bidders,items,cap,seed,status,welfare,iterations,in_3core,in_5core,in_core,outcome_file,error,runtime_s\r\n";

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Json optional_json(const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); }

struct Task {
  std::size_t bidders, items;
  std::uint64_t seed;
};

std::size_t worker_count(const BenchConfig& c) {
  if (c.workers > 0) return c.workers;
  if (const char* env = std::getenv("COMBEX_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

std::string cap_label(const std::optional<std::size_t>& cap) { return cap ? std::to_string(*cap) : "inf"; }

void check_config(const BenchConfig& c) {
  if (c.bidders.empty() || c.items.empty() || c.caps.empty()) {
    throw std::invalid_argument("bidders, items and caps need at least one entry");
  }
  for (auto b : c.bidders) {
    if (b < 1) throw std::invalid_argument("bidder counts must be >= 1");
  }
  for (auto i : c.items) {
    if (i < 1) throw std::invalid_argument("item counts must be >= 1");
  }
  for (const auto& k : c.caps) {
    if (k && *k < 1) throw std::invalid_argument("caps must be >= 1");
  }
  if (c.seeds < 1) throw std::invalid_argument("seeds must be >= 1");
  if (c.time_limit_ms < 1000.0) throw std::invalid_argument("time_limit_ms must be >= 1000");
  if (c.output_dir.empty()) throw std::invalid_argument("output_dir must be set");
  for (auto b : c.bidders) {
    for (auto i : c.items) {
      AirportGenConfig g = c.generator;
      g.num_bidders = b;
      g.num_items = i;
      check_config(g);
    }
  }
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  for (int no = 1; std::getline(ss, line); ++no) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(no) + ": empty key");
    if (out.count(key)) throw std::invalid_argument("line " + std::to_string(no) + ": duplicate key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

BenchConfig bench_config_from(const std::map<std::string, std::string>& kv) {
  BenchConfig c;
  std::map<std::string, std::string> gen;
  for (const auto& [key, v] : kv) {
    if (key == "bidders") {
      c.bidders = to_sizes(key, v);
    } else if (key == "items") {
      c.items = to_sizes(key, v);
    } else if (key == "caps") {
      c.caps.clear();
      for (const auto& p : split_list(v)) {
        if (p == "inf" || p == "none" || p == "unbounded") c.caps.push_back(std::nullopt);
        else c.caps.push_back(to_size(key, p));
      }
    } else if (key == "seeds") {
      c.seeds = to_size(key, v);
    } else if (key == "seed_base") {
      c.seed_base = to_size(key, v);
    } else if (key == "time_limit_ms") {
      c.time_limit_ms = static_cast<double>(to_size(key, v));
    } else if (key == "output_dir") {
      c.output_dir = v;
    } else if (key == "workers") {
      c.workers = to_size(key, v);
    } else if (key == "seed" || key == "num_bidders" || key == "num_items") {
      throw std::invalid_argument("config key '" + key + "' is set per cell; use bidders, items, seed_base");
    } else {
      gen[key] = v;
    }
  }
  c.generator = airport_config_from(gen);
  check_config(c);
  return c;
}

BenchReport run_bench(const BenchConfig& config, const BenchProgress& progress) {
  check_config(config);
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir / "outcomes", ec);
  if (ec) throw std::runtime_error("cannot create " + (dir / "outcomes").string() + ": " + ec.message());

  std::vector<Task> tasks;
  for (auto b : config.bidders) {
    for (auto i : config.items) {
      for (std::size_t s = 0; s < config.seeds; ++s) tasks.push_back({b, i, config.seed_base + s});
    }
  }
  const std::size_t ncaps = config.caps.size();
  std::vector<InstanceRecord> records(tasks.size() * ncaps);
  std::vector<std::string> outcome_text(records.size());

  std::mutex io;
  std::ofstream partial(dir / "instances.partial.csv", std::ios::binary | std::ios::trunc);
  if (!partial) throw std::runtime_error("cannot write " + (dir / "instances.partial.csv").string());
  partial << kRecordHeader << std::flush;

  std::atomic<std::size_t> next{0}, done{0};
  auto work = [&]() {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      const Task& task = tasks[t];
      AirportGenConfig g = config.generator;
      g.num_bidders = task.bidders;
      g.num_items = task.items;
      g.seed = task.seed;
      const ExchangeInstance in = gen_airport(g);
      for (std::size_t c = 0; c < ncaps; ++c) {
        InstanceRecord& r = records[t * ncaps + c];
        r.bidders = task.bidders;
        r.items = task.items;
        r.cap = config.caps[c];
        r.seed = task.seed;
        const auto start = std::chrono::steady_clock::now();
        try {
          CoreOptions opt;
          opt.coalition_size_cap = r.cap;
          opt.time_limit_ms = config.time_limit_ms;
          const CoreResult res = solve_core(in, opt);
          r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          r.status = to_string(res.status);
          r.welfare = res.welfare;
          r.iterations = res.iterations;
          if (res.status == CoreStatus::kCoreOutcome && res.outcome) {
            r.outcome_file = "outcomes/b" + std::to_string(r.bidders) + "_i" + std::to_string(r.items) + "_cap" +
                             cap_label(r.cap) + "_seed" + std::to_string(r.seed) + ".json";
            outcome_text[t * ncaps + c] = outcome_to_json(in, *res.outcome);
            const std::optional<std::size_t> levels[] = {3, 5, std::nullopt};
            std::optional<bool>* slots[] = {&r.in_3core, &r.in_5core, &r.in_core};
            for (int k = 0; k < 3; ++k) {
              BlockingOptions bopt;
              bopt.milp.time_limit_ms = config.time_limit_ms;
              const auto rep = membership_check(in, *res.outcome, levels[k], bopt);
              if (rep.status != SolveStatus::kTimeout) *slots[k] = !rep.blocked;
            }
          }
        } catch (const std::exception& e) {
          r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          r.status = "error";
          r.error = e.what();
        }
        std::lock_guard<std::mutex> lock(io);
        partial << record_line(r) << std::flush;
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(io);
        progress(finished, tasks.size());
      }
    }
  };
  const std::size_t nworkers = std::min(worker_count(config), std::max<std::size_t>(1, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < nworkers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  partial.close();

  BenchReport report;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (!records[k].outcome_file.empty()) write_file(dir / records[k].outcome_file, outcome_text[k] + "\n");
  }
  // rows: cell order, then cap order
  for (auto b : config.bidders) {
    for (auto i : config.items) {
      for (std::size_t c = 0; c < ncaps; ++c) {
        BenchRow row;
        row.bidders = b;
        row.items = i;
        row.cap = config.caps[c];
        double total = 0.0;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
          if (tasks[t].bidders != b || tasks[t].items != i) continue;
          const InstanceRecord& r = records[t * ncaps + c];
          ++row.seeds;
          if (r.status == "coreOutcome" || r.status == "coreEmpty") {
            ++row.solved;
            total += r.runtime_s;
          }
          row.in_3core += r.in_3core.value_or(false);
          row.in_5core += r.in_5core.value_or(false);
          row.in_core += r.in_core.value_or(false);
          row.records.push_back(r);
        }
        if (row.solved) row.avg_runtime_s = total / static_cast<double>(row.solved);
        report.rows.push_back(std::move(row));
      }
    }
  }

  std::string t2 = "bidders,items,cap,seeds,solved,avg_runtime_s\r\n";
  std::string t4 = "bidders,items,cap,outcomes,in_3core,in_5core,in_core\r\n";
  std::string detail = kRecordHeader;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    std::size_t outcomes = 0;
    for (const auto& r : row.records) outcomes += !r.outcome_file.empty();
    t2 += std::to_string(row.bidders) + "," + std::to_string(row.items) + "," + cap_label(row.cap) + "," +
          std::to_string(row.seeds) + "," + std::to_string(row.solved) + "," +
          (row.avg_runtime_s ? num(*row.avg_runtime_s) : "") + "\r\n";
    t4 += std::to_string(row.bidders) + "," + std::to_string(row.items) + "," + cap_label(row.cap) + "," +
          std::to_string(outcomes) + "," + std::to_string(row.in_3core) + "," + std::to_string(row.in_5core) + "," +
          std::to_string(row.in_core) + "\r\n";
    Json recs = Json::array();
    for (const auto& r : row.records) {
      detail += record_line(r);
      recs.push_back(Json{{"seed", r.seed},
                          {"status", r.status},
                          {"welfare", r.welfare},
                          {"iterations", r.iterations},
                          {"in_3core", optional_json(r.in_3core)},
                          {"in_5core", optional_json(r.in_5core)},
                          {"in_core", optional_json(r.in_core)},
                          {"outcome_file", r.outcome_file},
                          {"error", r.error},
                          {"runtime_s", r.runtime_s}});
    }
    rows.push_back(Json{{"bidders", row.bidders},
                        {"items", row.items},
                        {"cap", row.cap ? Json(*row.cap) : Json(nullptr)},
                        {"seeds", row.seeds},
                        {"solved", row.solved},
                        {"avg_runtime_s", row.avg_runtime_s ? Json(*row.avg_runtime_s) : Json(nullptr)},
                        {"in_3core", row.in_3core},
                        {"in_5core", row.in_5core},
                        {"in_core", row.in_core},
                        {"records", recs}});
  }
  Json caps = Json::array();
  for (const auto& k : config.caps) caps.push_back(k ? Json(*k) : Json(nullptr));
  Json doc{{"config",
            {{"bidders", config.bidders},
             {"items", config.items},
             {"caps", caps},
             {"seeds", config.seeds},
             {"seed_base", config.seed_base},
             {"time_limit_ms", config.time_limit_ms},
             {"workers", nworkers}}},
           {"rows", rows}};

  write_file(dir / "solved.csv", t2);
  write_file(dir / "membership.csv", t4);
  write_file(dir / "instances.csv", detail);
  write_file(dir / "report.json", doc.dump(2) + "\n");
  fs::remove(dir / "instances.partial.csv", ec);
  for (const char* f : {"solved.csv", "membership.csv", "instances.csv", "report.json"}) {
    report.files.push_back((dir / f).string());
  }
  return report;
}

}  // namespace combex
