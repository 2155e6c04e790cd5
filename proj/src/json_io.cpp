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


#include "combex/json_io.hpp"

#include <cmath>
#include <map>

#include "json.hpp"

namespace combex {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ParseError(path + ": " + what); }

const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Money as_money(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::vector<std::string> as_strings(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_string(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<PackageBid> as_bids(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<PackageBid> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    out.push_back(PackageBid{as_strings(field(j[k], "bundle", p), p + ".bundle"),
                             as_money(field(j[k], "value", p), p + ".value")});
  }
  return out;
}

Json bids_json(const std::vector<PackageBid>& bids) {
  Json arr = Json::array();
  for (const auto& b : bids) arr.push_back(Json{{"bundle", b.bundle}, {"value", b.value}});
  return arr;
}

Json money_or_null(Money v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Json outcome_json(const ExchangeInstance& in, const Outcome& o) {
  Json buyers = Json::array();
  for (std::size_t i = 0; i < in.buyers.size(); ++i) {
    Json b;
    b["id"] = in.buyers[i].id;
    if (o.buyer_bid[i]) {
      b["bid"] = *o.buyer_bid[i];
      b["bundle"] = in.buyers[i].bids[*o.buyer_bid[i]].bundle;
    } else {
      b["bid"] = nullptr;
      b["bundle"] = Json::array();
    }
    b["payment"] = o.buyer_payment[i];
    buyers.push_back(b);
  }
  Json sellers = Json::array();
  for (std::size_t j = 0; j < in.sellers.size(); ++j) {
    Json s;
    s["id"] = in.sellers[j].id;
    if (o.seller_ask[j]) {
      s["ask"] = *o.seller_ask[j];
      s["bundle"] = in.sellers[j].asks[*o.seller_ask[j]].bundle;
    } else {
      s["ask"] = nullptr;
      s["bundle"] = Json::array();
    }
    s["receipt"] = o.seller_receipt[j];
    sellers.push_back(s);
  }
  return Json{{"buyers", buyers}, {"sellers", sellers}};
}

Json coalition_json(const ExchangeInstance& in, const Coalition& c) {
  Json ids = Json::array();
  for (auto i : c.buyers) ids.push_back(in.buyers[i].id);
  for (auto j : c.sellers) ids.push_back(in.sellers[j].id);
  return ids;
}

Json deviation_json(const ExchangeInstance& in, const Deviation& d) {
  Json buyers = Json::array();
  for (const auto& t : d.buyer_trades) {
    buyers.push_back(Json{{"id", in.buyers[t.buyer].id},
                          {"bid", t.bid},
                          {"bundle", in.buyers[t.buyer].bids[t.bid].bundle},
                          {"payment", t.payment}});
  }
  Json sellers = Json::array();
  for (const auto& t : d.seller_trades) {
    sellers.push_back(Json{{"id", in.sellers[t.seller].id},
                           {"ask", t.ask},
                           {"bundle", in.sellers[t.seller].asks[t.ask].bundle},
                           {"receipt", t.receipt}});
  }
  return Json{{"coalition", coalition_json(in, d.coalition)},
              {"buyers", buyers},
              {"sellers", sellers},
              {"min_improvement", d.min_improvement}};
}

Json cap_json(const std::optional<std::size_t>& cap) { return cap ? Json(*cap) : Json(nullptr); }

Json core_json(const ExchangeInstance& in, const CoreResult& r) {
  Json out;
  out["status"] = to_string(r.status);
  out["welfare"] = r.welfare;
  out["coalition_size_cap"] = cap_json(r.coalition_size_cap);
  out["epsilon"] = r.epsilon;
  out["iterations"] = r.iterations;
  out["wall_ms"] = r.wall_ms;
  out["outcome"] = r.outcome ? outcome_json(in, *r.outcome) : Json(nullptr);
  Json pool = Json::array();
  for (const auto& d : r.cut_pool) pool.push_back(deviation_json(in, d));
  out["cut_pool"] = pool;
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    trace.push_back(Json{{"iteration", t.iteration},
                         {"master_objective", t.master_objective},
                         {"surplus", t.surplus},
                         {"blocked", t.blocked},
                         {"cut", t.cut},
                         {"wall_ms", t.wall_ms}});
  }
  out["trace"] = trace;
  return out;
}

Json allocation_json(const ExchangeInstance& in, const Allocation& a) {
  Json out = Json::array();
  for (std::size_t i = 0; i < in.buyers.size(); ++i) {
    if (a.buyer_bid[i]) out.push_back(Json{{"id", in.buyers[i].id}, {"bid", *a.buyer_bid[i]}});
  }
  return out;
}

}  // namespace

std::string instance_to_json(const ExchangeInstance& in, int indent) {
  Json out;
  out["items"] = in.items;
  Json buyers = Json::array();
  for (const auto& b : in.buyers) {
    buyers.push_back(Json{{"id", b.id}, {"budget", money_or_null(b.budget)}, {"bids", bids_json(b.bids)}});
  }
  out["buyers"] = buyers;
  Json sellers = Json::array();
  for (const auto& s : in.sellers) {
    sellers.push_back(Json{{"id", s.id}, {"endowment", s.endowment}, {"asks", bids_json(s.asks)}});
  }
  out["sellers"] = sellers;
  Json meta = Json::object();
  for (const auto& [k, v] : in.metadata) meta[k] = v;
  out["metadata"] = meta;
  return out.dump(indent);
}

ExchangeInstance instance_from_json(const std::string& text) {
  const Json j = parse(text);
  if (!j.is_object()) fail("$", "expected an object");
  ExchangeInstance in;
  in.items = as_strings(field(j, "items", "$"), "$.items");
  const Json& buyers = field(j, "buyers", "$");
  if (!buyers.is_array()) fail("$.buyers", "expected an array");
  for (std::size_t i = 0; i < buyers.size(); ++i) {
    const std::string p = "$.buyers[" + std::to_string(i) + "]";
    Buyer b;
    b.id = as_string(field(buyers[i], "id", p), p + ".id");
    auto it = buyers[i].find("budget");
    if (it != buyers[i].end() && !it->is_null()) b.budget = as_money(*it, p + ".budget");
    b.bids = as_bids(field(buyers[i], "bids", p), p + ".bids");
    in.buyers.push_back(std::move(b));
  }
  const Json& sellers = field(j, "sellers", "$");
  if (!sellers.is_array()) fail("$.sellers", "expected an array");
  for (std::size_t s = 0; s < sellers.size(); ++s) {
    const std::string p = "$.sellers[" + std::to_string(s) + "]";
    Seller seller;
    seller.id = as_string(field(sellers[s], "id", p), p + ".id");
    seller.endowment = as_strings(field(sellers[s], "endowment", p), p + ".endowment");
    seller.asks = as_bids(field(sellers[s], "asks", p), p + ".asks");
    in.sellers.push_back(std::move(seller));
  }
  if (auto it = j.find("metadata"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) fail("$.metadata", "expected an object");
    for (const auto& [k, v] : it->items()) in.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return in;
}

std::string outcome_to_json(const ExchangeInstance& instance, const Outcome& outcome, int indent) {
  return outcome_json(instance, outcome).dump(indent);
}

Outcome outcome_from_json(const ExchangeInstance& in, const std::string& text) {
  Json j = parse(text);
  // accept a solve result and use its outcome
  if (j.is_object() && j.contains("outcome") && !j.contains("buyers")) {
    if (j["outcome"].is_null()) fail("$.outcome", "result has no outcome");
    j = Json(j["outcome"]);
  }
  if (!j.is_object()) fail("$", "expected an object");
  Outcome o = Outcome::empty_for(in);
  std::map<std::string, std::size_t> buyer_at, seller_at;
  for (std::size_t i = 0; i < in.buyers.size(); ++i) buyer_at[in.buyers[i].id] = i;
  for (std::size_t s = 0; s < in.sellers.size(); ++s) seller_at[in.sellers[s].id] = s;
  auto read_side = [&](const char* key, const char* choice, const char* money, bool buyers) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array()) fail(std::string("$.") + key, "expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const Json& e = (*it)[k];
      const std::string p = std::string("$.") + key + "[" + std::to_string(k) + "]";
      const std::string id = as_string(field(e, "id", p), p + ".id");
      auto& index = buyers ? buyer_at : seller_at;
      auto at = index.find(id);
      if (at == index.end()) fail(p + ".id", "unknown bidder '" + id + "'");
      const std::size_t who = at->second;
      const Json& c = field(e, choice, p);
      std::optional<std::size_t> pick;
      if (!c.is_null()) {
        if (!c.is_number_unsigned()) fail(p + "." + choice, "expected a non-negative index or null");
        pick = c.get<std::size_t>();
        const std::size_t limit = buyers ? in.buyers[who].bids.size() : in.sellers[who].asks.size();
        if (*pick >= limit) fail(p + "." + choice, "index out of range");
      }
      const Money amount = as_money(field(e, money, p), p + "." + money);
      if (buyers) {
        o.buyer_bid[who] = pick;
        o.buyer_payment[who] = amount;
      } else {
        o.seller_ask[who] = pick;
        o.seller_receipt[who] = amount;
      }
    }
  };
  read_side("buyers", "bid", "payment", true);
  read_side("sellers", "ask", "receipt", false);
  return o;
}

std::string core_result_to_json(const ExchangeInstance& instance, const CoreResult& result, int indent) {
  return core_json(instance, result).dump(indent);
}

std::string least_core_to_json(const ExchangeInstance& instance, const LeastCoreResult& result, int indent) {
  Json out;
  out["delta"] = result.delta;
  out["solves"] = result.solves;
  out["timed_out"] = result.timed_out;
  out["result"] = core_json(instance, result.result);
  return out.dump(indent);
}

std::string dyadic_to_json(const ExchangeInstance& instance, const DyadicResult& result, int indent) {
  Json out;
  out["status"] = to_string(result.status);
  out["welfare"] = result.welfare;
  out["wall_ms"] = result.wall_ms;
  out["outcome"] = result.outcome ? outcome_json(instance, *result.outcome) : Json(nullptr);
  return out.dump(indent);
}

std::string single_sided_to_json(const ExchangeInstance& instance, const SingleSidedResult& result, int indent) {
  Json out;
  out["status"] = to_string(result.status);
  out["z_star"] = result.z_star;
  out["revenue_allocation"] = allocation_json(instance, result.revenue_allocation);
  out["revenue_allocation_welfare"] = result.revenue_allocation_welfare;
  out["allocation"] = allocation_json(instance, result.allocation);
  out["capped_revenue"] = result.capped_revenue;
  out["welfare"] = result.welfare;
  out["prices"] = result.prices;
  out["pricing_rounds"] = result.pricing_rounds;
  out["repaired"] = result.repaired;
  out["blocked_by_enumeration"] =
      result.blocked_by_enumeration ? Json(*result.blocked_by_enumeration) : Json(nullptr);
  out["outcome"] = outcome_json(instance, result.outcome);
  return out.dump(indent);
}

std::string block_report_to_json(const ExchangeInstance& instance, const BlockReport& report, int indent) {
  Json out;
  out["status"] = to_string(report.status);
  out["blocked"] = report.blocked;
  out["surplus"] = report.surplus;
  out["epsilon"] = report.epsilon;
  out["max_size"] = cap_json(report.max_size);
  out["scanned"] = report.scanned;
  out["best"] = report.best ? deviation_json(instance, *report.best) : Json(nullptr);
  return out.dump(indent);
}

}  // namespace combex
