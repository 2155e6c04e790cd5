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

#include "combex/core_solver.hpp"
#include "combex/gen.hpp"
#include "combex/json_io.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace combex;

TEST_CASE("instance round trip is exact") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = trial % 2 ? oracle::random_tiny_instance(rng) : oracle::random_contested_instance(rng, 3, 2);
    // awkward doubles
    for (auto& b : in.buyers) {
      for (auto& bid : b.bids) bid.value = u(rng) / 3.0;
    }
    in.metadata["note"] = "trial " + std::to_string(trial);
    const std::string text = instance_to_json(in);
    const auto back = instance_from_json(text);
    CHECK(instance_to_json(back) == text);
    REQUIRE(back.buyers.size() == in.buyers.size());
    for (std::size_t i = 0; i < in.buyers.size(); ++i) {
      CHECK(back.buyers[i].budget == in.buyers[i].budget);
      for (std::size_t k = 0; k < in.buyers[i].bids.size(); ++k) {
        CHECK(back.buyers[i].bids[k].value == in.buyers[i].bids[k].value);
      }
    }
    CHECK(back.metadata == in.metadata);
  }
}

TEST_CASE("unbounded budget is null") {
  const auto in = fixtures::budget_dyad();
  const std::string text = instance_to_json(in, -1);
  CHECK(text.find("\"budget\":null") != std::string::npos);
  CHECK(std::isinf(instance_from_json(text).buyers[1].budget));
  const auto missing = instance_from_json(R"({"items":["a"],"buyers":[{"id":"b","bids":[]}],"sellers":[]})");
  CHECK(std::isinf(missing.buyers[0].budget));
}

TEST_CASE("field order is stable") {
  const std::string text = instance_to_json(fixtures::empty_core(), -1);
  CHECK(text.rfind(R"({"items":["A","B"],"buyers":[{"id":"b1","budget":3.0,"bids":[{"bundle":["A","B"],"value":10.0}]})", 0) == 0);
}

TEST_CASE("generated instances serialize identically") {
  AirportGenConfig c;
  c.seed = 42;
  CHECK(instance_to_json(gen_airport(c)) == instance_to_json(gen_airport(c)));
  const auto q = gen_qsat2(parse_dnf("x1 & ~y1", 1, 1));
  CHECK(instance_to_json(instance_from_json(instance_to_json(q.instance))) == instance_to_json(q.instance));
}

TEST_CASE("parse errors name the path") {
  CHECK_THROWS_AS(instance_from_json("{"), ParseError);
  CHECK_THROWS_AS(instance_from_json("[]"), ParseError);
  try {
    instance_from_json(R"({"items":[],"buyers":[{"id":"b","bids":[{"bundle":["x"],"value":"ten"}]}],"sellers":[]})");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("$.buyers[0].bids[0].value") != std::string::npos);
  }
}

TEST_CASE("outcome round trip") {
  const auto in = fixtures::budget_dyad();
  const auto r = solve_core(in);
  REQUIRE(r.outcome);
  const auto text = outcome_to_json(in, *r.outcome);
  const auto back = outcome_from_json(in, text);
  CHECK(back.buyer_bid == r.outcome->buyer_bid);
  CHECK(back.seller_ask == r.outcome->seller_ask);
  CHECK(back.buyer_payment == r.outcome->buyer_payment);
  CHECK(back.seller_receipt == r.outcome->seller_receipt);
  const auto via_result = outcome_from_json(in, core_result_to_json(in, r));
  CHECK(via_result.buyer_payment == r.outcome->buyer_payment);
  const auto sparse = outcome_from_json(in, R"({"buyers":[{"id":"b2","bid":0,"payment":2}],"sellers":[{"id":"s1","ask":0,"receipt":2}]})");
  CHECK(check_outcome(in, sparse).empty());
  CHECK_THROWS_AS(outcome_from_json(in, R"({"buyers":[{"id":"zz","bid":0,"payment":2}]})"), ParseError);
  CHECK_THROWS_AS(outcome_from_json(in, R"({"buyers":[{"id":"b2","bid":5,"payment":2}]})"), ParseError);
}

TEST_CASE("result documents") {
  const auto in = fixtures::empty_core();
  const auto r = solve_core(in);
  const auto text = core_result_to_json(in, r);
  CHECK(text.find("\"status\": \"coreEmpty\"") != std::string::npos);
  CHECK(text.find("\"outcome\": null") != std::string::npos);
  const auto rep = separate(in, Outcome::empty_for(in), std::nullopt);
  CHECK(block_report_to_json(in, rep).find("\"blocked\": true") != std::string::npos);
}
