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


#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "combex/combex.h"
#include "doctest.h"

namespace {

std::string data(const std::string& name) {
  std::ifstream in(std::string(COMBEX_DATA_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve through the C interface") {
  combex_instance* in = nullptr;
  REQUIRE(combex_instance_from_json(data("budget_dyad.json").c_str(), &in) == COMBEX_OK);
  combex_solve_options o;
  combex_solve_options_init(&o);
  combex_result* r = nullptr;
  REQUIRE(combex_solve(in, &o, &r) == COMBEX_OK);
  CHECK(combex_result_verdict(r) == COMBEX_VERDICT_OK);
  CHECK(combex_result_value(r) == doctest::Approx(9.0));
  CHECK(std::string(combex_result_summary(r)).find("welfare: 9") != std::string::npos);

  combex_result* chk = nullptr;
  REQUIRE(combex_check(in, combex_result_json(r), 0, 0.0, &chk) == COMBEX_OK);
  CHECK(combex_result_verdict(chk) == COMBEX_VERDICT_OK);
  CHECK(std::string(combex_result_summary(chk)).find("not blocked") != std::string::npos);
  combex_result_free(chk);

  o.mode = COMBEX_MODE_DYADIC;
  combex_result* dy = nullptr;
  REQUIRE(combex_solve(in, &o, &dy) == COMBEX_OK);
  CHECK(combex_result_value(dy) == doctest::Approx(9.0));
  combex_result_free(dy);

  o.mode = COMBEX_MODE_SINGLE_SIDED;
  combex_result* ss = nullptr;
  CHECK(combex_solve(in, &o, &ss) == COMBEX_ERR_ARGUMENT);
  CHECK(std::strlen(combex_last_error()) > 0);
  CHECK(ss == nullptr);

  o.mode = COMBEX_MODE_NCORE;
  o.coalition_cap = 0;
  CHECK(combex_solve(in, &o, &ss) == COMBEX_ERR_ARGUMENT);

  char* text = nullptr;
  REQUIRE(combex_instance_to_json(in, &text) == COMBEX_OK);
  CHECK(std::string(text).find("\"budget\": null") != std::string::npos);
  combex_string_free(text);
  combex_result_free(r);
  combex_instance_free(in);
}

TEST_CASE("verdicts and errors") {
  combex_instance* in = nullptr;
  REQUIRE(combex_instance_from_json(data("empty_core.json").c_str(), &in) == COMBEX_OK);
  combex_result* r = nullptr;
  REQUIRE(combex_solve(in, nullptr, &r) == COMBEX_OK);
  CHECK(combex_result_verdict(r) == COMBEX_VERDICT_EMPTY);
  combex_result_free(r);
  REQUIRE(combex_least_core(in, nullptr, &r) == COMBEX_OK);
  CHECK(combex_result_value(r) == doctest::Approx(0.5).epsilon(1e-3));
  combex_result_free(r);
  combex_instance_free(in);

  combex_instance* bad = nullptr;
  CHECK(combex_instance_from_json("{", &bad) == COMBEX_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(combex_instance_from_json(R"({"items":["a"],"buyers":[{"id":"b","bids":[{"bundle":["zz"],"value":1}]}],"sellers":[]})",
                                  &bad) == COMBEX_ERR_INVALID);
  CHECK(combex_instance_from_json(nullptr, &bad) == COMBEX_ERR_ARGUMENT);
  CHECK(combex_gen_airport("items = 2", &bad) == COMBEX_ERR_ARGUMENT);
  CHECK(combex_gen_qsat2("x1 & q", 1, 1, 0, &bad, nullptr) == COMBEX_ERR_PARSE);
}

TEST_CASE("generators through the C interface") {
  combex_instance* a = nullptr;
  combex_instance* b = nullptr;
  REQUIRE(combex_gen_airport("seed = 42\nbidders = 3\nitems = 6", &a) == COMBEX_OK);
  REQUIRE(combex_gen_airport("seed = 42\nbidders = 3\nitems = 6", &b) == COMBEX_OK);
  char *ta = nullptr, *tb = nullptr;
  combex_instance_to_json(a, &ta);
  combex_instance_to_json(b, &tb);
  CHECK(std::string(ta) == std::string(tb));
  combex_string_free(ta);
  combex_string_free(tb);
  combex_instance_free(a);
  combex_instance_free(b);

  double threshold = 0.0;
  combex_instance* q = nullptr;
  REQUIRE(combex_gen_qsat2("x1", 1, 1, 0, &q, &threshold) == COMBEX_OK);
  CHECK(threshold == 64.0);
  combex_result* r = nullptr;
  REQUIRE(combex_solve(q, nullptr, &r) == COMBEX_OK);
  CHECK(combex_result_value(r) >= 64.0);
  char* violations = nullptr;
  REQUIRE(combex_qsat2_equilibrium_check("x1", 1, 1, combex_result_json(r), &violations) == COMBEX_OK);
  CHECK(std::string(violations) == "[]");
  combex_string_free(violations);
  combex_result_free(r);
  combex_instance_free(q);
  int truth = -1;
  REQUIRE(combex_qsat2_bruteforce("x1 & y1", 1, 1, &truth) == COMBEX_OK);
  CHECK(truth == 0);
}
