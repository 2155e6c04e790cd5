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


#ifndef COMBEX_JSON_IO_HPP_
#define COMBEX_JSON_IO_HPP_

#include <stdexcept>
#include <string>

#include "combex/blocking.hpp"
#include "combex/core_solver.hpp"
#include "combex/model.hpp"
#include "combex/restricted.hpp"

namespace combex {

// Malformed or schema-violating JSON. The message names the JSON path.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Instances. A null or missing budget means unbounded. Fields are written
// in a fixed order and numbers round-trip exactly.
std::string instance_to_json(const ExchangeInstance& instance, int indent = 2);
ExchangeInstance instance_from_json(const std::string& text);

// Outcomes are keyed by bidder id:
// {"buyers":[{"id","bid":k|null,"bundle":[..],"payment"}],
//  "sellers":[{"id","ask":k|null,"bundle":[..],"receipt"}]}
// Bidders left out do not trade.
std::string outcome_to_json(const ExchangeInstance& instance, const Outcome& outcome, int indent = 2);
Outcome outcome_from_json(const ExchangeInstance& instance, const std::string& text);

std::string core_result_to_json(const ExchangeInstance& instance, const CoreResult& result, int indent = 2);
std::string least_core_to_json(const ExchangeInstance& instance, const LeastCoreResult& result, int indent = 2);
std::string dyadic_to_json(const ExchangeInstance& instance, const DyadicResult& result, int indent = 2);
std::string single_sided_to_json(const ExchangeInstance& instance, const SingleSidedResult& result,
                                 int indent = 2);
std::string block_report_to_json(const ExchangeInstance& instance, const BlockReport& report, int indent = 2);

}  // namespace combex

#endif  // COMBEX_JSON_IO_HPP_
