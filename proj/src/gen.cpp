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


#include "combex/gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace combex {

namespace {

constexpr std::array<const char*, 4> kAirports = {"ATL", "ORD", "DFW", "LAX"};
// Longitude / latitude.
constexpr std::array<std::array<double, 2>, 4> kAirportXY = {{{-84.43, 33.64}, {-87.90, 41.98}, {-97.04, 32.90}, {-118.41, 33.94}}};

Money cents(double x) { return std::round(x * 100.0) / 100.0; }

double raw_distance(std::size_t a, std::size_t b) {
  return std::hypot(kAirportXY[a][0] - kAirportXY[b][0], kAirportXY[a][1] - kAirportXY[b][1]);
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' needs a non-negative integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' needs a number, got '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t SplitMix64::below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }

SplitMix64 SplitMix64::split(std::uint64_t stream) const {
  SplitMix64 mixer(state_ ^ (stream * 0xd1b54a32d192ed03ULL));
  return SplitMix64(mixer.next());
}

Money airport_distance(std::size_t a, std::size_t b) {
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < kAirports.size(); ++i) {
    for (std::size_t j = i + 1; j < kAirports.size(); ++j) {
      lo = std::min(lo, raw_distance(i, j));
      hi = std::max(hi, raw_distance(i, j));
    }
  }
  return 1.0 + 9.0 * (raw_distance(a, b) - lo) / (hi - lo);
}

void check_config(const AirportGenConfig& c) {
  if (c.num_bidders < 1) throw std::invalid_argument("bidders must be >= 1");
  if (c.num_airports < 2 || c.num_airports > kAirports.size()) throw std::invalid_argument("airports must be in [2, 4]");
  if (c.num_items < c.num_airports) throw std::invalid_argument("items must be >= airports");
  if (c.deviation_penalty < 0.0) throw std::invalid_argument("deviation_penalty must be >= 0");
  if (c.duration_penalty < 0.0) throw std::invalid_argument("duration_penalty must be >= 0");
  if (c.budget_fraction < 0.0) throw std::invalid_argument("budget_fraction must be >= 0");
  if (c.reservation_fraction < 0.0) throw std::invalid_argument("reservation_fraction must be >= 0");
}

AirportGenConfig airport_config_from(const std::map<std::string, std::string>& kv) {
  AirportGenConfig c;
  for (const auto& [key, raw] : kv) {
    const std::string v = trim(raw);
    if (key == "bidders") c.num_bidders = parse_size(key, v);
    else if (key == "items") c.num_items = parse_size(key, v);
    else if (key == "airports") c.num_airports = parse_size(key, v);
    else if (key == "seed") c.seed = parse_size(key, v);
    else if (key == "deviation_penalty") c.deviation_penalty = parse_double(key, v);
    else if (key == "duration_penalty") c.duration_penalty = parse_double(key, v);
    else if (key == "min_duration") c.min_duration = parse_size(key, v);
    else if (key == "budget_fraction") c.budget_fraction = parse_double(key, v);
    else if (key == "reservation_fraction") c.reservation_fraction = parse_double(key, v);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  check_config(c);
  return c;
}

ExchangeInstance gen_airport(const AirportGenConfig& c) {
  check_config(c);
  const SplitMix64 root(c.seed);
  const std::size_t A = c.num_airports;
  ExchangeInstance in;
  std::vector<std::size_t> slots(A, 0);
  for (std::size_t k = 0; k < c.num_items; ++k) {
    in.items.push_back(std::string(kAirports[k % A]) + "_t" + std::to_string(k / A));
    ++slots[k % A];
  }
  const std::size_t horizon = *std::max_element(slots.begin(), slots.end());
  std::vector<Money> item_peak(c.num_items, 0.0);

  for (std::size_t b = 0; b < c.num_bidders; ++b) {
    SplitMix64 rng = root.split(b + 1);
    const std::size_t origin = rng.below(A);
    std::size_t dest = rng.below(A - 1);
    if (dest >= origin) ++dest;
    const double ideal = static_cast<double>(rng.below(horizon));
    const Money base = airport_distance(origin, dest);
    Buyer buyer{"airline" + std::to_string(b + 1), kUnboundedBudget, {}};
    Money vmax = 0.0;
    for (std::size_t td = 0; td < slots[origin]; ++td) {
      for (std::size_t ta = td + c.min_duration; ta < slots[dest]; ++ta) {
        const double late = std::abs(static_cast<double>(ta) - ideal);
        const double extra = static_cast<double>(ta - td - c.min_duration);
        const Money v = cents(base - c.deviation_penalty * late - c.duration_penalty * extra);
        if (v <= 0.0) continue;
        const std::size_t kd = td * A + origin;
        const std::size_t ka = ta * A + dest;
        buyer.bids.push_back(PackageBid{{in.items[kd], in.items[ka]}, v});
        item_peak[kd] = std::max(item_peak[kd], v);
        item_peak[ka] = std::max(item_peak[ka], v);
        vmax = std::max(vmax, v);
      }
    }
    buyer.budget = cents(rng.uniform(0.0, c.budget_fraction * vmax));
    in.buyers.push_back(std::move(buyer));
  }
  SplitMix64 sellers = root.split(0);
  for (std::size_t k = 0; k < c.num_items; ++k) {
    const Money r = cents(sellers.uniform(0.0, c.reservation_fraction * item_peak[k]));
    in.sellers.push_back(Seller{"s_" + in.items[k], {in.items[k]}, {PackageBid{{in.items[k]}, r}}});
  }
  in.metadata["kind"] = "airport";
  in.metadata["seed"] = std::to_string(c.seed);
  in.metadata["bidders"] = std::to_string(c.num_bidders);
  in.metadata["items"] = std::to_string(c.num_items);
  return in;
}

void check_dnf(const Dnf& dnf) {
  if (dnf.n < 1 || dnf.m < 1) throw std::invalid_argument("formula needs n >= 1 and m >= 1");
  if (dnf.clauses.empty()) throw std::invalid_argument("formula needs at least one clause");
  for (std::size_t l = 0; l < dnf.clauses.size(); ++l) {
    if (dnf.clauses[l].empty()) throw std::invalid_argument("clause " + std::to_string(l + 1) + " is empty");
    for (const auto& lit : dnf.clauses[l]) {
      if (lit.index >= (lit.is_y ? dnf.m : dnf.n)) {
        throw std::invalid_argument("clause " + std::to_string(l + 1) + " uses " + (lit.is_y ? "y" : "x") +
                                    std::to_string(lit.index + 1) + " out of range");
      }
    }
  }
}

Dnf parse_dnf(const std::string& text, std::size_t n, std::size_t m) {
  Dnf dnf{n, m, {}};
  std::stringstream clauses(text);
  std::string clause;
  while (std::getline(clauses, clause, '|')) {
    std::vector<Literal> lits;
    std::stringstream parts(clause);
    std::string tok;
    while (std::getline(parts, tok, '&')) {
      tok = trim(tok);
      Literal lit;
      if (!tok.empty() && (tok[0] == '~' || tok[0] == '!')) {
        lit.negated = true;
        tok = trim(tok.substr(1));
      }
      if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'y')) throw std::invalid_argument("bad literal '" + tok + "'");
      lit.is_y = tok[0] == 'y';
      const std::size_t idx = parse_size("literal", tok.substr(1));
      if (idx == 0) throw std::invalid_argument("literal indices start at 1: '" + tok + "'");
      lit.index = idx - 1;
      lits.push_back(lit);
    }
    dnf.clauses.push_back(std::move(lits));
  }
  check_dnf(dnf);
  return dnf;
}

std::string to_string(const Dnf& dnf) {
  std::string out;
  for (std::size_t l = 0; l < dnf.clauses.size(); ++l) {
    if (l) out += " | ";
    for (std::size_t t = 0; t < dnf.clauses[l].size(); ++t) {
      const auto& lit = dnf.clauses[l][t];
      if (t) out += " & ";
      out += (lit.negated ? "~" : "") + std::string(lit.is_y ? "y" : "x") + std::to_string(lit.index + 1);
    }
  }
  return out;
}

bool eval_dnf(const Dnf& dnf, std::uint64_t x, std::uint64_t y) {
  for (const auto& clause : dnf.clauses) {
    bool all = true;
    for (const auto& lit : clause) {
      const bool v = ((lit.is_y ? y : x) >> lit.index) & 1;
      if (v == lit.negated) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool qsat2_bruteforce(const Dnf& dnf) {
  check_dnf(dnf);
  if (dnf.n + dnf.m > 16) throw std::invalid_argument("brute force needs n + m <= 16");
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << dnf.n); ++x) {
    bool every = true;
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << dnf.m) && every; ++y) every = eval_dnf(dnf, x, y);
    if (every) return true;
  }
  return false;
}

ReductionConstants reduction_constants(const Dnf& dnf) {
  const double n = static_cast<double>(dnf.n);
  const double L = static_cast<double>(dnf.clauses.size());
  ReductionConstants k;
  k.T = 1.0 / (2.0 * n);
  k.U = n * L + 1.0;
  k.V = 4.0 * k.U + 1.0;
  k.W = 7.0 * n * k.V + 1.0;
  return k;
}

Qsat2Instance gen_qsat2(const Dnf& dnf, GammaValueRule rule) {
  check_dnf(dnf);
  const std::size_t n = dnf.n, m = dnf.m, L = dnf.clauses.size();
  const std::size_t items = 2 * n + n * n * L + 2 * m + n * L + 4 * n;
  if (items > kQsatMaxItems) {
    throw std::invalid_argument("reduction would need " + std::to_string(items) + " items (limit " +
                                std::to_string(kQsatMaxItems) + ")");
  }
  Qsat2Instance out;
  out.dnf = dnf;
  const auto k = reduction_constants(dnf);
  out.constants = k;
  out.threshold = static_cast<double>(n) * k.W;
  auto& in = out.instance;
  auto s = [](std::size_t v) { return std::to_string(v + 1); };
  auto chi = [&](std::size_t i, bool bar) { return std::string(bar ? "chibar" : "chi") + "_" + s(i); };
  auto psi = [&](std::size_t l, std::size_t a, std::size_t b) { return "psi_" + s(l) + "_" + s(a) + "_" + s(b); };
  auto gam = [&](std::size_t j, bool bar) { return std::string(bar ? "gammabar" : "gamma") + "_" + s(j); };
  auto phi = [&](std::size_t l, std::size_t i) { return "phi_" + s(l) + "_" + s(i); };
  auto lam = [&](int kk, std::size_t i, bool bar) {
    return std::string(bar ? "lambdabar" : "lambda") + std::to_string(kk) + "_" + s(i);
  };

  // Sellers; each offers its whole endowment at reservation 0, which with
  // free disposal stands for every sub-bundle.
  auto add_seller = [&](const std::string& id, std::vector<std::string> endow) {
    for (const auto& it : endow) in.items.push_back(it);
    in.sellers.push_back(Seller{id, endow, {PackageBid{endow, 0.0}}});
  };
  for (std::size_t i = 0; i < n; ++i) add_seller("S_chi_" + s(i), {chi(i, false), chi(i, true)});
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<std::string> e;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) e.push_back(psi(l, a, b));
    }
    add_seller("S_psi_" + s(l), e);
  }
  {
    std::vector<std::string> e;
    for (std::size_t j = 0; j < m; ++j) {
      e.push_back(gam(j, false));
      e.push_back(gam(j, true));
    }
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t i = 0; i < n; ++i) e.push_back(phi(l, i));
    }
    add_seller("S_gamma_phi", e);
  }
  {
    std::vector<std::string> e;
    for (std::size_t i = 0; i < n; ++i) {
      for (int kk = 1; kk <= 2; ++kk) {
        e.push_back(lam(kk, i, false));
        e.push_back(lam(kk, i, true));
      }
    }
    add_seller("S_lambda", e);
  }

  // Row i of clause matrix l (second index fixed), full matrix, column i.
  auto row = [&](std::size_t l, std::size_t i) {
    std::vector<std::string> r;
    for (std::size_t a = 0; a < n; ++a) r.push_back(psi(l, a, i));
    return r;
  };
  auto matrix = [&](std::size_t l) {
    std::vector<std::string> r;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) r.push_back(psi(l, a, b));
    }
    return r;
  };
  auto column = [&](std::size_t l, std::size_t i) {
    std::vector<std::string> r;
    for (std::size_t b = 0; b < n; ++b) r.push_back(psi(l, i, b));
    return r;
  };
  auto has = [&](std::size_t l, bool is_y, std::size_t idx, bool negated) {
    for (const auto& lit : dnf.clauses[l]) {
      if (lit.is_y == is_y && lit.index == idx && lit.negated == negated) return true;
    }
    return false;
  };
  auto append = [](std::vector<std::string>& to, const std::vector<std::string>& from) {
    to.insert(to.end(), from.begin(), from.end());
  };

  for (std::size_t i = 0; i < n; ++i) {
    Buyer bk{"BK_" + s(i), k.V + k.T, {}};
    for (bool bar : {false, true}) {
      for (std::size_t l = 0; l < L; ++l) {
        std::vector<std::string> bundle{chi(i, bar)};
        append(bundle, row(l, i));
        bundle.push_back(phi(l, i));
        bk.bids.push_back(PackageBid{bundle, k.W});
      }
    }
    in.buyers.push_back(std::move(bk));
  }
  for (std::size_t i = 0; i < n; ++i) {
    Buyer bm{"BM_" + s(i), 2.0 * k.V, {}};
    for (bool bar : {false, true}) {
      std::vector<std::string> bundle{chi(i, bar), lam(1, i, bar), lam(2, i, bar)};
      for (std::size_t l = 0; l < L; ++l) {
        if (has(l, false, i, bar)) append(bundle, column(l, i));
      }
      bm.bids.push_back(PackageBid{bundle, 2.0 * k.V});
    }
    in.buyers.push_back(std::move(bm));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 1; c <= 2; ++c) {
      in.buyers.push_back(Buyer{"Bchi" + std::to_string(c) + "_" + s(i), k.V,
                                {PackageBid{{chi(i, false)}, k.V}, PackageBid{{chi(i, true)}, k.V}}});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    in.buyers.push_back(Buyer{"Blambda1_" + s(i), k.U,
                              {PackageBid{{lam(1, i, false)}, k.V}, PackageBid{{lam(1, i, true)}, k.V - L}}});
    in.buyers.push_back(Buyer{"Blambda2_" + s(i), k.U,
                              {PackageBid{{lam(2, i, false)}, k.V - L}, PackageBid{{lam(2, i, true)}, k.V}}});
  }
  for (std::size_t j = 0; j < m; ++j) {
    Buyer bg{"BG_" + s(j), static_cast<Money>(L), {}};
    // gamma_j goes with clauses holding ~y_j, gammabar_j with clauses holding y_j.
    for (bool bar : {false, true}) {
      std::vector<std::size_t> ls;
      for (std::size_t l = 0; l < L; ++l) {
        if (has(l, true, j, !bar)) ls.push_back(l);
      }
      if (ls.size() >= 63 || (std::size_t{1} << ls.size()) > kQsatMaxUnionBids) {
        throw std::invalid_argument("too many clause bundles for " + bg.id);
      }
      for (std::size_t mask = 1; mask < (std::size_t{1} << ls.size()); ++mask) {
        std::vector<std::string> bundle{gam(j, bar)};
        std::size_t count = 0;
        for (std::size_t t = 0; t < ls.size(); ++t) {
          if (!(mask >> t & 1)) continue;
          ++count;
          append(bundle, matrix(ls[t]));
          for (std::size_t i = 0; i < n; ++i) bundle.push_back(phi(ls[t], i));
        }
        Money value = static_cast<Money>(count);
        if (rule == GammaValueRule::kSizeFormula) {
          value = static_cast<Money>(bundle.size() - 1) / static_cast<Money>(n * (n + 1));
        }
        bg.bids.push_back(PackageBid{bundle, value});
      }
    }
    in.buyers.push_back(std::move(bg));
  }
  in.metadata["kind"] = "qsat2";
  in.metadata["formula"] = to_string(dnf);
  in.metadata["n"] = std::to_string(n);
  in.metadata["m"] = std::to_string(m);
  std::ostringstream th;
  th.precision(17);
  th << out.threshold;
  in.metadata["threshold"] = th.str();
  return out;
}

std::vector<std::string> qsat2_equilibrium_violations(const Qsat2Instance& q, const Outcome& outcome) {
  const auto& in = q.instance;
  const auto& k = q.constants;
  std::vector<std::string> out;
  auto buyer = [&](const std::string& id) {
    for (std::size_t i = 0; i < in.buyers.size(); ++i) {
      if (in.buyers[i].id == id) return i;
    }
    throw std::invalid_argument("no buyer " + id);
  };
  auto seller = [&](const std::string& id) {
    for (std::size_t j = 0; j < in.sellers.size(); ++j) {
      if (in.sellers[j].id == id) return j;
    }
    throw std::invalid_argument("no seller " + id);
  };
  auto chi_of = [&](std::size_t b) -> std::string {
    if (!outcome.buyer_bid[b]) return "";
    for (const auto& it : in.buyers[b].bids[*outcome.buyer_bid[b]].bundle) {
      if (it.rfind("chi", 0) == 0) return it;
    }
    return "";
  };
  for (std::size_t i = 0; i < q.dnf.n; ++i) {
    const std::string tag = std::to_string(i + 1);
    const std::size_t bk = buyer("BK_" + tag), bm = buyer("BM_" + tag), sc = seller("S_chi_" + tag);
    if (!outcome.buyer_bid[bk] || std::abs(in.buyers[bk].bids[*outcome.buyer_bid[bk]].value - k.W) > kFeasTol) {
      out.push_back("BK_" + tag + " does not win a W-valued bundle");
    }
    const std::string a = chi_of(bk), b = chi_of(bm);
    if (a.empty() || b.empty() || a == b) {
      out.push_back("BK_" + tag + " and BM_" + tag + " do not hold complementary chi items");
    }
    if (std::abs(outcome.seller_receipt[sc] - 2.0 * k.V) > kFeasTol) {
      out.push_back("S_chi_" + tag + " receives " + std::to_string(outcome.seller_receipt[sc]) + " instead of 2V");
    }
    for (std::size_t who : {bk, bm}) {
      if (outcome.buyer_payment[who] < k.V - kFeasTol) {
        out.push_back(in.buyers[who].id + " pays " + std::to_string(outcome.buyer_payment[who]) + " < V");
      }
    }
  }
  return out;
}

}  // namespace combex
