// Copyright 2026 The FactorScope Authors
//
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

#include "factorscope/factor_registry.h"

#include <fstream>
#include <sstream>

#include "factorscope/error.h"

namespace factorscope {
namespace {

constexpr std::string_view kTypeNames[] = {
    "TransactionFriction", "Momentum",  "Value",        "Growth",
    "Profitability",       "Liquidity", "Unclassified",
};

// Bundled registry: 17 transaction-friction, 5 momentum, 8 value, 11 growth,
// 8 profitability and 7 liquidity factors. Mirrors core/data/factors.toml.
constexpr std::string_view kDefaultRegistry = R"(# Default factor registry: name = type
size = TransactionFriction
age = TransactionFriction
beta = TransactionFriction
betasq = TransactionFriction
idvol = TransactionFriction
retvol = TransactionFriction
std_dvol = TransactionFriction
std_turn = TransactionFriction
turn = TransactionFriction
volumed = TransactionFriction
dolvol = TransactionFriction
ill = TransactionFriction
zerotrade = TransactionFriction
retnmax = TransactionFriction
lagretn = TransactionFriction
baspread = TransactionFriction
pricedelay = TransactionFriction
mom1m = Momentum
mom6m = Momentum
mom12m = Momentum
chmom = Momentum
indmom = Momentum
bm = Value
AM = Value
ep = Value
cfp = Value
sp = Value
dy = Value
lev = Value
bm_ia = Value
agr = Growth
lgr = Growth
egr = Growth
sgr = Growth
chcsho = Growth
grcapx = Growth
invest = Growth
chinv = Growth
grltnoa = Growth
chtx = Growth
pchgm = Growth
roe = Profitability
roa = Profitability
roic = Profitability
gma = Profitability
operprof = Profitability
chpm = Profitability
pctacc = Profitability
cashpr = Profitability
currat = Liquidity
quick = Liquidity
cashdebt = Liquidity
salecash = Liquidity
salerec = Liquidity
saleinv = Liquidity
pchcurrat = Liquidity
)";

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view FactorTypeName(FactorType type) {
  return kTypeNames[static_cast<int>(type)];
}

std::optional<FactorType> ParseFactorType(std::string_view name) {
  for (int i = 0; i < static_cast<int>(std::size(kTypeNames)); ++i) {
    if (kTypeNames[i] == name) return static_cast<FactorType>(i);
  }
  return std::nullopt;
}

FactorRegistry::FactorRegistry(std::vector<FactorInfo> factors)
    : factors_(std::move(factors)) {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (factors_[i].name == factors_[j].name) {
        throw Error(ErrorCode::kInvalidConfig,
                    "duplicate factor in registry: " + factors_[i].name);
      }
    }
  }
}

const FactorRegistry& FactorRegistry::Default() {
  static const FactorRegistry* registry =
      new FactorRegistry(Parse(kDefaultRegistry));
  return *registry;
}

FactorRegistry FactorRegistry::Parse(std::string_view text) {
  std::vector<FactorInfo> factors;
  int line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kMalformedRow,
                  "registry line " + std::to_string(line_no) + ": expected 'name = type'");
    }
    std::string_view name = Trim(line.substr(0, eq));
    std::string_view type_name = Trim(line.substr(eq + 1));
    if (type_name.size() >= 2 && type_name.front() == '"' &&
        type_name.back() == '"') {
      type_name = type_name.substr(1, type_name.size() - 2);
    }
    const auto type = ParseFactorType(type_name);
    if (name.empty() || !type || *type == FactorType::kUnclassified) {
      throw Error(ErrorCode::kMalformedRow,
                  "registry line " + std::to_string(line_no) +
                      ": unknown factor type '" + std::string(type_name) + "'");
    }
    factors.push_back({std::string(name), *type});
  }
  return FactorRegistry(std::move(factors));
}

FactorRegistry FactorRegistry::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::string FactorRegistry::ToText() const {
  std::string out;
  for (const auto& f : factors_) {
    out += f.name;
    out += " = ";
    out += FactorTypeName(f.type);
    out += '\n';
  }
  return out;
}

std::optional<std::size_t> FactorRegistry::Find(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].name == name) return i;
  }
  return std::nullopt;
}

std::array<int, kFactorTypeCount> FactorRegistry::TypeCounts() const {
  std::array<int, kFactorTypeCount> counts{};
  for (const auto& f : factors_) {
    if (f.type != FactorType::kUnclassified) ++counts[static_cast<int>(f.type)];
  }
  return counts;
}

}  // namespace factorscope
