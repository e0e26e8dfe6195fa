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

#ifndef FACTORSCOPE_FACTOR_REGISTRY_H_
#define FACTORSCOPE_FACTOR_REGISTRY_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factorscope {

// The six factor families. kUnclassified is only produced for columns
// admitted by a non-strict load that are absent from the registry.
enum class FactorType {
  kTransactionFriction,
  kMomentum,
  kValue,
  kGrowth,
  kProfitability,
  kLiquidity,
  kUnclassified,
};

inline constexpr std::size_t kFactorTypeCount = 6;

std::string_view FactorTypeName(FactorType type);
std::optional<FactorType> ParseFactorType(std::string_view name);

struct FactorInfo {
  std::string name;
  FactorType type;

  bool operator==(const FactorInfo&) const = default;
};

// Ordered list of known factors. Order is significant: it breaks ties when
// ranking factors and fixes column order in generated datasets.
class FactorRegistry {
 public:
  FactorRegistry() = default;
  explicit FactorRegistry(std::vector<FactorInfo> factors);

  // The bundled 56-factor registry.
  static const FactorRegistry& Default();

  // Parses `name = type` lines. Blank lines and `#` comments are skipped.
  static FactorRegistry Parse(std::string_view text);
  static FactorRegistry LoadFile(const std::filesystem::path& path);

  std::string ToText() const;

  const std::vector<FactorInfo>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  std::optional<std::size_t> Find(std::string_view name) const;

  // Per-type counts, indexed by FactorType (unclassified excluded).
  std::array<int, kFactorTypeCount> TypeCounts() const;

 private:
  std::vector<FactorInfo> factors_;
};

}  // namespace factorscope

#endif  // FACTORSCOPE_FACTOR_REGISTRY_H_
