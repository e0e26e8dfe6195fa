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

#ifndef FACTORSCOPE_MARKET_DATA_H_
#define FACTORSCOPE_MARKET_DATA_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "factorscope/date.h"
#include "factorscope/factor_registry.h"

namespace factorscope {

// Read-only access to a stock × day panel. Days are 1-based calendar
// indices. Consumers that must respect causality (the rolling engine) read
// data only through this interface so access can be audited.
class PanelSource {
 public:
  virtual ~PanelSource() = default;

  virtual int day_count() const = 0;
  virtual int factor_count() const = 0;
  virtual std::optional<std::size_t> FindStock(std::string_view id) const = 0;

  // Raw factor values of `stock` on `day`; `row` has factor_count() entries.
  virtual void ReadFactorRow(std::size_t stock, int day,
                             std::span<double> row) const = 0;
  // Realized return of `stock` on `day` (day >= 2).
  virtual double ReadReturn(std::size_t stock, int day) const = 0;
};

class TradingCalendar {
 public:
  TradingCalendar() = default;
  // Throws kMalformedRow unless dates are strictly increasing.
  explicit TradingCalendar(std::vector<Date> dates);

  int size() const { return static_cast<int>(dates_.size()); }
  const Date& date(int day) const { return dates_.at(day - 1); }
  const std::vector<Date>& dates() const { return dates_; }

  std::optional<int> DayOf(const Date& date) const;
  std::optional<int> FirstDayOnOrAfter(const Date& date) const;
  std::optional<int> LastDayOnOrBefore(const Date& date) const;

  bool operator==(const TradingCalendar&) const = default;

 private:
  std::vector<Date> dates_;
};

struct StockRecord {
  std::string id;
  std::string sector;
  std::vector<double> close;
  // daily_return[k] is the return of day k + 2; day 1 has none.
  std::vector<double> daily_return;

  double CloseOn(int day) const { return close.at(day - 1); }
  double ReturnOn(int day) const { return daily_return.at(day - 2); }
};

struct FactorPanel {
  std::vector<std::string> names;
  std::vector<FactorType> types;
  // One calendar-length × F matrix per stock, aligned with the dataset's
  // stock order.
  std::vector<Eigen::MatrixXd> values;

  int factor_count() const { return static_cast<int>(names.size()); }
  std::optional<int> Find(std::string_view name) const;
};

// Immutable, validated panel of prices and factors. Stocks are kept sorted
// by id. Daily returns are always derived from closes.
class MarketDataset : public PanelSource {
 public:
  MarketDataset(TradingCalendar calendar, std::vector<StockRecord> stocks,
                FactorPanel factors);

  const TradingCalendar& calendar() const { return calendar_; }
  const std::vector<StockRecord>& stocks() const { return stocks_; }
  const FactorPanel& factors() const { return factors_; }
  const std::map<std::string, std::vector<std::string>>& sectors() const {
    return sectors_;
  }
  const StockRecord& stock(std::size_t index) const { return stocks_[index]; }
  const Eigen::MatrixXd& factor_values(std::size_t stock) const {
    return factors_.values[stock];
  }

  int day_count() const override { return calendar_.size(); }
  int factor_count() const override { return factors_.factor_count(); }
  std::optional<std::size_t> FindStock(std::string_view id) const override;
  void ReadFactorRow(std::size_t stock, int day,
                     std::span<double> row) const override;
  double ReadReturn(std::size_t stock, int day) const override;

 private:
  TradingCalendar calendar_;
  std::vector<StockRecord> stocks_;
  FactorPanel factors_;
  std::map<std::string, std::vector<std::string>> sectors_;
};

struct LoadOptions {
  bool strict_factors = true;
  // Registry used to type factor columns; null means the bundled default.
  const FactorRegistry* registry = nullptr;
};

// Parses the three CSV documents (prices, wide factors, sectors).
MarketDataset ParseDataset(std::string_view prices_csv,
                           std::string_view factors_csv,
                           std::string_view sectors_csv,
                           const LoadOptions& options = {});

MarketDataset LoadDataset(const std::filesystem::path& prices_path,
                          const std::filesystem::path& factors_path,
                          const std::filesystem::path& sectors_path,
                          const LoadOptions& options = {});

// Loads prices.csv, factors.csv and sectors.csv from `dir`. A factors.toml
// in the same directory overrides the bundled registry.
MarketDataset LoadDatasetDir(const std::filesystem::path& dir,
                             const LoadOptions& options = {});

std::string FormatPricesCsv(const MarketDataset& dataset);
std::string FormatFactorsCsv(const MarketDataset& dataset);
std::string FormatSectorsCsv(const MarketDataset& dataset);

// Writes prices.csv, factors.csv and sectors.csv into `dir`.
void WriteDataset(const MarketDataset& dataset,
                  const std::filesystem::path& dir);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// Shortest decimal that round-trips to the same double.
std::string FormatDouble(double value);

}  // namespace factorscope

#endif  // FACTORSCOPE_MARKET_DATA_H_
