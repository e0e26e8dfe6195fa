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

#include "factorscope/market_data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "factorscope/error.h"

namespace factorscope {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Iterates non-empty lines of a CSV document, tracking 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {
    // UTF-8 byte order mark.
    if (text_.starts_with("\xEF\xBB\xBF")) text_.remove_prefix(3);
  }

  bool Next(std::string_view& line) {
    while (!text_.empty()) {
      const auto eol = text_.find('\n');
      line = text_.substr(0, eol);
      text_ = eol == std::string_view::npos ? std::string_view{}
                                            : text_.substr(eol + 1);
      ++line_no_;
      if (!Trim(line).empty()) return true;
    }
    return false;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  int line_no_ = 0;
};

[[noreturn]] void Malformed(std::string_view file, int line, int column,
                            const std::string& what) {
  throw Error(ErrorCode::kMalformedRow,
              std::string(file) + " row " + std::to_string(line) + " column " +
                  std::to_string(column) + ": " + what);
}

double ParseNumber(std::string_view field, std::string_view file, int line,
                   int column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    Malformed(file, line, column, "not a finite number: '" + std::string(field) + "'");
  }
  return value;
}

Date ParseDateField(std::string_view field, std::string_view file, int line) {
  const auto date = ParseIsoDate(field);
  if (!date) {
    Malformed(file, line, 1, "not an ISO-8601 date: '" + std::string(field) + "'");
  }
  return *date;
}

void ExpectHeader(LineReader& reader, std::string_view file,
                  std::vector<std::string_view>& header) {
  std::string_view line;
  if (!reader.Next(line)) {
    throw Error(ErrorCode::kMalformedRow, std::string(file) + " is empty");
  }
  header = SplitFields(line);
}

std::string DayLabel(const Date& date) { return FormatIsoDate(date); }

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kMissingFile, "cannot write " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw Error(ErrorCode::kMissingFile, "write failed: " + path.string());
  }
}

// TradingCalendar

TradingCalendar::TradingCalendar(std::vector<Date> dates)
    : dates_(std::move(dates)) {
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      throw Error(ErrorCode::kMalformedRow,
                  "calendar dates must be strictly increasing at " +
                      DayLabel(dates_[i]));
    }
  }
}

std::optional<int> TradingCalendar::DayOf(const Date& date) const {
  const auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.end() || *it != date) return std::nullopt;
  return static_cast<int>(it - dates_.begin()) + 1;
}

std::optional<int> TradingCalendar::FirstDayOnOrAfter(const Date& date) const {
  const auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.end()) return std::nullopt;
  return static_cast<int>(it - dates_.begin()) + 1;
}

std::optional<int> TradingCalendar::LastDayOnOrBefore(const Date& date) const {
  const auto it = std::upper_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.begin()) return std::nullopt;
  return static_cast<int>(it - dates_.begin());
}

std::optional<int> FactorPanel::Find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

// MarketDataset

MarketDataset::MarketDataset(TradingCalendar calendar,
                             std::vector<StockRecord> stocks,
                             FactorPanel factors)
    : calendar_(std::move(calendar)) {
  const int n_days = calendar_.size();
  const int n_factors = factors.factor_count();
  if (factors.types.size() != factors.names.size()) {
    throw Error(ErrorCode::kInvalidConfig, "every factor needs a type");
  }
  if (factors.values.size() != stocks.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "factor panel must hold one matrix per stock");
  }
  std::vector<std::size_t> order(stocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return stocks[a].id < stocks[b].id;
  });

  factors_.names = std::move(factors.names);
  factors_.types = std::move(factors.types);
  for (std::size_t k = 0; k < order.size(); ++k) {
    StockRecord& s = stocks[order[k]];
    if (s.id.empty()) throw Error(ErrorCode::kInvalidConfig, "empty stock id");
    if (k > 0 && stocks_.back().id == s.id) {
      throw Error(ErrorCode::kMalformedRow, "duplicate stock " + s.id);
    }
    if (s.sector.empty()) {
      throw Error(ErrorCode::kMalformedRow, "stock " + s.id + " has no sector");
    }
    if (static_cast<int>(s.close.size()) != n_days) {
      throw Error(ErrorCode::kMissingDay,
                  "stock " + s.id + " has " + std::to_string(s.close.size()) +
                      " closes for " + std::to_string(n_days) + " days");
    }
    for (int t = 0; t < n_days; ++t) {
      if (!std::isfinite(s.close[t]) || s.close[t] <= 0.0) {
        throw Error(ErrorCode::kMalformedRow,
                    "stock " + s.id + " has non-positive close on " +
                        DayLabel(calendar_.date(t + 1)));
      }
    }
    s.daily_return.assign(n_days > 0 ? n_days - 1 : 0, 0.0);
    for (int t = 1; t < n_days; ++t) {
      s.daily_return[t - 1] = s.close[t] / s.close[t - 1] - 1.0;
    }
    Eigen::MatrixXd& values = factors.values[order[k]];
    if (values.rows() != n_days || values.cols() != n_factors) {
      throw Error(ErrorCode::kMissingDay,
                  "factor matrix of " + s.id + " does not cover the calendar");
    }
    if (!values.allFinite()) {
      throw Error(ErrorCode::kMalformedRow,
                  "non-finite factor value for " + s.id);
    }
    sectors_[s.sector].push_back(s.id);
    factors_.values.push_back(std::move(values));
    stocks_.push_back(std::move(s));
  }
}

std::optional<std::size_t> MarketDataset::FindStock(std::string_view id) const {
  const auto it = std::lower_bound(
      stocks_.begin(), stocks_.end(), id,
      [](const StockRecord& s, std::string_view v) { return s.id < v; });
  if (it == stocks_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - stocks_.begin());
}

void MarketDataset::ReadFactorRow(std::size_t stock, int day,
                                  std::span<double> row) const {
  const Eigen::MatrixXd& values = factors_.values.at(stock);
  if (day < 1 || day > values.rows()) {
    throw Error(ErrorCode::kMissingDay, "day " + std::to_string(day) +
                                            " outside calendar");
  }
  for (Eigen::Index j = 0; j < values.cols(); ++j) row[j] = values(day - 1, j);
}

double MarketDataset::ReadReturn(std::size_t stock, int day) const {
  if (day < 2 || day > calendar_.size()) {
    throw Error(ErrorCode::kMissingDay,
                "no return for day " + std::to_string(day));
  }
  return stocks_.at(stock).daily_return[day - 2];
}

// Loading

MarketDataset ParseDataset(std::string_view prices_csv,
                           std::string_view factors_csv,
                           std::string_view sectors_csv,
                           const LoadOptions& options) {
  const FactorRegistry& registry =
      options.registry ? *options.registry : FactorRegistry::Default();

  // prices.csv
  struct PriceRow {
    Date date;
    std::string stock;
    double close;
  };
  std::vector<PriceRow> price_rows;
  {
    LineReader reader(prices_csv);
    std::vector<std::string_view> header;
    ExpectHeader(reader, "prices.csv", header);
    if (header != std::vector<std::string_view>{"date", "stock_id", "close"}) {
      Malformed("prices.csv", reader.line_no(), 1,
                "header must be 'date,stock_id,close'");
    }
    std::string_view line;
    while (reader.Next(line)) {
      const auto fields = SplitFields(line);
      if (fields.size() != 3) {
        Malformed("prices.csv", reader.line_no(),
                  static_cast<int>(std::min<std::size_t>(fields.size(), 3)) + 1,
                  "expected 3 fields, got " + std::to_string(fields.size()));
      }
      if (fields[1].empty()) {
        Malformed("prices.csv", reader.line_no(), 2, "empty stock_id");
      }
      const double close = ParseNumber(fields[2], "prices.csv", reader.line_no(), 3);
      if (close <= 0.0) {
        Malformed("prices.csv", reader.line_no(), 3, "close must be positive");
      }
      price_rows.push_back({ParseDateField(fields[0], "prices.csv", reader.line_no()),
                            std::string(fields[1]), close});
    }
  }
  std::set<Date> date_set;
  std::set<std::string> stock_set;
  for (const auto& r : price_rows) {
    date_set.insert(r.date);
    stock_set.insert(r.stock);
  }
  TradingCalendar calendar(std::vector<Date>(date_set.begin(), date_set.end()));
  const std::vector<std::string> stock_ids(stock_set.begin(), stock_set.end());
  std::unordered_map<std::string, std::size_t> stock_index;
  for (std::size_t i = 0; i < stock_ids.size(); ++i) stock_index[stock_ids[i]] = i;
  const int n_days = calendar.size();

  std::vector<StockRecord> stocks(stock_ids.size());
  std::vector<std::vector<char>> seen(stock_ids.size(),
                                      std::vector<char>(n_days, 0));
  for (std::size_t i = 0; i < stocks.size(); ++i) {
    stocks[i].id = stock_ids[i];
    stocks[i].close.assign(n_days, 0.0);
  }
  for (const auto& r : price_rows) {
    const std::size_t s = stock_index[r.stock];
    const int day = *calendar.DayOf(r.date);
    if (seen[s][day - 1]) {
      throw Error(ErrorCode::kMalformedRow, "prices.csv: duplicate row for " +
                                                r.stock + " on " + DayLabel(r.date));
    }
    seen[s][day - 1] = 1;
    stocks[s].close[day - 1] = r.close;
  }
  for (std::size_t s = 0; s < stocks.size(); ++s) {
    for (int t = 0; t < n_days; ++t) {
      if (!seen[s][t]) {
        throw Error(ErrorCode::kMissingDay,
                    "prices.csv: " + stock_ids[s] + " has no close on " +
                        DayLabel(calendar.date(t + 1)));
      }
    }
  }

  // sectors.csv
  {
    LineReader reader(sectors_csv);
    std::vector<std::string_view> header;
    ExpectHeader(reader, "sectors.csv", header);
    if (header != std::vector<std::string_view>{"stock_id", "sector"}) {
      Malformed("sectors.csv", reader.line_no(), 1,
                "header must be 'stock_id,sector'");
    }
    std::string_view line;
    while (reader.Next(line)) {
      const auto fields = SplitFields(line);
      if (fields.size() != 2) {
        Malformed("sectors.csv", reader.line_no(), 1,
                  "expected 2 fields, got " + std::to_string(fields.size()));
      }
      if (fields[1].empty()) {
        Malformed("sectors.csv", reader.line_no(), 2, "empty sector");
      }
      const auto it = stock_index.find(std::string(fields[0]));
      if (it == stock_index.end()) {
        throw Error(ErrorCode::kUnknownStock,
                    "sectors.csv row " + std::to_string(reader.line_no()) +
                        ": stock '" + std::string(fields[0]) + "' has no prices");
      }
      StockRecord& stock = stocks[it->second];
      if (!stock.sector.empty()) {
        Malformed("sectors.csv", reader.line_no(), 1,
                  "stock " + stock.id + " listed in more than one sector");
      }
      stock.sector = std::string(fields[1]);
    }
    for (const auto& s : stocks) {
      if (s.sector.empty()) {
        throw Error(ErrorCode::kMalformedRow,
                    "sectors.csv: stock " + s.id + " has no sector");
      }
    }
  }

  // factors.csv
  FactorPanel panel;
  {
    LineReader reader(factors_csv);
    std::vector<std::string_view> header;
    ExpectHeader(reader, "factors.csv", header);
    if (header.size() < 3 || header[0] != "date" || header[1] != "stock_id") {
      Malformed("factors.csv", reader.line_no(), 1,
                "header must be 'date,stock_id,<factor_1>,...'");
    }
    for (std::size_t c = 2; c < header.size(); ++c) {
      const std::string name(header[c]);
      if (name.empty()) {
        Malformed("factors.csv", reader.line_no(), static_cast<int>(c) + 1,
                  "empty factor name");
      }
      if (panel.Find(name)) {
        Malformed("factors.csv", reader.line_no(), static_cast<int>(c) + 1,
                  "duplicate factor column " + name);
      }
      const auto idx = registry.Find(name);
      if (!idx && options.strict_factors) {
        throw Error(ErrorCode::kUnknownFactor,
                    "factors.csv: column '" + name + "' is not in the registry");
      }
      panel.names.push_back(name);
      panel.types.push_back(idx ? registry.factors()[*idx].type
                                : FactorType::kUnclassified);
    }
    const int n_factors = panel.factor_count();
    panel.values.assign(stocks.size(), Eigen::MatrixXd::Zero(n_days, n_factors));
    for (auto& v : seen) std::fill(v.begin(), v.end(), 0);
    std::string_view line;
    while (reader.Next(line)) {
      const auto fields = SplitFields(line);
      if (static_cast<int>(fields.size()) != n_factors + 2) {
        Malformed("factors.csv", reader.line_no(), 1,
                  "expected " + std::to_string(n_factors + 2) + " fields, got " +
                      std::to_string(fields.size()));
      }
      const Date date = ParseDateField(fields[0], "factors.csv", reader.line_no());
      const auto it = stock_index.find(std::string(fields[1]));
      if (it == stock_index.end()) {
        throw Error(ErrorCode::kUnknownStock,
                    "factors.csv row " + std::to_string(reader.line_no()) +
                        ": stock '" + std::string(fields[1]) + "' has no prices");
      }
      const auto day = calendar.DayOf(date);
      if (!day) {
        Malformed("factors.csv", reader.line_no(), 1,
                  "date " + DayLabel(date) + " is not a trading day in prices.csv");
      }
      const std::size_t s = it->second;
      if (seen[s][*day - 1]) {
        Malformed("factors.csv", reader.line_no(), 1,
                  "duplicate row for " + stock_ids[s] + " on " + DayLabel(date));
      }
      seen[s][*day - 1] = 1;
      for (int j = 0; j < n_factors; ++j) {
        panel.values[s](*day - 1, j) =
            ParseNumber(fields[j + 2], "factors.csv", reader.line_no(), j + 3);
      }
    }
    for (std::size_t s = 0; s < stocks.size(); ++s) {
      for (int t = 0; t < n_days; ++t) {
        if (!seen[s][t]) {
          throw Error(ErrorCode::kMissingDay,
                      "factors.csv: " + stock_ids[s] + " has no row on " +
                          DayLabel(calendar.date(t + 1)));
        }
      }
    }
  }
  return MarketDataset(std::move(calendar), std::move(stocks), std::move(panel));
}

MarketDataset LoadDataset(const std::filesystem::path& prices_path,
                          const std::filesystem::path& factors_path,
                          const std::filesystem::path& sectors_path,
                          const LoadOptions& options) {
  const std::string prices = ReadTextFile(prices_path);
  const std::string factors = ReadTextFile(factors_path);
  const std::string sectors = ReadTextFile(sectors_path);
  return ParseDataset(prices, factors, sectors, options);
}

MarketDataset LoadDatasetDir(const std::filesystem::path& dir,
                             const LoadOptions& options) {
  LoadOptions effective = options;
  std::optional<FactorRegistry> custom;
  if (!effective.registry && std::filesystem::exists(dir / "factors.toml")) {
    custom = FactorRegistry::LoadFile(dir / "factors.toml");
    effective.registry = &*custom;
  }
  return LoadDataset(dir / "prices.csv", dir / "factors.csv",
                     dir / "sectors.csv", effective);
}

std::string FormatPricesCsv(const MarketDataset& dataset) {
  std::string out = "date,stock_id,close\n";
  const auto& cal = dataset.calendar();
  for (int day = 1; day <= cal.size(); ++day) {
    const std::string date = FormatIsoDate(cal.date(day));
    for (const auto& s : dataset.stocks()) {
      out += date;
      out += ',';
      out += s.id;
      out += ',';
      out += FormatDouble(s.CloseOn(day));
      out += '\n';
    }
  }
  return out;
}

std::string FormatFactorsCsv(const MarketDataset& dataset) {
  std::string out = "date,stock_id";
  for (const auto& name : dataset.factors().names) {
    out += ',';
    out += name;
  }
  out += '\n';
  const auto& cal = dataset.calendar();
  for (int day = 1; day <= cal.size(); ++day) {
    const std::string date = FormatIsoDate(cal.date(day));
    for (std::size_t s = 0; s < dataset.stocks().size(); ++s) {
      out += date;
      out += ',';
      out += dataset.stock(s).id;
      const Eigen::MatrixXd& values = dataset.factor_values(s);
      for (Eigen::Index j = 0; j < values.cols(); ++j) {
        out += ',';
        out += FormatDouble(values(day - 1, j));
      }
      out += '\n';
    }
  }
  return out;
}

std::string FormatSectorsCsv(const MarketDataset& dataset) {
  std::string out = "stock_id,sector\n";
  for (const auto& s : dataset.stocks()) {
    out += s.id;
    out += ',';
    out += s.sector;
    out += '\n';
  }
  return out;
}

void WriteDataset(const MarketDataset& dataset,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  WriteTextFile(dir / "prices.csv", FormatPricesCsv(dataset));
  WriteTextFile(dir / "factors.csv", FormatFactorsCsv(dataset));
  WriteTextFile(dir / "sectors.csv", FormatSectorsCsv(dataset));
}

}  // namespace factorscope
