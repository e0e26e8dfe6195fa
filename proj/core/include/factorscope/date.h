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

#ifndef FACTORSCOPE_DATE_H_
#define FACTORSCOPE_DATE_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace factorscope {

using Date = std::chrono::year_month_day;

// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> ParseIsoDate(std::string_view text);

std::string FormatIsoDate(const Date& date);

}  // namespace factorscope

#endif  // FACTORSCOPE_DATE_H_
