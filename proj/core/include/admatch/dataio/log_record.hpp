// Copyright 2026 The Admatch Authors.
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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace admatch::dataio {

using Date = std::chrono::sys_days;

// "YYYY-MM-DD". Throws FormatError on malformed input.
Date parse_date(std::string_view text);
std::string format_date(Date date);

struct ItemDescriptor {
  std::string item_id;
  std::string shop_id;
  std::string brand_id;
  std::vector<std::string> title_terms;
  int category = -1;  // synthetic ground truth; -1 when unknown
  friend bool operator==(const ItemDescriptor&, const ItemDescriptor&) = default;
};

// A clicked item on the user's timeline, with the query that led to it.
struct BehaviorEvent {
  std::int64_t timestamp = 0;
  ItemDescriptor item;
  std::vector<std::string> source_query;
  friend bool operator==(const BehaviorEvent&, const BehaviorEvent&) = default;
};

struct AdDescriptor {
  std::uint64_t ad_id = 0;
  ItemDescriptor item;
  std::vector<std::string> bid_keywords;
  double cost = 0.0;  // charged per click
  friend bool operator==(const AdDescriptor&, const AdDescriptor&) = default;
};

// One ad impression with the request context it was served in.
struct LogRecord {
  std::string user_id;
  std::int64_t timestamp = 0;
  std::string day;
  std::vector<std::string> query_terms;
  std::vector<std::string> profile;
  std::vector<BehaviorEvent> behavior_items;  // strictly time-ordered
  AdDescriptor ad;
  int clicked = 0;
  int intent_category = -1;  // synthetic ground truth; -1 when unknown

  std::string raw_query() const;
  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

void to_json(nlohmann::json& j, const ItemDescriptor& v);
void from_json(const nlohmann::json& j, ItemDescriptor& v);
void to_json(nlohmann::json& j, const BehaviorEvent& v);
void from_json(const nlohmann::json& j, BehaviorEvent& v);
void to_json(nlohmann::json& j, const AdDescriptor& v);
void from_json(const nlohmann::json& j, AdDescriptor& v);
void to_json(nlohmann::json& j, const LogRecord& v);
// Validates invariants; throws FormatError on violations.
void from_json(const nlohmann::json& j, LogRecord& v);

// JSON Lines, one object per line. Readers report the failing line number.
std::vector<LogRecord> read_logs(const std::filesystem::path& path);
void write_logs(const std::filesystem::path& path, const std::vector<LogRecord>& records);
std::vector<AdDescriptor> read_ads(const std::filesystem::path& path);
void write_ads(const std::filesystem::path& path, const std::vector<AdDescriptor>& ads);

// Serialized JSONL text, as written by write_logs.
std::string logs_to_jsonl(const std::vector<LogRecord>& records);

}  // namespace admatch::dataio
