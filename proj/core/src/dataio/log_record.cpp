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

#include "admatch/dataio/log_record.hpp"

#include <charconv>
#include <fstream>

#include "admatch/common/error.hpp"

namespace admatch::dataio {

using nlohmann::json;

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto bad = [&] { return FormatError("bad date '" + std::string(text) + "', want YYYY-MM-DD"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto parse = [&](std::string_view part, auto& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc() || ptr != part.data() + part.size()) throw bad();
  };
  parse(text.substr(0, 4), y);
  parse(text.substr(5, 2), m);
  parse(text.substr(8, 2), d);
  const std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(m),
                                        std::chrono::day(d)};
  if (!ymd.ok()) throw bad();
  return Date(ymd);
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd(date);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string LogRecord::raw_query() const {
  std::string out;
  for (const auto& t : query_terms) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

void to_json(json& j, const ItemDescriptor& v) {
  j = json{{"item_id", v.item_id},
           {"shop_id", v.shop_id},
           {"brand_id", v.brand_id},
           {"title_terms", v.title_terms}};
  if (v.category >= 0) j["category"] = v.category;
}

void from_json(const json& j, ItemDescriptor& v) {
  j.at("item_id").get_to(v.item_id);
  j.at("shop_id").get_to(v.shop_id);
  j.at("brand_id").get_to(v.brand_id);
  v.title_terms = j.value("title_terms", std::vector<std::string>{});
  v.category = j.value("category", -1);
}

void to_json(json& j, const BehaviorEvent& v) {
  j = json{{"timestamp", v.timestamp}, {"item", v.item}, {"source_query", v.source_query}};
}

void from_json(const json& j, BehaviorEvent& v) {
  j.at("timestamp").get_to(v.timestamp);
  j.at("item").get_to(v.item);
  v.source_query = j.value("source_query", std::vector<std::string>{});
}

void to_json(json& j, const AdDescriptor& v) {
  j = json{{"ad_id", v.ad_id}, {"item", v.item}, {"bid_keywords", v.bid_keywords}, {"cost", v.cost}};
}

void from_json(const json& j, AdDescriptor& v) {
  j.at("ad_id").get_to(v.ad_id);
  j.at("item").get_to(v.item);
  v.bid_keywords = j.value("bid_keywords", std::vector<std::string>{});
  v.cost = j.value("cost", 0.0);
  if (v.cost < 0.0) throw FormatError("ad cost must be non-negative");
}

void to_json(json& j, const LogRecord& v) {
  j = json{{"user_id", v.user_id},
           {"timestamp", v.timestamp},
           {"day", v.day},
           {"query_terms", v.query_terms},
           {"profile", v.profile},
           {"behavior_items", v.behavior_items},
           {"ad", v.ad},
           {"clicked", v.clicked}};
  if (v.intent_category >= 0) j["intent_category"] = v.intent_category;
}

void from_json(const json& j, LogRecord& v) {
  j.at("user_id").get_to(v.user_id);
  j.at("timestamp").get_to(v.timestamp);
  j.at("day").get_to(v.day);
  parse_date(v.day);
  v.query_terms = j.value("query_terms", std::vector<std::string>{});
  v.profile = j.value("profile", std::vector<std::string>{});
  v.behavior_items = j.value("behavior_items", std::vector<BehaviorEvent>{});
  j.at("ad").get_to(v.ad);
  j.at("clicked").get_to(v.clicked);
  v.intent_category = j.value("intent_category", -1);
  if (v.clicked != 0 && v.clicked != 1) throw FormatError("clicked must be 0 or 1");
  for (std::size_t i = 1; i < v.behavior_items.size(); ++i) {
    if (v.behavior_items[i].timestamp <= v.behavior_items[i - 1].timestamp) {
      throw FormatError("behavior_items must be strictly time-ordered");
    }
  }
}

namespace {

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<T>());
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& values) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  for (const T& v : values) out << json(v).dump() << '\n';
  if (!out) throw FormatError("write failed: " + path.string());
}

}  // namespace

std::vector<LogRecord> read_logs(const std::filesystem::path& path) {
  return read_jsonl<LogRecord>(path);
}

void write_logs(const std::filesystem::path& path, const std::vector<LogRecord>& records) {
  write_jsonl(path, records);
}

std::vector<AdDescriptor> read_ads(const std::filesystem::path& path) {
  return read_jsonl<AdDescriptor>(path);
}

void write_ads(const std::filesystem::path& path, const std::vector<AdDescriptor>& ads) {
  write_jsonl(path, ads);
}

std::string logs_to_jsonl(const std::vector<LogRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace admatch::dataio
