#include "wikicite/aggregator.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "wikicite/csv.hpp"

namespace wikicite {

namespace {

void add_unknown(CountTable& table, const std::string& key, std::uint64_t count) {
  if (auto it = table.unknown.find(key); it != table.unknown.end()) {
    it->second += count;
    return;
  }
  if (table.unknown.size() < table.unknown_cap) {
    table.unknown.emplace(key, count);
    return;
  }
  if (table.unknown_cap == 0) {
    table.unknown_overflow += count;
    return;
  }
  // Full: keep the smallest keys so the retained set does not depend on
  // insertion or merge order.
  auto last = std::prev(table.unknown.end());
  if (key < last->first) {
    table.unknown_overflow += last->second;
    table.unknown.erase(last);
    table.unknown.emplace(key, count);
  } else {
    table.unknown_overflow += count;
  }
}

std::tuple<int, int, int> parse_date(const std::string& date) {
  auto fail = [&] { return std::invalid_argument("bad date '" + date + "', expected YYYY-MM or YYYY-MM-DD"); };
  auto number = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    if (pos + len > date.size()) throw fail();
    auto [ptr, ec] = std::from_chars(date.data() + pos, date.data() + pos + len, v);
    if (ec != std::errc() || ptr != date.data() + pos + len) throw fail();
    return v;
  };
  if (date.size() != 7 && date.size() != 10) throw fail();
  if (date[4] != '-' || (date.size() == 10 && date[7] != '-')) throw fail();
  const int y = number(0, 4);
  const int m = number(5, 2);
  const int d = date.size() == 10 ? number(8, 2) : 0;
  if (m < 1 || m > 12 || (date.size() == 10 && (d < 1 || d > 31))) throw fail();
  return {y, m, d};
}

}  // namespace

std::uint64_t CountTable::without_journal() const {
  std::uint64_t named = excluded_count + unknown_overflow;
  for (const auto& [_, c] : counts) named += c;
  for (const auto& [_, c] : unknown) named += c;
  return template_total - named;
}

CountTable empty_table(const JournalRegistry& registry, std::size_t unknown_cap) {
  CountTable t;
  t.registry_fingerprint = registry.fingerprint();
  t.unknown_cap = unknown_cap;
  return t;
}

void add_record(CountTable& table, const CitationRecord& record, const JournalRegistry& registry) {
  ++table.template_total;
  if (!record.journal_raw) return;
  const auto cleaned = strip_journal_markup(*record.journal_raw);
  const auto res = registry.resolve(cleaned);
  switch (res.kind) {
    case ResolutionKind::canonical:
      ++table.counts[res.name];
      break;
    case ResolutionKind::excluded:
      ++table.excluded_count;
      break;
    case ResolutionKind::unknown:
      add_unknown(table, res.name, 1);
      break;
  }
}

void add_extraction(CountTable& table, const ExtractionResult& result, const JournalRegistry& registry) {
  for (const auto& rec : result.records) add_record(table, rec, registry);
  table.malformed_total += result.malformed_templates;
  table.duplicate_params_total += result.duplicate_params;
}

CountTable tally(std::span<const CitationRecord> records, const JournalRegistry& registry, std::size_t unknown_cap) {
  auto table = empty_table(registry, unknown_cap);
  for (const auto& rec : records) add_record(table, rec, registry);
  return table;
}

CountTable merge(const CountTable& a, const CountTable& b) {
  if (b.registry_fingerprint.empty() && b == CountTable{}) return a;
  if (a.registry_fingerprint.empty() && a == CountTable{}) return b;
  if (a.registry_fingerprint != b.registry_fingerprint) {
    throw MergeError("cannot merge count tables built against different registries (" + a.registry_fingerprint +
                     " vs " + b.registry_fingerprint + ")");
  }
  if (a.unknown_cap != b.unknown_cap) throw MergeError("cannot merge count tables with different unknown caps");

  CountTable out = a;
  for (const auto& [name, c] : b.counts) out.counts[name] += c;
  out.excluded_count += b.excluded_count;
  out.unknown_overflow += b.unknown_overflow;
  for (const auto& [key, c] : b.unknown) add_unknown(out, key, c);
  out.template_total += b.template_total;
  out.malformed_total += b.malformed_total;
  out.duplicate_params_total += b.duplicate_params_total;
  return out;
}

std::vector<GrowthPoint> growth_report(std::span<const DatedTable> tables) {
  std::vector<GrowthPoint> out;
  out.reserve(tables.size());
  std::tuple<int, int, int> prev{};
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto date = parse_date(tables[i].date);
    if (i > 0 && !(prev < date)) {
      throw std::invalid_argument("growth dates must be strictly increasing: '" + tables[i - 1].date +
                                  "' is followed by '" + tables[i].date + "'");
    }
    prev = date;
    out.push_back({tables[i].date, tables[i].table.template_total});
  }
  return out;
}

std::string to_csv(const CountTable& table) {
  std::vector<std::pair<std::string, std::uint64_t>> rows(table.counts.begin(), table.counts.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  std::string out = "journal,count\n";
  for (const auto& [name, c] : rows) out += csv_field(name) + "," + std::to_string(c) + "\n";
  return out;
}

std::string to_json(const CountTable& table) {
  nlohmann::ordered_json j;
  j["registry_fingerprint"] = table.registry_fingerprint;
  j["unknown_cap"] = table.unknown_cap;
  j["template_total"] = table.template_total;
  j["malformed_total"] = table.malformed_total;
  j["duplicate_params_total"] = table.duplicate_params_total;
  j["without_journal"] = table.without_journal();
  j["excluded_count"] = table.excluded_count;
  j["unknown_overflow"] = table.unknown_overflow;
  auto counts = nlohmann::ordered_json::object();
  for (const auto& [name, c] : table.counts) counts[name] = c;
  j["counts"] = std::move(counts);
  auto unknown = nlohmann::ordered_json::object();
  for (const auto& [name, c] : table.unknown) unknown[name] = c;
  j["unknown"] = std::move(unknown);
  return j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

CountTable count_table_from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    CountTable t;
    t.registry_fingerprint = j.at("registry_fingerprint").get<std::string>();
    t.unknown_cap = j.at("unknown_cap").get<std::size_t>();
    t.template_total = j.at("template_total").get<std::uint64_t>();
    t.malformed_total = j.at("malformed_total").get<std::uint64_t>();
    t.duplicate_params_total = j.at("duplicate_params_total").get<std::uint64_t>();
    t.excluded_count = j.at("excluded_count").get<std::uint64_t>();
    t.unknown_overflow = j.at("unknown_overflow").get<std::uint64_t>();
    for (const auto& [name, c] : j.at("counts").items()) t.counts[name] = c.get<std::uint64_t>();
    for (const auto& [name, c] : j.at("unknown").items()) t.unknown[name] = c.get<std::uint64_t>();
    std::uint64_t named = t.excluded_count + t.unknown_overflow;
    for (const auto& [_, c] : t.counts) named += c;
    for (const auto& [_, c] : t.unknown) named += c;
    if (named > t.template_total) throw std::invalid_argument("count table tallies exceed template_total");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad count table: ") + e.what());
  }
}

}  // namespace wikicite
