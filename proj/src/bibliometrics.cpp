#include "wikicite/bibliometrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "wikicite/csv.hpp"

namespace wikicite {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, std::string_view column) {
  field = trim(field);
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw JcrFormatError("jcr line " + std::to_string(line) + ": bad " + std::string(column) + " '" +
                         std::string(field) + "'");
  }
  return value;
}

bool wiki_order(const JournalMetrics& a, const JournalMetrics& b) {
  if (a.wiki_count != b.wiki_count) return a.wiki_count > b.wiki_count;
  return a.journal < b.journal;
}

bool combined_order(const JournalMetrics& a, const JournalMetrics& b) {
  if (a.combined != b.combined) return a.combined > b.combined;
  return a.journal < b.journal;
}

}  // namespace

std::vector<JcrRecord> read_jcr_csv(std::istream& in) {
  auto header = read_csv_record(in);
  if (!header) throw JcrFormatError("jcr: empty input, expected header");
  // Tolerate a UTF-8 byte order mark on the first field.
  if ((*header)[0].starts_with("\xEF\xBB\xBF")) (*header)[0].erase(0, 3);
  const std::vector<std::string> expected{"journal", "total_citations", "impact_factor", "articles"};
  std::vector<std::string> got;
  for (const auto& h : *header) got.emplace_back(trim(h));
  if (got != expected) throw JcrFormatError("jcr: header must be journal,total_citations,impact_factor,articles");

  std::vector<JcrRecord> out;
  std::size_t line = 1;
  while (auto rec = read_csv_record(in)) {
    ++line;
    if (rec->size() == 1 && trim((*rec)[0]).empty()) continue;
    if (rec->size() != 4) {
      throw JcrFormatError("jcr line " + std::to_string(line) + ": expected 4 fields, got " +
                           std::to_string(rec->size()));
    }
    JcrRecord r;
    r.journal = std::string(trim((*rec)[0]));
    if (r.journal.empty()) throw JcrFormatError("jcr line " + std::to_string(line) + ": empty journal");
    r.total_citations = parse_number<std::uint64_t>((*rec)[1], line, "total_citations");
    r.impact_factor = parse_number<double>((*rec)[2], line, "impact_factor");
    r.articles = parse_number<std::uint64_t>((*rec)[3], line, "articles");
    if (!std::isfinite(r.impact_factor) || r.impact_factor < 0.0) {
      throw JcrFormatError("jcr line " + std::to_string(line) + ": impact_factor must be finite and >= 0");
    }
    out.push_back(std::move(r));
  }
  return out;
}

JoinResult join(const CountTable& counts, std::span<const JcrRecord> jcr, const JournalRegistry& registry) {
  JoinResult out;
  std::map<std::string, const JcrRecord*> by_name;
  for (const auto& row : jcr) {
    const auto res = registry.resolve(row.journal);
    if (res.kind == ResolutionKind::excluded) {
      out.excluded_jcr.push_back(row.journal);
      continue;
    }
    if (!by_name.emplace(res.name, &row).second) {
      throw JcrFormatError("jcr: duplicate rows for journal '" + res.name + "'");
    }
  }
  for (const auto& [name, count] : counts.counts) {
    if (count == 0 || registry.exclusions().contains(name)) continue;
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      out.only_in_counts.push_back(name);
      continue;
    }
    JournalMetrics m;
    m.journal = name;
    m.wiki_count = count;
    m.jcr = *it->second;
    m.jcr.journal = name;
    m.combined = static_cast<double>(m.jcr.total_citations) * m.jcr.impact_factor;
    out.rows.push_back(std::move(m));
  }
  for (const auto& [name, _] : by_name) {
    auto it = counts.counts.find(name);
    if (it == counts.counts.end() || it->second == 0) out.only_in_jcr.push_back(name);
  }
  std::sort(out.rows.begin(), out.rows.end(), wiki_order);
  std::sort(out.excluded_jcr.begin(), out.excluded_jcr.end());
  return out;
}

std::string_view series_name(Series series) {
  switch (series) {
    case Series::total_citations:
      return "total_citations";
    case Series::impact_factor:
      return "impact_factor";
    case Series::articles:
      return "articles";
    case Series::combined:
      return "combined";
  }
  return "unknown";
}

double series_value(const JournalMetrics& row, Series series) {
  switch (series) {
    case Series::total_citations:
      return static_cast<double>(row.jcr.total_citations);
    case Series::impact_factor:
      return row.jcr.impact_factor;
    case Series::articles:
      return static_cast<double>(row.jcr.articles);
    case Series::combined:
      return row.combined;
  }
  return 0.0;
}

std::vector<JournalMetrics> rank_by_wiki_count(std::span<const JournalMetrics> metrics) {
  std::vector<JournalMetrics> ranked(metrics.begin(), metrics.end());
  std::sort(ranked.begin(), ranked.end(), wiki_order);
  return ranked;
}

CorrelationResult correlate(std::span<const JournalMetrics> metrics, Series series) {
  std::vector<double> x, y;
  x.reserve(metrics.size());
  y.reserve(metrics.size());
  for (const auto& row : metrics) {
    x.push_back(static_cast<double>(row.wiki_count));
    y.push_back(series_value(row, series));
  }
  CorrelationResult r;
  r.series = series;
  r.n = metrics.size();
  try {
    const auto test = tau_p_value(x, y);
    r.tau = test.tau;
    r.z = test.z;
    r.p_value = test.p_value;
  } catch (const DegenerateError&) {
    r.degenerate = true;
    r.tau = r.z = r.p_value = std::nan("");
  }
  return r;
}

std::vector<CorrelationResult> topn_sweep(std::span<const JournalMetrics> metrics, Series series,
                                          std::span<const std::size_t> n_values) {
  std::string bad;
  for (auto n : n_values) {
    if (n < 2 || n > metrics.size()) bad += (bad.empty() ? "" : ", ") + std::to_string(n);
  }
  if (!bad.empty()) {
    throw std::out_of_range("top-N sweep: N must lie in [2, " + std::to_string(metrics.size()) + "]; offending: " +
                            bad);
  }
  const auto ranked = rank_by_wiki_count(metrics);
  std::vector<CorrelationResult> out;
  out.reserve(n_values.size());
  for (auto n : n_values) out.push_back(correlate(std::span(ranked).first(n), series));
  return out;
}

std::size_t combined_top_overlap(std::span<const JournalMetrics> metrics, std::size_t k, std::size_t m) {
  if (k > m || m > metrics.size()) {
    throw std::out_of_range("combined overlap: need k <= m <= " + std::to_string(metrics.size()) + " (k=" +
                            std::to_string(k) + ", m=" + std::to_string(m) + ")");
  }
  auto by_wiki = rank_by_wiki_count(metrics);
  std::vector<JournalMetrics> by_combined(metrics.begin(), metrics.end());
  std::sort(by_combined.begin(), by_combined.end(), combined_order);
  std::set<std::string> top_wiki;
  for (std::size_t i = 0; i < m; ++i) top_wiki.insert(by_wiki[i].journal);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += top_wiki.count(by_combined[i].journal);
  return hits;
}

std::vector<ScatterRow> scatter_export(std::span<const JournalMetrics> metrics, std::size_t top_label_count) {
  const auto ranked = rank_by_wiki_count(metrics);
  std::vector<ScatterRow> rows;
  rows.reserve(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    rows.push_back({ranked[i].journal, ranked[i].wiki_count, ranked[i].combined, i < top_label_count});
  }
  return rows;
}

std::string correlations_csv(std::span<const CorrelationResult> results) {
  std::string out = "series,n,tau,z,p_value\n";
  for (const auto& r : results) {
    out += std::string(series_name(r.series)) + "," + std::to_string(r.n) + ",";
    if (r.degenerate) {
      out += ",,\n";
    } else {
      out += format_double(r.tau) + "," + format_double(r.z) + "," + format_double(r.p_value) + "\n";
    }
  }
  return out;
}

std::string scatter_csv(std::span<const ScatterRow> rows) {
  std::string out = "journal,wiki_count,combined,labeled\n";
  for (const auto& r : rows) {
    out += csv_field(r.journal) + "," + std::to_string(r.wiki_count) + "," + format_double(r.combined) + "," +
           (r.labeled ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace wikicite
