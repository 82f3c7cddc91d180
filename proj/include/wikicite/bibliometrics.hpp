#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wikicite/aggregator.hpp"
#include "wikicite/journal_registry.hpp"
#include "wikicite/kendall.hpp"

namespace wikicite {

/// One journal-level row of the external citation report.
struct JcrRecord {
  std::string journal;
  std::uint64_t total_citations = 0;
  double impact_factor = 0.0;
  std::uint64_t articles = 0;

  bool operator==(const JcrRecord&) const = default;
};

class JcrFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// CSV with header `journal,total_citations,impact_factor,articles`.
std::vector<JcrRecord> read_jcr_csv(std::istream& in);

struct JournalMetrics {
  std::string journal;
  std::uint64_t wiki_count = 0;
  JcrRecord jcr;
  double combined = 0.0;  // total_citations * impact_factor, fixed at join time

  bool operator==(const JournalMetrics&) const = default;
};

struct JoinResult {
  std::vector<JournalMetrics> rows;          // ranked: wiki_count desc, name asc
  std::vector<std::string> only_in_counts;   // counted on Wikipedia, no report row
  std::vector<std::string> only_in_jcr;      // report row, never cited
  std::vector<std::string> excluded_jcr;     // report rows naming excluded outlets
};

/// Inner join on canonical name. Report rows are resolved through the
/// registry first; rows that resolve to the same journal are an error
/// (JcrFormatError naming it).
JoinResult join(const CountTable& counts, std::span<const JcrRecord> jcr, const JournalRegistry& registry);

enum class Series { total_citations, impact_factor, articles, combined };

inline constexpr Series kAllSeries[] = {Series::total_citations, Series::impact_factor, Series::articles,
                                        Series::combined};

std::string_view series_name(Series series);
double series_value(const JournalMetrics& row, Series series);

struct CorrelationResult {
  Series series = Series::total_citations;
  std::size_t n = 0;
  double tau = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  // Every selected journal tied in one of the two variables; tau/z/p unset.
  bool degenerate = false;
};

/// Deterministic ranking used by every top-N selection.
std::vector<JournalMetrics> rank_by_wiki_count(std::span<const JournalMetrics> metrics);

/// Kendall test of wiki_count against `series` over all given rows.
CorrelationResult correlate(std::span<const JournalMetrics> metrics, Series series);

/// For each N, the correlation over the N journals with the most Wikipedia
/// citations. Throws std::out_of_range listing every N outside [2, size].
std::vector<CorrelationResult> topn_sweep(std::span<const JournalMetrics> metrics, Series series,
                                          std::span<const std::size_t> n_values);

/// How many of the top-k journals by the combined measure are among the
/// top-m by wiki_count. Requires k <= m <= size.
std::size_t combined_top_overlap(std::span<const JournalMetrics> metrics, std::size_t k, std::size_t m);

struct ScatterRow {
  std::string journal;
  std::uint64_t wiki_count = 0;
  double combined = 0.0;
  bool labeled = false;
};

inline constexpr std::size_t kDefaultLabelBudget = 100;

/// Rows in wiki_count ranking; the first `top_label_count` are labeled.
std::vector<ScatterRow> scatter_export(std::span<const JournalMetrics> metrics,
                                       std::size_t top_label_count = kDefaultLabelBudget);

std::string correlations_csv(std::span<const CorrelationResult> results);
std::string scatter_csv(std::span<const ScatterRow> rows);

}  // namespace wikicite
