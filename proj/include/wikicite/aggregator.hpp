#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wikicite/citation_extractor.hpp"
#include "wikicite/journal_registry.hpp"

namespace wikicite {

inline constexpr std::size_t kDefaultUnknownCap = 100000;

class MergeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-journal citation counts plus corpus tallies.
///
/// Tables merge by pointwise addition. Unknown strings are kept verbatim up to
/// `unknown_cap` distinct keys; past the cap only the lexicographically
/// smallest keys are retained and everything else lands in
/// `unknown_overflow`, which keeps merge associative and commutative.
///
/// A default-constructed table (empty fingerprint) is the merge identity for
/// every registry.
struct CountTable {
  std::string registry_fingerprint;
  std::size_t unknown_cap = kDefaultUnknownCap;

  std::map<std::string, std::uint64_t> counts;
  std::uint64_t excluded_count = 0;
  std::map<std::string, std::uint64_t> unknown;
  std::uint64_t unknown_overflow = 0;
  std::uint64_t template_total = 0;
  std::uint64_t malformed_total = 0;
  std::uint64_t duplicate_params_total = 0;

  /// Records that carried no journal parameter.
  std::uint64_t without_journal() const;

  bool operator==(const CountTable&) const = default;
};

CountTable empty_table(const JournalRegistry& registry, std::size_t unknown_cap = kDefaultUnknownCap);

/// Adds one record: +1 to template_total, and when it names a journal, +1
/// to exactly one of counts / excluded_count / unknown.
void add_record(CountTable& table, const CitationRecord& record, const JournalRegistry& registry);

/// Adds every record of one page plus its malformed/duplicate tallies.
void add_extraction(CountTable& table, const ExtractionResult& result, const JournalRegistry& registry);

CountTable tally(std::span<const CitationRecord> records, const JournalRegistry& registry,
                 std::size_t unknown_cap = kDefaultUnknownCap);

/// Throws MergeError when the tables were built against different registries
/// or with different unknown caps.
CountTable merge(const CountTable& a, const CountTable& b);

struct GrowthPoint {
  std::string date;
  std::uint64_t template_total = 0;

  bool operator==(const GrowthPoint&) const = default;
};

struct DatedTable {
  std::string date;  // YYYY-MM or YYYY-MM-DD
  CountTable table;
};

/// (date, template_total) in input order. Dates must be strictly increasing;
/// throws std::invalid_argument otherwise or on an unparsable date.
std::vector<GrowthPoint> growth_report(std::span<const DatedTable> tables);

/// `journal,count`, count descending then name ascending.
std::string to_csv(const CountTable& table);
std::string to_json(const CountTable& table);
/// Throws std::invalid_argument on malformed input.
CountTable count_table_from_json(std::string_view json);

}  // namespace wikicite
