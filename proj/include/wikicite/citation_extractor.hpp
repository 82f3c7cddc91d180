#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wikicite/dump_reader.hpp"

namespace wikicite {

/// One `{{cite journal ...}}` invocation found in a page.
struct CitationRecord {
  std::string page_title;
  std::string template_name_raw;  // name part exactly as written
  // Lower-cased, trimmed names in order of first appearance. Named values are
  // trimmed at both ends; positional ones ("1", "2", ...) are kept as is.
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<std::string> journal_raw;
  std::size_t span_begin = 0;  // offset of the opening "{{"
  std::size_t span_end = 0;    // one past the closing "}}"

  const std::string* param(std::string_view name) const;

  bool operator==(const CitationRecord&) const = default;
};

struct ExtractionResult {
  std::vector<CitationRecord> records;
  std::uint64_t malformed_templates = 0;  // template openings never closed
  std::uint64_t duplicate_params = 0;     // repeated names inside cite journal records
};

/// Scans wikitext for cite journal templates.
///
/// Braces are matched the way the MediaWiki preprocessor matches them: runs of
/// "{" open a piece, runs of "}" close the innermost one, taking three braces
/// for a template argument and two for a template. Pipes and equals signs only
/// split the innermost open template, so nested templates and `[[a|b]]` links
/// inside a value stay intact. HTML comments are invisible to the scan and to
/// the extracted values; `<nowiki>` spans are opaque but kept in values.
ExtractionResult extract_citations(std::string_view page_title, std::string_view text);
ExtractionResult extract_citations(const WikiPage& page);

/// True when `name` (comment-free) spells "cite journal": first letter
/// case-insensitive, underscores and spaces interchangeable, optional
/// "Template:" prefix.
bool is_cite_journal_name(std::string_view name);

/// Reduces wiki markup in a journal value: `[[target|label]]` becomes
/// `label`, `[[target]]` becomes `target`, and runs of two or more
/// apostrophes (italic/bold) are dropped.
std::string strip_journal_markup(std::string_view value);

struct TemplateTotals {
  std::uint64_t pages = 0;
  std::uint64_t templates = 0;
  std::uint64_t malformed = 0;
  std::uint64_t duplicate_params = 0;
};

/// Number of cite journal instances across all pages, whether or not they
/// carry a journal parameter.
std::uint64_t count_template_instances(PageStream& pages);
TemplateTotals count_template_totals(PageStream& pages);

/// JSON-lines form with fixed key order:
/// page_title, template_name_raw, params, journal_raw, span.
std::string to_json_line(const CitationRecord& record);
/// Inverse of to_json_line. Throws std::invalid_argument on bad input.
CitationRecord from_json_line(std::string_view line);

}  // namespace wikicite
