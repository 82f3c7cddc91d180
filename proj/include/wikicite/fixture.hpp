#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <streambuf>
#include <string>
#include <string_view>
#include <vector>

#include "wikicite/dump_reader.hpp"

namespace wikicite {

/// XML-escapes text content (&, <, >, ").
std::string xml_escape(std::string_view text);

/// Export header up to and including <siteinfo>, and the closing tag.
std::string dump_header();
std::string dump_footer();
/// One <page> element. When `with_ns` is false the <ns> element is omitted,
/// as in 2007-era exports.
std::string page_xml(const WikiPage& page, bool with_ns = true);

/// Writes a complete export holding `pages` in order.
void write_dump(std::ostream& out, const std::vector<WikiPage>& pages, bool with_ns = true);

struct FixtureOptions {
  std::size_t pages = 500;
  std::size_t planted = 1000;          // well-formed cite journal instances
  std::size_t nested = 50;             // of `planted`, carrying a nested template in a value
  std::size_t without_journal = 0;     // of `planted`, with no journal parameter
  std::size_t comment_decoys = 30;     // cite journal inside <!-- -->
  std::size_t nowiki_decoys = 10;      // cite journal inside <nowiki>
  std::size_t malformed = 20;          // dangling cite journal, one per page, at page end
  std::size_t other_templates = 200;   // balanced non-citation templates
  std::uint64_t seed = 1;
  bool with_ns = true;
  // Journal strings drawn uniformly for planted instances.
  std::vector<std::string> journals = {
      "Nature",  "[[Nature (journal)|Nature]]", "Science", "''Science''", "N Engl J Med",
      "The Lancet", "Astrophys. J.", "Icarus", "The New York Times", "Journal of Imaginary Results"};
};

/// What a generated fixture contains, known by construction.
struct FixtureTruth {
  std::size_t pages = 0;
  std::size_t templates = 0;   // records an extractor must return
  std::size_t malformed = 0;
  std::size_t decoys = 0;      // comment + nowiki
  std::size_t nested = 0;
  std::map<std::string, std::uint64_t> journal_raw_counts;  // planted journal_raw values
  std::vector<std::size_t> templates_per_page;
};

struct Fixture {
  std::vector<WikiPage> pages;
  FixtureTruth truth;
};

Fixture make_fixture(const FixtureOptions& options);

/// Streams a synthetic export of roughly `target_bytes` without holding it in
/// memory. Every page has the same size and carries `templates_per_page`
/// cite journal instances.
class SyntheticDumpBuf : public std::streambuf {
 public:
  SyntheticDumpBuf(std::uint64_t target_bytes, std::size_t page_text_bytes, std::size_t templates_per_page);

  std::uint64_t pages_emitted() const noexcept { return pages_; }
  std::size_t page_xml_bytes() const noexcept { return page_bytes_; }

 protected:
  int_type underflow() override;

 private:
  void fill();

  std::uint64_t target_;
  std::uint64_t produced_ = 0;
  std::uint64_t pages_ = 0;
  std::size_t page_bytes_ = 0;
  std::string body_;
  std::string buffer_;
  int stage_ = 0;  // 0 header, 1 pages, 2 footer, 3 done
};

}  // namespace wikicite
