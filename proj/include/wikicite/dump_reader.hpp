#pragma once

#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wikicite {

/// One page of a MediaWiki export, reduced to its latest revision.
struct WikiPage {
  std::string title;
  int ns = 0;  // MediaWiki namespace id, 0 = article
  std::string text;
  std::optional<std::string> revision_timestamp;

  bool operator==(const WikiPage&) const = default;
};

/// Fatal XML error. The offset is the byte position in the input stream
/// at which the parser gave up.
class DumpParseError : public std::runtime_error {
 public:
  DumpParseError(const std::string& what, std::uint64_t byte_offset);
  std::uint64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

/// Pull interface shared by the reader and the filters stacked on top of it.
class PageStream {
 public:
  virtual ~PageStream() = default;
  /// Next page in document order, or nullopt once the stream is exhausted.
  virtual std::optional<WikiPage> next() = 0;

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = WikiPage;
    using difference_type = std::ptrdiff_t;
    using pointer = const WikiPage*;
    using reference = const WikiPage&;

    iterator() = default;
    explicit iterator(PageStream* source) : source_(source) { advance(); }

    reference operator*() const { return *current_; }
    pointer operator->() const { return &*current_; }
    iterator& operator++() {
      advance();
      return *this;
    }
    void operator++(int) { advance(); }
    bool operator==(std::default_sentinel_t) const { return !current_; }

   private:
    void advance() { current_ = source_->next(); }

    PageStream* source_ = nullptr;
    std::optional<WikiPage> current_;
  };

  iterator begin() { return iterator(this); }
  std::default_sentinel_t end() { return {}; }
};

struct DumpStats {
  std::uint64_t pages_encountered = 0;
  std::uint64_t pages_yielded = 0;
  std::uint64_t pages_skipped = 0;  // missing/empty title or unusable <ns>
  std::uint64_t bytes_consumed = 0;
};

/// Streaming reader over an uncompressed MediaWiki XML export.
///
/// The input is read in fixed-size chunks and pages are materialized one at a
/// time, so resident memory is bounded by the largest page rather than the
/// dump. `<siteinfo>` and every element not needed for a WikiPage are skipped
/// without buffering. When a page holds several revisions the last one in
/// document order wins. Pages without `<ns>` get their namespace from the
/// title prefix (see infer_namespace).
///
/// The stream is consumed exactly once; the reader must not be shared
/// between threads.
class DumpReader final : public PageStream {
 public:
  explicit DumpReader(std::istream& source);
  ~DumpReader() override;
  DumpReader(DumpReader&&) noexcept;
  DumpReader& operator=(DumpReader&&) noexcept;

  /// Throws DumpParseError on malformed XML.
  std::optional<WikiPage> next() override;
  const DumpStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DumpReader open_dump(std::istream& source);

/// nullopt selects every namespace.
using NamespaceSet = std::optional<std::set<int>>;

class NamespaceFilter final : public PageStream {
 public:
  NamespaceFilter(PageStream& source, NamespaceSet allowed);
  std::optional<WikiPage> next() override;
  std::uint64_t filtered_out() const noexcept { return filtered_out_; }

 private:
  PageStream* source_;
  NamespaceSet allowed_;
  std::uint64_t filtered_out_ = 0;
};

NamespaceFilter filter_namespaces(PageStream& pages, NamespaceSet allowed);

/// Namespace id from a title prefix such as "Talk:" or "Category:", using the
/// English namespace names. Titles without a recognized prefix are articles.
int infer_namespace(std::string_view title);

}  // namespace wikicite
