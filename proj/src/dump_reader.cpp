#include "wikicite/dump_reader.hpp"

#include <expat.h>

#include <array>
#include <charconv>
#include <cstring>
#include <deque>
#include <istream>
#include <utility>
#include <vector>

namespace wikicite {

DumpParseError::DumpParseError(const std::string& what, std::uint64_t byte_offset)
    : std::runtime_error(what + " at byte " + std::to_string(byte_offset)),
      byte_offset_(byte_offset) {}

namespace {

constexpr std::size_t kChunkSize = 64 * 1024;

struct NamespacePrefix {
  std::string_view name;
  int id;
};

// Canonical English names plus the aliases still found in old dumps.
constexpr std::array<NamespacePrefix, 22> kNamespacePrefixes{{
    {"Talk", 1},
    {"User", 2},
    {"User talk", 3},
    {"Wikipedia", 4},
    {"Project", 4},
    {"WP", 4},
    {"Wikipedia talk", 5},
    {"Project talk", 5},
    {"File", 6},
    {"Image", 6},
    {"File talk", 7},
    {"Image talk", 7},
    {"MediaWiki", 8},
    {"MediaWiki talk", 9},
    {"Template", 10},
    {"Template talk", 11},
    {"Help", 12},
    {"Help talk", 13},
    {"Category", 14},
    {"Category talk", 15},
    {"Portal", 100},
    {"Portal talk", 101},
}};

bool iequals_ascii(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x == '_') x = ' ';
    if (y == '_') y = ' ';
    if (x != y) return false;
  }
  return true;
}

}  // namespace

int infer_namespace(std::string_view title) {
  auto colon = title.find(':');
  if (colon == std::string_view::npos || colon == 0) return 0;
  auto prefix = title.substr(0, colon);
  for (const auto& p : kNamespacePrefixes) {
    if (iequals_ascii(prefix, p.name)) return p.id;
  }
  return 0;
}

struct DumpReader::Impl {
  std::istream* source;
  XML_Parser parser = nullptr;
  std::vector<char> chunk = std::vector<char>(kChunkSize);
  bool input_done = false;
  DumpStats stats;

  std::deque<WikiPage> ready;

  // Element path below the root; only the names we care about are compared.
  std::vector<std::string> path;
  bool root_seen = false;

  bool in_page = false;
  std::string title;
  std::optional<std::string> ns_text;
  std::string text;
  std::optional<std::string> timestamp;
  std::string rev_text;
  std::optional<std::string> rev_timestamp;
  std::string* capture_target = nullptr;

  std::string pending_error;
  std::optional<DumpParseError> failure;

  explicit Impl(std::istream& in) : source(&in) {
    parser = XML_ParserCreate("UTF-8");
    if (parser == nullptr) throw std::bad_alloc();
    XML_SetUserData(parser, this);
    XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
    XML_SetCharacterDataHandler(parser, &Impl::on_text);
  }

  ~Impl() {
    if (parser != nullptr) XML_ParserFree(parser);
  }

  void begin_page() {
    in_page = true;
    title.clear();
    ns_text.reset();
    text.clear();
    timestamp.reset();
  }

  void end_page() {
    in_page = false;
    ++stats.pages_encountered;
    if (title.empty()) {
      ++stats.pages_skipped;
      return;
    }
    int ns = 0;
    if (ns_text) {
      std::string_view s = *ns_text;
      while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t')) s.remove_suffix(1);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), ns);
      if (ec != std::errc() || ptr != s.data() + s.size() || ns < 0) {
        ++stats.pages_skipped;
        return;
      }
    } else {
      ns = infer_namespace(title);
    }
    WikiPage page;
    page.title = std::move(title);
    page.ns = ns;
    page.text = std::move(text);
    page.revision_timestamp = std::move(timestamp);
    ready.push_back(std::move(page));
    ++stats.pages_yielded;
    title.clear();
    text.clear();
  }

  void start_element(std::string_view name) {
    if (!root_seen) {
      root_seen = true;
      if (name != "mediawiki") {
        pending_error = "root element is <" + std::string(name) + ">, expected <mediawiki>";
        XML_StopParser(parser, XML_FALSE);
      }
      return;
    }
    path.emplace_back(name);
    capture_target = nullptr;
    const auto depth = path.size();
    if (depth == 1) {
      if (name == "page") begin_page();
      return;
    }
    if (!in_page) return;
    if (depth == 2) {
      if (name == "title") {
        title.clear();
        capture_target = &title;
      } else if (name == "ns") {
        ns_text.emplace();
        capture_target = &*ns_text;
      } else if (name == "revision") {
        rev_text.clear();
        rev_timestamp.reset();
      }
    } else if (depth == 3 && path[1] == "revision") {
      if (name == "text") {
        rev_text.clear();
        capture_target = &rev_text;
      } else if (name == "timestamp") {
        rev_timestamp.emplace();
        capture_target = &*rev_timestamp;
      }
    }
  }

  void end_element() {
    if (path.empty()) return;  // closing the root
    const auto depth = path.size();
    if (depth == 1 && path[0] == "page") {
      end_page();
    } else if (in_page && depth == 2 && path[1] == "revision") {
      // Later revisions replace earlier ones.
      text = std::move(rev_text);
      timestamp = std::move(rev_timestamp);
      rev_text.clear();
      rev_timestamp.reset();
    }
    path.pop_back();
    capture_target = nullptr;
  }

  static void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char**) {
    static_cast<Impl*>(user)->start_element(name);
  }
  static void XMLCALL on_end(void* user, const XML_Char*) {
    static_cast<Impl*>(user)->end_element();
  }
  static void XMLCALL on_text(void* user, const XML_Char* s, int len) {
    auto* self = static_cast<Impl*>(user);
    if (self->capture_target != nullptr) self->capture_target->append(s, static_cast<std::size_t>(len));
  }

  std::uint64_t error_offset() const {
    auto idx = XML_GetCurrentByteIndex(parser);
    return idx < 0 ? stats.bytes_consumed : static_cast<std::uint64_t>(idx);
  }

  void feed() {
    source->read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const auto got = static_cast<std::size_t>(source->gcount());
    if (source->bad()) throw DumpParseError("read error on dump stream", stats.bytes_consumed);
    const bool final = got < chunk.size();
    stats.bytes_consumed += got;
    if (XML_Parse(parser, chunk.data(), static_cast<int>(got), final ? XML_TRUE : XML_FALSE) ==
        XML_STATUS_ERROR) {
      // Pages completed before the error are still delivered; the error
      // surfaces once they are drained.
      failure.emplace(pending_error.empty() ? XML_ErrorString(XML_GetErrorCode(parser)) : pending_error,
                      error_offset());
      input_done = true;
      return;
    }
    if (final) input_done = true;
  }
};

DumpReader::DumpReader(std::istream& source) : impl_(std::make_unique<Impl>(source)) {}
DumpReader::~DumpReader() = default;
DumpReader::DumpReader(DumpReader&&) noexcept = default;
DumpReader& DumpReader::operator=(DumpReader&&) noexcept = default;

std::optional<WikiPage> DumpReader::next() {
  while (impl_->ready.empty() && !impl_->input_done) impl_->feed();
  if (impl_->ready.empty()) {
    if (impl_->failure) throw *impl_->failure;
    return std::nullopt;
  }
  WikiPage page = std::move(impl_->ready.front());
  impl_->ready.pop_front();
  return page;
}

const DumpStats& DumpReader::stats() const { return impl_->stats; }

DumpReader open_dump(std::istream& source) { return DumpReader(source); }

NamespaceFilter::NamespaceFilter(PageStream& source, NamespaceSet allowed)
    : source_(&source), allowed_(std::move(allowed)) {}

std::optional<WikiPage> NamespaceFilter::next() {
  while (auto page = source_->next()) {
    if (!allowed_ || allowed_->contains(page->ns)) return page;
    ++filtered_out_;
  }
  return std::nullopt;
}

NamespaceFilter filter_namespaces(PageStream& pages, NamespaceSet allowed) {
  return NamespaceFilter(pages, std::move(allowed));
}

}  // namespace wikicite
