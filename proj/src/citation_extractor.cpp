#include "wikicite/citation_extractor.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "json.hpp"

namespace wikicite {

namespace {

constexpr std::size_t npos = std::string_view::npos;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool starts_with_icase(std::string_view s, std::size_t at, std::string_view prefix) {
  if (s.size() - at < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (to_lower(s[at + i]) != prefix[i]) return false;
  }
  return true;
}

std::size_t find_icase(std::string_view s, std::size_t from, std::string_view needle) {
  while (from < s.size()) {
    auto lt = s.find('<', from);
    if (lt == npos) return npos;
    if (starts_with_icase(s, lt, needle)) return lt;
    from = lt + 1;
  }
  return npos;
}

constexpr std::array<bool, 256> make_special_table() {
  std::array<bool, 256> table{};
  for (unsigned char c : std::string_view("{}[]|=<")) table[c] = true;
  return table;
}
constexpr auto kSpecial = make_special_table();

struct Part {
  std::size_t begin;
  std::size_t eq = npos;
};

struct Piece {
  char open;
  std::size_t start;
  std::size_t count;
  std::vector<Part> parts;
};

class Scanner {
 public:
  Scanner(std::string_view title, std::string_view text) : title_(title), text_(text) {}

  ExtractionResult run() {
    const std::size_t n = text_.size();
    std::size_t i = 0;
    while (i < n) {
      while (i < n && !kSpecial[static_cast<unsigned char>(text_[i])]) ++i;
      if (i >= n) break;
      const char c = text_[i];
      switch (c) {
        case '{':
        case '[': {
          const auto run = run_length(i, c, npos);
          if (run >= 2) {
            stack_.push_back(Piece{c, i, run, {Part{i + run}}});
          }
          i += run;
          break;
        }
        case '}':
        case ']': {
          const char open = c == '}' ? '{' : '[';
          if (stack_.empty() || stack_.back().open != open) {
            ++i;
            break;
          }
          const auto run = run_length(i, c, stack_.back().count);
          if (run < 2) {
            i += run;
            break;
          }
          const std::size_t take = (open == '{' && run >= 3) ? 3 : 2;
          close_top(i, take);
          i += take;
          break;
        }
        case '|':
          if (!stack_.empty() && stack_.back().open == '{') stack_.back().parts.push_back(Part{i + 1});
          ++i;
          break;
        case '=':
          if (!stack_.empty() && stack_.back().open == '{') {
            auto& parts = stack_.back().parts;
            if (parts.size() > 1 && parts.back().eq == npos) parts.back().eq = i;
          }
          ++i;
          break;
        case '<':
          i = skip_tag(i);
          break;
        default:
          ++i;
      }
    }
    for (const auto& piece : stack_) {
      if (piece.open == '{') ++result_.malformed_templates;
    }
    std::sort(result_.records.begin(), result_.records.end(),
              [](const CitationRecord& a, const CitationRecord& b) { return a.span_begin < b.span_begin; });
    return std::move(result_);
  }

 private:
  std::size_t run_length(std::size_t at, char c, std::size_t limit) const {
    std::size_t k = 0;
    while (at + k < text_.size() && text_[at + k] == c && k < limit) ++k;
    return k;
  }

  // Returns the position after a comment or a closed nowiki element, or
  // at + 1 when the '<' is ordinary text.
  std::size_t skip_tag(std::size_t at) {
    if (text_.compare(at, 4, "<!--") == 0) {
      auto end = text_.find("-->", at + 4);
      const std::size_t stop = end == npos ? text_.size() : end + 3;
      comments_.emplace_back(at, stop);
      return stop;
    }
    if (starts_with_icase(text_, at, "<nowiki")) {
      const std::size_t after = at + 7;
      if (after >= text_.size()) return at + 1;
      const char next = text_[after];
      if (next != '>' && next != '/' && !is_space(next)) return at + 1;
      auto gt = text_.find('>', after);
      if (gt == npos) return at + 1;
      if (text_[gt - 1] == '/') return gt + 1;  // <nowiki/>
      auto close = find_icase(text_, gt + 1, "</nowiki");
      if (close == npos) return at + 1;
      auto close_gt = text_.find('>', close);
      return close_gt == npos ? text_.size() : close_gt + 1;
    }
    return at + 1;
  }

  // Text of [a, b) with comments removed.
  std::string visible(std::size_t a, std::size_t b) const {
    std::string out;
    auto it = std::lower_bound(comments_.begin(), comments_.end(), std::pair<std::size_t, std::size_t>{a, 0});
    // A comment starting before `a` cannot overlap: boundaries never fall inside one.
    std::size_t pos = a;
    for (; it != comments_.end() && it->first < b; ++it) {
      out.append(text_.substr(pos, it->first - pos));
      pos = std::min(it->second, b);
    }
    if (pos < b) out.append(text_.substr(pos, b - pos));
    return out;
  }

  void close_top(std::size_t close_at, std::size_t take) {
    Piece& piece = stack_.back();
    const std::size_t node_begin = piece.start + piece.count - take;
    if (piece.open == '{' && take == 2) emit_template(piece.parts, node_begin, close_at, close_at + take);
    piece.count -= take;
    if (piece.count >= 2) {
      piece.parts.assign(1, Part{piece.start + piece.count});
    } else {
      stack_.pop_back();
    }
  }

  void emit_template(const std::vector<Part>& parts, std::size_t begin, std::size_t inner_end, std::size_t end) {
    auto part_end = [&](std::size_t k) { return k + 1 < parts.size() ? parts[k + 1].begin - 1 : inner_end; };
    const std::string name = visible(parts[0].begin, part_end(0));
    if (!is_cite_journal_name(name)) return;

    CitationRecord rec;
    rec.page_title = std::string(title_);
    rec.template_name_raw = std::string(text_.substr(parts[0].begin, part_end(0) - parts[0].begin));
    rec.span_begin = begin;
    rec.span_end = end;
    int positional = 0;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const auto& part = parts[k];
      std::string key, value;
      if (part.eq != npos) {
        key = std::string(trim(visible(part.begin, part.eq)));
        std::transform(key.begin(), key.end(), key.begin(), to_lower);
        value = std::string(trim(visible(part.eq + 1, part_end(k))));
      } else {
        key = std::to_string(++positional);
        value = visible(part.begin, part_end(k));
      }
      auto found = std::find_if(rec.params.begin(), rec.params.end(), [&](const auto& kv) { return kv.first == key; });
      if (found != rec.params.end()) {
        found->second = std::move(value);
        ++result_.duplicate_params;
      } else {
        rec.params.emplace_back(std::move(key), std::move(value));
      }
    }
    if (const auto* journal = rec.param("journal"); journal != nullptr && !journal->empty()) {
      rec.journal_raw = *journal;
    }
    result_.records.push_back(std::move(rec));
  }

  std::string_view title_;
  std::string_view text_;
  std::vector<Piece> stack_;
  std::vector<std::pair<std::size_t, std::size_t>> comments_;
  ExtractionResult result_;
};

}  // namespace

const std::string* CitationRecord::param(std::string_view name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return &value;
  }
  return nullptr;
}

bool is_cite_journal_name(std::string_view name) {
  // Collapse runs of spaces/underscores the way MediaWiki normalizes titles.
  std::string norm;
  norm.reserve(name.size());
  bool pending_space = false;
  for (char c : trim(name)) {
    if (c == '_' || is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !norm.empty()) norm.push_back(' ');
    pending_space = false;
    norm.push_back(c);
  }
  std::string_view view = norm;
  if (starts_with_icase(view, 0, "template:")) {
    view.remove_prefix(9);
    while (!view.empty() && view.front() == ' ') view.remove_prefix(1);
  }
  if (view.size() != 12) return false;
  return (view[0] == 'c' || view[0] == 'C') && view.substr(1) == "ite journal";
}

std::string strip_journal_markup(std::string_view value) {
  std::string linked;
  linked.reserve(value.size());
  std::size_t i = 0;
  while (i < value.size()) {
    if (value.compare(i, 2, "[[") == 0) {
      auto close = value.find("]]", i + 2);
      if (close != npos) {
        auto inner = value.substr(i + 2, close - i - 2);
        auto pipe = inner.find('|');
        std::string_view shown = inner;
        if (pipe != npos) {
          auto label = inner.substr(pipe + 1);
          shown = trim(label).empty() ? inner.substr(0, pipe) : label;
        }
        linked.append(shown);
        i = close + 2;
        continue;
      }
    }
    linked.push_back(value[i]);
    ++i;
  }
  std::string out;
  out.reserve(linked.size());
  for (std::size_t k = 0; k < linked.size();) {
    if (linked[k] == '\'') {
      std::size_t run = 0;
      while (k + run < linked.size() && linked[k + run] == '\'') ++run;
      if (run == 1) out.push_back('\'');
      k += run;
      continue;
    }
    out.push_back(linked[k++]);
  }
  return std::string(trim(out));
}

ExtractionResult extract_citations(std::string_view page_title, std::string_view text) {
  if (text.find("{{") == npos) return {};
  return Scanner(page_title, text).run();
}

ExtractionResult extract_citations(const WikiPage& page) { return extract_citations(page.title, page.text); }

TemplateTotals count_template_totals(PageStream& pages) {
  TemplateTotals totals;
  while (auto page = pages.next()) {
    auto result = extract_citations(*page);
    ++totals.pages;
    totals.templates += result.records.size();
    totals.malformed += result.malformed_templates;
    totals.duplicate_params += result.duplicate_params;
  }
  return totals;
}

std::uint64_t count_template_instances(PageStream& pages) { return count_template_totals(pages).templates; }

std::string to_json_line(const CitationRecord& record) {
  nlohmann::ordered_json j;
  j["page_title"] = record.page_title;
  j["template_name_raw"] = record.template_name_raw;
  auto params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : record.params) params[key] = value;
  j["params"] = std::move(params);
  j["journal_raw"] = record.journal_raw ? nlohmann::ordered_json(*record.journal_raw) : nlohmann::ordered_json(nullptr);
  j["span"] = {record.span_begin, record.span_end};
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

CitationRecord from_json_line(std::string_view line) {
  try {
    const auto j = nlohmann::ordered_json::parse(line);
    CitationRecord rec;
    rec.page_title = j.at("page_title").get<std::string>();
    rec.template_name_raw = j.at("template_name_raw").get<std::string>();
    for (const auto& [key, value] : j.at("params").items()) rec.params.emplace_back(key, value.get<std::string>());
    if (const auto& journal = j.at("journal_raw"); !journal.is_null()) rec.journal_raw = journal.get<std::string>();
    const auto& span = j.at("span");
    if (!span.is_array() || span.size() != 2) throw std::invalid_argument("span must be a two-element array");
    rec.span_begin = span[0].get<std::size_t>();
    rec.span_end = span[1].get<std::size_t>();
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad citation record: ") + e.what());
  }
}

}  // namespace wikicite
