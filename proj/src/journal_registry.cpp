#include "wikicite/journal_registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wikicite/digest.hpp"

namespace wikicite {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(trim(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

struct Entry {
  std::size_t line;
  std::string kind;
  std::string text;
  std::string target;
};

std::size_t common_prefix(std::string_view a, std::string_view b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  return k;
}

}  // namespace

std::string normalize_key(std::string_view raw) {
  std::string folded;
  folded.reserve(raw.size() + 8);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '&') {
      if (raw.compare(i, 5, "&amp;") == 0) i += 4;
      folded.append(" and ");
      continue;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    folded.push_back(c);
  }

  std::string collapsed;
  collapsed.reserve(folded.size());
  bool pending_space = false;
  for (char c : folded) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !collapsed.empty()) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(c);
  }

  std::string_view key = collapsed;
  for (bool changed = true; changed;) {
    changed = false;
    while (!key.empty() && (key.back() == '.' || key.back() == ' ')) {
      key.remove_suffix(1);
      changed = true;
    }
    while (key.starts_with("the ")) {
      key.remove_prefix(4);
      changed = true;
    }
  }
  return std::string(key);
}

RegistryError::RegistryError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

JournalRegistry JournalRegistry::parse(std::string_view text, const std::string& source_name) {
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;

    auto fields = split_tabs(line);
    const auto kind = fields[0];
    auto need = [&](std::size_t n) {
      if (fields.size() != n) {
        throw RegistryError(source_name, line_no,
                            "'" + std::string(kind) + "' expects " + std::to_string(n - 1) + " tab-separated field(s)");
      }
      for (std::size_t k = 1; k < n; ++k) {
        if (fields[k].empty()) throw RegistryError(source_name, line_no, "empty field");
      }
    };
    if (kind == "canonical" || kind == "exclude") {
      need(2);
      entries.push_back({line_no, std::string(kind), std::string(fields[1]), {}});
    } else if (kind == "alias") {
      need(3);
      entries.push_back({line_no, "alias", std::string(fields[1]), std::string(fields[2])});
    } else {
      throw RegistryError(source_name, line_no, "unknown entry kind '" + std::string(kind) + "'");
    }
  }

  JournalRegistry reg;
  std::map<std::string, std::size_t> key_line;
  // Canonical names first so aliases and exclusions may precede them in the file.
  for (const auto& e : entries) {
    if (e.kind != "canonical") continue;
    auto key = normalize_key(e.text);
    if (key.empty()) throw RegistryError(source_name, e.line, "name normalizes to an empty key");
    if (auto it = reg.keys_.find(key); it != reg.keys_.end() && it->second != e.text) {
      throw RegistryError(source_name, e.line,
                          "canonical name '" + e.text + "' collides with '" + it->second + "' (line " +
                              std::to_string(key_line[key]) + ")");
    }
    reg.canonical_.insert(e.text);
    reg.keys_.emplace(key, e.text);
    key_line.emplace(key, e.line);
  }
  std::set<std::string> alias_keys;
  for (const auto& e : entries) {
    if (e.kind == "alias") {
      if (!reg.canonical_.contains(e.target)) {
        throw RegistryError(source_name, e.line, "alias target '" + e.target + "' is not a canonical name");
      }
      auto key = normalize_key(e.text);
      if (key.empty()) throw RegistryError(source_name, e.line, "alias normalizes to an empty key");
      if (!alias_keys.insert(key).second) {
        throw RegistryError(source_name, e.line,
                            "duplicate alias key '" + key + "' (first on line " + std::to_string(key_line[key]) + ")");
      }
      if (auto it = reg.keys_.find(key); it != reg.keys_.end() && it->second != e.target) {
        throw RegistryError(source_name, e.line,
                            "alias key '" + key + "' already names '" + it->second + "' (line " +
                                std::to_string(key_line[key]) + ")");
      }
      reg.keys_.emplace(key, e.target);
      key_line.emplace(key, e.line);
    } else if (e.kind == "exclude") {
      if (!reg.canonical_.contains(e.text)) {
        throw RegistryError(source_name, e.line, "excluded name '" + e.text + "' is not a canonical name");
      }
      reg.exclusions_.insert(e.text);
    }
  }

  std::string canon;
  for (const auto& name : reg.canonical_) canon += "canonical\t" + name + "\n";
  for (const auto& [key, name] : reg.keys_) canon += "key\t" + key + "\t" + name + "\n";
  for (const auto& name : reg.exclusions_) canon += "exclude\t" + name + "\n";
  reg.fingerprint_ = sha256_hex(canon);
  return reg;
}

JournalRegistry JournalRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RegistryError(path.string(), 0, "cannot open registry file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

Resolution JournalRegistry::resolve(std::string_view raw) const {
  auto it = keys_.find(normalize_key(raw));
  if (it == keys_.end()) return {ResolutionKind::unknown, std::string(raw)};
  if (exclusions_.contains(it->second)) return {ResolutionKind::excluded, it->second};
  return {ResolutionKind::canonical, it->second};
}

Resolution resolve(std::string_view raw, const JournalRegistry& registry) { return registry.resolve(raw); }

std::vector<NearMiss> near_misses(const std::map<std::string, std::uint64_t>& unknown,
                                  const JournalRegistry& registry) {
  std::vector<NearMiss> out;
  const auto& keys = registry.keys();
  for (const auto& [raw, count] : unknown) {
    const auto key = normalize_key(raw);
    if (key.size() < 3) continue;
    NearMiss best{raw, count, {}, 0};
    // Keys sharing a prefix sit next to the probe in sorted order.
    auto hi = keys.lower_bound(key);
    auto consider = [&](const auto& it) {
      const auto shared = common_prefix(key, it->first);
      const auto shorter = std::min(key.size(), it->first.size());
      const bool prefix_of_other = shared == shorter && shorter >= 3;
      const bool long_shared = shared >= 5 && 2 * shared >= shorter;
      if ((prefix_of_other || long_shared) && shared > best.shared_prefix) {
        best.shared_prefix = shared;
        best.candidate = it->second;
      }
    };
    for (auto it = hi; it != keys.end() && common_prefix(key, it->first) >= 3; ++it) consider(it);
    for (auto it = hi; it != keys.begin();) {
      --it;
      if (common_prefix(key, it->first) < 3) break;
      consider(it);
    }
    if (best.shared_prefix > 0) out.push_back(std::move(best));
  }
  std::sort(out.begin(), out.end(), [](const NearMiss& a, const NearMiss& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.unknown < b.unknown;
  });
  return out;
}

}  // namespace wikicite
