#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wikicite {

/// Matching key for journal titles: ASCII case-folded, leading "the "
/// dropped, "&" spelled "and", whitespace collapsed, outer whitespace and
/// trailing periods removed. Idempotent.
std::string normalize_key(std::string_view raw);

enum class ResolutionKind { canonical, excluded, unknown };

struct Resolution {
  ResolutionKind kind = ResolutionKind::unknown;
  std::string name;  // canonical name, or the input verbatim when unknown

  bool operator==(const Resolution&) const = default;
};

class RegistryError : public std::runtime_error {
 public:
  RegistryError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Canonical journal names, their aliases and the excluded outlets.
/// Immutable once built.
class JournalRegistry {
 public:
  JournalRegistry() = default;

  /// Tab-separated registry text:
  ///   canonical<TAB>Name
  ///   alias<TAB>Alias text<TAB>Name
  ///   exclude<TAB>Name
  /// `#` starts a comment. Entries may appear in any order.
  static JournalRegistry parse(std::string_view text, const std::string& source_name = "<registry>");
  static JournalRegistry load(const std::filesystem::path& path);

  Resolution resolve(std::string_view raw) const;

  const std::set<std::string>& canonical() const noexcept { return canonical_; }
  const std::set<std::string>& exclusions() const noexcept { return exclusions_; }
  /// Every key (aliases and canonical names' own keys) to its canonical name.
  const std::map<std::string, std::string>& keys() const noexcept { return keys_; }
  /// SHA-256 over a sorted serialization; independent of file order and comments.
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::set<std::string> canonical_;
  std::map<std::string, std::string> keys_;
  std::set<std::string> exclusions_;
  std::string fingerprint_;
};

Resolution resolve(std::string_view raw, const JournalRegistry& registry);

struct NearMiss {
  std::string unknown;
  std::uint64_t count = 0;
  std::string candidate;       // canonical name of the closest key
  std::size_t shared_prefix = 0;  // in normalized-key characters
};

/// Unknown journal strings whose key shares a long prefix with a registry
/// key, for manual curation. Never applied automatically.
std::vector<NearMiss> near_misses(const std::map<std::string, std::uint64_t>& unknown,
                                  const JournalRegistry& registry);

}  // namespace wikicite
