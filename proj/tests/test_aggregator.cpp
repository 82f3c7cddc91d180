#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "wikicite/aggregator.hpp"
#include "wikicite/fixture.hpp"

using namespace wikicite;

namespace {

const JournalRegistry& registry() {
  static const auto reg = JournalRegistry::load(WIKICITE_DATA_DIR "/journals.tsv");
  return reg;
}

CitationRecord rec(std::optional<std::string> journal) {
  CitationRecord r;
  r.page_title = "P";
  r.template_name_raw = "cite journal";
  if (journal) r.params.emplace_back("journal", *journal);
  r.journal_raw = std::move(journal);
  return r;
}

std::vector<CitationRecord> records_of(const std::vector<std::optional<std::string>>& journals) {
  std::vector<CitationRecord> out;
  for (const auto& j : journals) out.push_back(rec(j));
  return out;
}

// Random table over a small key space so merges overlap.
CountTable random_table(std::mt19937_64& rng, std::size_t cap) {
  static const std::vector<std::optional<std::string>> pool{
      "Nature", "Science", "The Lancet", "NY Times", "Foo", "Bar", "Baz", "Qux", "Zed", std::nullopt};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), len(0, 30);
  std::vector<CitationRecord> rs;
  for (std::size_t k = len(rng); k > 0; --k) rs.push_back(rec(pool[pick(rng)]));
  auto t = tally(rs, registry(), cap);
  t.malformed_total = len(rng) % 3;
  return t;
}

std::uint64_t sum(const std::map<std::string, std::uint64_t>& m) {
  std::uint64_t s = 0;
  for (const auto& [_, c] : m) s += c;
  return s;
}

}  // namespace

TEST_CASE("three records resolving to the same journal") {
  const auto rs = records_of({"Nature", "[[Nature (journal)|Nature]]", "''Nature''"});
  const auto t = tally(rs, registry());
  CHECK(t.counts == std::map<std::string, std::uint64_t>{{"Nature", 3}});
  CHECK(t.template_total == 3);
  CHECK(t.without_journal() == 0);
}

TEST_CASE("planted table is reproduced exactly") {
  const auto rs = records_of({"Nature", "Nature", "Science", "Nature", "Foo", "The New York Times", "Nature",
                              "Science", "Nature", std::nullopt});
  const auto t = tally(rs, registry());
  CHECK(t.counts == std::map<std::string, std::uint64_t>{{"Nature", 5}, {"Science", 2}});
  CHECK(t.unknown == std::map<std::string, std::uint64_t>{{"Foo", 1}});
  CHECK(t.excluded_count == 1);
  CHECK(t.template_total == 10);
  CHECK(t.without_journal() == 1);
  CHECK(t.registry_fingerprint == registry().fingerprint());
}

TEST_CASE("each named record lands in exactly one bucket") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto t = random_table(rng, kDefaultUnknownCap);
    CHECK(sum(t.counts) + t.excluded_count + sum(t.unknown) + t.unknown_overflow + t.without_journal() ==
          t.template_total);
    CHECK(t.without_journal() <= t.template_total);
  }
}

TEST_CASE("merge identity, commutativity, associativity") {
  std::mt19937_64 rng(5);
  for (std::size_t cap : {std::size_t{0}, std::size_t{2}, kDefaultUnknownCap}) {
    for (int i = 0; i < 300; ++i) {
      const auto a = random_table(rng, cap);
      const auto b = random_table(rng, cap);
      const auto c = random_table(rng, cap);
      CHECK(merge(a, CountTable{}) == a);
      CHECK(merge(CountTable{}, a) == a);
      CHECK(merge(a, empty_table(registry(), cap)) == a);
      CHECK(merge(a, b) == merge(b, a));
      CHECK(merge(merge(a, b), c) == merge(a, merge(b, c)));
    }
  }
}

TEST_CASE("merge of tallies equals tally of the concatenation") {
  std::mt19937_64 rng(17);
  const std::vector<std::optional<std::string>> pool{"Nature", "Science", "NYT?", "A", "B", "C", "D", "E",
                                                     "Scientific American", std::nullopt};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t cap : {std::size_t{0}, std::size_t{1}, std::size_t{3}, kDefaultUnknownCap}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<CitationRecord> all;
      for (int k = 0; k < 60; ++k) all.push_back(rec(pool[pick(rng)]));
      const auto whole = tally(all, registry(), cap);
      const auto cut = std::uniform_int_distribution<std::size_t>(0, all.size())(rng);
      const auto left = tally(std::span(all).first(cut), registry(), cap);
      const auto right = tally(std::span(all).subspan(cut), registry(), cap);
      REQUIRE(merge(left, right) == whole);
      CHECK(whole.unknown.size() <= cap);
    }
  }
}

TEST_CASE("unknown cap keeps the smallest keys and counts the rest") {
  const auto rs = records_of({"Delta", "Alpha", "Charlie", "Bravo", "Delta", "Echo", "Alpha"});
  const auto t = tally(rs, registry(), 2);
  CHECK(t.unknown == std::map<std::string, std::uint64_t>{{"Alpha", 2}, {"Bravo", 1}});
  CHECK(t.unknown_overflow == 4);
  CHECK(t.without_journal() == 0);
}

TEST_CASE("merge rejects mismatched registries and caps") {
  const auto other = JournalRegistry::parse("canonical\tNature\n");
  const auto a = tally(records_of({"Nature"}), registry());
  const auto b = tally(records_of({"Nature"}), other);
  CHECK_THROWS_AS(merge(a, b), MergeError);
  const auto c = tally(records_of({"Nature"}), registry(), 5);
  CHECK_THROWS_AS(merge(a, c), MergeError);
}

TEST_CASE("monotonicity: adding records never decreases a count") {
  std::mt19937_64 rng(23);
  auto t = empty_table(registry());
  const std::vector<std::string> pool{"Nature", "Science", "Foo", "Scientific American", "Lancet"};
  for (int k = 0; k < 200; ++k) {
    const auto before = t;
    add_record(t, rec(pool[rng() % pool.size()]), registry());
    CHECK(t.template_total == before.template_total + 1);
    CHECK(t.excluded_count >= before.excluded_count);
    for (const auto& [name, c] : before.counts) CHECK(t.counts.at(name) >= c);
    for (const auto& [name, c] : before.unknown) CHECK(t.unknown.at(name) >= c);
  }
}

TEST_CASE("add_extraction carries malformed and duplicate tallies") {
  auto r = extract_citations("P", "{{cite journal|journal=Nature|journal=Science}} {{cite journal|journal=Nat");
  auto t = empty_table(registry());
  add_extraction(t, r, registry());
  CHECK(t.template_total == 1);
  CHECK(t.counts == std::map<std::string, std::uint64_t>{{"Science", 1}});
  CHECK(t.malformed_total == 1);
  CHECK(t.duplicate_params_total == 1);
}

TEST_CASE("fixture corpus tallies to its planted journal counts") {
  FixtureOptions opt;
  opt.pages = 100;
  opt.planted = 400;
  opt.nested = 20;
  opt.without_journal = 15;
  opt.malformed = 6;
  opt.seed = 31;
  const auto fx = make_fixture(opt);
  auto t = empty_table(registry());
  for (const auto& p : fx.pages) add_extraction(t, extract_citations(p), registry());
  CHECK(t.template_total == fx.truth.templates);
  CHECK(t.malformed_total == fx.truth.malformed);
  CHECK(t.without_journal() == opt.without_journal);

  // Expected table from the planted raw strings through the registry.
  auto expected = empty_table(registry());
  for (const auto& [raw, n] : fx.truth.journal_raw_counts) {
    for (std::uint64_t k = 0; k < n; ++k) add_record(expected, rec(raw), registry());
  }
  CHECK(t.counts == expected.counts);
  CHECK(t.unknown == expected.unknown);
  CHECK(t.excluded_count == expected.excluded_count);
  CHECK(t.excluded_count > 0);
}

TEST_CASE("growth report") {
  auto with_total = [](std::uint64_t n) {
    CountTable t;
    t.template_total = n;
    return t;
  };
  CHECK(growth_report({}).empty());
  {
    std::vector<DatedTable> one{{"2007-04", with_total(7)}};
    CHECK(growth_report(one) == std::vector<GrowthPoint>{{"2007-04", 7}});
  }
  std::vector<DatedTable> four{{"2005-02", with_total(0)},
                               {"2006-11", with_total(19066)},
                               {"2007-02", with_total(24656)},
                               {"2007-04-02", with_total(30368)}};
  CHECK(growth_report(four) == std::vector<GrowthPoint>{
                                   {"2005-02", 0}, {"2006-11", 19066}, {"2007-02", 24656}, {"2007-04-02", 30368}});

  std::vector<DatedTable> repeated{{"2007-02", with_total(1)}, {"2007-02", with_total(2)}};
  CHECK_THROWS_AS(growth_report(repeated), std::invalid_argument);
  std::vector<DatedTable> backwards{{"2007-02", with_total(1)}, {"2006-11", with_total(2)}};
  CHECK_THROWS_AS(growth_report(backwards), std::invalid_argument);
  std::vector<DatedTable> bad{{"Feb 2007", with_total(1)}};
  CHECK_THROWS_AS(growth_report(bad), std::invalid_argument);
  std::vector<DatedTable> month13{{"2007-13", with_total(1)}};
  CHECK_THROWS_AS(growth_report(month13), std::invalid_argument);
}

TEST_CASE("CSV ordering and JSON round trip") {
  const auto rs = records_of({"Science", "Nature", "Science", "Nature", "Icarus", "Foo, \"quoted\"", std::nullopt});
  const auto t = tally(rs, registry());
  CHECK(to_csv(t) == "journal,count\nNature,2\nScience,2\nIcarus,1\n");
  CHECK(to_csv(CountTable{}) == "journal,count\n");

  const auto json = to_json(t);
  CHECK(count_table_from_json(json) == t);
  CHECK(json.find("\"without_journal\": 1") != std::string::npos);

  CHECK_THROWS_AS(count_table_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(count_table_from_json("[1,2"), std::invalid_argument);
  auto inflated = t;
  inflated.template_total = 1;
  CHECK_THROWS_AS(count_table_from_json(to_json(inflated)), std::invalid_argument);
}
