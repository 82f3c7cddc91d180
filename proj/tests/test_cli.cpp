#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "wikicite/bibliometrics.hpp"
#include "wikicite/cli.hpp"
#include "wikicite/fixture.hpp"

using namespace wikicite;
namespace fs = std::filesystem;

namespace {

const std::string kRegistry = WIKICITE_DATA_DIR "/journals.tsv";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "wikicite");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "wikicite-cli-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Ten journals of the starter registry with hand-picked report numbers.
const char* kJcr =
    "journal,total_citations,impact_factor,articles\n"
    "Nature,363000,26.681,1000\n"
    "Science,332000,30.927,900\n"
    "N Engl J Med,159000,44.016,350\n"
    "The Lancet,114000,23.407,600\n"
    "The Astrophysical Journal,140000,6.308,2700\n"
    "Icarus,13000,2.878,400\n"
    "JAMA,90000,23.332,500\n"
    "Astronomy & Astrophysics,60000,3.971,2000\n"
    "Nuytsia,50,0.3,20\n"
    "Scientific American,4000,2.0,100\n";

}  // namespace

TEST_CASE("sweep specification parsing") {
  CHECK(parse_sweep("2..10", 50) == std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(parse_sweep("5", 50) == std::vector<std::size_t>{5});
  CHECK(parse_sweep("10,20,40", 50) == std::vector<std::size_t>{10, 20, 40});
  CHECK(parse_sweep("2..20:6", 50) == std::vector<std::size_t>{2, 8, 14, 20});
  CHECK(parse_sweep("2..4,10..12", 50) == std::vector<std::size_t>{2, 3, 4, 10, 11, 12});
  CHECK(parse_sweep("", 4) == std::vector<std::size_t>{2, 3, 4});
  CHECK(parse_sweep("all", 3) == std::vector<std::size_t>{2, 3});
  CHECK_THROWS_AS(parse_sweep("1..5", 50), UsageError);
  CHECK_THROWS_AS(parse_sweep("5,5", 50), UsageError);
  CHECK_THROWS_AS(parse_sweep("10,4", 50), UsageError);
  CHECK_THROWS_AS(parse_sweep("5..2", 50), UsageError);
  CHECK_THROWS_AS(parse_sweep("2..10:0", 50), UsageError);
  CHECK_THROWS_AS(parse_sweep("two", 50), UsageError);
  CHECK_THROWS_AS(parse_sweep("2..", 50), UsageError);
}

TEST_CASE("namespace specification parsing") {
  CHECK(parse_namespaces("all") == std::nullopt);
  CHECK(parse_namespaces("0") == NamespaceSet{std::set<int>{0}});
  CHECK(parse_namespaces("0,14,1") == NamespaceSet{std::set<int>{0, 1, 14}});
  CHECK_THROWS_AS(parse_namespaces("zero"), UsageError);
  CHECK_THROWS_AS(parse_namespaces("-1"), UsageError);
}

TEST_CASE("extract on a generated fixture writes the planted records") {
  TempDir tmp;
  REQUIRE(run({"gen-fixture", "--out", tmp / "fx", "--pages", "60", "--planted", "150", "--nested", "10",
               "--malformed", "4", "--seed", "3"})
              .code == kExitOk);
  const auto truth = nlohmann::json::parse(slurp(tmp / "fx/fixture_truth.json"));

  auto r = run({"extract", "--dump", tmp / "fx/dump.xml", "--out", tmp / "ex"});
  REQUIRE(r.code == kExitOk);
  const auto jsonl = slurp(tmp / "ex/citations.jsonl");
  CHECK(line_count(jsonl) == truth["templates"].get<std::size_t>());
  const auto summary = nlohmann::json::parse(slurp(tmp / "ex/extract_summary.json"));
  CHECK(summary["malformed_total"] == truth["malformed"]);
  CHECK(summary["templates"] == truth["templates"]);

  // Each line round-trips through the record type.
  std::istringstream lines(jsonl);
  std::string line;
  std::map<std::string, std::uint64_t> journals;
  while (std::getline(lines, line)) {
    const auto rec = from_json_line(line);
    if (rec.journal_raw) ++journals[*rec.journal_raw];
  }
  CHECK(journals == truth["journal_raw_counts"].get<std::map<std::string, std::uint64_t>>());

  // Parallel extraction writes the same bytes.
  REQUIRE(run({"extract", "--dump", tmp / "fx/dump.xml", "--out", tmp / "ex4", "--jobs", "4"}).code == kExitOk);
  CHECK(slurp(tmp / "ex4/citations.jsonl") == jsonl);

  const auto manifest = nlohmann::json::parse(slurp(tmp / "ex/manifest.json"));
  CHECK(manifest["command"] == "extract");
  CHECK(manifest["version"] == std::string(kVersion));
  CHECK(manifest["inputs"]["dump"]["sha256"].get<std::string>().size() == 64);
  CHECK(manifest["outputs"] == nlohmann::json::array({"citations.jsonl", "extract_summary.json"}));
}

TEST_CASE("extract edge cases") {
  TempDir tmp;
  spit(tmp / "empty.xml", dump_header() + dump_footer());
  REQUIRE(run({"extract", "--dump", tmp / "empty.xml", "--out", tmp / "e"}).code == kExitOk);
  CHECK(slurp(tmp / "e/citations.jsonl").empty());
  const auto summary = nlohmann::json::parse(slurp(tmp / "e/extract_summary.json"));
  CHECK(summary["templates"] == 0);
  CHECK(summary["malformed_total"] == 0);

  WikiPage p;
  p.title = "One";
  p.text = "{{cite journal|journal=Nature}} and {{cite journal|journal=Dangling";
  std::ofstream(tmp / "one.xml") << dump_header() << page_xml(p) << dump_footer();
  REQUIRE(run({"extract", "--dump", tmp / "one.xml", "--out", tmp / "o"}).code == kExitOk);
  CHECK(line_count(slurp(tmp / "o/citations.jsonl")) == 1);
  CHECK(nlohmann::json::parse(slurp(tmp / "o/extract_summary.json"))["malformed_total"] == 1);

  spit(tmp / "bad.xml", "<mediawiki><page><title>x</title></pag></mediawiki>");
  auto r = run({"extract", "--dump", tmp / "bad.xml", "--out", tmp / "b"});
  CHECK(r.code == kExitInputFormat);
  CHECK(r.err.find("byte") != std::string::npos);

  r = run({"extract", "--dump", tmp / "missing.xml", "--out", tmp / "m"});
  CHECK(r.code != kExitOk);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("count reproduces the planted table and its exclusions") {
  TempDir tmp;
  REQUIRE(run({"gen-fixture", "--out", tmp / "fx", "--pages", "80", "--planted", "300", "--seed", "12",
               "--without-journal", "7"})
              .code == kExitOk);
  const auto truth = nlohmann::json::parse(slurp(tmp / "fx/fixture_truth.json"));
  const auto registry = JournalRegistry::load(kRegistry);

  auto expected = empty_table(registry);
  for (const auto& [raw, n] : truth["journal_raw_counts"].items()) {
    CitationRecord rec;
    rec.journal_raw = raw;
    for (std::uint64_t k = 0; k < n.get<std::uint64_t>(); ++k) add_record(expected, rec, registry);
  }

  REQUIRE(run({"count", "--dump", tmp / "fx/dump.xml", "--registry", kRegistry, "--out", tmp / "c"}).code ==
          kExitOk);
  const auto table = count_table_from_json(slurp(tmp / "c/counts.json"));
  CHECK(table.counts == expected.counts);
  CHECK(table.unknown == expected.unknown);
  CHECK(table.excluded_count == expected.excluded_count);
  CHECK(table.excluded_count > 0);
  CHECK(table.template_total == truth["templates"].get<std::uint64_t>());
  CHECK(table.without_journal() == 7);
  CHECK(slurp(tmp / "c/counts.csv") == to_csv(expected));

  // Through the intermediate JSON-lines file, and in parallel: same tables.
  REQUIRE(run({"extract", "--dump", tmp / "fx/dump.xml", "--out", tmp / "ex"}).code == kExitOk);
  REQUIRE(run({"count", "--citations", tmp / "ex/citations.jsonl", "--registry", kRegistry, "--out", tmp / "c2"})
              .code == kExitOk);
  CHECK(slurp(tmp / "c2/counts.json") == slurp(tmp / "c/counts.json"));
  REQUIRE(run({"count", "--dump", tmp / "fx/dump.xml", "--registry", kRegistry, "--jobs", "3", "--out",
               tmp / "c3"})
              .code == kExitOk);
  CHECK(slurp(tmp / "c3/counts.json") == slurp(tmp / "c/counts.json"));
}

TEST_CASE("count error paths") {
  TempDir tmp;
  spit(tmp / "d.xml", dump_header() + dump_footer());
  CHECK(run({"count", "--dump", tmp / "d.xml", "--registry", tmp / "nope.tsv", "--out", tmp / "c"}).code != 0);
  CHECK(run({"count", "--dump", tmp / "d.xml", "--out", tmp / "c"}).code == kExitUsage);
  CHECK(run({"count", "--registry", kRegistry, "--out", tmp / "c"}).code == kExitUsage);
  spit(tmp / "bad.tsv", "canonical\tA\nalias\tB\tMissing\n");
  auto r = run({"count", "--dump", tmp / "d.xml", "--registry", tmp / "bad.tsv", "--out", tmp / "c"});
  CHECK(r.code == kExitInputFormat);
  CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("correlate matches library calls") {
  TempDir tmp;
  const auto registry = JournalRegistry::load(kRegistry);
  auto table = empty_table(registry);
  table.counts = {{"Nature", 787},  {"Science", 669}, {"New England Journal of Medicine", 446},
                  {"The Lancet", 300}, {"The Astrophysical Journal", 280}, {"Icarus", 120},
                  {"JAMA", 150},    {"Astronomy & Astrophysics", 90}, {"Nuytsia", 40},
                  {"Annals of Internal Medicine", 30}};
  for (const auto& [_, c] : table.counts) table.template_total += c;
  spit(tmp / "counts.json", to_json(table));
  spit(tmp / "jcr.csv", kJcr);

  auto r = run({"correlate", "--counts", tmp / "counts.json", "--registry", kRegistry, "--jcr", tmp / "jcr.csv",
                "--sweep", "2..9", "--labels", "3", "--overlap", "2,3", "--out", tmp / "out"});
  REQUIRE_MESSAGE(r.code == kExitOk, r.err);

  std::istringstream jcr_in(kJcr);
  const auto jcr = read_jcr_csv(jcr_in);
  const auto joined = join(table, jcr, registry);
  REQUIRE(joined.rows.size() == 9);
  std::vector<std::size_t> ns{2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<CorrelationResult> expected;
  for (auto s : kAllSeries) {
    auto part = topn_sweep(joined.rows, s, ns);
    expected.insert(expected.end(), part.begin(), part.end());
  }
  const auto csv = slurp(tmp / "out/correlations.csv");
  CHECK(csv == correlations_csv(expected));
  CHECK(line_count(csv) == 1 + 4 * ns.size());
  CHECK(slurp(tmp / "out/scatter.csv") == scatter_csv(scatter_export(joined.rows, 3)));
  const auto audit = slurp(tmp / "out/join_audit.csv");
  CHECK(audit == "side,journal\nwikipedia_only,Annals of Internal Medicine\njcr_excluded,Scientific American\n");
  const auto overlap = nlohmann::json::parse(slurp(tmp / "out/overlap.json"));
  CHECK(overlap["overlap"] == combined_top_overlap(joined.rows, 2, 3));

  // Byte-identical on a second run, including the manifest.
  REQUIRE(run({"correlate", "--counts", tmp / "counts.json", "--registry", kRegistry, "--jcr", tmp / "jcr.csv",
               "--sweep", "2..9", "--labels", "3", "--overlap", "2,3", "--out", tmp / "out"})
              .code == kExitOk);
  CHECK(slurp(tmp / "out/correlations.csv") == csv);
}

TEST_CASE("correlate error paths") {
  TempDir tmp;
  const auto registry = JournalRegistry::load(kRegistry);
  auto table = empty_table(registry);
  table.counts = {{"Nature", 5}, {"Science", 4}, {"Icarus", 3}};
  table.template_total = 12;
  spit(tmp / "counts.json", to_json(table));
  spit(tmp / "jcr.csv", kJcr);

  // No --jcr: usage error.
  CHECK(run({"correlate", "--counts", tmp / "counts.json", "--registry", kRegistry, "--out", tmp / "o"}).code ==
        kExitUsage);
  // Sweep beyond the joined set.
  auto r = run({"correlate", "--counts", tmp / "counts.json", "--registry", kRegistry, "--jcr", tmp / "jcr.csv",
                "--sweep", "2..5", "--out", tmp / "o"});
  CHECK(r.code == kExitInsufficientData);
  // Fewer than two joined journals.
  spit(tmp / "one.csv", "journal,total_citations,impact_factor,articles\nNature,1,1,1\n");
  r = run({"correlate", "--counts", tmp / "counts.json", "--registry", kRegistry, "--jcr", tmp / "one.csv", "--out",
           tmp / "o"});
  CHECK(r.code == kExitInsufficientData);
  CHECK_FALSE(r.err.empty());
  // Malformed report.
  spit(tmp / "bad.csv", "name,citations\n");
  CHECK(run({"correlate", "--counts", tmp / "counts.json", "--registry", kRegistry, "--jcr", tmp / "bad.csv",
             "--out", tmp / "o"})
            .code == kExitInputFormat);
  // Counts built with another registry.
  spit(tmp / "other.tsv", "canonical\tNature\ncanonical\tScience\n");
  CHECK(run({"correlate", "--counts", tmp / "counts.json", "--registry", tmp / "other.tsv", "--jcr",
             tmp / "jcr.csv", "--out", tmp / "o"})
            .code == kExitInputFormat);
}

TEST_CASE("growth subcommand") {
  TempDir tmp;
  std::vector<std::string> args{"growth", "--out", tmp / "g"};
  const std::pair<const char*, std::uint64_t> points[] = {
      {"2005-02", 0}, {"2006-11", 19066}, {"2007-02", 24656}, {"2007-04", 30368}};
  for (const auto& [date, total] : points) {
    CountTable t;
    t.template_total = total;
    const auto path = tmp / (std::string(date) + ".json");
    spit(path, to_json(t));
    args.push_back("--table");
    args.push_back(std::string(date) + "=" + path);
  }
  auto r = run(args);
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(tmp / "g/growth.csv") ==
        "date,template_total\n2005-02,0\n2006-11,19066\n2007-02,24656\n2007-04,30368\n");

  std::swap(args[4], args[6]);
  CHECK(run(args).code == kExitUsage);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"extract", "--out", "/tmp/x"}).code == kExitUsage);
  CHECK(run({"extract", "--dump", "x.xml"}).code == kExitUsage);
  const auto help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("correlate") != std::string::npos);
  CHECK(run({"--version"}).out.find(std::string(kVersion)) != std::string::npos);
}

TEST_CASE("the installed binary reads a dump from standard input") {
  TempDir tmp;
  WikiPage p;
  p.title = "Stdin";
  p.text = "{{cite journal|journal=Science}}";
  std::ofstream(tmp / "d.xml") << dump_header() << page_xml(p) << dump_footer();
  const std::string cmd = std::string("\"") + WIKICITE_BIN + "\" extract --dump - --out \"" + (tmp / "o") +
                          "\" < \"" + (tmp / "d.xml") + "\" > /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(line_count(slurp(tmp / "o/citations.jsonl")) == 1);

  const std::string bad = std::string("\"") + WIKICITE_BIN + "\" correlate --registry x --out y 2> /dev/null";
  const int bad_status = std::system(bad.c_str());
  REQUIRE(WIFEXITED(bad_status));
  CHECK(WEXITSTATUS(bad_status) == kExitUsage);
}
