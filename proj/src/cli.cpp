#include "wikicite/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "wikicite/aggregator.hpp"
#include "wikicite/bibliometrics.hpp"
#include "wikicite/citation_extractor.hpp"
#include "wikicite/csv.hpp"
#include "wikicite/digest.hpp"
#include "wikicite/fixture.hpp"
#include "wikicite/journal_registry.hpp"

namespace wikicite {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::size_t kBatchPages = 256;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t parse_size(std::string_view text, const std::string& what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("bad " + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Collects outputs of one run and writes the manifest last.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, std::string_view content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("cannot write " + (dir_ / name).string());
    files_.push_back(name);
  }

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + (dir_ / name).string());
    files_.push_back(name);
    return out;
  }

  void write_manifest(const std::string& command, ojson config, ojson inputs) {
    ojson m;
    m["tool"] = "wikicite";
    m["version"] = std::string(kVersion);
    m["command"] = command;
    m["config"] = std::move(config);
    m["inputs"] = std::move(inputs);
    auto files = files_;
    std::sort(files.begin(), files.end());
    m["outputs"] = files;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    if (!out) throw InputError("cannot write manifest");
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

/// Dump source that fingerprints the bytes as they are consumed.
class DumpInput {
 public:
  explicit DumpInput(const std::string& path) : path_(path) {
    std::streambuf* raw = nullptr;
    if (path == "-") {
      raw = std::cin.rdbuf();
    } else {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw InputError("cannot read dump " + path);
      raw = file_->rdbuf();
    }
    hasher_ = std::make_unique<HashingStreamBuf>(raw);
    stream_ = std::make_unique<std::istream>(hasher_.get());
  }

  std::istream& stream() { return *stream_; }
  ojson describe() { return ojson{{"path", path_}, {"sha256", hasher_->hex_digest()}}; }

 private:
  std::string path_;
  std::unique_ptr<std::ifstream> file_;
  std::unique_ptr<HashingStreamBuf> hasher_;
  std::unique_ptr<std::istream> stream_;
};

ojson describe_file(const std::string& path) { return ojson{{"path", path}, {"sha256", sha256_file(path)}}; }

ojson namespaces_json(const NamespaceSet& ns) {
  if (!ns) return "all";
  return ojson(std::vector<int>(ns->begin(), ns->end()));
}

struct ExtractionSummary {
  DumpStats dump;
  std::uint64_t filtered_out = 0;
  std::uint64_t pages_processed = 0;
  std::uint64_t templates = 0;
  std::uint64_t malformed = 0;
  std::uint64_t duplicate_params = 0;

  ojson to_json() const {
    ojson j;
    j["pages_encountered"] = dump.pages_encountered;
    j["pages_skipped"] = dump.pages_skipped;
    j["pages_filtered_out"] = filtered_out;
    j["pages_processed"] = pages_processed;
    j["templates"] = templates;
    j["malformed_total"] = malformed;
    j["duplicate_params_total"] = duplicate_params;
    j["bytes"] = dump.bytes_consumed;
    return j;
  }
};

using WorkerFn = std::function<void(std::size_t worker, const WikiPage&, ExtractionResult&)>;
using BatchFn = std::function<void(const std::vector<WikiPage>&, std::vector<ExtractionResult>&)>;

/// Extracts pages in batches. Within a batch, worker w handles a contiguous
/// slice; `after_batch` sees pages and results in document order.
ExtractionSummary run_extraction(std::istream& dump, const NamespaceSet& namespaces, std::size_t jobs,
                                 const WorkerFn& in_worker, const BatchFn& after_batch) {
  auto reader = open_dump(dump);
  auto pages = filter_namespaces(reader, namespaces);
  ExtractionSummary summary;
  std::vector<WikiPage> batch;
  std::vector<ExtractionResult> results;

  auto flush = [&] {
    results.assign(batch.size(), {});
    auto work = [&](std::size_t w, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        results[i] = extract_citations(batch[i]);
        if (in_worker) in_worker(w, batch[i], results[i]);
      }
    };
    const std::size_t workers = std::min(jobs, batch.size());
    if (workers <= 1) {
      work(0, 0, batch.size());
    } else {
      std::vector<std::jthread> threads;
      const std::size_t per = (batch.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * per, hi = std::min(batch.size(), lo + per);
        if (lo < hi) threads.emplace_back(work, w, lo, hi);
      }
    }
    for (const auto& r : results) {
      summary.templates += r.records.size();
      summary.malformed += r.malformed_templates;
      summary.duplicate_params += r.duplicate_params;
    }
    summary.pages_processed += batch.size();
    if (after_batch) after_batch(batch, results);
    batch.clear();
  };

  while (auto page = pages.next()) {
    batch.push_back(std::move(*page));
    if (batch.size() == kBatchPages) flush();
  }
  if (!batch.empty()) flush();
  summary.dump = reader.stats();
  summary.filtered_out = pages.filtered_out();
  return summary;
}

/// Tally a dump with one partial table per worker, merged at the end.
CountTable count_dump(std::istream& dump, const RunConfig& cfg, const JournalRegistry& registry,
                      std::size_t unknown_cap, ExtractionSummary& summary) {
  std::vector<CountTable> partial(std::max<std::size_t>(cfg.jobs, 1), empty_table(registry, unknown_cap));
  summary = run_extraction(
      dump, cfg.namespaces, cfg.jobs,
      [&](std::size_t w, const WikiPage&, ExtractionResult& r) { add_extraction(partial[w], r, registry); }, {});
  CountTable total = empty_table(registry, unknown_cap);
  for (const auto& t : partial) total = merge(total, t);
  return total;
}

std::string near_miss_csv(const std::vector<NearMiss>& misses) {
  std::string out = "unknown,count,candidate,shared_prefix\n";
  for (const auto& m : misses) {
    out += csv_field(m.unknown) + "," + std::to_string(m.count) + "," + csv_field(m.candidate) + "," +
           std::to_string(m.shared_prefix) + "\n";
  }
  return out;
}

std::string join_audit_csv(const JoinResult& j) {
  std::string out = "side,journal\n";
  for (const auto& n : j.only_in_counts) out += "wikipedia_only," + csv_field(n) + "\n";
  for (const auto& n : j.only_in_jcr) out += "jcr_only," + csv_field(n) + "\n";
  for (const auto& n : j.excluded_jcr) out += "jcr_excluded," + csv_field(n) + "\n";
  return out;
}

JournalRegistry load_registry(const std::string& path) {
  if (path.empty()) throw UsageError("--registry is required");
  return JournalRegistry::load(path);
}

ojson base_config(const RunConfig& cfg) {
  ojson c;
  if (!cfg.dump_path.empty()) c["dump"] = cfg.dump_path;
  if (!cfg.registry_path.empty()) c["registry"] = cfg.registry_path;
  if (cfg.jcr_path) c["jcr"] = *cfg.jcr_path;
  c["namespaces"] = namespaces_json(cfg.namespaces);
  c["out"] = cfg.output_dir.string();
  return c;
}

// ---------------------------------------------------------------- commands

int cmd_extract(const RunConfig& cfg, std::ostream& out) {
  if (cfg.dump_path.empty()) throw UsageError("--dump is required");
  DumpInput dump(cfg.dump_path);
  OutputDir dir(cfg.output_dir);
  auto jsonl = dir.open("citations.jsonl");
  auto summary = run_extraction(dump.stream(), cfg.namespaces, cfg.jobs, {},
                                [&](const std::vector<WikiPage>&, std::vector<ExtractionResult>& results) {
                                  for (const auto& r : results) {
                                    for (const auto& rec : r.records) jsonl << to_json_line(rec) << '\n';
                                  }
                                });
  jsonl.close();
  if (!jsonl) throw InputError("failed writing citations.jsonl");
  dir.write("extract_summary.json", summary.to_json().dump(2) + "\n");
  auto config = base_config(cfg);
  config["jobs"] = cfg.jobs;
  dir.write_manifest("extract", config, ojson{{"dump", dump.describe()}});
  out << "pages " << summary.pages_processed << ", templates " << summary.templates << ", malformed "
      << summary.malformed << ", skipped " << summary.dump.pages_skipped << "\n";
  return kExitOk;
}

int cmd_count(const RunConfig& cfg, const std::string& citations_path, std::size_t unknown_cap, std::ostream& out) {
  if (cfg.dump_path.empty() == citations_path.empty()) throw UsageError("count needs exactly one of --dump or --citations");
  const auto registry = load_registry(cfg.registry_path);
  OutputDir dir(cfg.output_dir);
  ojson inputs;
  inputs["registry"] = describe_file(cfg.registry_path);
  CountTable table;
  if (!cfg.dump_path.empty()) {
    DumpInput dump(cfg.dump_path);
    ExtractionSummary summary;
    table = count_dump(dump.stream(), cfg, registry, unknown_cap, summary);
    dir.write("extract_summary.json", summary.to_json().dump(2) + "\n");
    inputs["dump"] = dump.describe();
  } else {
    std::ifstream in(citations_path, std::ios::binary);
    if (!in) throw InputError("cannot read citations " + citations_path);
    table = empty_table(registry, unknown_cap);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        add_record(table, from_json_line(line), registry);
      } catch (const std::invalid_argument& e) {
        throw InputError(citations_path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    // The extraction summary next to the records carries the corpus tallies.
    const auto summary_path = fs::path(citations_path).parent_path() / "extract_summary.json";
    if (fs::exists(summary_path)) {
      const auto j = nlohmann::json::parse(read_file(summary_path));
      table.malformed_total = j.value("malformed_total", std::uint64_t{0});
      table.duplicate_params_total = j.value("duplicate_params_total", std::uint64_t{0});
    }
    inputs["citations"] = describe_file(citations_path);
  }
  dir.write("counts.csv", to_csv(table));
  dir.write("counts.json", to_json(table));
  dir.write("near_misses.csv", near_miss_csv(near_misses(table.unknown, registry)));
  auto config = base_config(cfg);
  if (!citations_path.empty()) config["citations"] = citations_path;
  config["jobs"] = cfg.jobs;
  config["unknown_cap"] = unknown_cap;
  dir.write_manifest("count", config, inputs);
  out << "templates " << table.template_total << ", journals " << table.counts.size() << ", excluded "
      << table.excluded_count << ", unknown " << table.unknown.size() << "\n";
  return kExitOk;
}

int cmd_correlate(const RunConfig& cfg, const std::string& counts_path, std::size_t overlap_k, std::size_t overlap_m,
                  std::ostream& out) {
  if (!cfg.jcr_path) throw UsageError("--jcr is required");
  if (cfg.dump_path.empty() == counts_path.empty()) throw UsageError("correlate needs exactly one of --dump or --counts");
  const auto registry = load_registry(cfg.registry_path);
  ojson inputs;
  inputs["registry"] = describe_file(cfg.registry_path);

  CountTable table;
  if (!counts_path.empty()) {
    try {
      table = count_table_from_json(read_file(counts_path));
    } catch (const std::invalid_argument& e) {
      throw InputError(counts_path + ": " + e.what());
    }
    if (table.registry_fingerprint != registry.fingerprint()) {
      throw InputError(counts_path + " was counted with a different registry");
    }
    inputs["counts"] = describe_file(counts_path);
  } else {
    DumpInput dump(cfg.dump_path);
    ExtractionSummary summary;
    table = count_dump(dump.stream(), cfg, registry, kDefaultUnknownCap, summary);
    inputs["dump"] = dump.describe();
  }

  std::ifstream jcr_in(*cfg.jcr_path, std::ios::binary);
  if (!jcr_in) throw InputError("cannot read jcr " + *cfg.jcr_path);
  const auto jcr = read_jcr_csv(jcr_in);
  inputs["jcr"] = describe_file(*cfg.jcr_path);

  const auto joined = join(table, jcr, registry);
  if (joined.rows.size() < 2) {
    throw InsufficientDataError("only " + std::to_string(joined.rows.size()) +
                                " journal(s) appear in both the counts and the report; need at least 2");
  }
  const auto sweep = parse_sweep(cfg.sweep_range, joined.rows.size());
  if (sweep.back() > joined.rows.size()) {
    throw InsufficientDataError("sweep reaches N=" + std::to_string(sweep.back()) + " but only " +
                                std::to_string(joined.rows.size()) + " journals joined");
  }

  OutputDir dir(cfg.output_dir);
  std::vector<CorrelationResult> results;
  for (auto series : kAllSeries) {
    auto part = topn_sweep(joined.rows, series, sweep);
    results.insert(results.end(), part.begin(), part.end());
  }
  dir.write("correlations.csv", correlations_csv(results));
  dir.write("scatter.csv", scatter_csv(scatter_export(joined.rows, cfg.label_budget)));
  dir.write("join_audit.csv", join_audit_csv(joined));

  ojson overlap;
  overlap["k"] = overlap_k;
  overlap["m"] = overlap_m;
  overlap["journals"] = joined.rows.size();
  if (overlap_k <= overlap_m && overlap_m <= joined.rows.size()) {
    overlap["overlap"] = combined_top_overlap(joined.rows, overlap_k, overlap_m);
  } else {
    overlap["overlap"] = nullptr;
    overlap["skipped"] = "needs k <= m <= number of joined journals";
  }
  dir.write("overlap.json", overlap.dump(2) + "\n");

  auto config = base_config(cfg);
  if (!counts_path.empty()) config["counts"] = counts_path;
  config["sweep"] = sweep;
  config["labels"] = cfg.label_budget;
  config["overlap"] = {overlap_k, overlap_m};
  dir.write_manifest("correlate", config, inputs);
  out << "joined " << joined.rows.size() << " journals, " << results.size() << " correlation rows\n";
  return kExitOk;
}

int cmd_growth(const RunConfig& cfg, const std::vector<std::string>& tables, std::ostream& out) {
  if (tables.empty()) throw UsageError("growth needs at least one --table DATE=PATH");
  std::vector<DatedTable> dated;
  ojson inputs = ojson::array();
  for (const auto& spec : tables) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--table expects DATE=PATH, got '" + spec + "'");
    const auto path = spec.substr(eq + 1);
    DatedTable d;
    d.date = spec.substr(0, eq);
    try {
      d.table = count_table_from_json(read_file(path));
    } catch (const std::invalid_argument& e) {
      throw InputError(path + ": " + e.what());
    }
    dated.push_back(std::move(d));
    auto desc = describe_file(path);
    desc["date"] = spec.substr(0, eq);
    inputs.push_back(std::move(desc));
  }
  std::vector<GrowthPoint> series;
  try {
    series = growth_report(dated);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  OutputDir dir(cfg.output_dir);
  std::string csv = "date,template_total\n";
  for (const auto& p : series) csv += p.date + "," + std::to_string(p.template_total) + "\n";
  dir.write("growth.csv", csv);
  dir.write_manifest("growth", ojson{{"out", cfg.output_dir.string()}}, ojson{{"tables", inputs}});
  out << csv;
  return kExitOk;
}

int cmd_gen_fixture(const RunConfig& cfg, const FixtureOptions& opt, std::ostream& out) {
  const auto fx = make_fixture(opt);
  OutputDir dir(cfg.output_dir);
  {
    auto dump = dir.open("dump.xml");
    write_dump(dump, fx.pages, opt.with_ns);
    if (!dump) throw InputError("failed writing dump.xml");
  }
  ojson truth;
  truth["pages"] = fx.truth.pages;
  truth["templates"] = fx.truth.templates;
  truth["malformed"] = fx.truth.malformed;
  truth["decoys"] = fx.truth.decoys;
  truth["nested"] = fx.truth.nested;
  auto journals = ojson::object();
  for (const auto& [raw, c] : fx.truth.journal_raw_counts) journals[raw] = c;
  truth["journal_raw_counts"] = journals;
  dir.write("fixture_truth.json", truth.dump(2) + "\n");
  ojson config{{"out", cfg.output_dir.string()},  {"pages", opt.pages},
               {"planted", opt.planted},          {"nested", opt.nested},
               {"without_journal", opt.without_journal}, {"comment_decoys", opt.comment_decoys},
               {"nowiki_decoys", opt.nowiki_decoys}, {"malformed", opt.malformed},
               {"seed", opt.seed},                {"with_ns", opt.with_ns}};
  dir.write_manifest("gen-fixture", config, ojson::object());
  out << "wrote " << fx.truth.pages << " pages with " << fx.truth.templates << " citations\n";
  return kExitOk;
}

}  // namespace

std::vector<std::size_t> parse_sweep(const std::string& spec, std::size_t max_n) {
  std::vector<std::size_t> out;
  if (spec.empty() || spec == "all") {
    for (std::size_t n = 2; n <= max_n; ++n) out.push_back(n);
    if (out.empty()) throw UsageError("sweep is empty: fewer than 2 journals");
    return out;
  }
  for (auto item : split(spec, ',')) {
    if (item.empty()) throw UsageError("empty item in sweep '" + spec + "'");
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_size(item, "sweep entry"));
      continue;
    }
    auto rest = item.substr(dots + 2);
    std::size_t step = 1;
    if (auto colon = rest.find(':'); colon != std::string_view::npos) {
      step = parse_size(rest.substr(colon + 1), "sweep step");
      rest = rest.substr(0, colon);
      if (step == 0) throw UsageError("sweep step must be positive");
    }
    const auto lo = parse_size(item.substr(0, dots), "sweep start");
    const auto hi = parse_size(rest, "sweep end");
    if (hi < lo) throw UsageError("sweep range " + std::string(item) + " is decreasing");
    for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 2) throw UsageError("sweep entries must be >= 2");
    if (i > 0 && out[i] <= out[i - 1]) throw UsageError("sweep entries must be strictly increasing");
  }
  return out;
}

NamespaceSet parse_namespaces(const std::string& spec) {
  if (spec == "all") return std::nullopt;
  std::set<int> ids;
  for (auto item : split(spec, ',')) {
    if (item.empty()) continue;
    int v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v < 0) {
      throw UsageError("bad namespace id '" + std::string(item) + "'");
    }
    ids.insert(v);
  }
  return ids;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extract cite journal citations from MediaWiki dumps and compare them with journal statistics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string namespaces = "0";
  std::string out_dir;
  std::string citations_path, counts_path;
  std::size_t unknown_cap = kDefaultUnknownCap;
  std::string overlap = "10,19";
  std::vector<std::string> tables;
  FixtureOptions fixture;
  bool no_ns = false;

  auto add_common = [&](CLI::App* sub, bool dump_required) {
    auto* dump = sub->add_option("--dump", cfg.dump_path, "MediaWiki XML export, '-' for standard input");
    if (dump_required) dump->required();
    sub->add_option("--namespaces", namespaces, "Comma-separated namespace ids or 'all'")->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "Worker threads for extraction")->capture_default_str()->check(
        CLI::PositiveNumber);
  };

  auto* extract = app.add_subcommand("extract", "Write cite journal records as JSON lines");
  add_common(extract, true);
  extract->add_option("--out", out_dir, "Output directory")->required();

  auto* count = app.add_subcommand("count", "Count citations per canonical journal");
  add_common(count, false);
  count->add_option("--citations", citations_path, "citations.jsonl from a previous extract run");
  count->add_option("--registry", cfg.registry_path, "Journal registry file")->required();
  count->add_option("--unknown-cap", unknown_cap, "Distinct unknown journal strings kept")->capture_default_str();
  count->add_option("--out", out_dir, "Output directory")->required();

  auto* correlate = app.add_subcommand("correlate", "Kendall rank correlation against journal statistics");
  add_common(correlate, false);
  correlate->add_option("--counts", counts_path, "counts.json from a previous count run");
  correlate->add_option("--registry", cfg.registry_path, "Journal registry file")->required();
  std::string jcr;
  correlate->add_option("--jcr", jcr, "CSV: journal,total_citations,impact_factor,articles");
  correlate->add_option("--sweep", cfg.sweep_range, "Top-N values, e.g. 2..100 or 2..200:5 or 10,20,40");
  correlate->add_option("--labels", cfg.label_budget, "Labeled journals in scatter.csv")->capture_default_str();
  correlate->add_option("--overlap", overlap, "k,m for the combined-measure overlap report")->capture_default_str();
  correlate->add_option("--out", out_dir, "Output directory")->required();

  auto* growth = app.add_subcommand("growth", "Template totals over dated count tables");
  growth->add_option("--table", tables, "DATE=counts.json (repeatable, dates increasing)")->required();
  growth->add_option("--out", out_dir, "Output directory")->required();

  auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic dump with known planted citations");
  gen->add_option("--pages", fixture.pages)->capture_default_str();
  gen->add_option("--planted", fixture.planted)->capture_default_str();
  gen->add_option("--nested", fixture.nested)->capture_default_str();
  gen->add_option("--without-journal", fixture.without_journal)->capture_default_str();
  gen->add_option("--comment-decoys", fixture.comment_decoys)->capture_default_str();
  gen->add_option("--nowiki-decoys", fixture.nowiki_decoys)->capture_default_str();
  gen->add_option("--malformed", fixture.malformed)->capture_default_str();
  gen->add_option("--seed", fixture.seed)->capture_default_str();
  gen->add_flag("--no-ns", no_ns, "Omit <ns> elements like 2007-era dumps");
  gen->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    cfg.output_dir = out_dir;
    cfg.namespaces = parse_namespaces(namespaces);
    if (!jcr.empty()) cfg.jcr_path = jcr;
    if (extract->parsed()) return cmd_extract(cfg, out);
    if (count->parsed()) return cmd_count(cfg, citations_path, unknown_cap, out);
    if (correlate->parsed()) {
      auto parts = split(overlap, ',');
      if (parts.size() != 2) throw UsageError("--overlap expects k,m");
      return cmd_correlate(cfg, counts_path, parse_size(parts[0], "overlap k"), parse_size(parts[1], "overlap m"),
                           out);
    }
    if (growth->parsed()) return cmd_growth(cfg, tables, out);
    if (gen->parsed()) {
      fixture.with_ns = !no_ns;
      return cmd_gen_fixture(cfg, fixture, out);
    }
  } catch (const UsageError& e) {
    err << "wikicite: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InsufficientDataError& e) {
    err << "wikicite: insufficient data: " << e.what() << "\n";
    return kExitInsufficientData;
  } catch (const DumpParseError& e) {
    err << "wikicite: malformed dump: " << e.what() << "\n";
    return kExitInputFormat;
  } catch (const std::exception& e) {
    err << "wikicite: " << e.what() << "\n";
    return kExitInputFormat;
  }
  return kExitUsage;
}

}  // namespace wikicite
