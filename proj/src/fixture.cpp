#include "wikicite/fixture.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace wikicite {

namespace {

constexpr std::string_view kFiller[] = {
    "Banksia is a genus of around 170 species in the plant family Proteaceae. ",
    "The species was first described in 1810 and is endemic to the south west. ",
    "Observations with the telescope revealed a faint companion [[star]]. ",
    "Clinical trials reported a modest effect on mortality.\n\n",
    "== History ==\nEarly work on the topic was published in several journals. ",
    "The result was later confirmed by an independent group. ",
    "See also [[List of journals|the list of journals]] for context. ",
    "'''Icarus''' is also the name of a figure in Greek mythology. ",
};

constexpr std::string_view kNameForms[] = {"cite journal", "Cite journal", "cite_journal", " Cite journal ",
                                           "Cite_journal\n"};

std::string pick_filler(std::mt19937_64& rng, int sentences) {
  std::uniform_int_distribution<std::size_t> dist(0, std::size(kFiller) - 1);
  std::string out;
  for (int i = 0; i < sentences; ++i) out += kFiller[dist(rng)];
  return out;
}

std::string cite_template(std::mt19937_64& rng, std::size_t serial, const std::string* journal, bool nested) {
  std::uniform_int_distribution<std::size_t> name_pick(0, std::size(kNameForms) - 1);
  std::bernoulli_distribution coin(0.5);
  const std::string sep = coin(rng) ? " | " : "\n| ";
  std::string t = "{{";
  t += kNameForms[name_pick(rng)];
  if (nested) {
    t += sep + "author = {{aut|Smith, J." + std::to_string(serial) + "}}";
  } else {
    t += sep + "last=Author" + std::to_string(serial) + sep + "first=A.";
  }
  t += sep + "title = [[Topic " + std::to_string(serial % 17) + "|A study of topic " + std::to_string(serial) + "]]";
  if (journal != nullptr) t += sep + "journal = " + *journal;
  t += sep + "volume=" + std::to_string(1 + serial % 400);
  t += sep + "pages=" + std::to_string(serial % 90) + "-" + std::to_string(serial % 90 + 9);
  t += sep + "year=" + std::to_string(1950 + serial % 57);
  if (coin(rng)) t += sep + "doi=10.1000/fixture." + std::to_string(serial);
  t += "}}";
  if (coin(rng)) t = "<ref name=\"r" + std::to_string(serial) + "\">" + t + "</ref>";
  return t;
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size() + text.size() / 16);
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string dump_header() {
  return "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" version=\"0.10\" xml:lang=\"en\">\n"
         "  <siteinfo>\n"
         "    <sitename>Wikipedia</sitename>\n"
         "    <base>https://en.wikipedia.org/wiki/Main_Page</base>\n"
         "    <generator>MediaWiki 1.10alpha</generator>\n"
         "    <case>first-letter</case>\n"
         "    <namespaces>\n"
         "      <namespace key=\"0\" />\n"
         "      <namespace key=\"1\">Talk</namespace>\n"
         "    </namespaces>\n"
         "  </siteinfo>\n";
}

std::string dump_footer() { return "</mediawiki>\n"; }

std::string page_xml(const WikiPage& page, bool with_ns) {
  std::string out = "  <page>\n    <title>" + xml_escape(page.title) + "</title>\n";
  if (with_ns) out += "    <ns>" + std::to_string(page.ns) + "</ns>\n";
  out += "    <revision>\n";
  if (page.revision_timestamp) out += "      <timestamp>" + xml_escape(*page.revision_timestamp) + "</timestamp>\n";
  out += "      <text xml:space=\"preserve\">" + xml_escape(page.text) + "</text>\n    </revision>\n  </page>\n";
  return out;
}

void write_dump(std::ostream& out, const std::vector<WikiPage>& pages, bool with_ns) {
  out << dump_header();
  for (const auto& p : pages) out << page_xml(p, with_ns);
  out << dump_footer();
}

Fixture make_fixture(const FixtureOptions& opt) {
  if (opt.pages == 0 && (opt.planted + opt.comment_decoys + opt.nowiki_decoys + opt.malformed) > 0) {
    throw std::invalid_argument("fixture: content requested but pages = 0");
  }
  if (opt.malformed > opt.pages) throw std::invalid_argument("fixture: more malformed templates than pages");
  if (opt.nested + opt.without_journal > opt.planted) {
    throw std::invalid_argument("fixture: nested + without_journal exceeds planted");
  }
  if (opt.journals.empty() && opt.planted > opt.without_journal) {
    throw std::invalid_argument("fixture: no journal strings to plant");
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> page_pick(0, opt.pages == 0 ? 0 : opt.pages - 1);
  std::uniform_int_distribution<std::size_t> journal_pick(0, opt.journals.empty() ? 0 : opt.journals.size() - 1);

  Fixture fx;
  fx.truth.pages = opt.pages;
  fx.truth.templates_per_page.assign(opt.pages, 0);
  std::vector<std::vector<std::string>> items(opt.pages);

  for (std::size_t i = 0; i < opt.planted; ++i) {
    const std::size_t p = page_pick(rng);
    const bool nested = i < opt.nested;
    const bool no_journal = i >= opt.nested && i < opt.nested + opt.without_journal;
    const std::string* journal = nullptr;
    if (!no_journal) {
      journal = &opt.journals[journal_pick(rng)];
      ++fx.truth.journal_raw_counts[*journal];
    }
    items[p].push_back(cite_template(rng, i, journal, nested));
    ++fx.truth.templates_per_page[p];
  }
  fx.truth.templates = opt.planted;
  fx.truth.nested = opt.nested;

  for (std::size_t i = 0; i < opt.comment_decoys; ++i) {
    items[page_pick(rng)].push_back("<!-- {{cite journal |journal=Decoy Comment Journal |title=Hidden " +
                                    std::to_string(i) + "}} -->");
  }
  for (std::size_t i = 0; i < opt.nowiki_decoys; ++i) {
    items[page_pick(rng)].push_back("<nowiki>{{cite journal|journal=Decoy Nowiki Journal|title=Literal " +
                                    std::to_string(i) + "}}</nowiki>");
  }
  fx.truth.decoys = opt.comment_decoys + opt.nowiki_decoys;

  constexpr std::string_view kOther[] = {"{{Infobox journal|title=Example|discipline=Botany}}",
                                         "{{cite book|title=A Book|publisher=Press}}", "{{fact|date=March 2007}}",
                                         "{{Taxobox|regnum=[[Plantae]]|genus={{lang|la|Banksia}}}}",
                                         "{{{1|default}}}"};
  std::uniform_int_distribution<std::size_t> other_pick(0, std::size(kOther) - 1);
  for (std::size_t i = 0; i < opt.other_templates && opt.pages > 0; ++i) {
    items[page_pick(rng)].emplace_back(kOther[other_pick(rng)]);
  }

  std::vector<std::size_t> order(opt.pages);
  for (std::size_t i = 0; i < opt.pages; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::set<std::size_t> dangling(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(opt.malformed));
  fx.truth.malformed = opt.malformed;

  std::uniform_int_distribution<int> sentences(1, 3);
  fx.pages.reserve(opt.pages);
  for (std::size_t p = 0; p < opt.pages; ++p) {
    std::shuffle(items[p].begin(), items[p].end(), rng);
    WikiPage page;
    page.title = "Fixture page " + std::to_string(p);
    page.ns = 0;
    page.revision_timestamp = "2007-04-02T00:00:00Z";
    page.text = pick_filler(rng, sentences(rng));
    for (const auto& item : items[p]) {
      page.text += item;
      page.text += pick_filler(rng, sentences(rng));
    }
    if (dangling.contains(p)) {
      page.text += "{{cite journal|journal=Broken Journal|title=Unfinished citation " + std::to_string(p) + "\n";
    }
    fx.pages.push_back(std::move(page));
  }
  return fx;
}

SyntheticDumpBuf::SyntheticDumpBuf(std::uint64_t target_bytes, std::size_t page_text_bytes,
                                   std::size_t templates_per_page)
    : target_(target_bytes) {
  std::mt19937_64 rng(7);
  std::string text;
  for (std::size_t i = 0; i < templates_per_page; ++i) {
    text += pick_filler(rng, 2);
    std::string journal = (i % 2 == 0) ? "Nature" : "Science";
    text += cite_template(rng, i, &journal, i % 5 == 0);
  }
  while (text.size() < page_text_bytes) text += pick_filler(rng, 1);
  body_ = xml_escape(text);
  page_bytes_ = 200 + body_.size();
}

void SyntheticDumpBuf::fill() {
  buffer_.clear();
  if (stage_ == 0) {
    buffer_ = dump_header();
    stage_ = 1;
  }
  while (stage_ == 1 && buffer_.size() < (1u << 16)) {
    if (produced_ + buffer_.size() >= target_) {
      stage_ = 2;
      break;
    }
    ++pages_;
    buffer_ += "  <page>\n    <title>Synthetic page ";
    buffer_ += std::to_string(pages_);
    buffer_ += "</title>\n    <ns>0</ns>\n    <revision>\n      <text xml:space=\"preserve\">";
    buffer_ += body_;
    buffer_ += "</text>\n    </revision>\n  </page>\n";
  }
  if (stage_ == 2 && buffer_.size() < (1u << 16)) {
    buffer_ += dump_footer();
    stage_ = 3;
  }
  produced_ += buffer_.size();
}

SyntheticDumpBuf::int_type SyntheticDumpBuf::underflow() {
  if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
  if (stage_ == 3) return traits_type::eof();
  fill();
  if (buffer_.empty()) return traits_type::eof();
  setg(buffer_.data(), buffer_.data(), buffer_.data() + buffer_.size());
  return traits_type::to_int_type(*gptr());
}

}  // namespace wikicite
