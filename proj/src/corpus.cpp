#include "stylos/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_set>

#include "stylos/error.hpp"
#include "stylos/sampling.hpp"
#include "stylos/text.hpp"

namespace stylos::corpus {

namespace fs = std::filesystem;

std::string_view to_string(Subcorpus s) {
  return s == Subcorpus::Epistolary ? "Epistolary" : "Literary";
}

Subcorpus parse_subcorpus(std::string_view s) {
  const auto lower = text::ascii_lower(s);
  if (lower == "epistolary" || lower == "epi") return Subcorpus::Epistolary;
  if (lower == "literary" || lower == "lit") return Subcorpus::Literary;
  throw Error(ErrorCode::ParseError, "unknown subcorpus '" + std::string(s) + "'");
}

std::string_view to_string(PairLabel l) {
  return l == PairLabel::SameAuthor ? "SameAuthor" : "DifferentAuthor";
}

std::vector<std::string> default_marker_patterns() {
  return {R"(\{[^{}]*\})", R"(<[^<>]*>)"};
}

std::string clean_text(std::string_view raw, const std::vector<std::string>& marker_patterns) {
  std::vector<std::regex> compiled;
  compiled.reserve(marker_patterns.size());
  for (const auto& p : marker_patterns) {
    try {
      compiled.emplace_back(p, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::InvalidPattern, "'" + p + "': " + e.what());
    }
  }
  std::string s(raw);
  // Repeat until nothing matches so nested markers peel off from the inside.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& re : compiled) {
      std::string next = std::regex_replace(s, re, " ");
      if (next != s) {
        s = std::move(next);
        changed = true;
      }
    }
  }
  return text::collapse_whitespace(s);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) f = text::collapse_whitespace(f);
  return fields;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<Document> load_corpus(const fs::path& corpus_dir, const fs::path& manifest,
                                  const std::vector<std::string>& marker_patterns) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::MissingFile, "manifest " + manifest.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyManifest, manifest.string());
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "file" || header[1] != "author" ||
      header[2] != "subcorpus") {
    throw Error(ErrorCode::ParseError, "manifest header must be 'file,author,subcorpus'");
  }

  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::collapse_whitespace(line).empty()) continue;
    const auto row = split_csv_line(line);
    if (row.size() < 3) {
      throw Error(ErrorCode::ParseError,
                  "manifest line " + std::to_string(line_no) + ": expected 3 fields");
    }
    if (row[1].empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "manifest line " + std::to_string(line_no) + ": empty author");
    }
    if (!seen.insert(row[0]).second) throw Error(ErrorCode::DuplicateId, row[0]);
    const auto path = corpus_dir / row[0];
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::MissingFile, path.string());

    Document doc;
    doc.id = row[0];
    doc.author = row[1];
    doc.subcorpus = parse_subcorpus(row[2]);
    doc.raw_text = read_file(path);
    doc.clean_text = clean_text(doc.raw_text, marker_patterns);
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw Error(ErrorCode::EmptyManifest, manifest.string());
  return docs;
}

std::vector<std::string> split_sentences(std::string_view txt) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto s = text::collapse_whitespace(txt.substr(start, end - start));
    if (!s.empty()) sentences.push_back(std::move(s));
    start = end;
  };
  for (std::size_t i = 0; i < txt.size(); ++i) {
    const char c = txt[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 == txt.size() || text::is_space(static_cast<unsigned char>(txt[i + 1]))) {
      flush(i + 1);
    }
  }
  if (start < txt.size()) flush(txt.size());
  return sentences;
}

std::size_t distinct_word_count(std::string_view sentence) {
  const auto tokens = text::word_tokens(sentence);
  return std::set<std::string>(tokens.begin(), tokens.end()).size();
}

std::vector<Segment> segment(const Document& doc, const SegmentOptions& opts) {
  const auto raw_sentences = split_sentences(doc.clean_text);
  if (raw_sentences.empty()) throw Error(ErrorCode::EmptyDocument, doc.id);

  // Short sentences are carried forward into the next one; a short tail is
  // attached to the previous sentence.
  std::vector<std::string> sentences;
  std::string pending;
  for (const auto& s : raw_sentences) {
    std::string cur = pending.empty() ? s : pending + " " + s;
    if (distinct_word_count(cur) >= static_cast<std::size_t>(opts.min_distinct)) {
      sentences.push_back(std::move(cur));
      pending.clear();
    } else {
      pending = std::move(cur);
    }
  }
  if (!pending.empty()) {
    if (sentences.empty()) {
      sentences.push_back(std::move(pending));
    } else {
      sentences.back() += " " + pending;
    }
  }

  std::vector<std::vector<std::string>> groups;
  const auto group = static_cast<std::size_t>(opts.group_size);
  for (std::size_t i = 0; i < sentences.size(); i += group) {
    const auto end = std::min(sentences.size(), i + group);
    std::vector<std::string> g(sentences.begin() + static_cast<std::ptrdiff_t>(i),
                               sentences.begin() + static_cast<std::ptrdiff_t>(end));
    if (!groups.empty() && g.size() < static_cast<std::size_t>(opts.min_remainder)) {
      groups.back().insert(groups.back().end(), g.begin(), g.end());
    } else {
      groups.push_back(std::move(g));
    }
  }

  std::vector<Segment> out;
  out.reserve(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    Segment seg;
    char suffix[24];
    std::snprintf(suffix, sizeof suffix, "#%04zu", k);
    seg.id = doc.id + suffix;
    seg.doc_id = doc.id;
    seg.author = doc.author;
    seg.subcorpus = doc.subcorpus;
    seg.sentences = std::move(groups[k]);
    for (const auto& s : seg.sentences) {
      if (!seg.text.empty()) seg.text.push_back(' ');
      seg.text += s;
    }
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<Segment> segment_all(const std::vector<Document>& docs, const SegmentOptions& opts) {
  std::vector<Segment> all;
  for (const auto& d : docs) {
    auto segs = segment(d, opts);
    all.insert(all.end(), std::make_move_iterator(segs.begin()),
               std::make_move_iterator(segs.end()));
  }
  return all;
}

SplitCorpus stratified_split(const std::vector<Segment>& segments, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
  }
  std::map<std::string, int> author_ids;
  std::map<std::string, int> counts;
  for (const auto& s : segments) ++counts[s.author];
  for (const auto& [author, n] : counts) {
    if (n < 2) {
      throw Error(ErrorCode::TooFewSegments,
                  "author '" + author + "' has " + std::to_string(n) + " segment(s)");
    }
    author_ids.emplace(author, static_cast<int>(author_ids.size()));
  }
  std::vector<int> labels;
  labels.reserve(segments.size());
  for (const auto& s : segments) labels.push_back(author_ids.at(s.author));

  const auto idx = stratified_holdout(labels, test_fraction, seed);
  SplitCorpus split;
  split.seed = seed;
  for (auto i : idx.train) split.train.push_back(segments[i]);
  for (auto i : idx.test) split.test.push_back(segments[i]);
  return split;
}

namespace {

// Draws distinct indices from [0, universe) one at a time, uniformly among
// the ones not yet drawn. Rejection sampling while the pool is sparse, an
// explicit shuffled remainder once more than half has been used.
class UniqueIndexSampler {
 public:
  explicit UniqueIndexSampler(std::uint64_t universe) : universe_(universe) {}

  bool exhausted() const { return drawn_ == universe_; }

  std::uint64_t draw(std::mt19937_64& rng) {
    if (remaining_.empty() && drawn_ * 2 < universe_) {
      std::uniform_int_distribution<std::uint64_t> pick(0, universe_ - 1);
      for (;;) {
        auto v = pick(rng);
        if (used_.insert(v).second) {
          ++drawn_;
          return v;
        }
      }
    }
    if (remaining_.empty()) {
      for (std::uint64_t v = 0; v < universe_; ++v) {
        if (!used_.count(v)) remaining_.push_back(v);
      }
      used_.clear();
      seeded_shuffle(remaining_, rng);
    }
    auto v = remaining_.back();
    remaining_.pop_back();
    ++drawn_;
    return v;
  }

 private:
  std::uint64_t universe_;
  std::uint64_t drawn_ = 0;
  std::unordered_set<std::uint64_t> used_;
  std::vector<std::uint64_t> remaining_;
};

// Maps r in [0, s(s-1)/2) to the r-th pair (i < j) in row-major order.
std::pair<std::size_t, std::size_t> unrank_pair(std::uint64_t r, std::size_t s) {
  std::size_t i = 0;
  std::uint64_t row = s - 1;
  while (r >= row) {
    r -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + static_cast<std::size_t>(r)};
}

}  // namespace

PairSet generate_sav_pairs(const std::vector<Segment>& segments, const PairOptions& opts,
                           std::uint64_t seed) {
  std::map<std::string, std::vector<const Segment*>> by_author;
  for (const auto& s : segments) by_author[s.author].push_back(&s);

  std::vector<std::string> authors;
  for (const auto& [a, segs] : by_author) {
    if (segs.size() < 2) {
      throw Error(ErrorCode::TooFewSegments, "author '" + a + "' has fewer than 2 segments");
    }
    authors.push_back(a);
  }
  if (opts.m_diff_total > 0 && authors.size() < 2) {
    throw Error(ErrorCode::TooFewSegments, "DifferentAuthor pairs need at least 2 authors");
  }

  PairSet out;
  out.n_same_per_author = opts.n_same_per_author;
  out.m_diff_total = opts.m_diff_total;
  out.seed = seed;

  for (std::size_t a = 0; a < authors.size(); ++a) {
    const auto& segs = by_author[authors[a]];
    const std::uint64_t s = segs.size();
    const std::uint64_t available = s * (s - 1) / 2;
    auto want = static_cast<std::uint64_t>(std::max(opts.n_same_per_author, 0));
    if (want > available) {
      if (opts.strict) {
        throw Error(ErrorCode::InsufficientDistinctPairs,
                    "author '" + authors[a] + "': requested " + std::to_string(want) +
                        " SameAuthor pairs, only " + std::to_string(available) + " exist");
      }
      want = available;
      out.truncated = true;
    }
    auto rng = make_rng(seed, 1 + a);
    UniqueIndexSampler sampler(available);
    for (std::uint64_t q = 0; q < want; ++q) {
      auto [i, j] = unrank_pair(sampler.draw(rng), segs.size());
      out.pairs.push_back({segs[i]->id, segs[j]->id, PairLabel::SameAuthor});
    }
  }

  if (opts.m_diff_total > 0) {
    struct AuthorPair {
      std::size_t a, b;
      UniqueIndexSampler sampler;
    };
    std::vector<AuthorPair> open;
    std::uint64_t available = 0;
    for (std::size_t a = 0; a < authors.size(); ++a) {
      for (std::size_t b = a + 1; b < authors.size(); ++b) {
        const std::uint64_t u = by_author[authors[a]].size() * by_author[authors[b]].size();
        available += u;
        open.push_back({a, b, UniqueIndexSampler(u)});
      }
    }
    auto want = static_cast<std::uint64_t>(opts.m_diff_total);
    if (want > available) {
      if (opts.strict) {
        throw Error(ErrorCode::InsufficientDistinctPairs,
                    "requested " + std::to_string(want) + " DifferentAuthor pairs, only " +
                        std::to_string(available) + " exist");
      }
      want = available;
      out.truncated = true;
    }
    auto rng = make_rng(seed, 0xd1ff);
    for (std::uint64_t q = 0; q < want; ++q) {
      std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
      const auto slot = pick(rng);
      auto& ap = open[slot];
      const auto& left = by_author[authors[ap.a]];
      const auto& right = by_author[authors[ap.b]];
      const auto r = ap.sampler.draw(rng);
      out.pairs.push_back({left[r / right.size()]->id, right[r % right.size()]->id,
                           PairLabel::DifferentAuthor});
      if (ap.sampler.exhausted()) open.erase(open.begin() + static_cast<std::ptrdiff_t>(slot));
    }
  }

  auto rng = make_rng(seed, 0x5407);
  seeded_shuffle(out.pairs, rng);
  return out;
}

CorpusBundle build_bundle(std::vector<Document> docs, double test_fraction, std::uint64_t seed,
                          const SegmentOptions& opts) {
  CorpusBundle b;
  b.segments = segment_all(docs, opts);
  b.split = stratified_split(b.segments, test_fraction, seed);
  b.documents = std::move(docs);
  b.test_fraction = test_fraction;
  b.marker_patterns = default_marker_patterns();
  b.segment_options = opts;
  return b;
}

}  // namespace stylos::corpus
