#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "stylos/corpus.hpp"
#include "stylos/error.hpp"
#include "synth.hpp"

using namespace stylos;
using namespace stylos::corpus;

namespace {

std::string sentence(int i) {
  return "Word" + std::to_string(i) + " alpha beta gamma delta epsilon.";
}

Document doc_with(int sentences, const std::string& id = "d.txt") {
  Document d;
  d.id = id;
  d.author = "A";
  std::string t;
  for (int i = 0; i < sentences; ++i) t += sentence(i) + " ";
  d.raw_text = t;
  d.clean_text = clean_text(t, default_marker_patterns());
  return d;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("stylos_corpus_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("markers are removed and whitespace collapsed") {
  const auto out = clean_text("Arma {virumque cano} Troiae <ἄνδρα μοι>  qui\n primus",
                              default_marker_patterns());
  CHECK(out == "Arma Troiae qui primus");
}

TEST_CASE("nested and adjacent markers peel off") {
  CHECK(clean_text("a {b {c} d} e", default_marker_patterns()) == "a e");
  CHECK(clean_text("x {a}{b} y", default_marker_patterns()) == "x y");
  CHECK(clean_text("x <a><b {c}> y", default_marker_patterns()) == "x y");
}

TEST_CASE("bad marker pattern is reported") {
  CHECK_THROWS_AS(clean_text("x", {"("}), Error);
}

TEST_CASE("sentence boundaries need trailing whitespace") {
  const auto s = split_sentences("Salve 3.5 amice. Quid agis? Bene!Iterum vale!");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "Salve 3.5 amice.");
  CHECK(s[1] == "Quid agis?");
  CHECK(s[2] == "Bene!Iterum vale!");
}

TEST_CASE("short sentences merge forward, a short tail merges back") {
  Document d;
  d.id = "x";
  d.author = "A";
  d.clean_text = "Ave. Ave. Una duo tres quattuor quinque. Sex septem octo novem decem. Vale.";
  SegmentOptions opts;
  opts.group_size = 10;
  opts.min_remainder = 1;
  const auto segs = segment(d, opts);
  REQUIRE(segs.size() == 1);
  REQUIRE(segs[0].sentences.size() == 2);
  CHECK(segs[0].sentences[0] == "Ave. Ave. Una duo tres quattuor quinque.");
  CHECK(segs[0].sentences[1] == "Sex septem octo novem decem. Vale.");
}

TEST_CASE("segments of ten sentences with a short remainder folded back") {
  auto segs = segment(doc_with(34));
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].sentences.size() == 10);
  CHECK(segs[2].sentences.size() == 14);
  CHECK(segs[0].id == "d.txt#0000");
  CHECK(segs[2].id == "d.txt#0002");

  segs = segment(doc_with(35));
  REQUIRE(segs.size() == 4);
  CHECK(segs[3].sentences.size() == 5);
}

TEST_CASE("a document shorter than one group is a single segment") {
  const auto segs = segment(doc_with(3));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].sentences.size() == 3);
}

TEST_CASE("empty document is rejected") {
  Document d;
  d.id = "e";
  d.author = "A";
  CHECK_THROWS_AS(segment(d), Error);
}

TEST_CASE("stratified split takes round(n * fraction) per author") {
  const auto segs = synth::labelled_segments({40, 25, 7});
  const auto split = stratified_split(segs, 0.1, 3);
  std::map<std::string, int> test_counts;
  for (const auto& s : split.test) ++test_counts[s.author];
  CHECK(test_counts["AuthorA"] == 4);
  CHECK(test_counts["AuthorB"] == 3);
  CHECK(test_counts["AuthorC"] == 1);
  CHECK(split.train.size() + split.test.size() == segs.size());

  std::set<std::string> ids;
  for (const auto& s : split.train) ids.insert(s.id);
  for (const auto& s : split.test) CHECK(ids.insert(s.id).second);
}

TEST_CASE("split is reproducible per seed") {
  const auto segs = synth::labelled_segments({30, 30});
  auto ids = [](const SplitCorpus& s) {
    std::vector<std::string> v;
    for (const auto& x : s.test) v.push_back(x.id);
    return v;
  };
  CHECK(ids(stratified_split(segs, 0.2, 5)) == ids(stratified_split(segs, 0.2, 5)));
  CHECK(ids(stratified_split(segs, 0.2, 5)) != ids(stratified_split(segs, 0.2, 6)));
}

TEST_CASE("split rejects bad fractions and singleton authors") {
  const auto segs = synth::labelled_segments({10, 1});
  CHECK_THROWS_AS(stratified_split(segs, 0.1, 0), Error);
  const auto ok = synth::labelled_segments({10, 10});
  CHECK_THROWS_AS(stratified_split(ok, 0.0, 0), Error);
  CHECK_THROWS_AS(stratified_split(ok, 1.0, 0), Error);
}

TEST_CASE("pairs are unique and correctly labelled") {
  const auto segs = synth::labelled_segments({20, 15, 12});
  std::map<std::string, std::string> author;
  for (const auto& s : segs) author[s.id] = s.author;
  const auto ps = generate_sav_pairs(segs, {50, 200, true}, 11);
  std::set<std::pair<std::string, std::string>> seen;
  int same = 0;
  for (const auto& p : ps.pairs) {
    CHECK(p.left != p.right);
    auto key = std::minmax(p.left, p.right);
    CHECK(seen.insert({key.first, key.second}).second);
    const bool same_author = author[p.left] == author[p.right];
    CHECK(same_author == (p.label == PairLabel::SameAuthor));
    same += same_author;
  }
  CHECK(same == 150);
  CHECK(ps.pairs.size() == 350);
  CHECK_FALSE(ps.truncated);
}

TEST_CASE("pair generation truncates or throws when pairs run out") {
  const auto segs = synth::labelled_segments({4, 3});
  CHECK_THROWS_AS(generate_sav_pairs(segs, {7, 5, true}, 1), Error);
  CHECK_THROWS_AS(generate_sav_pairs(segs, {3, 13, true}, 1), Error);
  const auto ps = generate_sav_pairs(segs, {7, 100, false}, 1);
  CHECK(ps.truncated);
  CHECK(ps.pairs.size() == 6 + 3 + 12);
}

TEST_CASE("pair generation is reproducible") {
  const auto segs = synth::labelled_segments({30, 30});
  const auto a = generate_sav_pairs(segs, {20, 40, false}, 9);
  const auto b = generate_sav_pairs(segs, {20, 40, false}, 9);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].left == b.pairs[i].left);
    CHECK(a.pairs[i].right == b.pairs[i].right);
  }
}

TEST_CASE("manifest loading") {
  const auto dir = temp_dir("manifest");
  std::ofstream(dir / "a.txt") << "Una duo tres quattuor quinque. {cited text} Sex septem octo novem decem.";
  std::ofstream(dir / "b.txt") << "Alter liber est hic et nunc.";

  SUBCASE("valid") {
    std::ofstream(dir / "manifest.csv") << "file,author,subcorpus\na.txt,Seneca,Epistolary\n\"b.txt\",\"Cicero\",lit\n";
    const auto docs = load_corpus(dir, dir / "manifest.csv");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].clean_text == "Una duo tres quattuor quinque. Sex septem octo novem decem.");
    CHECK(docs[1].author == "Cicero");
    CHECK(docs[1].subcorpus == Subcorpus::Literary);
  }
  SUBCASE("missing file") {
    std::ofstream(dir / "manifest.csv") << "file,author,subcorpus\nc.txt,Seneca,Epistolary\n";
    CHECK_THROWS_AS(load_corpus(dir, dir / "manifest.csv"), Error);
  }
  SUBCASE("duplicate row") {
    std::ofstream(dir / "manifest.csv") << "file,author,subcorpus\na.txt,S,epi\na.txt,S,epi\n";
    try {
      load_corpus(dir, dir / "manifest.csv");
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DuplicateId);
    }
  }
  SUBCASE("bad header") {
    std::ofstream(dir / "manifest.csv") << "name,author\n";
    CHECK_THROWS_AS(load_corpus(dir, dir / "manifest.csv"), Error);
  }
  SUBCASE("unknown subcorpus") {
    std::ofstream(dir / "manifest.csv") << "file,author,subcorpus\na.txt,S,poetry\n";
    CHECK_THROWS_AS(load_corpus(dir, dir / "manifest.csv"), Error);
  }
}

TEST_CASE("bundle keeps every segment exactly once") {
  synth::CorpusOptions o;
  o.sentences_per_doc = 60;
  const auto b = build_bundle(synth::planted_documents(o), 0.1, 4);
  CHECK(b.segments.size() == 2 * 4 * 6);
  CHECK(b.split.train.size() + b.split.test.size() == b.segments.size());
}

}
