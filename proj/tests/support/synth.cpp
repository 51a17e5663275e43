#include "synth.hpp"

#include <fstream>
#include <random>

#include "stylos/sampling.hpp"

namespace synth {

namespace {

const std::string kConsonants = "bcdfghjklmnpqrstvwxz";
const std::vector<std::string> kShared = {"et", "in", "non", "ad", "cum", "sed", "ut", "de", "per", "est"};

std::string make_word(const std::string& consonants, std::mt19937_64& rng) {
  static const std::string vowels = "aeiou";
  std::uniform_int_distribution<int> syllables(2, 3);
  std::uniform_int_distribution<std::size_t> c(0, consonants.size() - 1), v(0, vowels.size() - 1);
  std::string w;
  for (int s = syllables(rng); s > 0; --s) {
    w += consonants[c(rng)];
    w += vowels[v(rng)];
  }
  return w;
}

}  // namespace

std::string author_name(int a) { return "Author" + std::string(1, static_cast<char>('A' + a)); }

std::vector<stylos::corpus::Document> planted_documents(const CorpusOptions& opts) {
  auto rng = stylos::make_rng(opts.seed, 99);
  // Two private consonants per author; the rest of the pool is common.
  const std::size_t private_span = 2 * static_cast<std::size_t>(opts.authors);
  const auto common = kConsonants.substr(std::min<std::size_t>(private_span, 10));
  std::vector<std::string> shared_lexicon;
  for (int i = 0; i < 200; ++i) shared_lexicon.push_back(make_word(common, rng));

  std::vector<stylos::corpus::Document> docs;
  for (int a = 0; a < opts.authors; ++a) {
    const auto consonants = kConsonants.substr(2 * static_cast<std::size_t>(a), 2);
    std::vector<std::string> lexicon;
    for (int i = 0; i < 60; ++i) lexicon.push_back(make_word(consonants, rng));
    std::uniform_int_distribution<std::size_t> pick_own(0, lexicon.size() - 1),
        pick_common(0, shared_lexicon.size() - 1), pick_function(0, kShared.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> length(7, 11);
    for (int d = 0; d < opts.docs_per_author; ++d) {
      stylos::corpus::Document doc;
      doc.id = author_name(a) + "_" + std::to_string(d) + ".txt";
      doc.author = author_name(a);
      doc.subcorpus = d % 2 == 0 ? stylos::corpus::Subcorpus::Epistolary : stylos::corpus::Subcorpus::Literary;
      std::string text;
      for (int s = 0; s < opts.sentences_per_doc; ++s) {
        const int n = length(rng);
        for (int w = 0; w < n; ++w) {
          std::string word;
          if (unit(rng) < opts.own_rate) {
            word = lexicon[pick_own(rng)];
          } else if (unit(rng) < 0.7) {
            word = shared_lexicon[pick_common(rng)];
          } else {
            word = kShared[pick_function(rng)];
          }
          if (w == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
          text += word;
          text += w + 1 == n ? ". " : " ";
        }
      }
      text.pop_back();
      doc.raw_text = text;
      doc.clean_text = stylos::corpus::clean_text(text, stylos::corpus::default_marker_patterns());
      docs.push_back(std::move(doc));
    }
  }
  return docs;
}

void write_corpus_dir(const std::filesystem::path& dir, const std::vector<stylos::corpus::Document>& docs) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv");
  manifest << "file,author,subcorpus\n";
  for (const auto& d : docs) {
    std::ofstream(dir / d.id) << d.raw_text;
    manifest << d.id << "," << d.author << "," << stylos::corpus::to_string(d.subcorpus) << "\n";
  }
}

std::vector<stylos::corpus::Segment> labelled_segments(const std::vector<int>& per_author) {
  std::vector<stylos::corpus::Segment> out;
  for (std::size_t a = 0; a < per_author.size(); ++a) {
    for (int i = 0; i < per_author[a]; ++i) {
      stylos::corpus::Segment s;
      s.author = author_name(static_cast<int>(a));
      s.doc_id = s.author + ".txt";
      char buf[32];
      std::snprintf(buf, sizeof buf, "#%04d", i);
      s.id = s.doc_id + buf;
      s.text = "filler";
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace synth
