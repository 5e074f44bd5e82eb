#include "promo/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "promo/lexicon.hpp"
#include "promo/seeds.hpp"

namespace promo {

namespace {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

bool is_upper(unsigned char c) { return std::isupper(c); }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (!is_word_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n) {
      unsigned char c = static_cast<unsigned char>(text[j]);
      if (is_word_char(c)) {
        ++j;
      } else if ((c == '-' || c == '\'') && j + 1 < n &&
                 is_word_char(static_cast<unsigned char>(text[j + 1]))) {
        j += 2;  // internal hyphen/apostrophe joins the runs
      } else {
        break;
      }
    }
    Token t;
    t.surface = std::string(text.substr(i, j - i));
    t.lower = to_lower(t.surface);
    t.begin = i;
    t.end = j;
    tokens.push_back(std::move(t));
    i = j;
  }
  return tokens;
}

namespace {

// Words that take a trailing period without ending a sentence.
const std::array<std::string_view, 13> kAbbreviations = {
    "e.g", "i.e", "al", "fig", "figs", "dr", "vs", "etc", "cf",
    "mr", "ms", "mrs", "prof"};

// The word (letters plus internal dots) immediately before position `pos`.
std::string preceding_word(std::string_view text, std::size_t pos) {
  std::size_t end = pos;
  std::size_t begin = end;
  while (begin > 0) {
    unsigned char c = static_cast<unsigned char>(text[begin - 1]);
    if (is_word_char(c) || c == '.') {
      --begin;
    } else {
      break;
    }
  }
  // trim leading dots
  while (begin < end && text[begin] == '.') ++begin;
  return to_lower(text.substr(begin, end - begin));
}

bool is_sentence_break(std::string_view text, std::size_t i) {
  char c = text[i];
  if (c != '.' && c != '!' && c != '?') return false;
  // only the last character of a terminator run ("...", "?!") can break
  if (i + 1 < text.size() &&
      (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?'))
    return false;
  // require whitespace then an uppercase letter
  std::size_t j = i + 1;
  if (j >= text.size() || !std::isspace(static_cast<unsigned char>(text[j]))) return false;
  while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
  if (j >= text.size() || !is_upper(static_cast<unsigned char>(text[j]))) return false;
  if (c == '.') {
    // a single period after an abbreviation does not break; an ellipsis does
    bool ellipsis = i >= 2 && text[i - 1] == '.' && text[i - 2] == '.';
    if (!ellipsis) {
      std::size_t word_end = i;
      while (word_end > 0 && text[word_end - 1] == '.') --word_end;
      std::string w = preceding_word(text, word_end);
      for (std::string_view abbr : kAbbreviations)
        if (w == abbr) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<SentenceRange> segment_sentences(std::string_view text,
                                             const std::vector<Token>& tokens) {
  std::vector<SentenceRange> sentences;
  if (tokens.empty()) return sentences;

  std::vector<std::size_t> breaks;  // character positions after which a new sentence starts
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_sentence_break(text, i)) breaks.push_back(i);
  }

  std::size_t first = 0;
  std::size_t b = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    while (b < breaks.size() && breaks[b] < tokens[t].begin) {
      if (t > first) {
        sentences.push_back({first, t - first});
        first = t;
      }
      ++b;
    }
  }
  sentences.push_back({first, tokens.size() - first});
  return sentences;
}

std::string_view Document::sentence_text(std::size_t sentence_index) const {
  const SentenceRange& s = sentences.at(sentence_index);
  const Token& a = tokens.at(s.first);
  const Token& z = tokens.at(s.first + s.count - 1);
  return std::string_view(raw_text).substr(a.begin, z.end - a.begin);
}

Document make_document(std::string id, std::string text) {
  Document d;
  d.id = std::move(id);
  d.raw_text = std::move(text);
  d.tokens = tokenize(d.raw_text);
  d.sentences = segment_sentences(d.raw_text, d.tokens);
  return d;
}

std::pair<std::span<const Token>, std::span<const Token>>
positional_slice(const Document& doc, std::size_t window) {
  if (window < 1) throw std::invalid_argument("positional_slice: window must be >= 1");
  const std::size_t n = doc.tokens.size();
  const std::size_t w = std::min(window, n);
  std::span<const Token> all(doc.tokens);
  return {all.subspan(0, w), all.subspan(n - w, w)};
}

namespace {

using nlohmann::json;

Document parse_record(const json& j, std::size_t line_no) {
  if (!j.is_object()) throw std::runtime_error("record is not an object");
  if (!j.contains("id") || !j["id"].is_string())
    throw std::runtime_error("missing required field \"id\"");
  if (!j.contains("text") || !j["text"].is_string())
    throw std::runtime_error("missing required field \"text\"");
  Document d = make_document(j["id"].get<std::string>(), j["text"].get<std::string>());
  (void)line_no;
  if (j.contains("year") && !j["year"].is_null()) d.year = j["year"].get<int>();
  if (j.contains("funded") && !j["funded"].is_null()) d.funded = j["funded"].get<bool>();
  if (j.contains("program") && j["program"].is_string()) d.program = j["program"];
  if (j.contains("grant_type") && j["grant_type"].is_string()) d.grant_type = j["grant_type"];
  if (j.contains("applied_amount") && j["applied_amount"].is_number())
    d.applied_amount = j["applied_amount"].get<double>();
  if (j.contains("awarded_amount") && j["awarded_amount"].is_number())
    d.awarded_amount = j["awarded_amount"].get<double>();
  if (j.contains("pi") && j["pi"].is_object()) {
    const json& p = j["pi"];
    if (p.contains("gender") && p["gender"].is_string()) d.pi.gender = p["gender"];
    if (p.contains("age") && p["age"].is_number()) d.pi.age = p["age"].get<int>();
    auto count = [&p](const char* k) -> long {
      return p.contains(k) && p[k].is_number() ? p[k].get<long>() : 0;
    };
    d.pi.prior_publications = count("prior_publications");
    d.pi.prior_citations = count("prior_citations");
    d.pi.prior_applications = count("prior_applications");
    d.pi.prior_successes = count("prior_successes");
    if (d.pi.prior_successes > d.pi.prior_applications)
      throw std::runtime_error("pi.prior_successes exceeds pi.prior_applications");
  }
  if (j.contains("bibliography") && j["bibliography"].is_array()) {
    std::vector<Reference> refs;
    for (const json& r : j["bibliography"]) {
      Reference ref;
      ref.journal = r.at("journal").get<std::string>();
      ref.year = r.contains("year") ? r["year"].get<int>() : 0;
      refs.push_back(std::move(ref));
    }
    d.bibliography = std::move(refs);
  }
  if (j.contains("outcomes") && j["outcomes"].is_object()) {
    const json& o = j["outcomes"];
    OutcomeRecord rec;
    if (o.contains("publication_count")) rec.publication_count = o["publication_count"].get<long>();
    if (o.contains("jifs") && o["jifs"].is_array())
      rec.jifs = o["jifs"].get<std::vector<double>>();
    if (o.contains("disciplines") && o["disciplines"].is_array())
      rec.disciplines = o["disciplines"].get<std::vector<std::string>>();
    d.outcomes = std::move(rec);
  }
  return d;
}

}  // namespace

std::vector<Document> load_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) +
                               ": invalid JSON: " + e.what());
    }
    Document d;
    try {
      d = parse_record(j, line_no);
    } catch (const std::exception& e) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(d.id).second)
      throw std::runtime_error("corpus line " + std::to_string(line_no) +
                               ": duplicate id \"" + d.id + "\"");
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Document> load_corpus_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open corpus file: " + path);
  return load_corpus(f);
}

void write_corpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const Document& d : docs) {
    json j;
    j["id"] = d.id;
    j["text"] = d.raw_text;
    j["year"] = d.year;
    if (d.funded) j["funded"] = *d.funded;
    if (!d.program.empty()) j["program"] = d.program;
    if (!d.grant_type.empty()) j["grant_type"] = d.grant_type;
    if (d.applied_amount) j["applied_amount"] = *d.applied_amount;
    if (d.awarded_amount) j["awarded_amount"] = *d.awarded_amount;
    json pi;
    pi["gender"] = d.pi.gender;
    if (d.pi.age) pi["age"] = *d.pi.age;
    pi["prior_publications"] = d.pi.prior_publications;
    pi["prior_citations"] = d.pi.prior_citations;
    pi["prior_applications"] = d.pi.prior_applications;
    pi["prior_successes"] = d.pi.prior_successes;
    j["pi"] = pi;
    if (d.bibliography) {
      json refs = json::array();
      for (const Reference& r : *d.bibliography)
        refs.push_back({{"journal", r.journal}, {"year", r.year}});
      j["bibliography"] = refs;
    }
    if (d.outcomes) {
      json o;
      o["publication_count"] = d.outcomes->publication_count;
      o["jifs"] = d.outcomes->jifs;
      if (!d.outcomes->disciplines.empty()) o["disciplines"] = d.outcomes->disciplines;
      j["outcomes"] = o;
    }
    out << j.dump() << '\n';
  }
}

namespace {

// Neutral filler vocabulary; none of these appear in the embedded lexicon.
const std::vector<std::string> kFillerVocabulary = {
    "the",     "of",       "and",      "in",      "to",       "a",
    "study",   "method",   "protein",  "cell",    "sample",   "model",
    "result",  "analysis", "measure",  "group",   "effect",   "level",
    "rate",    "process",  "system",   "function", "structure", "change",
    "value",   "gene",     "pathway",  "response", "patient",  "trial",
    "signal",  "region",   "tissue",   "assay",    "cohort",   "outcome"};

}  // namespace

std::vector<Document> generate_synthetic_corpus(const SyntheticConfig& config,
                                                std::uint64_t seed) {
  if (config.doc_length == 0) throw std::invalid_argument("doc_length must be positive");
  if (config.sd_promo_density < 0 || config.mean_promo_density < 0 ||
      config.max_promo_density <= 0 || config.base_rate <= 0 || config.base_rate >= 1)
    throw std::invalid_argument("invalid synthetic corpus distribution parameters");

  const std::vector<std::string>& promo_vocab =
      config.promo_vocabulary.empty() ? default_lexicon_terms() : config.promo_vocabulary;
  const std::vector<std::string>& filler =
      config.filler_vocabulary.empty() ? kFillerVocabulary : config.filler_vocabulary;
  if (promo_vocab.empty() || filler.empty())
    throw std::invalid_argument("empty vocabulary");

  const double alpha = std::log(config.base_rate / (1.0 - config.base_rate)) -
                       config.beta_promo * config.mean_promo_density;

  std::vector<Document> docs(config.size);
#pragma omp parallel for schedule(dynamic, 64)
  for (long long ii = 0; ii < static_cast<long long>(config.size); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    std::mt19937_64 rng(derive_seed(seed, "synth-doc", i));
    std::normal_distribution<double> density_dist(config.mean_promo_density,
                                                  config.sd_promo_density);
    double density = std::clamp(density_dist(rng), 0.0, config.max_promo_density);

    std::uniform_int_distribution<std::size_t> pick_promo(0, promo_vocab.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_filler(0, filler.size() - 1);
    std::bernoulli_distribution is_promo(density);

    std::string text;
    text.reserve(config.doc_length * 7);
    std::size_t promo_count = 0;
    for (std::size_t t = 0; t < config.doc_length; ++t) {
      std::string w;
      if (is_promo(rng)) {
        w = promo_vocab[pick_promo(rng)];
        ++promo_count;
      } else {
        w = filler[pick_filler(rng)];
      }
      bool sentence_start = t % config.sentence_length == 0;
      if (sentence_start)
        w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      if (t > 0) {
        if (sentence_start) text += ". ";
        else text += ' ';
      }
      text += w;
    }
    text += '.';

    double realized = static_cast<double>(promo_count) /
                      static_cast<double>(config.doc_length);
    std::normal_distribution<double> z_dist(0.0, 1.0);
    double z = z_dist(rng);
    double eta = alpha + config.beta_promo * realized + config.beta_amount * z;
    double p = 1.0 / (1.0 + std::exp(-eta));
    bool funded = std::bernoulli_distribution(p)(rng);

    Document d = make_document("synth-" + std::to_string(i), std::move(text));
    d.year = 2020;
    d.funded = funded;
    d.applied_amount = z;
    docs[i] = std::move(d);
  }
  return docs;
}

}  // namespace promo
