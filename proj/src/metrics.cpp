#include "promo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace promo {

double promo_fraction(const Document& doc, const Lexicon& lexicon, CountMode mode) {
  if (doc.tokens.empty()) throw std::invalid_argument("promo_fraction: zero-length document");
  auto occurrences = match_promotional(doc, lexicon);
  double count;
  if (mode == CountMode::all_occurrences) {
    count = static_cast<double>(occurrences.size());
  } else {
    std::set<std::string> distinct;
    for (const Occurrence& o : occurrences) distinct.insert(o.term);
    count = static_cast<double>(distinct.size());
  }
  return count / static_cast<double>(doc.tokens.size());
}

namespace {

double window_density(std::span<const Token> window, const Lexicon& lexicon) {
  if (window.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Token& t : window)
    if (lexicon.contains(t.lower)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(window.size());
}

}  // namespace

std::pair<double, double> positional_density(const Document& doc, const Lexicon& lexicon,
                                             std::size_t window) {
  if (doc.tokens.empty()) throw std::invalid_argument("positional_density: empty document");
  auto [head, tail] = positional_slice(doc, window);
  return {window_density(head, lexicon), window_density(tail, lexicon)};
}

SentenceIncidence sentence_incidence(const Document& doc, const Lexicon& lexicon) {
  if (doc.sentences.empty())
    throw std::invalid_argument("sentence_incidence: document has no sentences");
  auto occurrences = match_promotional(doc, lexicon);
  std::set<std::size_t> with_promo;
  for (const Occurrence& o : occurrences) with_promo.insert(o.sentence_index);
  const double s = static_cast<double>(doc.sentences.size());
  return {static_cast<double>(occurrences.size()) / s,
          static_cast<double>(with_promo.size()) / s};
}

std::size_t count_syllables(const std::string& w) {
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : w) {
    if (is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  // silent final e: "make" -> 1, but keep "le" endings ("table") and
  // single-group words ("the")
  if (groups > 1 && w.size() >= 2 && w.back() == 'e' && !is_vowel(w[w.size() - 2])) {
    if (!(w.size() >= 3 && w[w.size() - 2] == 'l' && !is_vowel(w[w.size() - 3])))
      --groups;
  }
  return std::max<std::size_t>(groups, 1);
}

double readability(const Document& doc) {
  if (doc.tokens.empty() || doc.sentences.empty())
    throw std::invalid_argument("readability: document needs >=1 token and sentence");
  std::size_t syllables = 0;
  for (const Token& t : doc.tokens) syllables += count_syllables(t.lower);
  const double words = static_cast<double>(doc.tokens.size());
  const double sentences = static_cast<double>(doc.sentences.size());
  return 206.835 - 1.015 * (words / sentences) -
         84.6 * (static_cast<double>(syllables) / words);
}

std::optional<double> lexicon_mean(const Document& doc, const RatingLexicon& ratings,
                                   RatingField field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Token& t : doc.tokens) {
    const Rating* r = ratings.find(t.lower);
    if (!r) continue;
    switch (field) {
      case RatingField::valence: sum += r->valence; ++n; break;
      case RatingField::arousal: sum += r->arousal; ++n; break;
      case RatingField::concreteness:
        if (r->concreteness) { sum += *r->concreteness; ++n; }
        break;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::pair<double, double> median_mad(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median_mad: empty list");
  auto median_of = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  double med = median_of(values);
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - med);
  double mad = median_of(dev);
  return {med, mad};
}

FeatureVector compute_features(const Document& doc, const Lexicon& lexicon,
                               const RatingLexicon* ratings) {
  FeatureVector f;
  f.doc_id = doc.id;
  f.word_count = doc.tokens.size();
  if (doc.tokens.empty()) return f;
  f.promo_fraction = promo_fraction(doc, lexicon, CountMode::all_occurrences);
  f.promo_fraction_unique = promo_fraction(doc, lexicon, CountMode::unique_terms);
  auto [head, tail] = positional_density(doc, lexicon);
  f.head_density = head;
  f.tail_density = tail;
  f.sentence_incidence = sentence_incidence(doc, lexicon).fraction_sentences_with_promo;
  f.readability = readability(doc);
  if (ratings) f.concreteness = lexicon_mean(doc, *ratings, RatingField::concreteness);
  if (doc.bibliography) f.reference_count = doc.bibliography->size();
  return f;
}

std::string feature_table_csv(const std::vector<FeatureVector>& rows) {
  std::ostringstream out;
  out << "doc_id,promo_fraction,promo_fraction_unique,head_density,tail_density,"
         "sentence_incidence,word_count,readability,concreteness,reference_count\n";
  out.precision(12);
  for (const FeatureVector& f : rows) {
    out << f.doc_id << ',' << f.promo_fraction << ',' << f.promo_fraction_unique << ','
        << f.head_density << ',' << f.tail_density << ',' << f.sentence_incidence << ','
        << f.word_count << ',' << f.readability << ',';
    if (f.concreteness) out << *f.concreteness;
    out << ',';
    if (f.reference_count) out << *f.reference_count;
    out << '\n';
  }
  return out.str();
}

}  // namespace promo
