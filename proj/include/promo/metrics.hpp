#ifndef PROMO_METRICS_HPP
#define PROMO_METRICS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "promo/corpus.hpp"
#include "promo/lexicon.hpp"

namespace promo {

enum class CountMode { all_occurrences, unique_terms };

struct SentenceIncidence {
  double promo_per_sentence = 0.0;
  double fraction_sentences_with_promo = 0.0;
};

struct FeatureVector {
  std::string doc_id;
  double promo_fraction = 0.0;
  double promo_fraction_unique = 0.0;
  double head_density = 0.0;
  double tail_density = 0.0;
  double sentence_incidence = 0.0;  // fraction of sentences with >= 1 occurrence
  std::size_t word_count = 0;
  double readability = 0.0;
  std::optional<double> concreteness;
  std::optional<std::size_t> reference_count;
};

// Densities are proportions: 0.01 means one promotional word per 100 words.
double promo_fraction(const Document& doc, const Lexicon& lexicon,
                      CountMode mode = CountMode::all_occurrences);

std::pair<double, double> positional_density(const Document& doc, const Lexicon& lexicon,
                                             std::size_t window = 500);

SentenceIncidence sentence_incidence(const Document& doc, const Lexicon& lexicon);

// Flesch reading ease with a vowel-group syllable heuristic (silent final e).
double readability(const Document& doc);
std::size_t count_syllables(const std::string& lower_word);

// Mean rating over tokens present in the rating lexicon; absent if none match.
enum class RatingField { valence, arousal, concreteness };
std::optional<double> lexicon_mean(const Document& doc, const RatingLexicon& ratings,
                                   RatingField field);

// Median (mean of middle two for even n) and unscaled median absolute deviation.
std::pair<double, double> median_mad(std::vector<double> values);

FeatureVector compute_features(const Document& doc, const Lexicon& lexicon,
                               const RatingLexicon* ratings = nullptr);

// Feature table with deterministic column order; header row first.
std::string feature_table_csv(const std::vector<FeatureVector>& rows);

}  // namespace promo

#endif
