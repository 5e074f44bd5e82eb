#ifndef PROMO_LEXICON_HPP
#define PROMO_LEXICON_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "promo/corpus.hpp"

namespace promo {

struct Lexicon {
  std::unordered_set<std::string> terms;  // all lowercase
  std::string version;

  bool contains(const std::string& lower) const { return terms.count(lower) > 0; }
};

// term -> non-empty list of lowercased neutral synonyms
struct SynonymTable {
  std::map<std::string, std::vector<std::string>> entries;
  std::string provenance;
};

struct Rating {
  double valence = 0.0;
  double arousal = 0.0;
  std::optional<double> concreteness;
  std::optional<double> frequency_weight;
};

struct RatingLexicon {
  std::unordered_map<std::string, Rating> ratings;  // keys lowercase

  const Rating* find(const std::string& lower_word) const {
    auto it = ratings.find(lower_word);
    return it == ratings.end() ? nullptr : &it->second;
  }
};

struct Occurrence {
  std::size_t token_index = 0;
  std::string term;
  std::size_t sentence_index = 0;
};

// The embedded 139-term promotional word list, in its published order.
const std::vector<std::string>& default_lexicon_terms();

// No override: the embedded 139-term set. Override: exactly the file's terms
// (one lowercase term per line, '#' comments). Duplicates are deduplicated
// with a warning on the optional stream; an empty override is an error.
Lexicon load_promotional_lexicon();
Lexicon load_promotional_lexicon(std::istream& override_source,
                                 std::ostream* warnings = nullptr);
Lexicon load_promotional_lexicon_file(const std::string& path,
                                      std::ostream* warnings = nullptr);

// One Occurrence per token whose lowercased form is a lexicon term, ordered
// by token index. Exact match, no stemming.
std::vector<Occurrence> match_promotional(const Document& doc, const Lexicon& lexicon);

// Synonym file: lines "term<TAB>syn1,syn2,...". Every key must be a lexicon
// term; no synonym may itself be a lexicon term; multi-token synonyms are
// rejected (substitution must preserve token count).
SynonymTable load_synonym_table(std::istream& source, const Lexicon& lexicon);
SynonymTable load_synonym_table_file(const std::string& path, const Lexicon& lexicon);

// Rating file: CSV with header word,valence,arousal[,concreteness][,weight].
// Missing cells become absent optionals; duplicate rows: last wins, warning.
RatingLexicon load_rating_lexicon(std::istream& source, std::ostream* warnings = nullptr);
RatingLexicon load_rating_lexicon_file(const std::string& path,
                                       std::ostream* warnings = nullptr);

}  // namespace promo

#endif
