#ifndef PROMO_CORPUS_HPP
#define PROMO_CORPUS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace promo {

struct Token {
  std::string lower;    // lowercased surface
  std::string surface;  // original-case surface
  std::size_t begin = 0;  // character span [begin, end) in raw_text
  std::size_t end = 0;
};

// Half-open range of token indices belonging to one sentence.
struct SentenceRange {
  std::size_t first = 0;
  std::size_t count = 0;
};

struct PIRecord {
  std::string gender = "unknown";
  std::optional<int> age;
  long prior_publications = 0;
  long prior_citations = 0;
  long prior_applications = 0;
  long prior_successes = 0;
};

struct Reference {
  std::string journal;
  int year = 0;
};

struct OutcomeRecord {
  long publication_count = 0;
  std::vector<double> jifs;
  std::vector<std::string> disciplines;
};

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<Token> tokens;
  std::vector<SentenceRange> sentences;
  int year = 0;
  std::optional<bool> funded;
  std::string program;
  std::string grant_type;
  std::optional<double> applied_amount;
  std::optional<double> awarded_amount;
  PIRecord pi;
  std::optional<std::vector<Reference>> bibliography;
  std::optional<OutcomeRecord> outcomes;

  std::size_t word_count() const { return tokens.size(); }
  // Raw text of one sentence, spanning from its first to its last token.
  std::string_view sentence_text(std::size_t sentence_index) const;
};

// A token is a maximal run of letters/digits; hyphens and apostrophes are
// kept when flanked by letters/digits on both sides ("user-friendly" is one
// token). Bytes >= 0x80 are treated as letters so UTF-8 words survive intact.
std::vector<Token> tokenize(std::string_view text);

// Splits after . ! ? (and "..." runs) followed by whitespace and an uppercase
// letter; a fixed abbreviation list (e.g., i.e., et al., Fig., Dr., vs., ...)
// suppresses the split. Trailing text without a terminator forms a final
// sentence. Returned ranges partition the token list.
std::vector<SentenceRange> segment_sentences(std::string_view text,
                                             const std::vector<Token>& tokens);

// Tokenize + segment convenience constructor.
Document make_document(std::string id, std::string text);

// Head/tail token windows; both clamped, may overlap when the document is
// shorter than 2*window.
std::pair<std::span<const Token>, std::span<const Token>>
positional_slice(const Document& doc, std::size_t window = 500);

// Line-delimited JSON corpus format (see README). Malformed lines and
// duplicate ids throw with the offending line number.
std::vector<Document> load_corpus(std::istream& in);
std::vector<Document> load_corpus_file(const std::string& path);
void write_corpus(std::ostream& out, const std::vector<Document>& docs);

struct SyntheticConfig {
  std::size_t size = 0;
  std::size_t doc_length = 300;       // tokens per document
  std::size_t sentence_length = 13;   // tokens per synthetic sentence
  double mean_promo_density = 0.01;   // proportion scale
  double sd_promo_density = 0.005;
  double max_promo_density = 0.06;
  double base_rate = 0.168;           // marginal funding probability
  double beta_promo = 37.7;           // true logit coefficient, proportion scale
  double beta_amount = 0.0;           // coefficient on the standardized covariate
  std::vector<std::string> promo_vocabulary;   // defaults to the embedded lexicon
  std::vector<std::string> filler_vocabulary;  // defaults to a built-in neutral list
};

// Deterministic given (config, seed). The funded flag of each document is a
// Bernoulli draw from logistic(alpha + beta_promo * realized promo fraction
// + beta_amount * z), with alpha = logit(base_rate) - beta_promo *
// mean_promo_density, so the realized effect is recoverable by refitting.
// The standardized covariate z is stored in applied_amount.
std::vector<Document> generate_synthetic_corpus(const SyntheticConfig& config,
                                                std::uint64_t seed);

}  // namespace promo

#endif
