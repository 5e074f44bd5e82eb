#ifndef PROMO_EXPERIMENT_HPP
#define PROMO_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "promo/corpus.hpp"
#include "promo/inference.hpp"
#include "promo/lexicon.hpp"
#include "promo/scorer.hpp"

namespace promo {

struct SubstitutionResult {
  Document replica;
  std::size_t replaced = 0;
  std::size_t skipped_no_synonym = 0;  // matched occurrences missing a table entry
};

// Replaces round(level * m) (minimum 1) of the document's m promotional
// occurrences, each by a uniformly chosen synonym of its term; selected
// occurrences whose term has no table entry are skipped and counted. The
// original token's leading capitalization is preserved and an immediately
// preceding a/an article is adjusted to the replacement's initial letter.
// All other bytes are identical to the original.
SubstitutionResult substitute_once(const Document& doc, const Lexicon& lexicon,
                                   double level, const SynonymTable& synonyms,
                                   std::uint64_t seed);

struct ExperimentOutcome {
  std::string doc_id;
  double level = 0.0;
  std::size_t trials = 0;
  std::size_t k = 0;  // trials where the original beat the replica
  double p_value = 1.0;
  bool significant_drop = false;  // p < 0.05 one-sided and k > trials/2
  std::size_t n_promo_sentences = 0;
  bool applicable = true;  // false when the document has no promo-bearing sentence
};

// Baseline = mean positive sentiment over the originally promo-bearing
// sentences; each trial substitutes with a trial-derived seed, rescores those
// sentences in the replica and counts strict decreases (ties count against
// the drop). p from the exact one-sided binomial test at p0 = 0.5.
ExperimentOutcome run_substitution_experiment(const Document& doc, const Lexicon& lexicon,
                                              const SynonymTable& synonyms, Scorer& scorer,
                                              double level, std::size_t trials,
                                              std::uint64_t seed);

// Corpus sweep; documents run in parallel when the scorer is the baseline
// kind (an external scorer is a serialized resource). `parallel = false`
// forces the serial reference path; both orders produce identical results.
std::vector<ExperimentOutcome> run_experiment_corpus(
    const std::vector<Document>& docs, const Lexicon& lexicon, const SynonymTable& synonyms,
    Scorer& scorer, double level, std::size_t trials, std::uint64_t seed,
    bool parallel = true);

// Fraction of applicable outcomes at `level` with a significant drop.
double corpus_drop_fraction(const std::vector<ExperimentOutcome>& outcomes, double level);

// Robustness perturbations ---------------------------------------------------

// Reduced promo fraction after uniformly dropping round(frac * m) occurrences.
double perturb_occurrences(const Document& doc, const Lexicon& lexicon, double frac,
                           std::uint64_t seed, double cap = 0.2);

// Lexicon with round(frac * |terms|) terms removed uniformly at random.
Lexicon perturb_lexicon(const Lexicon& lexicon, double frac, std::uint64_t seed);

enum class PerturbationKind { none, drop_occurrences, drop_lexicon };

struct RobustnessRun {
  double beta_promo = 0.0;
  double p_value = 1.0;
  bool failed = false;
  std::string error;
};

struct RobustnessSummary {
  std::vector<RobustnessRun> runs;
  double fraction_significant = 0.0;  // among successful runs, p < 0.05
  std::size_t failed_runs = 0;
};

// Per run: perturb with a run-derived seed, recompute promo fractions, refit
// a logit of funded on promo_fraction, record (beta, p). Failed fits are
// recorded, never dropped.
RobustnessSummary robustness_sweep(const std::vector<Document>& corpus,
                                   const Lexicon& lexicon, PerturbationKind kind,
                                   double frac, std::size_t runs, std::uint64_t seed);

}  // namespace promo

#endif
