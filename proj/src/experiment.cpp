#include "promo/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "promo/metrics.hpp"
#include "promo/seeds.hpp"

namespace promo {

namespace {

bool starts_with_vowel(const std::string& word) {
  if (word.empty()) return false;
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(word[0])));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// Choose k distinct indices from [0, m) without replacement (partial
// Fisher-Yates), deterministic given the rng state.
std::vector<std::size_t> sample_without_replacement(std::size_t m, std::size_t k,
                                                    std::mt19937_64& rng) {
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

std::size_t round_count(double x) {
  return static_cast<std::size_t>(std::llround(x));
}

}  // namespace

SubstitutionResult substitute_once(const Document& doc, const Lexicon& lexicon,
                                   double level, const SynonymTable& synonyms,
                                   std::uint64_t seed) {
  if (level <= 0.0 || level > 1.0)
    throw std::invalid_argument("substitute_once: level must be in (0, 1]");

  std::vector<Occurrence> occurrences = match_promotional(doc, lexicon);
  std::size_t skipped = 0;
  if (occurrences.empty())
    throw std::invalid_argument("substitute_once: nothing to substitute");

  std::mt19937_64 rng(seed);
  const std::size_t m = occurrences.size();
  const std::size_t want = std::max<std::size_t>(round_count(level * static_cast<double>(m)), 1);
  std::vector<std::size_t> chosen = sample_without_replacement(m, std::min(want, m), rng);
  std::sort(chosen.begin(), chosen.end());

  struct Splice {
    std::size_t begin, end;
    std::string replacement;
  };
  std::vector<Splice> splices;
  for (std::size_t c : chosen) {
    const Occurrence& occ = occurrences[c];
    auto entry = synonyms.entries.find(occ.term);
    if (entry == synonyms.entries.end()) {
      ++skipped;
      continue;
    }
    const std::vector<std::string>& syns = entry->second;
    std::uniform_int_distribution<std::size_t> pick(0, syns.size() - 1);
    std::string replacement = syns[pick(rng)];
    const Token& tok = doc.tokens[occ.token_index];
    if (!tok.surface.empty() && std::isupper(static_cast<unsigned char>(tok.surface[0])))
      replacement[0] =
          static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    splices.push_back({tok.begin, tok.end, std::move(replacement)});

    // a <-> an on the immediately preceding token
    if (occ.token_index > 0) {
      const Token& prev = doc.tokens[occ.token_index - 1];
      const bool vowel = starts_with_vowel(splices.back().replacement);
      if (prev.lower == "a" && vowel) {
        std::string art = prev.surface + "n";
        splices.push_back({prev.begin, prev.end, std::move(art)});
      } else if (prev.lower == "an" && !vowel) {
        std::string art = prev.surface.substr(0, prev.surface.size() - 1);
        splices.push_back({prev.begin, prev.end, std::move(art)});
      }
    }
  }
  std::sort(splices.begin(), splices.end(),
            [](const Splice& a, const Splice& b) { return a.begin < b.begin; });

  std::string text = doc.raw_text;
  for (auto it = splices.rbegin(); it != splices.rend(); ++it)
    text.replace(it->begin, it->end - it->begin, it->replacement);

  SubstitutionResult result{make_document(doc.id, std::move(text)),
                            chosen.size() - skipped, skipped};
  result.replica.year = doc.year;
  result.replica.funded = doc.funded;
  result.replica.program = doc.program;
  result.replica.grant_type = doc.grant_type;
  return result;
}

ExperimentOutcome run_substitution_experiment(const Document& doc, const Lexicon& lexicon,
                                              const SynonymTable& synonyms, Scorer& scorer,
                                              double level, std::size_t trials,
                                              std::uint64_t seed) {
  ExperimentOutcome outcome;
  outcome.doc_id = doc.id;
  outcome.level = level;
  outcome.trials = trials;

  std::set<std::size_t> promo_sentences;
  for (const Occurrence& o : match_promotional(doc, lexicon))
    promo_sentences.insert(o.sentence_index);
  outcome.n_promo_sentences = promo_sentences.size();
  if (promo_sentences.empty()) {
    outcome.applicable = false;
    return outcome;
  }

  std::vector<std::string> originals;
  for (std::size_t s : promo_sentences) originals.emplace_back(doc.sentence_text(s));
  const std::vector<SentimentScore> base_scores = scorer.score(originals);
  double baseline = 0.0;
  for (const SentimentScore& s : base_scores) baseline += s.positive;
  baseline /= static_cast<double>(base_scores.size());

  std::size_t k = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    SubstitutionResult sub =
        substitute_once(doc, lexicon, level, synonyms, derive_seed(seed, doc.id, t));
    std::vector<std::string> replicas;
    for (std::size_t s : promo_sentences)
      replicas.emplace_back(sub.replica.sentence_text(s));
    const std::vector<SentimentScore> scores = scorer.score(replicas);
    double replica_mean = 0.0;
    for (const SentimentScore& s : scores) replica_mean += s.positive;
    replica_mean /= static_cast<double>(scores.size());
    if (baseline > replica_mean) ++k;  // ties count as non-decrease
  }
  outcome.k = k;
  outcome.p_value = binomial_test(k, trials, 0.5, Side::greater);
  outcome.significant_drop =
      outcome.p_value < 0.05 && static_cast<double>(k) > static_cast<double>(trials) / 2.0;
  return outcome;
}

std::vector<ExperimentOutcome> run_experiment_corpus(
    const std::vector<Document>& docs, const Lexicon& lexicon, const SynonymTable& synonyms,
    Scorer& scorer, double level, std::size_t trials, std::uint64_t seed, bool parallel) {
  std::vector<ExperimentOutcome> outcomes(docs.size());
  const bool can_parallelize = parallel && scorer.describe() == "baseline_valence";
#pragma omp parallel for schedule(dynamic, 4) if (can_parallelize)
  for (long long i = 0; i < static_cast<long long>(docs.size()); ++i) {
    outcomes[static_cast<std::size_t>(i)] = run_substitution_experiment(
        docs[static_cast<std::size_t>(i)], lexicon, synonyms, scorer, level, trials, seed);
  }
  return outcomes;
}

double corpus_drop_fraction(const std::vector<ExperimentOutcome>& outcomes, double level) {
  std::size_t applicable = 0, dropped = 0;
  for (const ExperimentOutcome& o : outcomes) {
    if (!o.applicable || o.level != level) continue;
    ++applicable;
    if (o.significant_drop) ++dropped;
  }
  if (applicable == 0)
    throw std::invalid_argument("corpus_drop_fraction: no applicable outcomes at level");
  return static_cast<double>(dropped) / static_cast<double>(applicable);
}

double perturb_occurrences(const Document& doc, const Lexicon& lexicon, double frac,
                           std::uint64_t seed, double cap) {
  if (frac < 0.0 || frac > cap)
    throw std::invalid_argument("perturb_occurrences: frac outside [0, cap]");
  if (doc.tokens.empty())
    throw std::invalid_argument("perturb_occurrences: zero-length document");
  const std::size_t m = match_promotional(doc, lexicon).size();
  std::mt19937_64 rng(seed);
  const std::size_t drop = std::min(round_count(frac * static_cast<double>(m)), m);
  // uniform choice of which occurrences to drop only affects the count here
  (void)sample_without_replacement(m, drop, rng);
  return static_cast<double>(m - drop) / static_cast<double>(doc.tokens.size());
}

Lexicon perturb_lexicon(const Lexicon& lexicon, double frac, std::uint64_t seed) {
  if (frac <= 0.0 || frac >= 1.0)
    throw std::invalid_argument("perturb_lexicon: frac must be in (0, 1)");
  std::vector<std::string> terms(lexicon.terms.begin(), lexicon.terms.end());
  std::sort(terms.begin(), terms.end());  // set order is not deterministic across runs
  std::mt19937_64 rng(seed);
  const std::size_t drop =
      std::min(round_count(frac * static_cast<double>(terms.size())), terms.size());
  std::vector<std::size_t> chosen = sample_without_replacement(terms.size(), drop, rng);
  std::set<std::size_t> dropped(chosen.begin(), chosen.end());
  Lexicon out;
  out.version = lexicon.version + "-perturbed";
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (!dropped.count(i)) out.terms.insert(terms[i]);
  if (out.terms.empty()) throw std::invalid_argument("perturb_lexicon: result is empty");
  return out;
}

RobustnessSummary robustness_sweep(const std::vector<Document>& corpus,
                                   const Lexicon& lexicon, PerturbationKind kind,
                                   double frac, std::size_t runs, std::uint64_t seed) {
  RobustnessSummary summary;
  summary.runs.resize(runs);

#pragma omp parallel for schedule(dynamic, 1)
  for (long long r = 0; r < static_cast<long long>(runs); ++r) {
    RobustnessRun& run = summary.runs[static_cast<std::size_t>(r)];
    try {
      const std::uint64_t run_seed = derive_seed(seed, "robustness", static_cast<std::uint64_t>(r));
      Lexicon run_lexicon = lexicon;
      if (kind == PerturbationKind::drop_lexicon)
        run_lexicon = perturb_lexicon(lexicon, frac, run_seed);

      Eigen::MatrixXd X(corpus.size(), 2);
      Eigen::VectorXd y(corpus.size());
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Document& doc = corpus[i];
        if (!doc.funded)
          throw std::runtime_error("document " + doc.id + " lacks a funded flag");
        double fraction;
        if (kind == PerturbationKind::drop_occurrences) {
          fraction = perturb_occurrences(doc, run_lexicon, frac,
                                         derive_seed(run_seed, doc.id));
        } else {
          fraction = promo_fraction(doc, run_lexicon);
        }
        X(static_cast<Eigen::Index>(i), 0) = 1.0;
        X(static_cast<Eigen::Index>(i), 1) = fraction;
        y(static_cast<Eigen::Index>(i)) = *doc.funded ? 1.0 : 0.0;
      }
      RegressionFit fit = fit_logit(X, y, {"(intercept)", "promo_fraction"});
      run.beta_promo = fit.coefficients(1);
      run.p_value = fit.p_values[1];
    } catch (const std::exception& e) {
      run.failed = true;
      run.error = e.what();
    }
  }

  std::size_t significant = 0, ok = 0;
  for (const RobustnessRun& run : summary.runs) {
    if (run.failed) {
      ++summary.failed_runs;
      continue;
    }
    ++ok;
    if (run.p_value < 0.05) ++significant;
  }
  summary.fraction_significant =
      ok == 0 ? 0.0 : static_cast<double>(significant) / static_cast<double>(ok);
  return summary;
}

}  // namespace promo
