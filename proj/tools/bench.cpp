// Compares the serial reference paths against the OpenMP lanes and verifies
// both produce identical results.
#include <chrono>
#include <cstdio>
#include <random>

#include "promo/corpus.hpp"
#include "promo/experiment.hpp"
#include "promo/lexicon.hpp"
#include "promo/novelty.hpp"
#include "promo/scorer.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main() {
  using namespace promo;

  // --- null model -----------------------------------------------------------
  std::mt19937_64 rng(99);
  std::vector<CitationLink> links;
  for (int d = 0; d < 400; ++d) {
    const int citing_year = 2000 + static_cast<int>(rng() % 5);
    const int refs = 5 + static_cast<int>(rng() % 20);
    for (int r = 0; r < refs; ++r)
      links.push_back({"doc" + std::to_string(d), citing_year,
                       "J" + std::to_string(rng() % 60),
                       citing_year - static_cast<int>(rng() % 8)});
  }
  const std::size_t R = 400;

  auto t0 = Clock::now();
  CoCitationStats serial = null_model_zscores(links, R, 7, true, false);
  const double t_serial = seconds_since(t0);
  t0 = Clock::now();
  CoCitationStats parallel = null_model_zscores(links, R, 7, true, true);
  const double t_parallel = seconds_since(t0);
  const bool null_match = serial.null_mean == parallel.null_mean &&
                          serial.null_sd == parallel.null_sd;
  std::printf("null model      %zu links, R=%zu: serial %.3fs, parallel %.3fs (%.2fx), %s\n",
              links.size(), R, t_serial, t_parallel, t_serial / t_parallel,
              null_match ? "identical" : "MISMATCH");

  // --- substitution experiment ----------------------------------------------
  SyntheticConfig cfg;
  cfg.size = 200;
  cfg.doc_length = 200;
  cfg.mean_promo_density = 0.02;
  auto docs = generate_synthetic_corpus(cfg, 5);
  Lexicon lex = load_promotional_lexicon();
  SynonymTable syn;
  for (const std::string& term : lex.terms) syn.entries[term] = {"plainterm"};
  RatingLexicon ratings;
  for (const std::string& term : lex.terms) ratings.ratings[term] = {7.0, 5.0, {}, {}};
  ratings.ratings["plainterm"] = {5.0, 5.0, {}, {}};
  auto scorer = make_baseline_valence_scorer(ratings);

  t0 = Clock::now();
  auto out_serial = run_experiment_corpus(docs, lex, syn, *scorer, 1.0, 50, 11, false);
  const double e_serial = seconds_since(t0);
  t0 = Clock::now();
  auto out_parallel = run_experiment_corpus(docs, lex, syn, *scorer, 1.0, 50, 11, true);
  const double e_parallel = seconds_since(t0);
  bool exp_match = out_serial.size() == out_parallel.size();
  for (std::size_t i = 0; exp_match && i < out_serial.size(); ++i)
    exp_match = out_serial[i].k == out_parallel[i].k &&
                out_serial[i].p_value == out_parallel[i].p_value;
  std::printf("experiment      %zu docs x 50 trials: serial %.3fs, parallel %.3fs (%.2fx), %s\n",
              docs.size(), e_serial, e_parallel, e_serial / e_parallel,
              exp_match ? "identical" : "MISMATCH");

  return (null_match && exp_match) ? 0 : 1;
}
