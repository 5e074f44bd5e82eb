#ifndef PROMO_SCORER_HPP
#define PROMO_SCORER_HPP

#include <memory>
#include <string>
#include <vector>

#include "promo/lexicon.hpp"

namespace promo {

struct SentimentScore {
  double positive = 0.0;
  double neutral = 0.0;
  double negative = 0.0;
};

// Scoring must be deterministic for a fixed scorer and sentence.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<SentimentScore> score(const std::vector<std::string>& sentences) = 0;
  virtual std::string describe() const = 0;
};

struct BaselineScorerConfig {
  double valence_midpoint = 5.0;  // center of the rating scale
  double valence_scale = 1.0;     // logistic temperature
};

// positive = logistic((mean valence of rated tokens - midpoint) / scale);
// the remainder splits evenly between neutral and negative. Sentences with no
// rated token score (1/3, 1/3, 1/3).
std::unique_ptr<Scorer> make_baseline_valence_scorer(RatingLexicon ratings,
                                                     BaselineScorerConfig config = {});

// Spawns `command` and speaks the line-delimited JSON protocol: handshake
// {"hello":1} -> {"hello":1,"batch":B}, then requests {"id","text"} answered
// by {"id","positive","neutral","negative"} in any order. A determinism probe
// (the same sentence scored twice) runs right after the handshake; scorers
// that disagree with themselves are rejected.
std::unique_ptr<Scorer> make_external_scorer(const std::string& command,
                                             double timeout_seconds = 60.0);

}  // namespace promo

#endif
