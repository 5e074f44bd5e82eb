#include <sstream>

#include "doctest.h"
#include "promo/scorer.hpp"

using namespace promo;

namespace {

RatingLexicon toy_ratings() {
  std::istringstream src(
      "word,valence,arousal\n"
      "novel,8,5\n"
      "new,5,4\n"
      "terrible,2,6\n");
  return load_rating_lexicon(src);
}

std::string mock(const char* mode) {
  return std::string("python3 ") + MOCK_SCORER + " " + mode;
}

}  // namespace

TEST_CASE("baseline scorer maps valence to a positive probability") {
  auto scorer = make_baseline_valence_scorer(toy_ratings());
  auto scores = scorer->score({"a novel idea", "a terrible idea", "unrated words only"});
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].positive > scores[1].positive);
  CHECK(scores[2].positive == doctest::Approx(1.0 / 3.0));
  for (const SentimentScore& s : scores) {
    CHECK(s.positive + s.neutral + s.negative == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.positive >= 0.0);
    CHECK(s.negative >= 0.0);
  }
  CHECK(scorer->describe() == "baseline_valence");
  // determinism
  auto again = scorer->score({"a novel idea"});
  CHECK(again[0].positive == scores[0].positive);
}

TEST_CASE("external scorer speaks the handshake protocol and batches") {
  auto scorer = make_external_scorer(mock("ok"), 20.0);
  std::vector<std::string> sentences;
  for (int i = 0; i < 11; ++i)  // crosses the batch size announced by the mock
    sentences.push_back(i % 2 ? "a novel unique key method" : "plain words here");
  auto scores = scorer->score(sentences);
  REQUIRE(scores.size() == sentences.size());
  CHECK(scores[1].positive > scores[0].positive);
  CHECK(scores[1].positive == scores[3].positive);
  for (const SentimentScore& s : scores)
    CHECK(s.positive + s.neutral + s.negative == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("external scorer rejects nondeterministic implementations") {
  CHECK_THROWS_WITH_AS(make_external_scorer(mock("nondet"), 20.0),
                       doctest::Contains("determinism"), std::runtime_error);
}

TEST_CASE("external scorer rejects probabilities that do not sum to one") {
  CHECK_THROWS_AS(make_external_scorer(mock("badsum"), 20.0), std::runtime_error);
}

TEST_CASE("external scorer times out on a silent child") {
  CHECK_THROWS_WITH_AS(make_external_scorer(mock("silent"), 1.0),
                       doctest::Contains("time"), std::runtime_error);
}
