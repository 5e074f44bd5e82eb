#ifndef PROMO_VALIDATION_HPP
#define PROMO_VALIDATION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promo/stats.hpp"

namespace promo {

// Rows are documents, columns are lexicon terms; cells hold per-document
// percentage frequencies of the term.
struct ItemMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cells;  // row-major
  std::vector<std::string> item_names;

  double at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
};

double cronbach_alpha(const ItemMatrix& m);

struct ItemTotal {
  std::string item;
  std::optional<double> r;        // absent for zero-variance items
  std::optional<double> p_value;  // absent when df <= 0
  std::string flag;               // "zero-variance", "df<=0", or empty
};
std::vector<ItemTotal> item_total_correlations(const ItemMatrix& m);

// Paired promo-vs-synonym rating comparison (one pair per promotional word).
// Direction tested: promo > synonym.
struct MtmmResult {
  TestResult welch_t;
  TestResult signed_rank;
  std::size_t n_pairs = 0;
  bool weighted = false;
};
MtmmResult mtmm_compare(std::span<const double> promo_ratings,
                        std::span<const double> synonym_ratings,
                        std::span<const double> weights = {});

double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b);

// Label agreed on by >= 2 of 3 raters; nullopt when all three differ.
std::optional<std::string> majority_label(const std::string& l1, const std::string& l2,
                                          const std::string& l3);

enum class F1Averaging { macro, micro };
double f1_score(std::span<const std::string> pred, std::span<const std::string> gold,
                F1Averaging averaging = F1Averaging::macro);

}  // namespace promo

#endif
