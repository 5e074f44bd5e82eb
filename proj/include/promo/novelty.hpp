#ifndef PROMO_NOVELTY_HPP
#define PROMO_NOVELTY_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "promo/corpus.hpp"

namespace promo {

struct CitationLink {
  std::string citing_id;
  int citing_year = 0;
  std::string cited_journal;
  int cited_year = 0;
};

// Unordered journal pair, stored with first <= second.
using JournalPair = std::pair<std::string, std::string>;

inline JournalPair make_pair_key(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

struct CoCitationStats {
  std::map<JournalPair, long> observed;
  std::map<JournalPair, double> null_mean;
  std::map<JournalPair, double> null_sd;
  std::map<JournalPair, double> zscores;  // only pairs with null_sd > 0
  std::set<JournalPair> undefined_pairs;  // null_sd == 0
  std::set<std::string> journals;
  std::size_t randomizations = 0;
  std::uint64_t seed = 0;
  bool include_self_pairs = true;
};

struct BuildResult {
  std::map<JournalPair, long> counts;
  std::size_t skipped_documents = 0;  // documents without a bibliography
};

// Per document, each unordered pair of distinct cited journals counts once;
// a journal cited more than once also contributes one self-pair. Duplicate
// references to the same journal collapse pairwise.
BuildResult build_cocitation(const std::vector<Document>& background,
                             bool include_self_pairs = true);

std::vector<CitationLink> links_from_documents(const std::vector<Document>& docs);

// Year-preserving citation shuffle: within each (citing_year, cited_year)
// stratum the cited journals are permuted uniformly among links, preserving
// every bibliography's size and every journal's per-year citation count.
// z(pair) = (observed - null mean) / null sd over R randomizations; sd = 0
// pairs are marked undefined. Deterministic given seed; randomizations run
// in parallel with per-randomization derived seeds unless parallel = false.
CoCitationStats null_model_zscores(const std::vector<CitationLink>& links,
                                   std::size_t randomizations, std::uint64_t seed,
                                   bool include_self_pairs = true, bool parallel = true);

// One shuffled replicate (used by the serial reference path and tests).
std::vector<std::string> shuffle_cited_journals(const std::vector<CitationLink>& links,
                                                std::uint64_t replicate_seed);

// Pair counts of a link multiset, applying the collapse rule per citing doc.
std::map<JournalPair, long> count_pairs(const std::vector<CitationLink>& links,
                                        const std::vector<std::string>& cited_journals,
                                        bool include_self_pairs);

struct InnovativenessResult {
  std::vector<double> zscores;  // one per usable journal pair in the bibliography
  double score = 0.0;           // -median(negative z), >= 0
  std::size_t n_negative = 0;
  bool no_negative_pairs = false;
  bool sparse_pairs = false;    // some pairs lacked a defined z
  bool low_confidence = false;  // > 50% of references unresolved in the background
  std::size_t dropped_references = 0;
};

InnovativenessResult grant_innovativeness(const Document& doc, const CoCitationStats& stats);

}  // namespace promo

#endif
