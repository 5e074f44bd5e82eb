#include "promo/novelty.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include <omp.h>

#include "promo/seeds.hpp"

namespace promo {

namespace {

// Apply the pairwise-collapse rule to one bibliography's journal multiset.
void add_document_pairs(std::map<std::string, long>& multiplicity, bool include_self,
                        std::map<JournalPair, long>& counts) {
  for (auto i = multiplicity.begin(); i != multiplicity.end(); ++i) {
    if (include_self && i->second >= 2) counts[{i->first, i->first}] += 1;
    auto j = i;
    for (++j; j != multiplicity.end(); ++j) counts[{i->first, j->first}] += 1;
  }
}

}  // namespace

BuildResult build_cocitation(const std::vector<Document>& background,
                             bool include_self_pairs) {
  BuildResult result;
  for (const Document& doc : background) {
    if (!doc.bibliography || doc.bibliography->empty()) {
      ++result.skipped_documents;
      continue;
    }
    std::map<std::string, long> mult;
    for (const Reference& r : *doc.bibliography) mult[r.journal] += 1;
    add_document_pairs(mult, include_self_pairs, result.counts);
  }
  return result;
}

std::vector<CitationLink> links_from_documents(const std::vector<Document>& docs) {
  std::vector<CitationLink> links;
  for (const Document& doc : docs) {
    if (!doc.bibliography) continue;
    for (const Reference& r : *doc.bibliography) {
      if (r.year > doc.year)
        throw std::invalid_argument("reference year " + std::to_string(r.year) +
                                    " exceeds citing year of document " + doc.id);
      links.push_back({doc.id, doc.year, r.journal, r.year});
    }
  }
  return links;
}

std::vector<std::string> shuffle_cited_journals(const std::vector<CitationLink>& links,
                                                std::uint64_t replicate_seed) {
  // strata: (citing_year, cited_year) -> link indices, in deterministic order
  std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < links.size(); ++i)
    strata[{links[i].citing_year, links[i].cited_year}].push_back(i);

  std::vector<std::string> journals(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) journals[i] = links[i].cited_journal;

  std::mt19937_64 rng(replicate_seed);
  for (auto& [key, idx] : strata) {
    // Fisher-Yates over the stratum's journal labels
    for (std::size_t k = idx.size(); k > 1; --k) {
      std::uniform_int_distribution<std::size_t> pick(0, k - 1);
      std::swap(journals[idx[k - 1]], journals[idx[pick(rng)]]);
    }
  }
  return journals;
}

std::map<JournalPair, long> count_pairs(const std::vector<CitationLink>& links,
                                        const std::vector<std::string>& cited_journals,
                                        bool include_self_pairs) {
  std::map<std::string, std::map<std::string, long>> per_doc;
  for (std::size_t i = 0; i < links.size(); ++i)
    per_doc[links[i].citing_id][cited_journals[i]] += 1;
  std::map<JournalPair, long> counts;
  for (auto& [doc_id, mult] : per_doc) add_document_pairs(mult, include_self_pairs, counts);
  return counts;
}

CoCitationStats null_model_zscores(const std::vector<CitationLink>& links,
                                   std::size_t randomizations, std::uint64_t seed,
                                   bool include_self_pairs, bool parallel) {
  if (randomizations < 2)
    throw std::invalid_argument("null_model_zscores: need R >= 2 randomizations");

  CoCitationStats stats;
  stats.randomizations = randomizations;
  stats.seed = seed;
  stats.include_self_pairs = include_self_pairs;
  for (const CitationLink& l : links) stats.journals.insert(l.cited_journal);

  std::vector<std::string> observed_journals(links.size());
  for (std::size_t i = 0; i < links.size(); ++i)
    observed_journals[i] = links[i].cited_journal;
  stats.observed = count_pairs(links, observed_journals, include_self_pairs);

  // Integer accumulators make the parallel reduction order-independent.
  std::map<JournalPair, std::pair<long long, long long>> acc;  // (sum, sum of squares)

  const long long R = static_cast<long long>(randomizations);
#pragma omp parallel if (parallel)
  {
    std::map<JournalPair, std::pair<long long, long long>> local;
#pragma omp for schedule(dynamic, 8)
    for (long long r = 0; r < R; ++r) {
      auto journals = shuffle_cited_journals(
          links, derive_seed(seed, "null-model", static_cast<std::uint64_t>(r)));
      auto counts = count_pairs(links, journals, include_self_pairs);
      for (const auto& [pair, c] : counts) {
        auto& [s, ss] = local[pair];
        s += c;
        ss += static_cast<long long>(c) * c;
      }
    }
#pragma omp critical
    for (const auto& [pair, v] : local) {
      auto& [s, ss] = acc[pair];
      s += v.first;
      ss += v.second;
    }
  }

  // Union of observed pairs and pairs seen under the null.
  std::set<JournalPair> keys;
  for (const auto& [p, c] : stats.observed) keys.insert(p);
  for (const auto& [p, v] : acc) keys.insert(p);

  const double Rd = static_cast<double>(randomizations);
  for (const JournalPair& p : keys) {
    long long s = 0, ss = 0;
    if (auto it = acc.find(p); it != acc.end()) {
      s = it->second.first;
      ss = it->second.second;
    }
    const double mean = static_cast<double>(s) / Rd;
    const double var = std::max(static_cast<double>(ss) / Rd - mean * mean, 0.0);
    const double sd = std::sqrt(var);
    stats.null_mean[p] = mean;
    stats.null_sd[p] = sd;
    long obs = 0;
    if (auto it = stats.observed.find(p); it != stats.observed.end()) obs = it->second;
    if (sd > 0.0) {
      stats.zscores[p] = (static_cast<double>(obs) - mean) / sd;
    } else {
      stats.undefined_pairs.insert(p);
    }
  }
  return stats;
}

InnovativenessResult grant_innovativeness(const Document& doc, const CoCitationStats& stats) {
  if (!doc.bibliography)
    throw std::invalid_argument("grant_innovativeness: document has no bibliography");

  std::map<std::string, long> mult;
  std::size_t usable_refs = 0;
  InnovativenessResult res;
  for (const Reference& r : *doc.bibliography) {
    if (stats.journals.count(r.journal)) {
      mult[r.journal] += 1;
      ++usable_refs;
    } else {
      ++res.dropped_references;
    }
  }
  if (usable_refs < 2)
    throw std::invalid_argument("grant_innovativeness: insufficient bibliography (" +
                                std::to_string(usable_refs) + " usable references)");
  if (res.dropped_references * 2 > doc.bibliography->size()) res.low_confidence = true;

  std::map<JournalPair, long> pairs;
  add_document_pairs(mult, stats.include_self_pairs, pairs);
  for (const auto& [pair, count] : pairs) {
    (void)count;
    auto it = stats.zscores.find(pair);
    if (it == stats.zscores.end()) {
      res.sparse_pairs = true;
      continue;
    }
    res.zscores.push_back(it->second);
  }

  std::vector<double> negatives;
  for (double z : res.zscores)
    if (z < 0.0) negatives.push_back(z);
  res.n_negative = negatives.size();
  if (negatives.empty()) {
    res.no_negative_pairs = true;
    res.score = 0.0;
    return res;
  }
  std::sort(negatives.begin(), negatives.end());
  const std::size_t n = negatives.size();
  const double median =
      n % 2 == 1 ? negatives[n / 2] : 0.5 * (negatives[n / 2 - 1] + negatives[n / 2]);
  res.score = -median;
  return res;
}

}  // namespace promo
