#include "promo/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace promo {

namespace {

double column_variance(const ItemMatrix& m, std::size_t c) {
  double mean = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) mean += m.at(r, c);
  mean /= static_cast<double>(m.rows);
  double ss = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double d = m.at(r, c) - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(m.rows - 1);
}

std::vector<double> row_sums(const ItemMatrix& m) {
  std::vector<double> totals(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) totals[r] += m.at(r, c);
  return totals;
}

}  // namespace

double cronbach_alpha(const ItemMatrix& m) {
  if (m.cols < 2 || m.rows < 2)
    throw std::invalid_argument("cronbach_alpha: need >=2 items and >=2 rows");
  double item_var_sum = 0.0;
  for (std::size_t c = 0; c < m.cols; ++c) item_var_sum += column_variance(m, c);
  std::vector<double> totals = row_sums(m);
  const double total_var = sample_variance(totals);
  if (total_var == 0.0)
    throw std::invalid_argument("cronbach_alpha: degenerate matrix (zero total variance)");
  const double k = static_cast<double>(m.cols);
  return k / (k - 1.0) * (1.0 - item_var_sum / total_var);
}

std::vector<ItemTotal> item_total_correlations(const ItemMatrix& m) {
  if (m.cols < 2 || m.rows < 2)
    throw std::invalid_argument("item_total_correlations: need >=2 items and >=2 rows");
  std::vector<double> totals = row_sums(m);
  std::vector<ItemTotal> out(m.cols);
  const std::size_t n = m.rows;
  for (std::size_t c = 0; c < m.cols; ++c) {
    ItemTotal& it = out[c];
    it.item = c < m.item_names.size() ? m.item_names[c] : "item" + std::to_string(c);
    std::vector<double> x(n), rest(n);
    for (std::size_t r = 0; r < n; ++r) {
      x[r] = m.at(r, c);
      rest[r] = totals[r] - x[r];
    }
    double sx = 0.0, sr = 0.0;
    try {
      sx = sample_variance(x);
      sr = sample_variance(rest);
    } catch (const std::exception&) {
      sx = 0.0;
    }
    if (sx == 0.0 || sr == 0.0) {
      it.flag = "zero-variance";
      continue;
    }
    it.r = pearson_r(x, rest);
    if (n <= 2) {
      it.flag = "df<=0";
      continue;
    }
    const double df = static_cast<double>(n - 2);
    const double rr = *it.r;
    if (std::abs(rr) >= 1.0) {
      it.p_value = 0.0;
    } else {
      const double t = rr * std::sqrt(df / (1.0 - rr * rr));
      it.p_value = 2.0 * (1.0 - student_t_cdf(std::abs(t), df));
    }
  }
  return out;
}

MtmmResult mtmm_compare(std::span<const double> promo, std::span<const double> synonym,
                        std::span<const double> weights) {
  if (promo.size() != synonym.size())
    throw std::invalid_argument("mtmm_compare: paired samples must have equal length");
  if (promo.size() < 6)
    throw std::invalid_argument("mtmm_compare: need >= 6 pairs");
  MtmmResult res;
  res.n_pairs = promo.size();
  res.weighted = !weights.empty();
  res.welch_t = welch_t_test(promo, synonym, Side::greater, weights, weights);
  res.signed_rank = wilcoxon_signed_rank(promo, synonym, Side::greater);
  return res;
}

double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("cohens_kappa: label lists must be equal and non-empty");
  const double n = static_cast<double>(a.size());
  std::map<std::string, double> ma, mb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, ca] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (ca / n) * (it->second / n);
  }
  if (pe >= 1.0)
    throw std::invalid_argument("cohens_kappa: expected agreement is 1, kappa undefined");
  return (po - pe) / (1.0 - pe);
}

std::optional<std::string> majority_label(const std::string& l1, const std::string& l2,
                                          const std::string& l3) {
  if (l1 == l2 || l1 == l3) return l1;
  if (l2 == l3) return l2;
  return std::nullopt;
}

double f1_score(std::span<const std::string> pred, std::span<const std::string> gold,
                F1Averaging averaging) {
  if (pred.size() != gold.size())
    throw std::invalid_argument("f1_score: length mismatch");
  std::set<std::string> classes(pred.begin(), pred.end());
  classes.insert(gold.begin(), gold.end());
  double tp_all = 0.0, fp_all = 0.0, fn_all = 0.0;
  double macro_sum = 0.0;
  for (const std::string& c : classes) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool p = pred[i] == c, g = gold[i] == c;
      if (p && g) tp += 1.0;
      else if (p) fp += 1.0;
      else if (g) fn += 1.0;
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    const double denom = 2.0 * tp + fp + fn;
    macro_sum += denom == 0.0 ? 0.0 : 2.0 * tp / denom;
  }
  if (averaging == F1Averaging::macro)
    return macro_sum / static_cast<double>(classes.size());
  const double denom = 2.0 * tp_all + fp_all + fn_all;
  return denom == 0.0 ? 0.0 : 2.0 * tp_all / denom;
}

}  // namespace promo
