#include "promo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace promo {

double normal_cdf(double z) {
  static const boost::math::normal_distribution<double> normal;
  return boost::math::cdf(normal, z);
}

double student_t_cdf(double t, double df) {
  boost::math::students_t_distribution<double> dist(df);
  return boost::math::cdf(dist, t);
}

double binomial_test(std::size_t k, std::size_t n, double p0, Side side) {
  if (k > n) throw std::invalid_argument("binomial_test: k > n");
  if (p0 < 0.0 || p0 > 1.0) throw std::invalid_argument("binomial_test: p0 outside [0,1]");
  boost::math::binomial_distribution<double> dist(static_cast<double>(n), p0);
  auto pmf = [&](std::size_t i) { return boost::math::pdf(dist, static_cast<double>(i)); };
  switch (side) {
    case Side::greater: {
      double p = 0.0;
      for (std::size_t i = k; i <= n; ++i) p += pmf(i);
      return std::min(p, 1.0);
    }
    case Side::less: {
      double p = 0.0;
      for (std::size_t i = 0; i <= k; ++i) p += pmf(i);
      return std::min(p, 1.0);
    }
    case Side::two_sided: {
      const double pk = pmf(k) * (1.0 + 1e-12);
      double p = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        if (pmf(i) <= pk) p += pmf(i);
      return std::min(p, 1.0);
    }
  }
  return 1.0;
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty vector");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("sample_variance needs n >= 2");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson_r: mismatched or short inputs");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson_r: zero-variance input");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

struct WeightedMoments {
  double mean = 0.0;
  double variance = 0.0;  // reliability-weighted sample variance
  double n_eff = 0.0;
};

WeightedMoments weighted_moments(std::span<const double> v, std::span<const double> w) {
  WeightedMoments m;
  if (w.empty()) {
    m.mean = mean(v);
    m.variance = sample_variance(v);
    m.n_eff = static_cast<double>(v.size());
    return m;
  }
  if (w.size() != v.size()) throw std::invalid_argument("weights length mismatch");
  double sw = 0.0, swx = 0.0, sww = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sw += w[i];
    sww += w[i] * w[i];
    swx += w[i] * v[i];
  }
  if (sw <= 0.0) throw std::invalid_argument("weights must be positive");
  m.mean = swx / sw;
  double ss = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) ss += w[i] * (v[i] - m.mean) * (v[i] - m.mean);
  m.n_eff = sw * sw / sww;
  m.variance = ss / sw * m.n_eff / (m.n_eff - 1.0);
  return m;
}

}  // namespace

TestResult welch_t_test(std::span<const double> a, std::span<const double> b, Side side,
                        std::span<const double> wa, std::span<const double> wb) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_t_test: each sample needs n >= 2");
  const WeightedMoments ma = weighted_moments(a, wa);
  const WeightedMoments mb = weighted_moments(b, wb);
  TestResult r;
  const double va = ma.variance / ma.n_eff;
  const double vb = mb.variance / mb.n_eff;
  if (va + vb == 0.0) {
    r.note = "undefined: zero variance in both samples";
    r.statistic = 0.0;
    return r;
  }
  r.statistic = (ma.mean - mb.mean) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / (ma.n_eff - 1.0) + vb * vb / (mb.n_eff - 1.0));
  const double cdf = student_t_cdf(r.statistic, df);
  switch (side) {
    case Side::greater: r.p_value = 1.0 - cdf; r.note = "one-sided (a > b)"; break;
    case Side::less: r.p_value = cdf; r.note = "one-sided (a < b)"; break;
    case Side::two_sided: r.p_value = 2.0 * std::min(cdf, 1.0 - cdf); r.note = "two-sided"; break;
  }
  return r;
}

namespace {

// P(all path points satisfy |i*m - j*n| < c) for a uniformly random
// interleaving of n and m observations; standard lattice recursion.
double ks_exact_p_at_least(double d, std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  // strict band: a path point (i,j) is inside when |i*m - j*n| < d*n*m
  const double c = d * nn * mm - 0.5;
  auto inside = [&](std::size_t i, std::size_t j) {
    return std::abs(static_cast<double>(i) * mm - static_cast<double>(j) * nn) < c;
  };
  std::vector<long double> col(m + 1, 0.0L);
  col[0] = 1.0L;
  for (std::size_t j = 1; j <= m; ++j) col[j] = inside(0, j) ? col[j - 1] : 0.0L;
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<long double> next(m + 1, 0.0L);
    next[0] = inside(i, 0) ? col[0] : 0.0L;
    for (std::size_t j = 1; j <= m; ++j)
      next[j] = inside(i, j) ? col[j] + next[j - 1] : 0.0L;
    col.swap(next);
  }
  // total interleavings = C(n+m, n)
  long double total = 1.0L;
  for (std::size_t i = 1; i <= m; ++i)
    total = total * static_cast<long double>(n + i) / static_cast<long double>(i);
  const long double p_inside = col[m] / total;
  double p = static_cast<double>(1.0L - p_inside);
  return std::clamp(p, 0.0, 1.0);
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_test(std::span<const double> a, std::span<const double> b,
                 std::size_t exact_limit) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("ks_test: each sample needs n >= 2");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const std::size_t n = sa.size(), m = sb.size();
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    double x = std::min(sa[i], sb[j]);
    while (i < n && sa[i] <= x) ++i;
    while (j < m && sb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.d = d;
  if (d == 0.0) {
    r.p_value = 1.0;
    r.exact = true;
    return r;
  }
  if (n * m <= exact_limit) {
    r.exact = true;
    r.p_value = ks_exact_p_at_least(d, n, m);
  } else {
    const double en = std::sqrt(static_cast<double>(n) * m / static_cast<double>(n + m));
    r.p_value = kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
  }
  return r;
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                Side side, std::size_t exact_limit) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: length mismatch");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  TestResult r;
  if (diffs.empty()) {
    r.note = "undefined: all pairs tied";
    return r;
  }
  const std::size_t n = diffs.size();
  // midranks of |d|
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> rank(n, 0.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
      ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0.0) w_plus += rank[i];
  r.statistic = w_plus;

  if (n <= exact_limit) {
    // enumerate all 2^n sign assignments
    const std::size_t total = std::size_t{1} << n;
    std::size_t ge = 0, le = 0;
    for (std::size_t mask = 0; mask < total; ++mask) {
      double w = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) w += rank[i];
      if (w >= w_plus - 1e-12) ++ge;
      if (w <= w_plus + 1e-12) ++le;
    }
    const double pg = static_cast<double>(ge) / static_cast<double>(total);
    const double pl = static_cast<double>(le) / static_cast<double>(total);
    switch (side) {
      case Side::greater: r.p_value = pg; r.note = "exact, one-sided (a > b)"; break;
      case Side::less: r.p_value = pl; r.note = "exact, one-sided (a < b)"; break;
      case Side::two_sided:
        r.p_value = std::min(1.0, 2.0 * std::min(pg, pl));
        r.note = "exact, two-sided";
        break;
    }
  } else {
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    // tie correction over groups of equal |d|
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n &&
             std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
        ++j;
      const double t = static_cast<double>(j - i + 1);
      if (t > 1.0) var -= t * (t * t - 1.0) / 48.0;
      i = j + 1;
    }
    const double z = (w_plus - mu) / std::sqrt(var);
    switch (side) {
      case Side::greater: r.p_value = 1.0 - normal_cdf(z); r.note = "normal approx, one-sided (a > b)"; break;
      case Side::less: r.p_value = normal_cdf(z); r.note = "normal approx, one-sided (a < b)"; break;
      case Side::two_sided:
        r.p_value = 2.0 * std::min(normal_cdf(z), 1.0 - normal_cdf(z));
        r.note = "normal approx, two-sided";
        break;
    }
  }
  return r;
}

}  // namespace promo
