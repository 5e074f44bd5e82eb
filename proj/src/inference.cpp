#include "promo/inference.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace promo {

Dataset load_dataset_csv(std::istream& in, const std::vector<std::string>& categorical) {
  std::set<std::string> cat(categorical.begin(), categorical.end());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset");
  std::vector<std::string> header;
  {
    std::stringstream h(line);
    std::string col;
    while (std::getline(h, col, ',')) header.push_back(col);
  }
  Dataset d;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string& name = header[c];
      if (cat.count(name)) {
        d.categorical[name].push_back(cells[c]);
      } else {
        double v = 0.0;
        if (!cells[c].empty()) {
          try {
            v = std::stod(cells[c]);
          } catch (const std::exception&) {
            throw std::runtime_error("dataset row " + std::to_string(row_no) +
                                     ": non-numeric value in column " + name);
          }
        }
        d.numeric[name].push_back(v);
      }
    }
    ++d.n;
  }
  return d;
}

Design build_design(const Dataset& data, const ModelSpec& spec) {
  for (const std::string& p : spec.predictors)
    if (p == spec.outcome)
      throw std::invalid_argument("outcome appears among predictors: " + p);

  auto numeric_column = [&](const std::string& name) -> const std::vector<double>& {
    auto it = data.numeric.find(name);
    if (it == data.numeric.end())
      throw std::invalid_argument("missing numeric column: " + name);
    if (it->second.size() != data.n)
      throw std::invalid_argument("ragged column: " + name);
    return it->second;
  };

  std::vector<std::pair<std::string, std::vector<double>>> cols;
  cols.emplace_back("(intercept)", std::vector<double>(data.n, 1.0));
  for (const std::string& p : spec.predictors) cols.emplace_back(p, numeric_column(p));
  for (const std::string& fe : spec.categorical_fe) {
    auto it = data.categorical.find(fe);
    if (it == data.categorical.end())
      throw std::invalid_argument("missing categorical column: " + fe);
    std::set<std::string> levels(it->second.begin(), it->second.end());
    bool first = true;  // lexicographically first level is the reference
    for (const std::string& level : levels) {
      if (first) {
        first = false;
        continue;
      }
      std::vector<double> dummy(data.n, 0.0);
      for (std::size_t i = 0; i < data.n; ++i)
        if (it->second[i] == level) dummy[i] = 1.0;
      cols.emplace_back(fe + "=" + level, std::move(dummy));
    }
  }

  Design des;
  des.X.resize(static_cast<Eigen::Index>(data.n), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    des.names.push_back(cols[c].first);
    for (std::size_t i = 0; i < data.n; ++i)
      des.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = cols[c].second[i];
  }
  const std::vector<double>& y = numeric_column(spec.outcome);
  des.y.resize(static_cast<Eigen::Index>(data.n));
  for (std::size_t i = 0; i < data.n; ++i) des.y(static_cast<Eigen::Index>(i)) = y[i];

  if (spec.family == Family::logit) {
    for (std::size_t i = 0; i < data.n; ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw std::invalid_argument("logit outcome must be binary");
  }
  return des;
}

namespace {

std::vector<std::string> default_names(Eigen::Index p, std::vector<std::string> names) {
  if (names.empty())
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw std::invalid_argument("column name count does not match design width");
  return names;
}

void check_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    std::string msg = "design matrix is rank deficient; collinear columns:";
    const auto perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < X.cols(); ++j)
      msg += " " + names[static_cast<std::size_t>(perm(j))];
    throw std::invalid_argument(msg);
  }
}

void check_separation(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  // |coefficient| > 20 on standardized data signals complete separation
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double m = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - m).square().sum() / (n - 1.0));
    if (sd > 0.0 && std::abs(beta(j)) * sd > 20.0)
      throw std::runtime_error(
          "complete separation detected (diverging coefficient at column " +
          std::to_string(j) + ")");
  }
}

void fill_wald(RegressionFit& fit, bool use_t) {
  const Eigen::Index p = fit.coefficients.size();
  fit.std_errors.resize(static_cast<std::size_t>(p));
  fit.p_values.resize(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double se = std::sqrt(fit.covariance(j, j));
    fit.std_errors[static_cast<std::size_t>(j)] = se;
    double stat = se > 0.0 ? fit.coefficients(j) / se : 0.0;
    double pv;
    if (use_t) {
      const double df = static_cast<double>(fit.n) - static_cast<double>(p);
      pv = 2.0 * (1.0 - student_t_cdf(std::abs(stat), df));
    } else {
      pv = 2.0 * (1.0 - normal_cdf(std::abs(stat)));
    }
    fit.p_values[static_cast<std::size_t>(j)] = pv;
  }
}

}  // namespace

double logit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta) {
  const Eigen::ArrayXd eta = (X * beta).array();
  // log(1+exp(eta)) computed stably
  const Eigen::ArrayXd log1pexp =
      eta.max(0.0) + (1.0 + (-eta.abs()).exp()).log();
  return (y.array() * eta - log1pexp).sum();
}

Eigen::VectorXd logit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta) {
  const Eigen::ArrayXd eta = (X * beta).array();
  const Eigen::ArrayXd mu = 1.0 / (1.0 + (-eta).exp());
  return X.transpose() * (y.array() - mu).matrix();
}

RegressionFit fit_logit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        std::vector<std::string> names) {
  RegressionFit fit;
  fit.family = Family::logit;
  fit.names = default_names(X.cols(), std::move(names));
  fit.n = static_cast<std::size_t>(X.rows());
  check_rank(X, fit.names);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0)
      throw std::invalid_argument("fit_logit: outcome must be 0/1");

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  Eigen::MatrixXd info;
  const double tol = 1e-8;
  const std::size_t max_iter = 100;
  for (fit.iterations = 0; fit.iterations < max_iter; ++fit.iterations) {
    const Eigen::ArrayXd eta = (X * beta).array().min(30.0).max(-30.0);
    const Eigen::ArrayXd mu = 1.0 / (1.0 + (-eta).exp());
    const Eigen::ArrayXd w = (mu * (1.0 - mu)).max(1e-10);
    const Eigen::ArrayXd z = eta + (y.array() - mu) / w;
    const Eigen::MatrixXd Xw = X.array().colwise() * w;
    info = X.transpose() * Xw;
    Eigen::VectorXd beta_new = info.ldlt().solve(Xw.transpose() * z.matrix());
    const double change = (beta_new - beta).cwiseAbs().maxCoeff();
    beta = beta_new;
    check_separation(X, beta);
    if (change < tol) {
      fit.converged = true;
      ++fit.iterations;
      break;
    }
  }
  fit.coefficients = beta;
  fit.covariance = info.inverse();
  fit.loglik = logit_loglik(X, y, beta);
  fit.k = static_cast<std::size_t>(X.cols());
  fill_wald(fit, /*use_t=*/false);
  return fit;
}

RegressionFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      std::vector<std::string> names) {
  RegressionFit fit;
  fit.family = Family::ols;
  fit.names = default_names(X.cols(), std::move(names));
  fit.n = static_cast<std::size_t>(X.rows());
  if (X.rows() <= X.cols())
    throw std::invalid_argument("fit_ols: need n > k");
  check_rank(X, fit.names);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  fit.coefficients = qr.solve(y);
  const Eigen::VectorXd resid = y - X * fit.coefficients;
  const double n = static_cast<double>(X.rows());
  const double p = static_cast<double>(X.cols());
  fit.sigma2 = resid.squaredNorm() / (n - p);
  fit.covariance = fit.sigma2 * (X.transpose() * X).inverse();
  // Gaussian loglik at the MLE variance
  const double mle_var = resid.squaredNorm() / n;
  fit.loglik = -0.5 * n * (std::log(2.0 * M_PI * std::max(mle_var, 1e-300)) + 1.0);
  fit.k = static_cast<std::size_t>(X.cols());
  fit.converged = true;
  fit.iterations = 1;
  fill_wald(fit, /*use_t=*/true);
  return fit;
}

double negbin_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, double alpha) {
  const double r = 1.0 / alpha;
  const Eigen::ArrayXd mu = (X * beta).array().min(30.0).max(-30.0).exp();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double m = mu(i);
    ll += boost::math::lgamma(y(i) + r) - boost::math::lgamma(r) -
          boost::math::lgamma(y(i) + 1.0) + r * std::log(r / (r + m)) +
          y(i) * std::log(m / (r + m));
  }
  return ll;
}

Eigen::VectorXd negbin_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& beta, double alpha) {
  const Eigen::ArrayXd mu = (X * beta).array().min(30.0).max(-30.0).exp();
  const Eigen::ArrayXd w = (y.array() - mu) / (1.0 + alpha * mu);
  return X.transpose() * w.matrix();
}

namespace {

double negbin_dispersion_score(const Eigen::VectorXd& y, const Eigen::ArrayXd& mu,
                               double alpha) {
  // dll/dalpha via dll/dr with r = 1/alpha
  const double r = 1.0 / alpha;
  double dldr = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double m = mu(i);
    dldr += boost::math::digamma(y(i) + r) - boost::math::digamma(r) +
            std::log(r / (r + m)) + 1.0 - (y(i) + r) / (r + m);
  }
  return -r * r * dldr;
}

}  // namespace

RegressionFit fit_negbin(const Eigen::MatrixXd& X, const Eigen::VectorXd& counts,
                         std::vector<std::string> names) {
  RegressionFit fit;
  fit.family = Family::negbin;
  fit.names = default_names(X.cols(), std::move(names));
  fit.n = static_cast<std::size_t>(X.rows());
  check_rank(X, fit.names);
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) < 0.0 || counts(i) != std::floor(counts(i)))
      throw std::invalid_argument("fit_negbin: counts must be non-negative integers");
  }

  const double alpha_floor = 1e-8;
  const double ybar = std::max(counts.mean(), 1e-10);
  double yvar = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i)
    yvar += (counts(i) - ybar) * (counts(i) - ybar);
  yvar /= std::max(static_cast<double>(counts.size() - 1), 1.0);
  double alpha = std::max((yvar - ybar) / (ybar * ybar), 1e-3);  // method of moments

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  beta(0) = std::log(ybar);
  Eigen::MatrixXd info;
  const double tol = 1e-8;
  const std::size_t max_iter = 500;
  bool converged = false;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // beta step: one IRLS update at the current dispersion
    const Eigen::ArrayXd eta = (X * beta).array().min(30.0).max(-30.0);
    const Eigen::ArrayXd mu = eta.exp();
    const Eigen::ArrayXd w = (mu / (1.0 + alpha * mu)).max(1e-10);
    const Eigen::ArrayXd z = eta + (counts.array() - mu) / mu;
    const Eigen::MatrixXd Xw = X.array().colwise() * w;
    info = X.transpose() * Xw;
    Eigen::VectorXd beta_new = info.ldlt().solve(Xw.transpose() * z.matrix());
    const double beta_change = (beta_new - beta).cwiseAbs().maxCoeff();
    beta = beta_new;

    // dispersion step: one Newton update on alpha (numeric curvature)
    const Eigen::ArrayXd mu2 = (X * beta).array().min(30.0).max(-30.0).exp();
    const double g = negbin_dispersion_score(counts, mu2, alpha);
    const double h = std::max(alpha * 1e-4, 1e-8);
    const double g_hi = negbin_dispersion_score(counts, mu2, alpha + h);
    const double curv = (g_hi - g) / h;
    double alpha_new = alpha;
    if (std::isfinite(curv) && curv < 0.0) {
      alpha_new = alpha - g / curv;
    } else {
      alpha_new = alpha + (g > 0.0 ? 0.5 * alpha : -0.25 * alpha);
    }
    // damp the step: a raw Newton jump can overshoot past zero and strand
    // the iteration at the floor before beta has settled
    if (std::isfinite(alpha_new)) {
      alpha_new = std::clamp(alpha_new, 0.2 * alpha, 5.0 * alpha);
    }
    if (!std::isfinite(alpha_new) || alpha_new <= alpha_floor) {
      alpha_new = alpha_floor;
      fit.poisson_limit = true;
    } else if (fit.poisson_limit && alpha_new > alpha_floor * 10.0) {
      fit.poisson_limit = false;
    }
    const double alpha_change = std::abs(alpha_new - alpha);
    alpha = alpha_new;
    if (beta_change < tol && (alpha_change < tol || alpha <= alpha_floor)) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error(
        "fit_negbin: no convergence after " + std::to_string(max_iter) +
        " iterations (last alpha = " + std::to_string(alpha) + ")");
  }
  fit.converged = true;
  fit.iterations = iter;
  fit.coefficients = beta;
  if (alpha < 1e-6) {  // effectively equidispersed; report the floor
    alpha = alpha_floor;
    fit.poisson_limit = true;
  }
  fit.dispersion = alpha;
  fit.covariance = info.inverse();
  fit.loglik = negbin_loglik(X, counts, beta, alpha);
  fit.k = static_cast<std::size_t>(X.cols()) + 1;  // + dispersion
  fill_wald(fit, /*use_t=*/false);
  return fit;
}

MarginsCurve margins(const RegressionFit& fit, const Eigen::MatrixXd& X,
                     std::size_t focal_column, const std::vector<double>& grid) {
  if (focal_column >= static_cast<std::size_t>(X.cols()))
    throw std::invalid_argument("margins: focal column out of range");
  const Eigen::Index fc = static_cast<Eigen::Index>(focal_column);
  const double n = static_cast<double>(X.rows());
  const double obs_min = X.col(fc).minCoeff();
  const double obs_max = X.col(fc).maxCoeff();

  MarginsCurve curve;
  curve.grid = grid;
  Eigen::MatrixXd Xg = X;
  for (double g : grid) {
    Xg.col(fc).setConstant(g);
    const Eigen::ArrayXd eta = (Xg * fit.coefficients).array();
    Eigen::ArrayXd pred, dmu;
    switch (fit.family) {
      case Family::logit: {
        const Eigen::ArrayXd mu = 1.0 / (1.0 + (-eta).exp());
        pred = mu;
        dmu = mu * (1.0 - mu);
        break;
      }
      case Family::ols:
        pred = eta;
        dmu = Eigen::ArrayXd::Ones(eta.size());
        break;
      case Family::negbin: {
        const Eigen::ArrayXd mu = eta.min(30.0).max(-30.0).exp();
        pred = mu;
        dmu = mu;
        break;
      }
    }
    const double avg = pred.sum() / n;
    const Eigen::VectorXd grad = (Xg.array().colwise() * dmu).matrix().transpose() *
                                 Eigen::VectorXd::Constant(Xg.rows(), 1.0 / n);
    const double var = grad.transpose() * fit.covariance * grad;
    const double half = 1.959963984540054 * std::sqrt(std::max(var, 0.0));
    curve.predicted.push_back(avg);
    curve.ci_low.push_back(avg - half);
    curve.ci_high.push_back(avg + half);
    curve.outside_support.push_back(g < obs_min || g > obs_max);
  }
  return curve;
}

double bic(const RegressionFit& fit) {
  if (!fit.converged) throw std::invalid_argument("bic: fit did not converge");
  return static_cast<double>(fit.k) * std::log(static_cast<double>(fit.n)) -
         2.0 * fit.loglik;
}

std::vector<double> vif(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  check_rank(X, names.empty() ? default_names(X.cols(), {}) : names);
  std::vector<double> out;
  for (Eigen::Index j = 1; j < X.cols(); ++j) {  // skip intercept
    Eigen::MatrixXd others(X.rows(), X.cols() - 1);
    Eigen::Index c = 0;
    for (Eigen::Index k = 0; k < X.cols(); ++k)
      if (k != j) others.col(c++) = X.col(k);
    const Eigen::VectorXd target = X.col(j);
    const Eigen::VectorXd b = others.colPivHouseholderQr().solve(target);
    const double ssr = (target - others * b).squaredNorm();
    const double m = target.mean();
    const double sst = (target.array() - m).square().sum();
    if (sst == 0.0) {
      out.push_back(1.0);
      continue;
    }
    const double r2 = 1.0 - ssr / sst;
    out.push_back(1.0 / std::max(1.0 - r2, 1e-12));
  }
  return out;
}

TwoSampleTests two_sample_tests(std::span<const double> a, std::span<const double> b) {
  TwoSampleTests t;
  t.welch_t = welch_t_test(a, b, Side::two_sided);
  t.ks = ks_test(a, b);
  return t;
}

}  // namespace promo
