#ifndef PROMO_INFERENCE_HPP
#define PROMO_INFERENCE_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "promo/stats.hpp"

namespace promo {

enum class Family { logit, ols, negbin };

struct ModelSpec {
  std::string outcome;
  std::vector<std::string> predictors;
  std::vector<std::string> categorical_fe;  // dummy-encoded, first level is reference
  Family family = Family::logit;
};

// Column-oriented table; categorical columns are dummy-encoded at design time.
struct Dataset {
  std::size_t n = 0;
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::vector<std::string>> categorical;
};

Dataset load_dataset_csv(std::istream& in,
                         const std::vector<std::string>& categorical_columns = {});

struct Design {
  Eigen::MatrixXd X;  // first column is the intercept
  Eigen::VectorXd y;
  std::vector<std::string> names;
};

// Throws on rank deficiency, naming the collinear columns. Reference level of
// each categorical is its lexicographically first value.
Design build_design(const Dataset& data, const ModelSpec& spec);

struct RegressionFit {
  Family family = Family::logit;
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  std::vector<double> std_errors;
  std::vector<double> p_values;  // Wald (z for logit/negbin, t for ols)
  double loglik = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;  // estimated parameters, incl. negbin dispersion
  std::optional<double> dispersion;  // negbin alpha
  bool poisson_limit = false;        // dispersion hit its floor
  bool converged = false;
  std::size_t iterations = 0;
  double sigma2 = 0.0;  // ols residual variance
};

// Maximum likelihood via IRLS; convergence when the max coefficient change
// drops below 1e-8, at most 100 iterations. Wald standard errors from the
// observed information. Throws on rank deficiency or complete separation.
RegressionFit fit_logit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        std::vector<std::string> names = {});

RegressionFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      std::vector<std::string> names = {});

// NB2 with log link; alternating Newton steps on beta and the dispersion.
// Dispersion floored at 1e-8 with a Poisson-limit flag.
RegressionFit fit_negbin(const Eigen::MatrixXd& X, const Eigen::VectorXd& counts,
                         std::vector<std::string> names = {});

// Analytic score vectors, exposed for the finite-difference checks.
Eigen::VectorXd logit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta);
double logit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta);
Eigen::VectorXd negbin_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& beta, double alpha);
double negbin_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, double alpha);

struct MarginsCurve {
  std::vector<double> grid;
  std::vector<double> predicted;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<bool> outside_support;
  std::string flavor = "average adjusted predictions";
};

// Average adjusted predictions: the focal column is set to each grid value
// for every observation, other covariates stay at observed values, and the
// response-scale predictions are averaged. 95% CI by the delta method.
MarginsCurve margins(const RegressionFit& fit, const Eigen::MatrixXd& X,
                     std::size_t focal_column, const std::vector<double>& grid);

inline double odds_ratio(double beta, double delta) { return std::exp(beta * delta); }

double bic(const RegressionFit& fit);

// 1/(1-R^2) of each non-intercept column regressed on the others.
std::vector<double> vif(const Eigen::MatrixXd& X, const std::vector<std::string>& names);

struct TwoSampleTests {
  TestResult welch_t;
  KsResult ks;
};
TwoSampleTests two_sample_tests(std::span<const double> a, std::span<const double> b);

}  // namespace promo

#endif
