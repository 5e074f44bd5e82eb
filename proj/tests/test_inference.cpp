#include <fstream>
#include <random>

#include "doctest.h"
#include "promo/inference.hpp"

using namespace promo;

namespace {

Dataset load_fixture(const std::vector<std::string>& categorical = {}) {
  std::ifstream f(FIXTURE_REGRESSION);
  REQUIRE(f.good());
  return load_dataset_csv(f, categorical);
}

Design fixture_design(const std::string& outcome, Family family = Family::logit) {
  Dataset data = load_fixture();
  ModelSpec spec;
  spec.outcome = outcome;
  spec.predictors = {"x1", "x2"};
  spec.family = family;
  return build_design(data, spec);
}

}  // namespace

TEST_CASE("logit matches an external maximum-likelihood reference") {
  Design d = fixture_design("y");
  RegressionFit fit = fit_logit(d.X, d.y, d.names);
  REQUIRE(fit.converged);
  CHECK(fit.coefficients(0) == doctest::Approx(-0.3296429891820865).epsilon(1e-6));
  CHECK(fit.coefficients(1) == doctest::Approx(1.1926067013775625).epsilon(1e-6));
  CHECK(fit.coefficients(2) == doctest::Approx(-0.8365093436702241).epsilon(1e-6));
  CHECK(fit.std_errors[0] == doctest::Approx(0.3263622773057997).epsilon(1e-5));
  CHECK(fit.std_errors[1] == doctest::Approx(0.23205119863642695).epsilon(1e-5));
  CHECK(fit.std_errors[2] == doctest::Approx(0.31299384532717106).epsilon(1e-5));
  CHECK(fit.loglik == doctest::Approx(-98.30763074182016).epsilon(1e-8));
  CHECK(fit.p_values[1] == doctest::Approx(2.755996084515638e-07).epsilon(1e-4));
  CHECK(fit.p_values[2] == doctest::Approx(0.007526450948282008).epsilon(1e-6));
}

TEST_CASE("negbin matches an external maximum-likelihood reference") {
  Design d = fixture_design("yc", Family::negbin);
  RegressionFit fit = fit_negbin(d.X, d.y, d.names);
  REQUIRE(fit.converged);
  CHECK(fit.coefficients(0) == doctest::Approx(0.341514178941459).epsilon(1e-4));
  CHECK(fit.coefficients(1) == doctest::Approx(0.7660565895809608).epsilon(1e-4));
  CHECK(fit.coefficients(2) == doctest::Approx(-0.5283902664244979).epsilon(1e-4));
  CHECK(*fit.dispersion == doctest::Approx(0.5572983321524747).epsilon(1e-3));
  CHECK(fit.loglik == doctest::Approx(-257.46483137880847).epsilon(1e-6));
  CHECK(!fit.poisson_limit);
  CHECK(fit.k == 4);  // three coefficients plus the dispersion
}

TEST_CASE("analytic gradients match finite differences") {
  Design d = fixture_design("y");
  Eigen::VectorXd beta(3);
  beta << -0.2, 0.8, -0.5;
  const double h = 1e-6;
  Eigen::VectorXd g = logit_gradient(d.X, d.y, beta);
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd up = beta, dn = beta;
    up(j) += h;
    dn(j) -= h;
    const double fd = (logit_loglik(d.X, d.y, up) - logit_loglik(d.X, d.y, dn)) / (2 * h);
    CHECK(g(j) == doctest::Approx(fd).epsilon(1e-4));
  }

  Design dc = fixture_design("yc", Family::negbin);
  Eigen::VectorXd bc(3);
  bc << 0.2, 0.6, -0.3;
  Eigen::VectorXd gc = negbin_gradient(dc.X, dc.y, bc, 0.4);
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd up = bc, dn = bc;
    up(j) += h;
    dn(j) -= h;
    const double fd =
        (negbin_loglik(dc.X, dc.y, up, 0.4) - negbin_loglik(dc.X, dc.y, dn, 0.4)) / (2 * h);
    CHECK(gc(j) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("ols recovers exact coefficients on noiseless data") {
  Eigen::MatrixXd X(5, 3);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i;
    X(i, 2) = i * i;
    y(i) = 2.0 - 3.0 * i + 0.5 * i * i;
  }
  RegressionFit fit = fit_ols(X, y, {"const", "t", "t2"});
  CHECK(fit.coefficients(0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.coefficients(1) == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(fit.coefficients(2) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fit.k == 3);
}

TEST_CASE("rank deficiency is reported with the collinear column named") {
  Eigen::MatrixXd X(6, 3);
  Eigen::VectorXd y(6);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = static_cast<double>(rng() % 10);
    X(i, 2) = 2.0 * X(i, 1);  // exact copy
    y(i) = static_cast<double>(i % 2);
  }
  CHECK_THROWS_WITH_AS(fit_logit(X, y, {"const", "a", "double_a"}),
                       doctest::Contains("collinear"), std::invalid_argument);
}

TEST_CASE("complete separation is detected, not silently blown up") {
  Eigen::MatrixXd X(8, 2);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i;
    y(i) = i >= 4 ? 1.0 : 0.0;
  }
  CHECK_THROWS_WITH_AS(fit_logit(X, y, {"const", "x"}), doctest::Contains("separation"),
                       std::runtime_error);
}

TEST_CASE("negbin on equidispersed counts hits the poisson limit flag") {
  std::mt19937_64 rng(9);
  const int n = 400;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = u(rng);
    std::poisson_distribution<int> pois(std::exp(0.5 + 0.4 * X(i, 1)));
    y(i) = pois(rng);
  }
  RegressionFit fit = fit_negbin(X, y, {"const", "x"});
  CHECK(fit.poisson_limit);
  CHECK(fit.coefficients(1) == doctest::Approx(0.4).epsilon(0.4));
}

TEST_CASE("negbin rejects non-integer responses") {
  Eigen::MatrixXd X(3, 1);
  X.setOnes();
  Eigen::VectorXd y(3);
  y << 1.0, 2.5, 3.0;
  CHECK_THROWS_AS(fit_negbin(X, y), std::invalid_argument);
}

TEST_CASE("design building: dummies, reference level, outcome exclusion") {
  std::istringstream csv(
      "y,x,prog\n"
      "1,0.5,beta\n"
      "0,0.2,alpha\n"
      "1,0.9,gamma\n"
      "0,0.1,alpha\n"
      "1,0.7,beta\n"
      "0,0.3,gamma\n");
  Dataset data = load_dataset_csv(csv, {"prog"});
  ModelSpec spec;
  spec.outcome = "y";
  spec.predictors = {"x"};
  spec.categorical_fe = {"prog"};
  Design d = build_design(data, spec);
  REQUIRE(d.names.size() == 4);  // intercept, x, prog=beta, prog=gamma (alpha is reference)
  CHECK(d.names[2] == "prog=beta");
  CHECK(d.names[3] == "prog=gamma");
  CHECK(d.X(0, 2) == 1.0);
  CHECK(d.X(1, 2) == 0.0);

  ModelSpec bad = spec;
  bad.predictors = {"x", "y"};
  CHECK_THROWS_AS(build_design(data, bad), std::invalid_argument);
}

TEST_CASE("margins curve is monotone for a single-predictor logit") {
  Design d = fixture_design("y");
  RegressionFit fit = fit_logit(d.X, d.y, d.names);
  MarginsCurve curve = margins(fit, d.X, 1, {-2.0, -1.0, 0.0, 1.0, 2.0, 4.0});
  for (std::size_t i = 1; i < curve.predicted.size(); ++i)
    CHECK(curve.predicted[i] > curve.predicted[i - 1]);  // beta_1 > 0
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    CHECK(curve.ci_low[i] < curve.predicted[i]);
    CHECK(curve.ci_high[i] > curve.predicted[i]);
    CHECK(curve.predicted[i] > 0.0);
    CHECK(curve.predicted[i] < 1.0);
  }
  CHECK(curve.outside_support.back());  // 4.0 exceeds the sample range
}

TEST_CASE("odds ratio, bic, and vif") {
  CHECK(odds_ratio(37.7, 0.01) == doctest::Approx(std::exp(0.377)).epsilon(1e-12));
  Design d = fixture_design("y");
  RegressionFit fit = fit_logit(d.X, d.y, d.names);
  CHECK(bic(fit) == doctest::Approx(3.0 * std::log(200.0) - 2.0 * fit.loglik).epsilon(1e-10));

  // vif of two independent-ish columns stays near 1; duplicated column blows up
  std::vector<double> v = vif(d.X, d.names);
  REQUIRE(v.size() == 2);
  CHECK(v[0] < 1.5);
  CHECK(v[1] < 1.5);
}

TEST_CASE("two-sample comparison bundles welch and ks") {
  std::vector<double> a{1.0, 1.2, 0.9, 1.4, 1.1, 1.3};
  std::vector<double> b{2.0, 2.2, 1.9, 2.4, 2.1};
  TwoSampleTests t = two_sample_tests(a, b);
  CHECK(*t.welch_t.p_value < 0.001);
  CHECK(t.ks.d == doctest::Approx(1.0));
}
