#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "blat/date.hpp"
#include "blat/distributions.hpp"
#include "blat/errors.hpp"
#include "blat/linalg.hpp"
#include "blat/random.hpp"
#include "blat/types.hpp"
#include "support/synthetic.hpp"

namespace blat {
namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected blat::Error";
  return ErrorCode::ConfigError;
}

TEST(Errors, MessageNamesCodeAndSubject) {
  const Error e(ErrorCode::NonInvertible, "omega_f", "not invertible");
  EXPECT_EQ(std::string(e.what()), "NonInvertibleError(omega_f): not invertible");
  EXPECT_EQ(e.subject(), "omega_f");
  EXPECT_EQ(e.detail(), "not invertible");
}

TEST(Dates, RoundTrip) {
  const Date d = parse_date("2009-06-08");
  EXPECT_EQ(format_date(d), "2009-06-08");
  EXPECT_EQ(code_of([] { parse_date("2009-13-01"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_date("06/08/2009"); }), ErrorCode::ParseError);
}

TEST(Linalg, CholeskyRejectsIndefinite) {
  Matrix a(2, 2);
  a << 1, 2, 2, 1;
  EXPECT_FALSE(linalg::is_positive_definite(a));
  EXPECT_EQ(code_of([&] { linalg::cholesky(a, "a"); }), ErrorCode::NotPositiveDefinite);
}

TEST(Linalg, SpdInverse) {
  std::mt19937_64 rng(1);
  const Matrix a = testing::random_spd(4, rng);
  EXPECT_LT((a * linalg::spd_inverse(a, "a") - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Linalg, ConditionNumberGate) {
  Vector d(2);
  d << 1.0, 1e-13;
  const Matrix a = d.asDiagonal();
  EXPECT_GT(linalg::condition_number(a), kMaxConditionNumber);
  EXPECT_EQ(code_of([&] { linalg::factor_precision(a, "G"); }), ErrorCode::SingularMatrix);
}

TEST(MarketModel, Validation) {
  MarketModel ok{Matrix::Identity(2, 2), Vector::Zero(2), Matrix::Identity(2, 2), 0.5, 1.0};
  EXPECT_NO_THROW(validate_market_model(ok));

  MarketModel bad_sigma = ok;
  bad_sigma.sigma(1, 1) = -1.0;
  EXPECT_EQ(code_of([&] { validate_market_model(bad_sigma); }), ErrorCode::NotPositiveDefinite);

  MarketModel bad_tau = ok;
  bad_tau.tau = 0.0;
  EXPECT_EQ(code_of([&] { validate_market_model(bad_tau); }), ErrorCode::OutOfRange);

  MarketModel shape = ok;
  shape.prior_cov = Matrix::Identity(3, 3);
  EXPECT_EQ(code_of([&] { validate_market_model(shape); }), ErrorCode::ShapeMismatch);
}

TEST(ViewSpec, RejectsNonPositiveUncertaintyAndZeroRows) {
  EXPECT_EQ(code_of([] { ViewSpec(Matrix::Identity(1, 1), Vector::Ones(1), Vector::Zero(1)); }),
            ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([] { ViewSpec(Matrix::Zero(1, 2), Vector::Ones(1), Vector::Ones(1)); }),
            ErrorCode::InvariantViolation);
  EXPECT_EQ(code_of([] { ViewSpec(Matrix::Identity(2, 2), Vector::Ones(3), Vector::Ones(2)); }),
            ErrorCode::ShapeMismatch);
}

TEST(FeatureSpec, BlockLayout) {
  std::vector<Vector> f = {Vector::Constant(2, 1.0), Vector::Constant(2, 2.0)};
  const FeatureSpec spec(f, Matrix::Identity(2, 2));
  EXPECT_EQ(spec.stacked_dim(), 4);
  Matrix expected(2, 4);
  expected << 1, 1, 0, 0, 0, 0, 2, 2;
  EXPECT_EQ(spec.block(), expected);
}

TEST(FeatureSpec, RejectsIndefiniteError) {
  Matrix e(2, 2);
  e << 1, 0, 0, -1;
  EXPECT_EQ(code_of([&] { FeatureSpec({Vector::Ones(1), Vector::Ones(1)}, e); }),
            ErrorCode::NotPositiveDefinite);
}

TEST(StudentT, ShapeDofAndCovariance) {
  StudentTPredictive t{Vector::Zero(2), Matrix::Identity(2, 2) / 3.0, 4.0};
  EXPECT_DOUBLE_EQ(t.shape_dof(), 3.0);
  EXPECT_LT((t.covariance() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  StudentTPredictive low{Vector::Zero(2), Matrix::Identity(2, 2), 3.0};
  EXPECT_EQ(code_of([&] { low.covariance(); }), ErrorCode::InvalidDof);
}

TEST(Distributions, NormalDensityMatchesClosedForm) {
  MultivariateNormal n{Vector::Zero(1), Matrix::Constant(1, 1, 2.0)};
  const double x = 0.7;
  const double expected = std::exp(-x * x / 4.0) / std::sqrt(2.0 * M_PI * 2.0);
  EXPECT_NEAR(n.density(Vector::Constant(1, x)), expected, 1e-15);
}

TEST(Distributions, StudentTDensityScalarClosedForm) {
  // t_ν(0, s) at x: Γ((ν+1)/2) / (Γ(ν/2)√(νπs)) · (1 + x²/(νs))^(−(ν+1)/2)
  StudentTPredictive t{Vector::Zero(1), Matrix::Constant(1, 1, 0.5), 3.0};
  const double nu = 3.0, s = 0.5, x = 0.4;
  const double expected = std::tgamma((nu + 1) / 2) / (std::tgamma(nu / 2) * std::sqrt(nu * M_PI * s)) *
                          std::pow(1 + x * x / (nu * s), -(nu + 1) / 2);
  EXPECT_NEAR(density(t, Vector::Constant(1, x)), expected, 1e-14);
}

TEST(CounterRng, DeterministicAndStreamsDiffer) {
  CounterRng a(7, 0), b(7, 0), c(7, 1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    seen.insert(x);
    EXPECT_NE(x, c());
  }
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(a.substream(3)(), a.substream(4)());
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(11);
  const Vector z = standard_normal(200000, rng);
  EXPECT_NEAR(z.mean(), 0.0, 4.0 / std::sqrt(200000.0));
  EXPECT_NEAR((z.array() - z.mean()).square().sum() / (z.size() - 1), 1.0, 0.02);
}

TEST(InverseWishart, MeanMatchesPsiOverNuMinusDimMinusOne) {
  std::mt19937_64 gen(5);
  const Matrix psi = testing::random_spd(2, gen);
  const double nu = 8.0;
  CounterRng rng(3);
  Matrix sum = Matrix::Zero(2, 2);
  const int n = 40000;
  for (int i = 0; i < n; ++i) sum += sample_inverse_wishart(psi, nu, rng);
  const Matrix expected = psi / (nu - 2.0 - 1.0);
  EXPECT_LT((sum / n - expected).norm() / expected.norm(), 0.03);
}

}  // namespace
}  // namespace blat
