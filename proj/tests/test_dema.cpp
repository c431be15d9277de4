#include "admeta/dema.hpp"

#include <doctest.h>

#include <random>

using namespace admeta;

TEST_CASE("dema coefficients")
{
  auto c = dema_coeffs(0.5);
  CHECK(c.kappa == 11.0);
  CHECK(c.mu == 0.0);

  c = dema_coeffs(0.9);
  CHECK(c.kappa == doctest::Approx(2.1111111111).epsilon(1e-9));
  CHECK(c.mu == doctest::Approx(4.8888888889).epsilon(1e-9));

  CHECK_THROWS_AS(dema_coeffs(0.0), std::invalid_argument);
  CHECK_THROWS_AS(dema_coeffs(1.0), std::invalid_argument);
}

TEST_CASE("dema gain identity over a lambda grid")
{
  for (int i = 1; i < 1000; ++i) {
    double const lam = i / 1000.0;
    auto const   c = dema_coeffs(lam);
    CHECK(c.kappa + c.mu / (1.0 - lam) == doctest::Approx(steady_state_gain(lam)).epsilon(1e-10));
  }
  CHECK(steady_state_gain(0.9) == doctest::Approx(51.0).epsilon(1e-14));
  CHECK(steady_state_gain(0.5) == 11.0);
  CHECK(steady_state_gain(1e-12) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("dema first step hand trace")
{
  DemaState<double> s(1, 0.5);
  Params            g = Params::Ones(1);
  Params            h = dema_step(s, g);
  CHECK(s.inner[0] == 1.0);
  CHECK(s.bias()[0] == 0.5);
  CHECK(h[0] == 11.5);
}

TEST_CASE("dema zero input stays zero")
{
  DemaState<double> s(3, 0.9);
  for (int t = 0; t < 50; ++t) {
    CHECK(dema_step(s, Params::Zero(3)).isZero(0.0));
  }
}

TEST_CASE("dema steady state against an independent recurrence")
{
  double const      lam = 0.9;
  DemaState<double> s(1, lam);
  Params            g = Params::Constant(1, 2.0);
  // oracle: I_t = sum_{j<t} lam^j g, h = kappa g + mu I + lam^t g
  double inner = 0.0;
  double h = 0.0;
  for (int t = 1; t <= 2000; ++t) {
    h = dema_step(s, g)[0];
    inner = lam * inner + 2.0;
    double const expected = (10.0 / lam - 9.0) * 2.0 + (25.0 - 10.0 * (lam + 1.0 / lam)) * inner +
                            std::pow(lam, t) * 2.0;
    REQUIRE(h == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::abs(h / 2.0 - 51.0) < 0.01 * 51.0);
}

TEST_CASE("dema bias term decays geometrically")
{
  std::mt19937_64                        rng(7);
  std::normal_distribution<double>       n;
  DemaState<double>                      s(4, 0.7);
  Params                                 g1 = Params::NullaryExpr(4, [&] { return n(rng); });
  double                                 prev = std::numeric_limits<double>::infinity();
  dema_step(s, g1);
  for (int t = 1; t < 60; ++t) {
    double const nu = s.bias().lpNorm<Eigen::Infinity>();
    CHECK(nu <= std::pow(0.7, t) * g1.lpNorm<Eigen::Infinity>() * (1 + 1e-12));
    CHECK(nu < prev);
    prev = nu;
    dema_step(s, Params(Params::NullaryExpr(4, [&] { return n(rng); })));
  }
}

TEST_CASE("dema works for float scalars")
{
  DemaState<float>  s(2, 0.5);
  Eigen::VectorXf   g = Eigen::VectorXf::Ones(2);
  Eigen::VectorXf   h = dema_step(s, g);
  CHECK(h[0] == doctest::Approx(11.5f));
}
