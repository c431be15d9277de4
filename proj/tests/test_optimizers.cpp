#include "admeta/optimizers.hpp"
#include "admeta/problems.hpp"

#include <doctest.h>

#include <random>

using namespace admeta;

namespace {

Params vec(std::initializer_list<double> xs)
{
  Params v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) {
    v[i++] = x;
  }
  return v;
}

std::vector<Params> gradient_stream(std::uint64_t seed, int steps, Eigen::Index dim, double scale = 1.0)
{
  std::mt19937_64                  rng(seed);
  std::normal_distribution<double> n;
  std::vector<Params>              out;
  for (int i = 0; i < steps; ++i) {
    out.push_back(Params(Params::NullaryExpr(dim, [&] { return scale * n(rng); })));
  }
  return out;
}

} // namespace

TEST_CASE("sgd step")
{
  Params next = sgd_step(vec({1, 2}), vec({0.5, -1}), 0.1);
  CHECK(next[0] == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(next[1] == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(sgd_step(vec({1, 2}), vec({0, 0}), 0.1) == vec({1, 2}));
  CHECK(sgd_step(vec({1, 2}), vec({3, 4}), 0.0) == vec({1, 2}));
  CHECK_THROWS_AS(sgd_step(vec({1, 2}), vec({1}), 0.1), DimensionMismatch);
}

TEST_CASE("sgdm step")
{
  SgdmState<double> s(1);
  Params            next = sgdm_step(s, vec({0}), vec({1}), 0.1, 0.9, false);
  CHECK(s.m[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(next[0] == doctest::Approx(-0.01).epsilon(1e-15));

  SgdmState<double> z(3);
  Params            theta = vec({1, -2, 3});
  for (auto const &g : gradient_stream(1, 20, 3)) {
    Params a = sgdm_step(z, theta, g, 0.05, 0.0, false);
    CHECK(a == sgd_step(theta, g, 0.05));
    theta = a;
  }

  SgdmState<double> c(1);
  for (int t = 0; t < 200; ++t) {
    sgdm_step(c, vec({0}), vec({2}), 0.1, 0.9, false);
  }
  CHECK(std::abs(c.m[0] - 2.0) < 1e-6 * 2.0 + 1e-8);
}

TEST_CASE("adam first step and zero stream")
{
  AdamState<double> s(2);
  Params            g = vec({0.3, -4});
  Params            next = adam_step(s, vec({0, 0}), g, 0.1, 0.9, 0.999, 1e-8, true);
  CHECK(next[0] == doctest::Approx(-0.1 * 0.3 / (0.3 + 1e-8)).epsilon(1e-12));
  CHECK(next[1] == doctest::Approx(0.1 * 4 / (4 + 1e-8)).epsilon(1e-12));

  AdamState<double> z(2);
  Params            theta = vec({1, 2});
  for (int t = 0; t < 100; ++t) {
    theta = adam_step(z, theta, vec({0, 0}), 0.1, 0.9, 0.999, 1e-8, true);
  }
  CHECK(theta == vec({1, 2}));
}

TEST_CASE("adam is scale invariant")
{
  AdamState<double> a(3);
  AdamState<double> b(3);
  Params            ta = vec({1, 1, 1});
  Params            tb = ta;
  for (auto const &g : gradient_stream(3, 200, 3)) {
    ta = adam_step(a, ta, g, 0.01, 0.9, 0.999, 1e-12, true);
    tb = adam_step(b, tb, Params(1000.0 * g), 0.01, 0.9, 0.999, 1e-12, true);
  }
  CHECK((ta - tb).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("rectification threshold")
{
  CHECK(rho_infinity(0.999) == doctest::Approx(1999.0).epsilon(1e-12));
  CHECK(rho_at(0.999, 1) == doctest::Approx(1.0).epsilon(1e-9));
  Step first = 0;
  for (Step t = 1; t <= 10 && first == 0; ++t) {
    if (rho_at(0.999, t) > 4.0) {
      first = t;
    }
  }
  // rho_t is just under t for small t, so rho_4 = 3.9975 misses the threshold
  CHECK(first == 5);
  CHECK(rho_at(0.999, 4) == doctest::Approx(3.99750).epsilon(1e-5));
  CHECK(rho_at(0.999, 5) == doctest::Approx(4.99600).epsilon(1e-5));
  CHECK(std::abs(rectifier(rho_at(0.999, 1000000), rho_infinity(0.999)) - 1.0) < 1e-3);
}

TEST_CASE("radam branches")
{
  RadamState<double> s(1, 0.999);
  Params             theta = vec({0});
  for (Step t = 1; t <= 50; ++t) {
    Params next = radam_step(s, theta, vec({2}), 0.1, 0.9, 0.999, 1e-8);
    if (t <= 4) {
      CHECK_FALSE(s.last.tractable);
      CHECK(next[0] == doctest::Approx(theta[0] - 0.1 * 2.0).epsilon(1e-12));
    } else {
      CHECK(s.last.tractable);
      CHECK(s.last.r > 0.0);
      CHECK(s.last.r < 1.0);
    }
    theta = next;
  }
}

TEST_CASE("admetas scalar hand trace")
{
  HyperParams hp;
  hp.lambda = 0.5;
  hp.beta = 0.9;
  hp.ablation.use_forward = false;
  AdmetaSState<double> s(vec({1}), hp);
  Params               next = admetas_step(s, vec({1}), vec({1}), 0.1, hp);
  CHECK(s.momentum.m[0] == doctest::Approx(1.15).epsilon(1e-14));
  CHECK(next[0] == doctest::Approx(0.885).epsilon(1e-14));
}

TEST_CASE("admetas with lookahead does not sync before k")
{
  HyperParams hp;
  hp.lambda = 0.5;
  AdmetaSState<double> s(vec({1}), hp);
  admetas_step(s, vec({1}), vec({1}), 0.1, hp);
  CHECK(s.lookahead);
  CHECK_FALSE(s.last.synced);
}

TEST_CASE("admetas collapses to sgdm")
{
  HyperParams hp;
  hp.beta = 0.8;
  hp.ablation = parse_ablation("dema,lf");
  Params               a = vec({0.5, -1, 2});
  Params               b = a;
  AdmetaSState<double> s(a, hp);
  SgdmState<double>    m(3);
  for (auto const &g : gradient_stream(5, 300, 3)) {
    a = admetas_step(s, a, g, 0.03, hp);
    b = sgdm_step(m, b, g, 0.03, 0.8, false);
    REQUIRE(a == b);
  }
}

TEST_CASE("admetar collapses to radam")
{
  HyperParams hp;
  hp.ablation = parse_ablation("dema,lf");
  hp.v_update = VUpdatePolicy::Always;
  Params               a = vec({0.5, -1, 2});
  Params               b = a;
  AdmetaRState<double> s(a, hp);
  RadamState<double>   r(3, hp.beta2);
  auto const           box = BoxConstraint::unbounded(3);
  for (auto const &g : gradient_stream(6, 300, 3)) {
    a = admetar_step(s, a, g, 0.01, hp, box);
    b = radam_step(r, b, g, 0.01, hp.beta1, hp.beta2, hp.epsilon);
    REQUIRE(a == b);
  }
}

TEST_CASE("admetar g = 0 stream and box")
{
  HyperParams          hp;
  Params               theta = vec({0.2, -0.4});
  AdmetaRState<double> s(theta, hp);
  for (int t = 0; t < 30; ++t) {
    theta = admetar_step(s, theta, vec({0, 0}), 0.1, hp, BoxConstraint::unbounded(2));
  }
  CHECK(theta == vec({0.2, -0.4}));

  AdmetaRState<double> b(vec({0, 0}), hp);
  auto const           box = BoxConstraint::uniform(2, -0.05, 0.05);
  Params               p = vec({0, 0});
  for (int t = 0; t < 30; ++t) {
    p = admetar_step(b, p, vec({-5, 5}), 0.5, hp, box);
    REQUIRE(box.contains(p));
  }
}

TEST_CASE("tractable-only skips the early v updates")
{
  HyperParams hp;
  hp.ablation = parse_ablation("dema,lf");
  hp.v_update = VUpdatePolicy::TractableOnly;
  AdmetaRState<double> s(vec({0}), hp);
  for (int t = 0; t < 4; ++t) {
    admetar_step(s, vec({0}), vec({1}), 0.1, hp, BoxConstraint::unbounded(1));
  }
  CHECK(s.rectified.v[0] == 0.0);
  admetar_step(s, vec({0}), vec({1}), 0.1, hp, BoxConstraint::unbounded(1));
  CHECK(s.rectified.v[0] > 0.0);
}

TEST_CASE("optimizer facade")
{
  CHECK(parse_optimizer_kind("admetas") == OptimizerKind::AdmetaS);
  CHECK(parse_optimizer_kind("RAdam") == OptimizerKind::RAdam);
  CHECK_THROWS(parse_optimizer_kind("lion"));
  CHECK(optimizer_label(OptimizerKind::AdmetaS, parse_ablation("dema,lf")) == "AdmetaS[-DEMA,-LF]");
  CHECK(optimizer_label(OptimizerKind::AdmetaS, {}) == "AdmetaS");
  CHECK(optimizer_label(OptimizerKind::AdmetaS, parse_ablation("const-lf")) == "AdmetaS[const-LF]");

  HyperParams hp;
  hp.alpha = 0.1;
  hp.lr_schedule = LrSchedule::inverse_sqrt(0.0);
  Optimizer opt = make_optimizer(OptimizerKind::SGD, hp, 2);
  Params    theta = vec({1, 1});
  for (Step t = 1; t <= 10; ++t) {
    Params g = vec({0.5, -0.25});
    Params expected = sgd_step(theta, g, 0.1 / std::sqrt(double(t)));
    theta = opt.step(theta, g, t);
    REQUIRE(theta == expected);
    CHECK(opt.last_lr() == lr_at(hp.schedule(), t));
  }
  CHECK_THROWS(opt.step(theta, vec({0, 0}), 12));
  CHECK_THROWS_AS(opt.step(theta, vec({0}), 11), DimensionMismatch);

  HyperParams bad;
  bad.lambda = 1.0;
  CHECK_THROWS_AS(make_optimizer(OptimizerKind::AdmetaS, bad, 2), std::invalid_argument);
}

TEST_CASE("optimizer facade is deterministic for every kind")
{
  for (auto kind : {OptimizerKind::SGD, OptimizerKind::SGDM, OptimizerKind::Adam, OptimizerKind::RAdam,
                    OptimizerKind::AdmetaS, OptimizerKind::AdmetaR}) {
    HyperParams hp;
    hp.weight_decay = 1e-3;
    Optimizer a = make_optimizer(kind, hp, 4);
    Optimizer b = make_optimizer(kind, hp, 4);
    Params    ta = Params::Ones(4);
    Params    tb = ta;
    Step      t = 0;
    for (auto const &g : gradient_stream(9, 100, 4)) {
      ++t;
      ta = a.step(ta, g, t);
      tb = b.step(tb, g, t);
    }
    CHECK(ta == tb);
    CHECK(ta.allFinite());
    CHECK(a.last_rectified().has_value() == (kind == OptimizerKind::RAdam || kind == OptimizerKind::AdmetaR));
  }
}

TEST_CASE("admetas ablation variants are all constructible")
{
  for (std::string flags : {"", "dema", "lb", "lf", "lb,lf", "const-lf"}) {
    HyperParams hp;
    hp.ablation = parse_ablation(flags);
    Optimizer opt = make_optimizer(OptimizerKind::AdmetaS, hp, 2);
    Params    theta = vec({1, -1});
    for (Step t = 1; t <= 12; ++t) {
      theta = opt.step(theta, theta, t);
    }
    CHECK(theta.allFinite());
    CHECK(opt.last_step().lookahead == hp.ablation.use_forward);
  }
}

TEST_CASE("admetas works in float")
{
  HyperParams hp;
  hp.lambda = 0.5;
  hp.ablation.use_forward = false;
  AdmetaSState<float> s(Eigen::VectorXf::Ones(1), hp);
  Eigen::VectorXf     next = admetas_step(s, Eigen::VectorXf(Eigen::VectorXf::Ones(1)),
                                          Eigen::VectorXf(Eigen::VectorXf::Ones(1)), 0.1, hp);
  CHECK(next[0] == doctest::Approx(0.885f));
}
