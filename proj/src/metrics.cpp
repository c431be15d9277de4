#include "admeta/metrics.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace admeta {

namespace {

std::size_t window_start(std::size_t n)
{
  // 1-based T from ceil(n/10); returned as a 0-based index
  std::size_t const first = (n + 9) / 10;
  return first == 0 ? 0 : first - 1;
}

} // namespace

std::optional<PowerFit> fit_power_law(std::span<double const> series)
{
  std::size_t const n = series.size();
  std::size_t const lo = window_start(n);
  if (n < 2 || n - lo < 2) {
    return std::nullopt;
  }
  Eigen::Index const m = static_cast<Eigen::Index>(n - lo);
  Eigen::MatrixXd    A(m, 2);
  Eigen::VectorXd    y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double const v = series[lo + static_cast<std::size_t>(i)];
    if (!(v > 0.0) || !std::isfinite(v)) {
      return std::nullopt;
    }
    A(i, 0) = 1.0;
    A(i, 1) = std::log(static_cast<double>(lo + static_cast<std::size_t>(i) + 1));
    y[i] = std::log(v);
  }
  Eigen::Vector2d const coef = A.colPivHouseholderQr().solve(y);
  double const          rms = std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(m));
  return PowerFit{coef[1], std::exp(coef[0]), rms, static_cast<std::size_t>(m)};
}

RegretReport regret(std::vector<Params> const &played, OnlineQuadraticStream const &stream,
                    Params const &comparator)
{
  if (static_cast<Eigen::Index>(played.size()) != stream.rounds()) {
    throw std::invalid_argument("regret: trace length " + std::to_string(played.size()) +
                                " does not match stream length " + std::to_string(stream.rounds()));
  }
  RegretReport r;
  r.cumulative.reserve(played.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < played.size(); ++i) {
    Step const t = static_cast<Step>(i) + 1;
    sum += stream.round_loss(t, played[i]) - stream.round_loss(t, comparator);
    r.cumulative.push_back(sum);
  }
  r.fit = fit_power_law(r.cumulative);
  return r;
}

std::optional<Step> first_hit_time(std::vector<Params> const &trace, Params const &target, double eps)
{
  if (!(eps > 0.0)) {
    throw std::invalid_argument("first_hit_time: eps must be > 0");
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    require_same_size(trace[i], target, "first_hit_time");
    if ((trace[i] - target).norm() < eps) {
      return static_cast<Step>(i) + 1;
    }
  }
  return std::nullopt;
}

double grad_check(Problem const &problem, Params const &theta, double h)
{
  if (!(h > 0.0)) {
    throw std::invalid_argument("grad_check: h must be > 0");
  }
  Params const analytic = grad(problem, theta);
  Params       x = theta;
  double       worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    x[i] = theta[i] + h;
    long double const up = loss_extended(problem, x);
    x[i] = theta[i] - h;
    long double const down = loss_extended(problem, x);
    x[i] = theta[i];
    double const numeric = static_cast<double>((up - down) / (2.0L * static_cast<long double>(h)));
    double const err = std::abs(numeric - analytic[i]) / std::max(std::abs(analytic[i]), 1e-8);
    worst = std::max(worst, err);
  }
  return worst;
}

RateReport min_grad_norm_series(std::vector<Params> const &trace, Problem const &problem)
{
  RateReport r;
  r.running_min.reserve(trace.size());
  double best = std::numeric_limits<double>::infinity();
  for (auto const &theta : trace) {
    double const g2 = grad(problem, theta).squaredNorm();
    if (g2 < best) {
      best = g2;
    }
    r.running_min.push_back(best);
  }

  std::size_t const n = r.running_min.size();
  std::size_t const lo = window_start(n);
  if (n >= 2 && n - lo >= 2) {
    Eigen::Index const m = static_cast<Eigen::Index>(n - lo);
    Eigen::MatrixXd    A(m, 2);
    Eigen::VectorXd    y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      double const t = static_cast<double>(lo + static_cast<std::size_t>(i) + 1);
      A(i, 0) = 1.0;
      A(i, 1) = std::log(t);
      y[i] = std::sqrt(t) * r.running_min[lo + static_cast<std::size_t>(i)];
    }
    if (y.allFinite()) {
      Eigen::Vector2d const coef = A.colPivHouseholderQr().solve(y);
      r.envelope = EnvelopeFit{coef[0], coef[1], std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(m))};
    }
  }
  return r;
}

RateReport min_grad_norm_series(RunTrace const &trace, Problem const &problem)
{
  if (!trace.has_all_snapshots()) {
    throw std::invalid_argument("min_grad_norm_series: trace is missing parameter snapshots");
  }
  std::vector<Params> points;
  points.reserve(trace.size());
  for (auto const &r : trace.records()) {
    points.push_back(*r.params);
  }
  return min_grad_norm_series(points, problem);
}

nlohmann::json to_json(RegretReport const &report)
{
  nlohmann::json j;
  j["series_length"] = report.cumulative.size();
  j["final_regret"] = report.cumulative.empty() ? 0.0 : report.cumulative.back();
  if (report.fit) {
    j["exponent"] = report.fit->exponent;
    j["coefficient"] = report.fit->coefficient;
    j["residual"] = report.fit->residual;
  } else {
    j["exponent"] = nullptr;
    j["coefficient"] = nullptr;
    j["residual"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(RateReport const &report)
{
  nlohmann::json j;
  j["series_length"] = report.running_min.size();
  j["final_min_grad_norm_sq"] = report.running_min.empty() ? 0.0 : report.running_min.back();
  if (report.envelope) {
    j["q1"] = report.envelope->q1;
    j["q2"] = report.envelope->q2;
    j["residual"] = report.envelope->residual;
  } else {
    j["q1"] = nullptr;
    j["q2"] = nullptr;
    j["residual"] = nullptr;
  }
  return j;
}

} // namespace admeta
