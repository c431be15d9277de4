#pragma once

#include "problems.hpp"
#include "trace.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <vector>

namespace admeta {

/// y(T) ~ coefficient * T^exponent, least squares in log-log space.
/// residual is the RMS of the log-space residuals.
struct PowerFit
{
  double      exponent = 0.0;
  double      coefficient = 0.0;
  double      residual = 0.0;
  std::size_t points = 0;
};

/// Fits series[T-1] against T over T in [ceil(n/10), n]. Undefined (empty)
/// when fewer than two points are available or any value in the window is
/// not strictly positive.
std::optional<PowerFit> fit_power_law(std::span<double const> series);

struct RegretReport
{
  std::vector<double>     cumulative; ///< R(T) for T = 1..n
  std::optional<PowerFit> fit;
};

/// R(T) = sum_{t <= T} f_t(theta_t) - f_t(comparator), where played[t-1] is
/// the point played in round t.
RegretReport regret(std::vector<Params> const &played, OnlineQuadraticStream const &stream,
                    Params const &comparator);

/// Smallest 1-based t with ||trace[t-1] - target|| < eps.
std::optional<Step> first_hit_time(std::vector<Params> const &trace, Params const &target, double eps);

/// Worst coordinate relative error between the analytic gradient and central
/// differences with step h; denominator max(|analytic|, 1e-8).
double grad_check(Problem const &problem, Params const &theta, double h);

/// min_{s <= t} ||grad f(theta_s)||^2 ~ (q1 + q2 log t) / sqrt(t)
struct EnvelopeFit
{
  double q1 = 0.0;
  double q2 = 0.0;
  double residual = 0.0; ///< RMS residual of sqrt(t) * series
};

struct RateReport
{
  std::vector<double>        running_min;
  std::optional<EnvelopeFit> envelope;
};

/// Requires a parameter snapshot on every record; throws std::invalid_argument otherwise.
RateReport min_grad_norm_series(RunTrace const &trace, Problem const &problem);
RateReport min_grad_norm_series(std::vector<Params> const &trace, Problem const &problem);

nlohmann::json to_json(RegretReport const &report);
nlohmann::json to_json(RateReport const &report);

} // namespace admeta
