#pragma once

#include "types.hpp"

#include <cmath>
#include <string>

namespace admeta {

/// Interpolation weight eta_t given to the fast weights at a synchronization.
struct EtaSchedule
{
  enum class Kind
  {
    Const,
    Dyn05, ///< 0.5 * (1 + 1 / (0.01 sqrt(t) + 1)), decays from 1 toward 0.5
    Dyn08  ///< 0.8 * (1 + 1 / (0.1 sqrt(t) + 3.8)), decays from ~1.01 toward 0.8
  };

  Kind   kind = Kind::Dyn08;
  double value = 0.8; ///< only read for Const

  static EtaSchedule constant(double eta) { return {Kind::Const, eta}; }
  static EtaSchedule dyn05() { return {Kind::Dyn05, 0.5}; }
  static EtaSchedule dyn08() { return {Kind::Dyn08, 0.8}; }

  /// The value the schedule settles at; for Const, the constant itself.
  double limit() const
  {
    switch (kind) {
    case Kind::Dyn05:
      return 0.5;
    case Kind::Dyn08:
      return 0.8;
    case Kind::Const:
      break;
    }
    return value;
  }
};

inline double eta_at(EtaSchedule const &schedule, Step t)
{
  double const root = std::sqrt(static_cast<double>(t));
  switch (schedule.kind) {
  case EtaSchedule::Kind::Dyn05:
    return 0.5 * (1.0 + 1.0 / (0.01 * root + 1.0));
  case EtaSchedule::Kind::Dyn08:
    return 0.8 * (1.0 + 1.0 / (0.1 * root + 3.8));
  case EtaSchedule::Kind::Const:
    break;
  }
  return schedule.value;
}

// "const:<v>", "dyn05", "dyn08"
EtaSchedule parse_eta_schedule(std::string const &text);
std::string format_eta_schedule(EtaSchedule const &schedule);

enum class PhiInit
{
  Current, ///< phi_0 = theta before the first step
  Zero     ///< phi_0 = 0, as the printed algorithms initialize it
};

/// Slow weights of the forward-looking wrapper. phi only changes at
/// synchronization steps (t mod k == 0).
template <typename Scalar>
struct LookaheadState
{
  using Vector = VectorX<Scalar>;

  Vector phi;
  int    k = 6;
  Step   sync_count = 0;

  LookaheadState() = default;
  LookaheadState(Vector const &theta0, int period, PhiInit init)
    : phi(init == PhiInit::Zero ? Vector(Vector::Zero(theta0.size())) : theta0)
    , k(period)
  {
  }
};

/// Result of one call to maybe_sync.
template <typename Scalar>
struct SyncResult
{
  VectorX<Scalar> theta;
  bool            synced = false;
  double          eta = 1.0; ///< the weight used, or 1 when no sync happened
};

/// Called after fast step t completes. On t mod k == 0 the slow weights move
/// to eta_t theta + (1 - eta_t) phi and become the new fast weights.
template <typename Scalar, typename Derived>
SyncResult<Scalar> maybe_sync(LookaheadState<Scalar> &state, Eigen::MatrixBase<Derived> const &theta, Step t,
                              EtaSchedule const &schedule)
{
  require_same_size(state.phi, theta, "maybe_sync");
  if (state.k < 1 || t % state.k != 0) {
    return {theta, false, 1.0};
  }
  auto const eta = static_cast<Scalar>(eta_at(schedule, t));
  state.phi = eta * theta + (Scalar(1) - eta) * state.phi;
  ++state.sync_count;
  return {state.phi, true, static_cast<double>(eta)};
}

} // namespace admeta
