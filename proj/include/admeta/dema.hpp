#pragma once

#include "types.hpp"

#include <cmath>
#include <stdexcept>

namespace admeta {

/// Mixing coefficients of the DEMA variant. Both depend on lambda only:
///   kappa = 10/lambda - 9,   mu = 25 - 10 (lambda + 1/lambda)
struct DemaCoeffs
{
  double kappa;
  double mu;
};

inline void require_unit_interval(double lambda, char const *where)
{
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument(std::string(where) + ": lambda out of (0,1)");
  }
}

/// kappa = 10/lambda - 9, mu = 25 - 10 (lambda + 1/lambda), evaluated in
/// factored form so mu keeps full relative precision near its root at 0.5.
inline DemaCoeffs dema_coeffs(double lambda)
{
  require_unit_interval(lambda, "dema_coeffs");
  return {(10.0 - 9.0 * lambda) / lambda, -10.0 * (lambda - 0.5) * (lambda - 2.0) / lambda};
}

/// Limit of h_t / g under a constant gradient, kappa + mu / (1 - lambda).
inline double steady_state_gain(double lambda)
{
  require_unit_interval(lambda, "steady_state_gain");
  return (6.0 - lambda) / (1.0 - lambda);
}

/// Inner accumulator I_t = lambda I_{t-1} + g_t plus the first gradient g1,
/// which feeds the decaying bias nu_t = lambda^t g1.
template <typename Scalar>
struct DemaState
{
  using Vector = VectorX<Scalar>;

  Vector inner;
  Vector g1;
  Step   t = 0;
  double lambda = 0.9;
  Scalar kappa = 0;
  Scalar mu = 0;

  DemaState() = default;
  DemaState(Eigen::Index dim, double lam)
    : inner(Vector::Zero(dim))
    , lambda(lam)
  {
    auto const c = dema_coeffs(lam);
    kappa = static_cast<Scalar>(c.kappa);
    mu = static_cast<Scalar>(c.mu);
  }

  /// lambda^t g1 for the current t (zero before the first step).
  Vector bias() const
  {
    if (t == 0) {
      return Vector::Zero(inner.size());
    }
    return static_cast<Scalar>(std::pow(lambda, static_cast<double>(t))) * g1;
  }
};

/// Advances the DEMA state by one gradient and returns
///   h_t = kappa g_t + mu I_t + lambda^t g1.
/// g1 is captured on the first call and never touched again.
template <typename Scalar, typename Derived>
VectorX<Scalar> dema_step(DemaState<Scalar> &state, Eigen::MatrixBase<Derived> const &g)
{
  require_same_size(state.inner, g, "dema_step");
  ++state.t;
  if (state.t == 1) {
    state.g1 = g;
  }
  state.inner = static_cast<Scalar>(state.lambda) * state.inner + g;
  return state.kappa * g + state.mu * state.inner + state.bias();
}

} // namespace admeta
