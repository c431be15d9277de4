#pragma once

#include "dema.hpp"
#include "hyperparams.hpp"
#include "lookahead.hpp"
#include "projection.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>

namespace admeta {

// Step rules. Each rule is a free function over a small state struct; every
// operation is element-wise, so the rules work for any Eigen column vector.

template <typename A, typename B>
auto sgd_step(Eigen::MatrixBase<A> const &theta, Eigen::MatrixBase<B> const &g, double alpha_t)
{
  require_same_size(theta, g, "sgd_step");
  using Scalar = typename A::Scalar;
  return VectorX<Scalar>(theta - static_cast<Scalar>(alpha_t) * g);
}

template <typename Scalar>
struct SgdmState
{
  VectorX<Scalar> m;
  Step            t = 0;

  SgdmState() = default;
  explicit SgdmState(Eigen::Index dim)
    : m(VectorX<Scalar>::Zero(dim))
  {
  }
};

/// m <- beta m + (1 - beta) g, theta <- theta - alpha m. The Nesterov form
/// steps along beta m_new + (1 - beta) g instead.
template <typename Scalar>
VectorX<Scalar> sgdm_step(SgdmState<Scalar> &state, VectorX<Scalar> const &theta, VectorX<Scalar> const &g,
                          double alpha_t, double beta, bool nesterov)
{
  require_same_size(theta, g, "sgdm_step");
  require_same_size(state.m, g, "sgdm_step(state)");
  auto const b = static_cast<Scalar>(beta);
  auto const a = static_cast<Scalar>(alpha_t);
  ++state.t;
  state.m = b * state.m + (Scalar(1) - b) * g;
  if (nesterov) {
    return theta - a * (b * state.m + (Scalar(1) - b) * g);
  }
  return theta - a * state.m;
}

template <typename Scalar>
struct AdamState
{
  VectorX<Scalar> m;
  VectorX<Scalar> v;
  Step            t = 0;

  AdamState() = default;
  explicit AdamState(Eigen::Index dim)
    : m(VectorX<Scalar>::Zero(dim))
    , v(VectorX<Scalar>::Zero(dim))
  {
  }
};

template <typename Scalar>
VectorX<Scalar> adam_step(AdamState<Scalar> &state, VectorX<Scalar> const &theta, VectorX<Scalar> const &g,
                          double alpha_t, double beta1, double beta2, double epsilon, bool bias_correct)
{
  require_same_size(theta, g, "adam_step");
  require_same_size(state.m, g, "adam_step(state)");
  auto const b1 = static_cast<Scalar>(beta1);
  auto const b2 = static_cast<Scalar>(beta2);
  ++state.t;
  state.m = b1 * state.m + (Scalar(1) - b1) * g;
  state.v = b2 * state.v + (Scalar(1) - b2) * g.cwiseAbs2();
  Scalar c1 = 1;
  Scalar c2 = 1;
  if (bias_correct) {
    c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.t));
    c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.t));
  }
  VectorX<Scalar> const m_hat = state.m / c1;
  VectorX<Scalar> const v_hat = state.v / c2;
  auto const            denom = (v_hat.array().sqrt() + static_cast<Scalar>(epsilon)).matrix();
  return theta - static_cast<Scalar>(alpha_t) * m_hat.cwiseQuotient(denom);
}

/// rho_inf = 2 / (1 - beta2) - 1
inline double rho_infinity(double beta2) { return 2.0 / (1.0 - beta2) - 1.0; }

/// rho_t = rho_inf - 2 t beta2^t / (1 - beta2^t)
inline double rho_at(double beta2, Step t)
{
  double const bt = std::pow(beta2, static_cast<double>(t));
  return rho_infinity(beta2) - 2.0 * static_cast<double>(t) * bt / (1.0 - bt);
}

/// Variance rectification r_t. Only defined for rho_t > 4.
inline double rectifier(double rho_t, double rho_inf)
{
  return std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
}

/// What the rectified-Adam family did on its last step.
struct RectifiedInfo
{
  double rho = 0.0;
  bool   tractable = false;
  double r = 0.0; ///< zero on un-adapted steps
};

template <typename Scalar>
struct RadamState
{
  VectorX<Scalar> m;
  VectorX<Scalar> v;
  Step            t = 0;
  double          rho_inf = 0.0;
  RectifiedInfo   last;

  RadamState() = default;
  RadamState(Eigen::Index dim, double beta2)
    : m(VectorX<Scalar>::Zero(dim))
    , v(VectorX<Scalar>::Zero(dim))
    , rho_inf(rho_infinity(beta2))
  {
  }
};

namespace detail {

// Shared by RAdam and AdmetaR so the two agree to the last bit when the
// Admeta-specific parts are switched off.
template <typename Scalar>
VectorX<Scalar> rectified_update(RadamState<Scalar> &s, VectorX<Scalar> const &theta, VectorX<Scalar> const &signal,
                                 double alpha_t, double beta1, double beta2, double epsilon, bool outer_ema,
                                 VUpdatePolicy policy)
{
  auto const b1 = static_cast<Scalar>(beta1);
  auto const b2 = static_cast<Scalar>(beta2);
  ++s.t;
  VectorX<Scalar> m_hat;
  if (outer_ema) {
    s.m = b1 * s.m + (Scalar(1) - b1) * signal;
    m_hat = s.m / (Scalar(1) - std::pow(b1, static_cast<Scalar>(s.t)));
  } else {
    s.m = signal;
    m_hat = signal;
  }
  double const rho = rho_at(beta2, s.t);
  bool const   tractable = rho > 4.0;
  if (policy == VUpdatePolicy::Always || tractable) {
    s.v = b2 * s.v + (Scalar(1) - b2) * signal.cwiseAbs2();
  }
  s.last = {rho, tractable, 0.0};
  if (!tractable) {
    return theta - static_cast<Scalar>(alpha_t) * m_hat;
  }
  double const          r = rectifier(rho, s.rho_inf);
  VectorX<Scalar> const v_hat = s.v / (Scalar(1) - std::pow(b2, static_cast<Scalar>(s.t)));
  auto const            denom = (v_hat.array().sqrt() + static_cast<Scalar>(epsilon)).matrix();
  s.last.r = r;
  return theta - static_cast<Scalar>(alpha_t * r) * m_hat.cwiseQuotient(denom);
}

} // namespace detail

/// Two-branch rectified Adam: un-adapted momentum step while rho_t <= 4,
/// rectified adaptive step afterwards. m is bias-corrected in both branches.
template <typename Scalar>
VectorX<Scalar> radam_step(RadamState<Scalar> &state, VectorX<Scalar> const &theta, VectorX<Scalar> const &g,
                           double alpha_t, double beta1, double beta2, double epsilon)
{
  require_same_size(theta, g, "radam_step");
  require_same_size(state.m, g, "radam_step(state)");
  return detail::rectified_update(state, theta, g, alpha_t, beta1, beta2, epsilon, true, VUpdatePolicy::Always);
}

/// Per-step diagnostics the harness writes to traces.
struct StepInfo
{
  bool   synced = false;
  double eta = 1.0;
  bool   lookahead = false;
};

template <typename Scalar>
struct AdmetaSState
{
  DemaState<Scalar>                     dema;
  SgdmState<Scalar>                     momentum;
  std::optional<LookaheadState<Scalar>> lookahead;
  Step                                  t = 0;
  StepInfo                              last;

  AdmetaSState() = default;
  AdmetaSState(VectorX<Scalar> const &theta0, HyperParams const &hp)
    : dema(theta0.size(), hp.lambda)
    , momentum(theta0.size())
  {
    if (hp.ablation.use_forward) {
      lookahead.emplace(theta0, hp.k, hp.phi_init);
    }
  }
};

/// DEMA signal, SGD-style outer momentum, then the lookahead synchronization.
template <typename Scalar>
VectorX<Scalar> admetas_step(AdmetaSState<Scalar> &state, VectorX<Scalar> const &theta, VectorX<Scalar> const &g,
                             double alpha_t, HyperParams const &hp)
{
  require_same_size(theta, g, "admetas_step");
  require_same_size(state.momentum.m, g, "admetas_step(state)");
  ++state.t;
  VectorX<Scalar> const h = hp.ablation.use_dema ? dema_step(state.dema, g) : g;
  VectorX<Scalar>       next;
  if (hp.ablation.use_backward) {
    next = sgdm_step(state.momentum, theta, h, alpha_t, hp.beta, hp.nesterov);
  } else {
    ++state.momentum.t;
    state.momentum.m = h;
    next = theta - static_cast<Scalar>(alpha_t) * h;
  }
  state.last = {};
  if (!state.lookahead) {
    return next;
  }
  auto sync = maybe_sync(*state.lookahead, next, state.t, hp.effective_eta());
  state.last = {sync.synced, sync.eta, true};
  return std::move(sync.theta);
}

template <typename Scalar>
struct AdmetaRState
{
  DemaState<Scalar>                     dema;
  RadamState<Scalar>                    rectified;
  std::optional<LookaheadState<Scalar>> lookahead;
  Step                                  t = 0;
  StepInfo                              last;

  AdmetaRState() = default;
  AdmetaRState(VectorX<Scalar> const &theta0, HyperParams const &hp)
    : dema(theta0.size(), hp.lambda)
    , rectified(theta0.size(), hp.beta2)
  {
    if (hp.ablation.use_forward) {
      lookahead.emplace(theta0, hp.k, hp.phi_init);
    }
  }
};

/// DEMA signal fed to the rectified-Adam update (second moment of h), the
/// result projected onto the box, then the lookahead synchronization.
template <typename Scalar>
VectorX<Scalar> admetar_step(AdmetaRState<Scalar> &state, VectorX<Scalar> const &theta, VectorX<Scalar> const &g,
                             double alpha_t, HyperParams const &hp, BoxConstraint const &box)
{
  require_same_size(theta, g, "admetar_step");
  require_same_size(state.rectified.m, g, "admetar_step(state)");
  ++state.t;
  VectorX<Scalar> const h = hp.ablation.use_dema ? dema_step(state.dema, g) : g;
  VectorX<Scalar>       next = detail::rectified_update(state.rectified, theta, h, alpha_t, hp.beta1, hp.beta2,
                                                        hp.epsilon, hp.ablation.use_backward, hp.v_update);
  if (!box.is_unbounded()) {
    if constexpr (std::is_same_v<Scalar, double>) {
      next = project(next, state.rectified.v.cwiseSqrt(), box);
    } else {
      next = project(next.template cast<double>(), state.rectified.v.template cast<double>().cwiseSqrt(), box)
               .template cast<Scalar>();
    }
  }
  state.last = {};
  if (!state.lookahead) {
    return next;
  }
  auto sync = maybe_sync(*state.lookahead, next, state.t, hp.effective_eta());
  state.last = {sync.synced, sync.eta, true};
  return std::move(sync.theta);
}

enum class OptimizerKind
{
  SGD,
  SGDM,
  Adam,
  RAdam,
  AdmetaS,
  AdmetaR
};

std::string   to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string const &text);

/// Display name including ablations, e.g. "AdmetaS[-DEMA,-LF]".
std::string optimizer_label(OptimizerKind kind, AblationFlags const &flags);

/// Uniform stateful stepper over all six rules. Applies the learning-rate
/// schedule and decoupled weight decay, then the selected rule.
class Optimizer
{
public:
  Optimizer(OptimizerKind kind, HyperParams hp, Eigen::Index dim, BoxConstraint box);
  Optimizer(Optimizer &&) noexcept;
  Optimizer &operator=(Optimizer &&) noexcept;
  ~Optimizer();

  /// One step at 1-based index t. t must follow the previous call by one.
  Params step(Params const &theta, Params const &g, Step t);

  OptimizerKind      kind() const { return kind_; }
  HyperParams const &hyperparams() const { return hp_; }
  Eigen::Index       dim() const { return dim_; }
  std::string        label() const { return optimizer_label(kind_, hp_.ablation); }
  StepInfo           last_step() const;
  double             last_lr() const { return last_lr_; }

  /// Rectified-family diagnostics; empty for other kinds.
  std::optional<RectifiedInfo> last_rectified() const;

private:
  struct Impl;

  OptimizerKind         kind_;
  HyperParams           hp_;
  Eigen::Index          dim_;
  BoxConstraint         box_;
  Step                  t_ = 0;
  double                last_lr_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

/// Validates hp (throws std::invalid_argument listing the errors) and builds
/// the stepper. Box defaults to unbounded.
Optimizer make_optimizer(OptimizerKind kind, HyperParams const &hp, Eigen::Index dim,
                         std::optional<BoxConstraint> box = std::nullopt);

} // namespace admeta
