#include "admeta/optimizers.hpp"

#include <cctype>
#include <stdexcept>
#include <variant>

namespace admeta {

std::string to_string(OptimizerKind kind)
{
  switch (kind) {
  case OptimizerKind::SGD:
    return "SGD";
  case OptimizerKind::SGDM:
    return "SGDM";
  case OptimizerKind::Adam:
    return "Adam";
  case OptimizerKind::RAdam:
    return "RAdam";
  case OptimizerKind::AdmetaS:
    return "AdmetaS";
  case OptimizerKind::AdmetaR:
    return "AdmetaR";
  }
  return "?";
}

OptimizerKind parse_optimizer_kind(std::string const &text)
{
  std::string lower;
  for (char c : text) {
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (auto kind : {OptimizerKind::SGD, OptimizerKind::SGDM, OptimizerKind::Adam, OptimizerKind::RAdam,
                    OptimizerKind::AdmetaS, OptimizerKind::AdmetaR}) {
    std::string name = to_string(kind);
    for (auto &c : name) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (name == lower) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown optimizer '" + text + "'");
}

std::string optimizer_label(OptimizerKind kind, AblationFlags const &flags)
{
  std::string name = to_string(kind);
  if (kind != OptimizerKind::AdmetaS && kind != OptimizerKind::AdmetaR) {
    return name;
  }
  std::string tags;
  auto        add = [&tags](char const *s) {
    tags += tags.empty() ? "" : ",";
    tags += s;
  };
  if (!flags.use_dema) {
    add("-DEMA");
  }
  if (!flags.use_backward) {
    add("-LB");
  }
  if (!flags.use_forward) {
    add("-LF");
  }
  if (flags.forward_constant && flags.use_forward) {
    add("const-LF");
  }
  return tags.empty() ? name : name + "[" + tags + "]";
}

struct Optimizer::Impl
{
  std::variant<std::monostate, SgdmState<double>, AdamState<double>, RadamState<double>, AdmetaSState<double>,
               AdmetaRState<double>>
    state;
};

Optimizer::Optimizer(OptimizerKind kind, HyperParams hp, Eigen::Index dim, BoxConstraint box)
  : kind_(kind)
  , hp_(std::move(hp))
  , dim_(dim)
  , box_(std::move(box))
  , impl_(std::make_unique<Impl>())
{
  if (dim_ < 1) {
    throw std::invalid_argument("optimizer dimension must be >= 1");
  }
  if (box_.dim() != dim_) {
    throw DimensionMismatch("optimizer box", dim_, box_.dim());
  }
}

Optimizer::Optimizer(Optimizer &&) noexcept = default;
Optimizer &Optimizer::operator=(Optimizer &&) noexcept = default;
Optimizer::~Optimizer() = default;

Params Optimizer::step(Params const &theta, Params const &g, Step t)
{
  if (theta.size() != dim_) {
    throw DimensionMismatch("Optimizer::step(theta)", dim_, theta.size());
  }
  if (g.size() != dim_) {
    throw DimensionMismatch("Optimizer::step(g)", dim_, g.size());
  }
  if (t != t_ + 1) {
    throw std::logic_error("Optimizer::step: expected t = " + std::to_string(t_ + 1) + ", got " +
                           std::to_string(t));
  }
  t_ = t;

  if (std::holds_alternative<std::monostate>(impl_->state)) {
    switch (kind_) {
    case OptimizerKind::SGD:
      break;
    case OptimizerKind::SGDM:
      impl_->state = SgdmState<double>(dim_);
      break;
    case OptimizerKind::Adam:
      impl_->state = AdamState<double>(dim_);
      break;
    case OptimizerKind::RAdam:
      impl_->state = RadamState<double>(dim_, hp_.beta2);
      break;
    case OptimizerKind::AdmetaS:
      impl_->state = AdmetaSState<double>(theta, hp_);
      break;
    case OptimizerKind::AdmetaR:
      impl_->state = AdmetaRState<double>(theta, hp_);
      break;
    }
  }

  double const alpha_t = lr_at(hp_.schedule(), t);
  last_lr_ = alpha_t;

  Params decayed;
  auto   base = [&]() -> Params const & {
    if (hp_.weight_decay == 0.0) {
      return theta;
    }
    decayed = theta - (alpha_t * hp_.weight_decay) * theta;
    return decayed;
  };
  Params const &x = base();

  switch (kind_) {
  case OptimizerKind::SGD:
    return sgd_step(x, g, alpha_t);
  case OptimizerKind::SGDM:
    return sgdm_step(std::get<SgdmState<double>>(impl_->state), x, g, alpha_t, hp_.beta, hp_.nesterov);
  case OptimizerKind::Adam:
    return adam_step(std::get<AdamState<double>>(impl_->state), x, g, alpha_t, hp_.beta1, hp_.beta2, hp_.epsilon,
                     hp_.bias_correct);
  case OptimizerKind::RAdam:
    return radam_step(std::get<RadamState<double>>(impl_->state), x, g, alpha_t, hp_.beta1, hp_.beta2,
                      hp_.epsilon);
  case OptimizerKind::AdmetaS:
    return admetas_step(std::get<AdmetaSState<double>>(impl_->state), x, g, alpha_t, hp_);
  case OptimizerKind::AdmetaR:
    return admetar_step(std::get<AdmetaRState<double>>(impl_->state), x, g, alpha_t, hp_, box_);
  }
  throw std::logic_error("unreachable optimizer kind");
}

StepInfo Optimizer::last_step() const
{
  if (auto const *s = std::get_if<AdmetaSState<double>>(&impl_->state)) {
    return s->last;
  }
  if (auto const *s = std::get_if<AdmetaRState<double>>(&impl_->state)) {
    return s->last;
  }
  return {};
}

std::optional<RectifiedInfo> Optimizer::last_rectified() const
{
  if (auto const *s = std::get_if<RadamState<double>>(&impl_->state)) {
    return s->last;
  }
  if (auto const *s = std::get_if<AdmetaRState<double>>(&impl_->state)) {
    return s->rectified.last;
  }
  return std::nullopt;
}

Optimizer make_optimizer(OptimizerKind kind, HyperParams const &hp, Eigen::Index dim,
                         std::optional<BoxConstraint> box)
{
  auto report = validate_hyperparams(hp);
  if (!report.ok()) {
    std::string msg = "invalid hyperparameters:";
    for (auto const &e : report.errors) {
      msg += " " + e + ";";
    }
    throw std::invalid_argument(msg);
  }
  return Optimizer(kind, hp, dim, box ? std::move(*box) : BoxConstraint::unbounded(dim));
}

} // namespace admeta
