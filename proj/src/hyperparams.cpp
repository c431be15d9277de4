#include "admeta/hyperparams.hpp"

#include <sstream>
#include <stdexcept>

namespace admeta {

AblationFlags parse_ablation(std::string const &text)
{
  AblationFlags      flags;
  std::istringstream in(text);
  std::string        item;
  while (std::getline(in, item, ',')) {
    if (item.empty() || item == "none") {
      continue;
    } else if (item == "dema") {
      flags.use_dema = false;
    } else if (item == "lb") {
      flags.use_backward = false;
    } else if (item == "lf") {
      flags.use_forward = false;
    } else if (item == "const-lf") {
      flags.forward_constant = true;
    } else {
      throw std::invalid_argument("unknown ablation '" + item + "'");
    }
  }
  return flags;
}

std::string format_ablation(AblationFlags const &flags)
{
  std::string out;
  auto        add = [&out](char const *s) {
    if (!out.empty()) {
      out += ',';
    }
    out += s;
  };
  if (!flags.use_dema) {
    add("dema");
  }
  if (!flags.use_backward) {
    add("lb");
  }
  if (!flags.use_forward) {
    add("lf");
  }
  if (flags.forward_constant) {
    add("const-lf");
  }
  return out.empty() ? "none" : out;
}

ValidationReport validate_hyperparams(HyperParams const &hp)
{
  ValidationReport r;
  if (!(hp.lambda > 0.0 && hp.lambda < 1.0)) {
    r.errors.emplace_back("lambda out of (0,1)");
  }
  if (!(hp.alpha > 0.0)) {
    r.errors.emplace_back("alpha must be > 0");
  }
  if (!(hp.epsilon > 0.0)) {
    r.errors.emplace_back("epsilon must be > 0");
  }
  if (hp.k < 1) {
    r.errors.emplace_back("k must be >= 1");
  }
  auto in_unit = [](double b) { return b >= 0.0 && b < 1.0; };
  if (!in_unit(hp.beta)) {
    r.errors.emplace_back("beta out of [0,1)");
  }
  if (!in_unit(hp.beta1)) {
    r.errors.emplace_back("beta1 out of [0,1)");
  }
  if (!in_unit(hp.beta2)) {
    r.errors.emplace_back("beta2 out of [0,1)");
  }
  if (!(hp.weight_decay >= 0.0)) {
    r.errors.emplace_back("weight_decay must be >= 0");
  }
  if (hp.eta_schedule.kind == EtaSchedule::Kind::Const &&
      !(hp.eta_schedule.value > 0.0 && hp.eta_schedule.value <= 1.0)) {
    r.errors.emplace_back("constant eta out of (0,1]");
  }
  if (hp.lr_schedule.kind == LrSchedule::Kind::Milestone &&
      !(hp.lr_schedule.factor > 0.0 && hp.lr_schedule.factor <= 1.0)) {
    r.errors.emplace_back("milestone factor out of (0,1]");
  }
  // gamma = beta1^2 / beta2 < 1 is what the regret bound assumes.
  if (hp.beta2 <= 0.0 || hp.beta1 * hp.beta1 / hp.beta2 >= 1.0) {
    r.warnings.emplace_back("gamma = beta1^2/beta2 >= 1");
  }
  return r;
}

std::string format_v_update(VUpdatePolicy policy)
{
  return policy == VUpdatePolicy::Always ? "always" : "tractable-only";
}

VUpdatePolicy parse_v_update(std::string const &text)
{
  if (text == "always") {
    return VUpdatePolicy::Always;
  }
  if (text == "tractable-only") {
    return VUpdatePolicy::TractableOnly;
  }
  throw std::invalid_argument("unknown v-update policy '" + text + "'");
}

EtaSchedule parse_eta_schedule(std::string const &text)
{
  if (text == "dyn05") {
    return EtaSchedule::dyn05();
  }
  if (text == "dyn08") {
    return EtaSchedule::dyn08();
  }
  if (text.rfind("const:", 0) == 0) {
    return EtaSchedule::constant(std::stod(text.substr(6)));
  }
  throw std::invalid_argument("unknown eta schedule '" + text + "'");
}

std::string format_eta_schedule(EtaSchedule const &schedule)
{
  switch (schedule.kind) {
  case EtaSchedule::Kind::Dyn05:
    return "dyn05";
  case EtaSchedule::Kind::Dyn08:
    return "dyn08";
  case EtaSchedule::Kind::Const:
    break;
  }
  std::ostringstream out;
  out.precision(17);
  out << "const:" << schedule.value;
  return out.str();
}

} // namespace admeta
