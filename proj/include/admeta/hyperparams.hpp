#pragma once

#include "lookahead.hpp"
#include "schedule.hpp"

#include <string>
#include <vector>

namespace admeta {

/// Switches for the ablation variants. All on is the full optimizer.
struct AblationFlags
{
  bool use_dema = true;          ///< off: h_t = g_t (plain EMA of g)
  bool use_backward = true;      ///< off: outer momentum removed, m_t = h_t
  bool use_forward = true;       ///< off: no lookahead wrapper
  bool forward_constant = false; ///< on: constant eta instead of the dynamic schedule

  bool full() const { return use_dema && use_backward && use_forward && !forward_constant; }
  bool operator==(AblationFlags const &) const = default;
};

/// Parses the comma list used by --ablate: any of dema, lb, lf, const-lf.
AblationFlags parse_ablation(std::string const &text);
std::string   format_ablation(AblationFlags const &flags);

enum class VUpdatePolicy
{
  Always,       ///< second moment updated every step (RAdam behaviour)
  TractableOnly ///< updated only while rho_t > 4
};

struct HyperParams
{
  double        alpha = 0.01;
  double        lambda = 0.9;
  double        beta = 0.9;
  double        beta1 = 0.9;
  double        beta2 = 0.999;
  double        epsilon = 1e-8;
  int           k = 6;
  EtaSchedule   eta_schedule = EtaSchedule::dyn08();
  PhiInit       phi_init = PhiInit::Current;
  bool          nesterov = false;
  bool          bias_correct = true;
  double        weight_decay = 0.0;
  LrSchedule    lr_schedule; ///< alpha inside is overwritten by schedule()
  VUpdatePolicy v_update = VUpdatePolicy::Always;
  AblationFlags ablation;

  LrSchedule schedule() const
  {
    LrSchedule s = lr_schedule;
    s.alpha = alpha;
    return s;
  }

  /// The eta schedule after applying the constant-LF ablation, which pins eta
  /// at the dynamic schedule's limit.
  EtaSchedule effective_eta() const
  {
    if (ablation.forward_constant && eta_schedule.kind != EtaSchedule::Kind::Const) {
      return EtaSchedule::constant(eta_schedule.limit());
    }
    return eta_schedule;
  }
};

struct ValidationReport
{
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate_hyperparams(HyperParams const &hp);

std::string   format_v_update(VUpdatePolicy policy);
VUpdatePolicy parse_v_update(std::string const &text);

} // namespace admeta
