#pragma once

#include "types.hpp"

#include <string>
#include <vector>

namespace admeta {

/// Step-indexed learning rate alpha_t. Milestones are step counts; callers
/// that think in epochs convert before building the schedule.
struct LrSchedule
{
  enum class Kind
  {
    Constant,
    InverseSqrt,
    Milestone
  };

  Kind              kind = Kind::Constant;
  double            alpha = 0.01;
  std::vector<Step> milestones;
  double            factor = 0.1;

  static LrSchedule constant(double alpha) { return {Kind::Constant, alpha, {}, 1.0}; }
  static LrSchedule inverse_sqrt(double alpha) { return {Kind::InverseSqrt, alpha, {}, 1.0}; }
  static LrSchedule milestone(double alpha, std::vector<Step> milestones, double factor)
  {
    return {Kind::Milestone, alpha, std::move(milestones), factor};
  }
};

double lr_at(LrSchedule const &schedule, Step t);

// "const", "invsqrt", "milestone:80,120:0.1". The alpha field is left untouched.
LrSchedule  parse_lr_schedule(std::string const &text, double alpha);
std::string format_lr_schedule(LrSchedule const &schedule);

} // namespace admeta
