#include "admeta/schedule.hpp"

#include "admeta/trace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace admeta {

double lr_at(LrSchedule const &schedule, Step t)
{
  switch (schedule.kind) {
  case LrSchedule::Kind::Constant:
    return schedule.alpha;
  case LrSchedule::Kind::InverseSqrt:
    return schedule.alpha / std::sqrt(static_cast<double>(t));
  case LrSchedule::Kind::Milestone: {
    double lr = schedule.alpha;
    for (Step m : schedule.milestones) {
      if (t > m) {
        lr *= schedule.factor;
      }
    }
    return lr;
  }
  }
  return schedule.alpha;
}

namespace {

std::vector<std::string> split(std::string const &s, char sep)
{
  std::vector<std::string> out;
  std::string              item;
  std::istringstream       in(s);
  while (std::getline(in, item, sep)) {
    out.push_back(item);
  }
  return out;
}

} // namespace

LrSchedule parse_lr_schedule(std::string const &text, double alpha)
{
  if (text == "const" || text == "constant") {
    return LrSchedule::constant(alpha);
  }
  if (text == "invsqrt") {
    return LrSchedule::inverse_sqrt(alpha);
  }
  auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "milestone") {
    std::vector<Step> steps;
    for (auto const &s : split(parts[1], ',')) {
      steps.push_back(std::stoll(s));
    }
    std::sort(steps.begin(), steps.end());
    return LrSchedule::milestone(alpha, std::move(steps), std::stod(parts[2]));
  }
  throw std::invalid_argument("unknown lr schedule '" + text + "'");
}

std::string format_lr_schedule(LrSchedule const &schedule)
{
  switch (schedule.kind) {
  case LrSchedule::Kind::Constant:
    return "const";
  case LrSchedule::Kind::InverseSqrt:
    return "invsqrt";
  case LrSchedule::Kind::Milestone: {
    std::ostringstream out;
    out << "milestone:";
    for (std::size_t i = 0; i < schedule.milestones.size(); ++i) {
      out << (i ? "," : "") << schedule.milestones[i];
    }
    out << ":" << format_number(schedule.factor);
    return out.str();
  }
  }
  return "const";
}

} // namespace admeta
