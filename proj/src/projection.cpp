#include "admeta/projection.hpp"

#include <stdexcept>

namespace admeta {

BoxConstraint BoxConstraint::unbounded(Eigen::Index dim)
{
  double const inf = std::numeric_limits<double>::infinity();
  return {Params::Constant(dim, -inf), Params::Constant(dim, inf)};
}

BoxConstraint BoxConstraint::uniform(Eigen::Index dim, double lo, double hi)
{
  if (!(lo <= hi)) {
    throw std::invalid_argument("box lower bound exceeds upper bound");
  }
  return {Params::Constant(dim, lo), Params::Constant(dim, hi)};
}

bool BoxConstraint::is_unbounded() const
{
  return (lower.array() == -std::numeric_limits<double>::infinity()).all() &&
         (upper.array() == std::numeric_limits<double>::infinity()).all();
}

bool BoxConstraint::contains(Params const &x) const
{
  return x.size() == lower.size() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Params project(Params const &y, Params const &metric_diag, BoxConstraint const &box)
{
  require_same_size(y, metric_diag, "project(metric)");
  require_same_size(y, box.lower, "project(box)");
  if ((metric_diag.array() < 0.0).any()) {
    throw std::invalid_argument("project: metric weights must be nonnegative");
  }
  if ((box.lower.array() > box.upper.array()).any()) {
    throw std::invalid_argument("project: empty box");
  }
  return y.cwiseMax(box.lower).cwiseMin(box.upper);
}

} // namespace admeta
