#pragma once

#include "types.hpp"

#include <limits>

namespace admeta {

/// Axis-aligned feasible set. Default-constructed boxes are unbounded.
struct BoxConstraint
{
  Params lower;
  Params upper;

  static BoxConstraint unbounded(Eigen::Index dim);
  static BoxConstraint uniform(Eigen::Index dim, double lo, double hi);

  bool is_unbounded() const;
  bool contains(Params const &x) const;
  Eigen::Index dim() const { return lower.size(); }
};

/// Weighted projection argmin_{x in box} ||M^{1/2}(x - y)|| for diagonal M.
/// For a box this separates per coordinate and reduces to clamping, so the
/// metric only takes part in the argument checks.
Params project(Params const &y, Params const &metric_diag, BoxConstraint const &box);

} // namespace admeta
