#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace admeta {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// The optimized variable. Length is fixed for the lifetime of a run.
using Params = Eigen::VectorXd;

/// 1-based step index; t = 1 is the first gradient step.
using Step = std::int64_t;

class DimensionMismatch : public std::invalid_argument
{
public:
  DimensionMismatch(std::string const &what, Eigen::Index expected, Eigen::Index got)
    : std::invalid_argument(what + ": expected dimension " + std::to_string(expected) + ", got " +
                            std::to_string(got))
  {
  }
};

template <typename A, typename B>
void require_same_size(Eigen::MatrixBase<A> const &a, Eigen::MatrixBase<B> const &b, char const *where)
{
  if (a.size() != b.size()) {
    throw DimensionMismatch(where, a.size(), b.size());
  }
}

} // namespace admeta
