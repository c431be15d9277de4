#pragma once

#include "projection.hpp"
#include "types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>

namespace admeta {

using Rng = std::mt19937_64;

/// f(theta) = 1/2 sum a_i theta_i^2, optimum at 0.
struct QuadraticValley
{
  Params diag;

  /// a = scale * [1, ..., condition], log-spaced for dim > 2.
  static QuadraticValley with_condition(Eigen::Index dim = 2, double condition = 100.0, double scale = 1.0);
  double condition_number() const { return diag.maxCoeff() / diag.minCoeff(); }
};

/// Sum over coordinate pairs of 100 (y - x^2)^2 + (1 - x)^2. Even dimension.
struct Rosenbrock
{
  Eigen::Index dim = 2;
};

/// Online sequence of diagonal quadratics
///   f_t(theta) = 1/2 sum a_{t,i} theta_i^2 - b_{t,i} theta_i
/// played inside a box. curvature and linear are rounds x dim.
struct OnlineQuadraticStream
{
  Eigen::MatrixXd curvature;
  Eigen::MatrixXd linear;
  BoxConstraint   box;

  static OnlineQuadraticStream generate(std::uint64_t seed, Eigen::Index rounds, Eigen::Index dim = 2,
                                        double noise = 0.5);

  Eigen::Index rounds() const { return curvature.rows(); }
  Eigen::Index dim() const { return curvature.cols(); }

  /// Round index is 1-based.
  double round_loss(Step t, Params const &theta) const;
  Params round_grad(Step t, Params const &theta) const;

  /// Offline optimum of the summed rounds 1..upto (all rounds by default).
  Params comparator(std::optional<Eigen::Index> upto = std::nullopt) const;
};

struct Dataset
{
  Eigen::MatrixXd features; ///< n x 2
  Eigen::VectorXi labels;   ///< 0 or 1
};

/// Two Gaussian clusters centred at +-separation/2 (1, 1)/sqrt(2) with unit
/// variance. Labels are fair coin flips.
Dataset gen_synthetic_dataset(std::uint64_t seed, Eigen::Index n, double separation = 3.0);

void write_dataset_csv(std::string const &path, Dataset const &data);

/// in-hidden-out perceptron, tanh hidden layer, softmax cross-entropy.
/// Parameter layout: W1 (hidden x in, column-major), b1, W2 (out x hidden), b2.
struct TinyMlp
{
  Eigen::Index inputs = 2;
  Eigen::Index hidden = 16;
  Eigen::Index outputs = 2;
  Dataset      data;
  Eigen::Index batch_size = 32; ///< 0 means full batch

  static TinyMlp make(std::uint64_t data_seed, Eigen::Index n = 1000, Eigen::Index hidden = 16);

  Eigen::Index param_count() const { return hidden * inputs + hidden + outputs * hidden + outputs; }

  /// Mean loss and gradient over the listed rows (all rows when empty).
  double loss_and_grad(Params const &theta, std::vector<Eigen::Index> const &rows, Params *grad) const;
  long double loss_and_grad_extended(Params const &theta, std::vector<Eigen::Index> const &rows, Params *grad) const;
  double accuracy(Params const &theta) const;
};

using Problem = std::variant<QuadraticValley, Rosenbrock, OnlineQuadraticStream, TinyMlp>;

std::string  problem_name(Problem const &p);
Eigen::Index dimension(Problem const &p);

/// Exact objective and gradient. For the online stream this is the average
/// over all rounds.
double loss(Problem const &p, Params const &theta);

/// The objective accumulated in long double. Finite differences of this are
/// limited by truncation error rather than by the rounding of f to double.
long double loss_extended(Problem const &p, Params const &theta);
Params grad(Problem const &p, Params const &theta);

/// Unbiased mini-batch gradient. TinyMlp samples batch_size rows with
/// replacement; the online stream samples one round. Other problems throw.
Params stochastic_grad(Problem const &p, Params const &theta, Rng &rng);

std::optional<Params> optimum(Problem const &p);

/// Seeded starting point: uniform in [-2, 2]^d for the valley, the classic
/// (-1.2, 1) pairs for Rosenbrock, the box centre for the stream, and a
/// scaled Gaussian init for the MLP.
Params initial_point(Problem const &p, std::uint64_t seed);

} // namespace admeta
