#pragma once

#include "metrics.hpp"
#include "run_config.hpp"
#include "trace.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace admeta {

struct RunResult
{
  std::string              label;
  RunTrace                 trace;
  std::vector<Params>      played; ///< online stream only: theta used in each round
  Params                   start;
  Params                   final_theta;
  double                   initial_loss = 0.0;
  double                   final_loss = 0.0;
  std::optional<Step>      first_hit;
  std::optional<double>    accuracy;
  std::optional<RegretReport> regret;
  double                   min_grad_norm_sq = 0.0;
  bool                     diverged = false;
  double                   wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Runs config.steps optimizer steps from the seeded starting point. The
/// trace's loss column is the objective at theta_t, except for the online
/// stream where it is the round loss f_t of the point played in round t.
RunResult run_experiment(RunConfig const &config);

nlohmann::json summary_json(RunConfig const &config, RunResult const &result);

/// Writes trace.csv, summary.json and config.txt into dir.
void write_run_outputs(std::filesystem::path const &dir, RunConfig const &config, RunResult const &result);

// -- comparison grids -------------------------------------------------------

struct Variant
{
  std::string label;
  RunConfig   config;
};

/// The six ablation rows for config.optimizer (AdmetaS or AdmetaR): full,
/// -DEMA, -LB, -LF, -LB-LF and w/ constant LF.
std::vector<Variant> ablation_grid(RunConfig const &base);

/// One row per optimizer kind, all sharing base's hyperparameters.
std::vector<Variant> optimizer_grid(RunConfig const &base, std::vector<OptimizerKind> const &kinds);

struct CompareRow
{
  std::string              label;
  std::string              optimizer;     ///< display label with ablation tags
  std::vector<double>      final_losses;  ///< one per seed; +inf for failed runs
  std::vector<std::string> failures;
  double                   mean = 0.0;    ///< over successful seeds
  double                   sd = 0.0;      ///< sample sd; 0 with one success
  bool                     failed = false;
};

struct CompareTable
{
  std::vector<std::uint64_t> seeds;
  std::vector<CompareRow>    rows;
};

CompareTable run_compare(std::vector<Variant> const &variants, int seeds);

nlohmann::json to_json(CompareTable const &table);
void           write_compare_csv(std::ostream &out, CompareTable const &table);

// -- EMA vs DEMA demo ------------------------------------------------------

struct DemoConfig
{
  double              lambda = 0.1;
  double              beta = 0.9;
  std::vector<double> lr_grid = {0.001, 0.003, 0.01, 0.03, 0.1};
  Step                steps = 2000;
  std::uint64_t       seed = 1;
  int                 seeds = 5;
  double              eps = 0.01;
  double              valley_cond = 100.0;
};

struct DemoMethodResult
{
  std::optional<double> best_lr;
  std::optional<Step>   hit;
  std::vector<Params>   trajectory; ///< start point followed by every step
};

struct DemoSeedResult
{
  std::uint64_t    seed = 0;
  Params           start;
  DemoMethodResult ema;
  DemoMethodResult dema;
  bool             dema_not_slower = false;
};

struct DemoResult
{
  std::string                 status = "ok"; ///< "error" when nothing could be compared
  std::string                 message;
  std::vector<DemoSeedResult> per_seed;

  bool all_dema_not_slower() const;
};

/// SGDM (EMA momentum) against DEMA-SGDM on the 2-D valley, each with its
/// best learning rate from the grid by first-hit time of the eps ball.
DemoResult run_demo(DemoConfig const &config);

nlohmann::json to_json(DemoConfig const &config, DemoResult const &result);

/// Writes ema_seed<N>.csv, dema_seed<N>.csv (step,x0,x1,loss) and verdict.json.
void write_demo_outputs(std::filesystem::path const &dir, DemoConfig const &config, DemoResult const &result);

// -- gradient checking -------------------------------------------------------

struct GradcheckResult
{
  double max_error = 0.0;
  int    trials = 0;
};

/// grad_check at `trials` seeded random points.
GradcheckResult run_gradcheck(Problem const &problem, int trials, std::uint64_t seed, double h = 1e-6);

} // namespace admeta
