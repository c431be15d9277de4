#pragma once

#include "hyperparams.hpp"
#include "optimizers.hpp"
#include "problems.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace admeta {

/// Everything one run needs. Each field has exactly one key in the flat
/// key-value config format, and that key is also the long CLI flag name.
struct RunConfig
{
  // problem
  std::string   problem = "valley";
  Eigen::Index  dim = 2;
  double        valley_cond = 100.0;
  double        valley_scale = 1.0;
  Eigen::Index  samples = 1000;     ///< tinymlp dataset size
  Eigen::Index  hidden = 16;        ///< tinymlp hidden width
  Eigen::Index  batch = 32;         ///< tinymlp mini-batch, 0 = full batch
  std::uint64_t data_seed = 42;     ///< tinymlp dataset seed
  double        stream_noise = 0.5; ///< online stream target noise

  // optimizer
  std::string   preset; ///< applied before every other key
  OptimizerKind optimizer = OptimizerKind::AdmetaS;
  HyperParams   hp;

  // run
  Step          steps = 1000;
  std::uint64_t seed = 1;
  int           seeds = 1;
  int           snapshot_stride = 10; ///< 0 disables snapshots
  double        hit_eps = 1e-2;
  std::string   out = "out";
};

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment. Throws on malformed lines.
KeyValues parse_key_values(std::string const &text);
std::string format_key_values(KeyValues const &kv);

/// Builds a config from defaults, then the preset (if any), then the
/// remaining keys. Throws std::invalid_argument on unknown keys or values.
RunConfig config_from_key_values(KeyValues const &kv);

/// Every field, resolved. Feeding the result back reproduces the config.
KeyValues to_key_values(RunConfig const &config);

/// Known keys, in the order they are written.
std::vector<std::string> const &config_keys();

bool operator==(RunConfig const &a, RunConfig const &b);

/// Problem instance described by the config; the online stream uses
/// config.seed and config.steps rounds.
Problem build_problem(RunConfig const &config);

} // namespace admeta
