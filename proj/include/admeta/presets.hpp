#pragma once

#include "hyperparams.hpp"
#include "optimizers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace admeta {

/// A named hyperparameter bundle taken from the published tuning tables.
struct Preset
{
  std::string   name;
  OptimizerKind optimizer;
  HyperParams   hp;
  std::string   note; ///< where the values came from (task / model)
};

std::vector<Preset> const    &presets();
std::optional<Preset>         find_preset(std::string const &name);

} // namespace admeta
