#pragma once

#include "types.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace admeta {

struct StepRecord
{
  Step                  t = 0;
  double                lr = 0.0;
  double                loss = 0.0;
  double                grad_norm = 0.0;
  std::optional<double> eta; ///< set when a lookahead wrapper is active
  bool                  synced = false;
  std::optional<Params> params;
};

/// Step records strictly ordered by t, starting at 1.
class RunTrace
{
public:
  void append(StepRecord record);

  std::vector<StepRecord> const &records() const { return records_; }
  std::size_t                    size() const { return records_.size(); }
  bool                           empty() const { return records_.empty(); }
  StepRecord const              &back() const { return records_.back(); }

  /// Whether every record carries a parameter snapshot.
  bool has_all_snapshots() const;

  /// CSV with header step,lr,loss,grad_norm[,eta,synced][,param_0..].
  /// The eta columns appear when any record has eta; param columns when any
  /// record has a snapshot (blank where a record has none).
  void write_csv(std::ostream &out) const;

private:
  std::vector<StepRecord> records_;
};

/// Shortest round-trip decimal form; used for every number written to disk.
std::string format_number(double x);

} // namespace admeta
