#include "admeta/trace.hpp"

#include <charconv>
#include <stdexcept>

namespace admeta {

void RunTrace::append(StepRecord record)
{
  Step const expected = records_.empty() ? 1 : records_.back().t + 1;
  if (record.t != expected) {
    throw std::logic_error("RunTrace: expected step " + std::to_string(expected) + ", got " +
                           std::to_string(record.t));
  }
  records_.push_back(std::move(record));
}

bool RunTrace::has_all_snapshots() const
{
  for (auto const &r : records_) {
    if (!r.params) {
      return false;
    }
  }
  return true;
}

std::string format_number(double x)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) {
    return "nan";
  }
  return std::string(buf, end);
}

void RunTrace::write_csv(std::ostream &out) const
{
  bool         with_eta = false;
  Eigen::Index dim = 0;
  for (auto const &r : records_) {
    with_eta = with_eta || r.eta.has_value();
    if (r.params) {
      dim = std::max(dim, r.params->size());
    }
  }
  out << "step,lr,loss,grad_norm";
  if (with_eta) {
    out << ",eta,synced";
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    out << ",param_" << i;
  }
  out << '\n';
  for (auto const &r : records_) {
    out << r.t << ',' << format_number(r.lr) << ',' << format_number(r.loss) << ',' << format_number(r.grad_norm);
    if (with_eta) {
      out << ',' << (r.eta ? format_number(*r.eta) : "") << ',' << (r.synced ? 1 : 0);
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      out << ',';
      if (r.params) {
        out << format_number((*r.params)[i]);
      }
    }
    out << '\n';
  }
}

} // namespace admeta
