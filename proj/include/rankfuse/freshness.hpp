#pragma once

#include <cmath>
#include <vector>

#include "rankfuse/corpus.hpp"
#include "rankfuse/trec_io.hpp"

namespace rankfuse {

// Exponential decay through two points (days, value). The defaults give a
// score of 1 on the publication day and 0.01 after 120 days, i.e. a per-day
// base of 0.01^(1/120) = 0.9623506264.
class DecayParams {
public:
  DecayParams(Date ref_date, double d0 = 0, double v0 = 1, double d1 = 120, double v1 = 0.01);

  const Date &ref_date() const { return ref_date_; }
  double base() const { return std::exp(log_base_); }
  double log_base() const { return log_base_; }
  double d0() const { return d0_; }
  double v0() const { return v0_; }

private:
  Date ref_date_;
  double d0_, v0_;
  double log_base_;
};

// v0 * base^(days - d0), evaluated as exp((days - d0) * ln base).
double decay(int days, const DecayParams &params);

// Per topic: min-max scale the run's scores onto [0, 1], add
// decay(days_since(pub_date, ref_date)), and re-sort descending. Documents
// without metadata get a freshness of 0 and one summary warning.
//
// Ties in the combined score fall back to the scaled relevance score and then
// the input rank, so adding a constant freshness keeps the input order.
Run freshness_rerank(const Run &run, const MetadataIndex &meta, const DecayParams &params,
                     Warnings *warnings = nullptr);

} // namespace rankfuse
