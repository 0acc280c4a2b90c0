#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankfuse/eval.hpp"

namespace rankfuse {

struct SystemRank {
  std::string tag;
  double mean_score = 0.0;
  double mean_residual = 0.0;
  bool pooled = false;
  int rank = 0;

  friend bool operator==(const SystemRank &, const SystemRank &) = default;
};

// Systems ordered by mean score descending, ties by ascending tag, ranks 1..n.
struct SystemRanking {
  std::vector<SystemRank> systems;

  const SystemRank *find(const std::string &tag) const;
};

// Throws DuplicateTag, or InvalidArgument when evals is empty.
SystemRanking rank_systems(const std::vector<RbpResult> &evals);
// Re-sorts already ranked systems; used to check idempotence.
SystemRanking rank_systems(const std::vector<SystemRank> &systems);

struct LabeledValue {
  std::string label;
  double value = 0.0;

  friend bool operator==(const LabeledValue &, const LabeledValue &) = default;
};

struct OutlierReport {
  double multiplier = 0.0;
  double q1 = 0.0, q3 = 0.0, iqr = 0.0;
  double lower_fence = 0.0, upper_fence = 0.0;
  std::vector<LabeledValue> outliers; // input order
};

// Linear interpolation on the sorted sample at position q * (n - 1).
double quantile(std::vector<double> values, double q);

// Flags values strictly outside [Q1 - m * IQR, Q3 + m * IQR]. Throws
// TooFewValues for fewer than four values.
OutlierReport iqr_outliers(const std::vector<LabeledValue> &values, double multiplier);

struct RankShiftOptions {
  double mild_multiplier = 1.5;
  double extreme_multiplier = 3.0;
  // Restrict the boxplot statistics to systems flagged pooled in `a`.
  bool pooled_only = false;
};

struct RankShiftReport {
  // rank_a - rank_b per tag present in both; positive means the system moved
  // toward rank 1 under b.
  std::map<std::string, int> deltas;
  std::vector<std::string> only_in_a;
  std::vector<std::string> only_in_b;
  // Absent when fewer than four deltas are available.
  std::optional<OutlierReport> mild;
  std::optional<OutlierReport> extreme;

  bool is_extreme(const std::string &tag) const;
  bool is_mild(const std::string &tag) const;
};

RankShiftReport rank_shift(const SystemRanking &a, const SystemRanking &b,
                           const RankShiftOptions &options = {});

// tag,rank_a,rank_b,delta,score_a,residual_a,score_b,residual_b,pooled,outlier
// rows ordered by rank under a; systems in only one ranking are listed last
// with empty fields for the missing side.
std::string write_rank_shift_csv(const SystemRanking &a, const SystemRanking &b,
                                 const RankShiftReport &report);

enum class CurveMode { PerSystem, PerTopic };

// PerSystem: position,tag,score,score_plus_residual,pooled sorted by mean
// score descending. PerTopic: tag,position,topic,score,score_plus_residual for
// each system in input order, topics sorted by score descending (ties by
// topic id).
std::string export_curves(const std::vector<RbpResult> &evals, CurveMode mode);

} // namespace rankfuse
