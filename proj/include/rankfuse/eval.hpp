#pragma once

#include <map>
#include <string>
#include <vector>

#include "rankfuse/trec_io.hpp"

namespace rankfuse {

struct EvalConfig {
  double phi = 0.5;      // RBP persistence, in (0, 1)
  int rel_threshold = 1; // grades >= threshold count as relevant
};

struct RbpScore {
  double score = 0.0;
  double residual = 1.0;

  friend bool operator==(const RbpScore &, const RbpScore &) = default;
};

struct RbpResult {
  std::string tag;
  std::map<std::string, RbpScore, TopicLess> per_topic;
  double mean_score = 0.0;
  double mean_residual = 0.0;
  bool pooled = false; // whether the run contributed to the judgment pool
};

// Rank-biased precision with residual for every topic in `topics`.
//
// A topic retrieved to depth d scores (1 - phi) * sum phi^(i-1) over relevant
// ranks i <= d. The residual is the weight of unjudged ranks plus the phi^d
// tail past the last retrieved document; it is computed as one minus the
// weight of judged ranks, which keeps score + residual <= 1 under rounding
// and makes an unjudged topic exactly (0, 1). Topics the run lacks score
// (0, 1). Throws InvalidPhi, or InvalidArgument when topics is empty.
RbpResult rbp_eval(const Run &run, const JudgmentSet &qrels, const EvalConfig &cfg,
                   const std::vector<std::string> &topics);

struct PrecisionResult {
  std::string tag;
  std::map<std::string, double, TopicLess> per_topic;
  double mean = 0.0;
};

// Fraction of the top k ranks holding a judged-relevant document. Unjudged and
// missing ranks count as non-relevant; the denominator is always k.
PrecisionResult precision_at_k(const Run &run, const JudgmentSet &qrels, std::size_t k,
                               int rel_threshold, const std::vector<std::string> &topics);

// Drops every document judged (any grade) in `prior` for its topic and
// re-ranks the survivors 1..n. Topics left empty are removed.
Run residual_filter(const Run &run, const JudgmentSet &prior);

} // namespace rankfuse
