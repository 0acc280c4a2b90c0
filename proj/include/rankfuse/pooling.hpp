#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rankfuse/trec_io.hpp"

namespace rankfuse {

struct PoolKeyLess {
  bool operator()(const std::pair<std::string, std::string> &a,
                  const std::pair<std::string, std::string> &b) const {
    TopicLess less;
    if (less(a.first, b.first))
      return true;
    if (less(b.first, a.first))
      return false;
    return a.second < b.second;
  }
};

struct Pool {
  std::set<std::pair<std::string, std::string>, PoolKeyLess> members; // (topic, doc)
  std::size_t depth = 0;
  std::vector<std::string> source_tags;

  bool contains(const std::string &topic, const std::string &doc) const {
    return members.count({topic, doc}) > 0;
  }
};

// Union of every run's top-`depth` documents per topic. To pool a residual
// collection, pass runs through residual_filter() first.
Pool pool_runs(const std::vector<Run> &runs, std::size_t depth);

// `topic<TAB>doc_id` lines, sorted.
std::string write_pool(const Pool &pool);

// Judges every pool member using `truth`; members `truth` lacks get grade 0.
JudgmentSet judge_pool(const Pool &pool, const JudgmentSet &truth);

// Union of two judgment sets. Throws DuplicateJudgment on conflicting grades.
JudgmentSet merge_judgments(const JudgmentSet &a, const JudgmentSet &b);

struct CoverageResult {
  std::map<std::string, double, TopicLess> per_topic;
  double mean = 0.0;
};

// Fraction of each topic's top-`depth` documents present in qrels. The
// denominator is the number retrieved when a topic is shorter than depth.
// Topics with no retrieved documents are not reported.
CoverageResult judgment_coverage(const Run &run, const JudgmentSet &qrels, std::size_t depth);

} // namespace rankfuse
