#include "rankfuse/pooling.hpp"

#include <algorithm>

namespace rankfuse {

Pool pool_runs(const std::vector<Run> &runs, std::size_t depth) {
  Pool pool;
  pool.depth = depth;
  for (const auto &run : runs) {
    pool.source_tags.push_back(run.tag);
    for (const auto &[topic, entries] : run.topics) {
      const std::size_t n = std::min(depth, entries.size());
      for (std::size_t i = 0; i < n; ++i)
        pool.members.emplace(topic, entries[i].doc_id);
    }
  }
  return pool;
}

std::string write_pool(const Pool &pool) {
  std::string out;
  for (const auto &[topic, doc] : pool.members)
    out += topic + "\t" + doc + "\n";
  return out;
}

JudgmentSet judge_pool(const Pool &pool, const JudgmentSet &truth) {
  JudgmentSet judged;
  for (const auto &[topic, doc] : pool.members)
    judged.add(topic, doc, truth.grade(topic, doc).value_or(0));
  return judged;
}

JudgmentSet merge_judgments(const JudgmentSet &a, const JudgmentSet &b) {
  JudgmentSet out = a;
  for (const auto &[topic, docs] : b.topics())
    for (const auto &[doc, grade] : docs)
      out.add(topic, doc, grade);
  return out;
}

CoverageResult judgment_coverage(const Run &run, const JudgmentSet &qrels, std::size_t depth) {
  if (depth == 0)
    throw Error(Errc::InvalidArgument, "coverage depth must be >= 1");
  CoverageResult result;
  for (const auto &[topic, entries] : run.topics) {
    const std::size_t n = std::min(depth, entries.size());
    if (n == 0)
      continue;
    const auto *judged = qrels.topic(topic);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n && judged != nullptr; ++i)
      hits += judged->count(entries[i].doc_id);
    result.per_topic[topic] = static_cast<double>(hits) / static_cast<double>(n);
  }
  if (!result.per_topic.empty()) {
    double sum = 0.0;
    for (const auto &[_, c] : result.per_topic)
      sum += c;
    result.mean = sum / static_cast<double>(result.per_topic.size());
  }
  return result;
}

} // namespace rankfuse
