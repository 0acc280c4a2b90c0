#include "rankfuse/eval.hpp"

#include <algorithm>
#include <cmath>

namespace rankfuse {

namespace {

void check_config(const EvalConfig &cfg) {
  if (!(cfg.phi > 0.0 && cfg.phi < 1.0))
    throw Error(Errc::InvalidPhi, "phi must be in (0, 1), got " + format_score(cfg.phi));
  if (cfg.rel_threshold < 1)
    throw Error(Errc::InvalidArgument, "relevance threshold must be >= 1");
}

RbpScore rbp_topic(const std::vector<RunEntry> &entries,
                   const JudgmentSet::TopicJudgments *judged, const EvalConfig &cfg) {
  double weight = 1.0 - cfg.phi;
  double relevant = 0.0, judged_mass = 0.0;
  for (const auto &e : entries) {
    if (judged != nullptr) {
      auto it = judged->find(e.doc_id);
      if (it != judged->end()) {
        judged_mass += weight;
        if (it->second >= cfg.rel_threshold)
          relevant += weight;
      }
    }
    weight *= cfg.phi;
    if (weight == 0.0)
      break;
  }
  judged_mass = std::min(judged_mass, 1.0);
  return {relevant, 1.0 - judged_mass};
}

} // namespace

RbpResult rbp_eval(const Run &run, const JudgmentSet &qrels, const EvalConfig &cfg,
                   const std::vector<std::string> &topics) {
  check_config(cfg);
  if (topics.empty())
    throw Error(Errc::InvalidArgument, "no topics to evaluate");
  RbpResult result;
  result.tag = run.tag;
  for (const auto &t : topics) {
    const auto *entries = run.find(t);
    RbpScore s = entries == nullptr ? RbpScore{} : rbp_topic(*entries, qrels.topic(t), cfg);
    if (!result.per_topic.emplace(t, s).second)
      throw Error(Errc::InvalidArgument, "topic " + t + " listed twice");
  }
  double sum = 0.0, res = 0.0;
  for (const auto &[_, s] : result.per_topic) {
    sum += s.score;
    res += s.residual;
  }
  const double n = static_cast<double>(result.per_topic.size());
  result.mean_score = sum / n;
  result.mean_residual = res / n;
  return result;
}

PrecisionResult precision_at_k(const Run &run, const JudgmentSet &qrels, std::size_t k,
                               int rel_threshold, const std::vector<std::string> &topics) {
  if (k == 0)
    throw Error(Errc::InvalidArgument, "k must be >= 1");
  if (topics.empty())
    throw Error(Errc::InvalidArgument, "no topics to evaluate");
  PrecisionResult result;
  result.tag = run.tag;
  for (const auto &t : topics) {
    std::size_t hits = 0;
    if (const auto *entries = run.find(t)) {
      const auto *judged = qrels.topic(t);
      const std::size_t n = std::min(k, entries->size());
      for (std::size_t i = 0; i < n && judged != nullptr; ++i) {
        auto it = judged->find((*entries)[i].doc_id);
        if (it != judged->end() && it->second >= rel_threshold)
          ++hits;
      }
    }
    result.per_topic[t] = static_cast<double>(hits) / static_cast<double>(k);
  }
  double sum = 0.0;
  for (const auto &[_, p] : result.per_topic)
    sum += p;
  result.mean = sum / static_cast<double>(result.per_topic.size());
  return result;
}

Run residual_filter(const Run &run, const JudgmentSet &prior) {
  Run out;
  out.tag = run.tag;
  out.max_depth = run.max_depth;
  for (const auto &[topic, entries] : run.topics) {
    const auto *judged = prior.topic(topic);
    std::vector<RunEntry> kept;
    kept.reserve(entries.size());
    for (const auto &e : entries)
      if (judged == nullptr || !judged->count(e.doc_id))
        kept.push_back(e);
    if (kept.empty())
      continue;
    for (std::size_t i = 0; i < kept.size(); ++i)
      kept[i].rank = static_cast<int>(i + 1);
    out.topics.emplace(topic, std::move(kept));
  }
  return out;
}

} // namespace rankfuse
