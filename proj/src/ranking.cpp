#include "rankfuse/ranking.hpp"

#include <algorithm>

namespace rankfuse {

void sort_by_score(std::vector<ScoredDoc> &docs) {
  std::sort(docs.begin(), docs.end(), [](const ScoredDoc &a, const ScoredDoc &b) {
    if (a.score != b.score)
      return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
}

std::vector<Ranking> run_to_rankings(const Run &run) {
  std::vector<Ranking> out;
  out.reserve(run.topics.size());
  for (const auto &[topic, entries] : run.topics) {
    Ranking r;
    r.topic_id = topic;
    r.model = run.tag;
    r.docs.reserve(entries.size());
    for (const auto &e : entries)
      r.docs.push_back({e.doc_id, e.score});
    out.push_back(std::move(r));
  }
  return out;
}

Run rankings_to_run(const std::string &tag, const std::vector<Ranking> &rankings,
                    std::size_t max_depth) {
  Run run;
  run.tag = tag;
  run.max_depth = max_depth;
  for (const auto &r : rankings) {
    if (r.docs.empty() || max_depth == 0)
      continue;
    if (run.topics.count(r.topic_id))
      throw Error(Errc::InvalidArgument, "topic " + r.topic_id + " appears twice");
    auto &entries = run.topics[r.topic_id];
    const std::size_t n = std::min(r.docs.size(), max_depth);
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      entries.push_back({r.docs[i].doc_id, static_cast<int>(i + 1), r.docs[i].score});
  }
  return run;
}

} // namespace rankfuse
