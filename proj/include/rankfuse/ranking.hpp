#pragma once

#include <string>
#include <vector>

#include "rankfuse/trec_io.hpp"

namespace rankfuse {

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredDoc &, const ScoredDoc &) = default;
};

// One ordered result list for a (topic, query variation, model) cell, or the
// fused list for a topic. Scores are non-increasing; doc ids unique.
struct Ranking {
  std::string topic_id;
  std::string variation_id;
  std::string model;
  std::vector<ScoredDoc> docs;

  friend bool operator==(const Ranking &, const Ranking &) = default;
};

// Sort descending by score, ties by ascending doc id.
void sort_by_score(std::vector<ScoredDoc> &docs);

// Each topic of `run` as a Ranking in rank order.
std::vector<Ranking> run_to_rankings(const Run &run);

// Rankings must carry distinct topic ids; ranks are assigned 1..n. Empty
// rankings produce no topic block.
Run rankings_to_run(const std::string &tag, const std::vector<Ranking> &rankings,
                    std::size_t max_depth = kDefaultDepth);

} // namespace rankfuse
