#pragma once

#include <string>
#include <vector>

#include "rankfuse/ranking.hpp"
#include "rankfuse/retrieval.hpp"

namespace rankfuse {

// A ranking whose scores have been min-max scaled onto [0, 1]. Only
// minmax_normalize() creates one, so combsum() never sees raw scores.
class NormalizedRanking {
public:
  const Ranking &ranking() const { return ranking_; }
  const std::string &topic_id() const { return ranking_.topic_id; }
  const std::vector<ScoredDoc> &docs() const { return ranking_.docs; }

private:
  friend NormalizedRanking minmax_normalize(const Ranking &);
  Ranking ranking_;
};

// (s - min) / (max - min); every score becomes 1.0 when all are equal.
// Throws EmptyRanking.
NormalizedRanking minmax_normalize(const Ranking &ranking);

// Sums each document's normalized scores over the sources it appears in.
// Output is sorted descending with ties by ascending doc id and truncated to
// `depth`. The per-document sum adds contributions in ascending order so the
// result does not depend on source order. Throws NoSources, and
// InvalidArgument if sources disagree on topic.
Ranking combsum(const std::vector<NormalizedRanking> &sources, std::size_t depth);

struct FusionJob {
  std::string topic_id;
  std::vector<Ranking> sources;
  std::size_t depth = kDefaultDepth;
};

// Normalizes each non-empty source and fuses them with CombSUM. Empty sources
// contribute nothing; a job whose sources are all empty yields an empty
// ranking.
Ranking run_fusion_job(const FusionJob &job);

struct FuseOptions {
  std::size_t source_depth = kDefaultDepth;
  std::size_t output_depth = kDefaultDepth;
  unsigned threads = 0; // 0 = default_thread_count()
};

// The |variations| x |models| source rankings for one topic, in
// variation-major order. Variations whose query has no terms are skipped with
// a warning; throws NoSources when every variation was skipped.
FusionJob build_fusion_job(const std::string &topic_id,
                           const std::vector<QueryVariation> &variations,
                           const std::vector<ScoringModel> &models, const Index &index,
                           const FuseOptions &options = {}, Warnings *warnings = nullptr);

// Searches every (variation, model) cell for one topic, normalizes each
// ranking independently and fuses all of them.
Ranking double_fuse(const std::string &topic_id, const std::vector<QueryVariation> &variations,
                    const std::vector<ScoringModel> &models, const Index &index,
                    const FuseOptions &options = {}, Warnings *warnings = nullptr);

// double_fuse over every topic, assembled into one run.
Run double_fuse_topics(const TopicSet &topics, const std::vector<ScoringModel> &models,
                       const Index &index, const std::string &tag,
                       const FuseOptions &options = {}, Warnings *warnings = nullptr);

// The (model, variation) matrix as runs: one run per cell, tagged
// `<model>.<variation_id>` and holding every topic with that variation id.
std::vector<Run> search_matrix(const TopicSet &topics, const std::vector<ScoringModel> &models,
                               const Index &index, std::size_t depth, unsigned threads = 0,
                               Warnings *warnings = nullptr);

// Reads every `*.run` file in `dir` in filename order.
std::vector<Run> load_run_directory(const std::string &dir, std::size_t max_depth = kDefaultDepth,
                                    Warnings *warnings = nullptr);

// Per topic, fuses that topic's ranking from every run that has it.
Run fuse_runs(const std::vector<Run> &runs, const std::string &tag,
              const FuseOptions &options = {});

} // namespace rankfuse
