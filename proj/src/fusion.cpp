#include "rankfuse/fusion.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <map>
#include <set>

#include "rankfuse/parallel.hpp"

namespace rankfuse {

NormalizedRanking minmax_normalize(const Ranking &ranking) {
  if (ranking.docs.empty())
    throw Error(Errc::EmptyRanking, "cannot normalize empty ranking for topic " + ranking.topic_id);
  auto [lo, hi] = std::minmax_element(ranking.docs.begin(), ranking.docs.end(),
                                      [](const ScoredDoc &a, const ScoredDoc &b) {
                                        return a.score < b.score;
                                      });
  const double min = lo->score, range = hi->score - lo->score;
  NormalizedRanking out;
  out.ranking_ = ranking;
  for (auto &d : out.ranking_.docs)
    d.score = range > 0 ? (d.score - min) / range : 1.0;
  return out;
}

Ranking combsum(const std::vector<NormalizedRanking> &sources, std::size_t depth) {
  if (sources.empty())
    throw Error(Errc::NoSources, "nothing to fuse");
  const std::string &topic = sources.front().topic_id();
  std::map<std::string, std::vector<double>> contributions;
  for (const auto &src : sources) {
    if (src.topic_id() != topic)
      throw Error(Errc::InvalidArgument,
                  "fusing topic " + src.topic_id() + " with topic " + topic);
    for (const auto &d : src.docs())
      contributions[d.doc_id].push_back(d.score);
  }
  Ranking fused;
  fused.topic_id = topic;
  fused.model = "CombSUM";
  fused.docs.reserve(contributions.size());
  for (auto &[doc, scores] : contributions) {
    std::sort(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores)
      sum += s;
    fused.docs.push_back({doc, sum});
  }
  sort_by_score(fused.docs);
  if (fused.docs.size() > depth)
    fused.docs.resize(depth);
  return fused;
}

Ranking run_fusion_job(const FusionJob &job) {
  std::vector<NormalizedRanking> normalized;
  normalized.reserve(job.sources.size());
  for (const auto &src : job.sources)
    if (!src.docs.empty())
      normalized.push_back(minmax_normalize(src));
  if (normalized.empty()) {
    if (job.sources.empty())
      throw Error(Errc::NoSources, "no source rankings for topic " + job.topic_id);
    Ranking empty;
    empty.topic_id = job.topic_id;
    empty.model = "CombSUM";
    return empty;
  }
  return combsum(normalized, job.depth);
}

FusionJob build_fusion_job(const std::string &topic_id,
                           const std::vector<QueryVariation> &variations,
                           const std::vector<ScoringModel> &models, const Index &index,
                           const FuseOptions &options, Warnings *warnings) {
  if (variations.empty() || models.empty())
    throw Error(Errc::NoSources, "topic " + topic_id + " needs at least one variation and model");
  const std::size_t cells = variations.size() * models.size();
  std::vector<std::optional<Ranking>> results(cells);
  std::vector<std::string> skipped(cells);
  parallel_for(cells, options.threads, [&](std::size_t i) {
    const auto &v = variations[i / models.size()];
    const auto &m = *models[i % models.size()];
    try {
      Ranking r = search(index, v.text, m, options.source_depth);
      r.topic_id = topic_id;
      r.variation_id = v.variation_id;
      results[i] = std::move(r);
    } catch (const Error &e) {
      if (e.code() != Errc::EmptyQuery)
        throw;
      skipped[i] = e.what();
    }
  });
  FusionJob job;
  job.topic_id = topic_id;
  job.depth = options.output_depth;
  // One warning per variation, not per cell.
  for (std::size_t i = 0; i < cells; i += models.size())
    if (!skipped[i].empty())
      warn(warnings, "topic " + topic_id + " variation " +
                         variations[i / models.size()].variation_id + " skipped: " + skipped[i]);
  for (auto &r : results)
    if (r)
      job.sources.push_back(std::move(*r));
  if (job.sources.empty())
    throw Error(Errc::NoSources, "every variation of topic " + topic_id + " was skipped");
  return job;
}

Ranking double_fuse(const std::string &topic_id, const std::vector<QueryVariation> &variations,
                    const std::vector<ScoringModel> &models, const Index &index,
                    const FuseOptions &options, Warnings *warnings) {
  return run_fusion_job(build_fusion_job(topic_id, variations, models, index, options, warnings));
}

Run double_fuse_topics(const TopicSet &topics, const std::vector<ScoringModel> &models,
                       const Index &index, const std::string &tag, const FuseOptions &options,
                       Warnings *warnings) {
  std::vector<const std::pair<const std::string, std::vector<QueryVariation>> *> order;
  for (const auto &kv : topics.topics)
    order.push_back(&kv);
  std::vector<Ranking> fused(order.size());
  std::vector<Warnings> topic_warnings(order.size());
  FuseOptions inner = options;
  inner.threads = 1;
  parallel_for(order.size(), options.threads, [&](std::size_t i) {
    fused[i] = double_fuse(order[i]->first, order[i]->second, models, index, inner,
                           &topic_warnings[i]);
  });
  for (auto &w : topic_warnings)
    for (auto &msg : w.messages)
      warn(warnings, std::move(msg));
  return rankings_to_run(tag, fused, options.output_depth);
}

std::vector<Run> search_matrix(const TopicSet &topics, const std::vector<ScoringModel> &models,
                               const Index &index, std::size_t depth, unsigned threads,
                               Warnings *warnings) {
  std::set<std::string, TopicLess> variation_ids;
  for (const auto &[_, vars] : topics.topics)
    for (const auto &v : vars)
      variation_ids.insert(v.variation_id);
  struct Cell {
    const Scorer *model;
    std::string variation_id;
  };
  std::vector<Cell> cells;
  for (const auto &m : models)
    for (const auto &v : variation_ids)
      cells.push_back({m.get(), v});
  std::vector<Run> runs(cells.size());
  std::vector<Warnings> cell_warnings(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    const Cell &cell = cells[i];
    std::vector<Ranking> rankings;
    for (const auto &[topic, vars] : topics.topics) {
      auto v = std::find_if(vars.begin(), vars.end(), [&](const QueryVariation &q) {
        return q.variation_id == cell.variation_id;
      });
      if (v == vars.end())
        continue;
      try {
        Ranking r = search(index, v->text, *cell.model, depth);
        r.topic_id = topic;
        r.variation_id = v->variation_id;
        rankings.push_back(std::move(r));
      } catch (const Error &e) {
        if (e.code() != Errc::EmptyQuery)
          throw;
        cell_warnings[i].add("topic " + topic + " variation " + v->variation_id + " model " +
                             cell.model->name() + " skipped: " + e.what());
      }
    }
    runs[i] = rankings_to_run(cell.model->name() + "." + cell.variation_id, rankings, depth);
  });
  for (auto &w : cell_warnings)
    for (auto &msg : w.messages)
      warn(warnings, std::move(msg));
  return runs;
}

std::vector<Run> load_run_directory(const std::string &dir, std::size_t max_depth,
                                    Warnings *warnings) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(Errc::Io, dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".run")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw Error(Errc::NoSources, "no .run files in " + dir);
  std::vector<Run> runs;
  runs.reserve(files.size());
  for (const auto &f : files)
    runs.push_back(read_run_file(f.string(), max_depth, warnings));
  return runs;
}

Run fuse_runs(const std::vector<Run> &runs, const std::string &tag, const FuseOptions &options) {
  if (runs.empty())
    throw Error(Errc::NoSources, "no runs to fuse");
  std::map<std::string, FusionJob, TopicLess> jobs;
  for (const auto &run : runs) {
    for (const auto &[topic, entries] : run.topics) {
      auto &job = jobs[topic];
      job.topic_id = topic;
      job.depth = options.output_depth;
      Ranking r;
      r.topic_id = topic;
      r.model = run.tag;
      const std::size_t n = std::min(entries.size(), options.source_depth);
      for (std::size_t i = 0; i < n; ++i)
        r.docs.push_back({entries[i].doc_id, entries[i].score});
      job.sources.push_back(std::move(r));
    }
  }
  std::vector<const FusionJob *> order;
  for (const auto &[_, job] : jobs)
    order.push_back(&job);
  std::vector<Ranking> fused(order.size());
  parallel_for(order.size(), options.threads,
               [&](std::size_t i) { fused[i] = run_fusion_job(*order[i]); });
  return rankings_to_run(tag, fused, options.output_depth);
}

} // namespace rankfuse
