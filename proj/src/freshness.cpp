#include "rankfuse/freshness.hpp"

#include <algorithm>
#include <cmath>

namespace rankfuse {

DecayParams::DecayParams(Date ref_date, double d0, double v0, double d1, double v1)
    : ref_date_(ref_date), d0_(d0), v0_(v0) {
  if (!ref_date.ok())
    throw Error(Errc::InvalidArgument, "invalid reference date");
  if (!(d1 > d0) || !(v0 > 0) || !(v1 > 0) || !(v1 < v0))
    throw Error(Errc::InvalidArgument, "decay needs d1 > d0 and 0 < v1 < v0");
  log_base_ = std::log(v1 / v0) / (d1 - d0);
}

double decay(int days, const DecayParams &params) {
  return params.v0() * std::exp((days - params.d0()) * params.log_base());
}

Run freshness_rerank(const Run &run, const MetadataIndex &meta, const DecayParams &params,
                     Warnings *warnings) {
  struct Scored {
    const RunEntry *entry;
    double relevance;
    double combined;
  };
  Run out;
  out.tag = run.tag;
  out.max_depth = run.max_depth;
  std::size_t missing = 0;
  std::string first_missing;
  for (const auto &[topic, entries] : run.topics) {
    if (entries.empty())
      continue;
    auto [lo, hi] = std::minmax_element(
        entries.begin(), entries.end(),
        [](const RunEntry &a, const RunEntry &b) { return a.score < b.score; });
    const double min = lo->score, range = hi->score - lo->score;
    std::vector<Scored> scored;
    scored.reserve(entries.size());
    for (const auto &e : entries) {
      double relevance = range > 0 ? (e.score - min) / range : 1.0;
      double freshness = 0.0;
      auto it = meta.find(e.doc_id);
      if (it != meta.end()) {
        freshness = decay(days_since(it->second->pub_date, params.ref_date()), params);
      } else {
        if (missing++ == 0)
          first_missing = e.doc_id;
      }
      scored.push_back({&e, relevance, relevance + freshness});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored &a, const Scored &b) {
      if (a.combined != b.combined)
        return a.combined > b.combined;
      if (a.relevance != b.relevance)
        return a.relevance > b.relevance;
      if (a.entry->rank != b.entry->rank)
        return a.entry->rank < b.entry->rank;
      return a.entry->doc_id < b.entry->doc_id;
    });
    auto &dest = out.topics[topic];
    dest.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i)
      dest.push_back({scored[i].entry->doc_id, static_cast<int>(i + 1), scored[i].combined});
  }
  if (missing > 0)
    warn(warnings, std::to_string(missing) + " ranked documents have no metadata (first: " +
                       first_missing + "); freshness set to 0");
  return out;
}

} // namespace rankfuse
