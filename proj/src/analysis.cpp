#include "rankfuse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rankfuse {

namespace {

void sort_and_rank(std::vector<SystemRank> &systems) {
  std::sort(systems.begin(), systems.end(), [](const SystemRank &a, const SystemRank &b) {
    if (a.mean_score != b.mean_score)
      return a.mean_score > b.mean_score;
    return a.tag < b.tag;
  });
  std::set<std::string> seen;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    if (!seen.insert(systems[i].tag).second)
      throw Error(Errc::DuplicateTag, "system " + systems[i].tag + " appears twice");
    systems[i].rank = static_cast<int>(i + 1);
  }
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

} // namespace

const SystemRank *SystemRanking::find(const std::string &tag) const {
  auto it = std::find_if(systems.begin(), systems.end(),
                         [&](const SystemRank &s) { return s.tag == tag; });
  return it == systems.end() ? nullptr : &*it;
}

SystemRanking rank_systems(const std::vector<RbpResult> &evals) {
  if (evals.empty())
    throw Error(Errc::InvalidArgument, "no systems to rank");
  SystemRanking ranking;
  ranking.systems.reserve(evals.size());
  for (const auto &e : evals)
    ranking.systems.push_back({e.tag, e.mean_score, e.mean_residual, e.pooled, 0});
  sort_and_rank(ranking.systems);
  return ranking;
}

SystemRanking rank_systems(const std::vector<SystemRank> &systems) {
  if (systems.empty())
    throw Error(Errc::InvalidArgument, "no systems to rank");
  SystemRanking ranking{systems};
  sort_and_rank(ranking.systems);
  return ranking;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty())
    throw Error(Errc::TooFewValues, "quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= values.size())
    return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

OutlierReport iqr_outliers(const std::vector<LabeledValue> &values, double multiplier) {
  if (values.size() < 4)
    throw Error(Errc::TooFewValues, "need at least 4 values, got " + std::to_string(values.size()));
  if (!(multiplier >= 0))
    throw Error(Errc::InvalidArgument, "outlier multiplier must be >= 0");
  std::vector<double> raw;
  raw.reserve(values.size());
  for (const auto &v : values)
    raw.push_back(v.value);
  OutlierReport r;
  r.multiplier = multiplier;
  r.q1 = quantile(raw, 0.25);
  r.q3 = quantile(raw, 0.75);
  r.iqr = r.q3 - r.q1;
  r.lower_fence = r.q1 - multiplier * r.iqr;
  r.upper_fence = r.q3 + multiplier * r.iqr;
  for (const auto &v : values)
    if (v.value < r.lower_fence || v.value > r.upper_fence)
      r.outliers.push_back(v);
  return r;
}

bool RankShiftReport::is_extreme(const std::string &tag) const {
  return extreme && std::any_of(extreme->outliers.begin(), extreme->outliers.end(),
                                [&](const LabeledValue &v) { return v.label == tag; });
}

bool RankShiftReport::is_mild(const std::string &tag) const {
  return mild && std::any_of(mild->outliers.begin(), mild->outliers.end(),
                             [&](const LabeledValue &v) { return v.label == tag; });
}

RankShiftReport rank_shift(const SystemRanking &a, const SystemRanking &b,
                           const RankShiftOptions &options) {
  RankShiftReport report;
  for (const auto &s : a.systems) {
    if (const SystemRank *other = b.find(s.tag))
      report.deltas[s.tag] = s.rank - other->rank;
    else
      report.only_in_a.push_back(s.tag);
  }
  for (const auto &s : b.systems)
    if (a.find(s.tag) == nullptr)
      report.only_in_b.push_back(s.tag);
  std::sort(report.only_in_a.begin(), report.only_in_a.end());
  std::sort(report.only_in_b.begin(), report.only_in_b.end());

  std::vector<LabeledValue> values;
  for (const auto &[tag, delta] : report.deltas) {
    if (options.pooled_only && !a.find(tag)->pooled)
      continue;
    values.push_back({tag, static_cast<double>(delta)});
  }
  if (values.size() >= 4) {
    report.mild = iqr_outliers(values, options.mild_multiplier);
    report.extreme = iqr_outliers(values, options.extreme_multiplier);
  }
  return report;
}

std::string write_rank_shift_csv(const SystemRanking &a, const SystemRanking &b,
                                 const RankShiftReport &report) {
  std::string out =
      "tag,rank_a,rank_b,delta,score_a,residual_a,score_b,residual_b,pooled,outlier\n";
  auto outlier = [&](const std::string &tag) -> std::string {
    if (report.is_extreme(tag))
      return "extreme";
    if (report.is_mild(tag))
      return "mild";
    return "";
  };
  for (const auto &s : a.systems) {
    const SystemRank *o = b.find(s.tag);
    if (o == nullptr)
      continue;
    out += s.tag + "," + std::to_string(s.rank) + "," + std::to_string(o->rank) + "," +
           std::to_string(report.deltas.at(s.tag)) + "," + format_score(s.mean_score) + "," +
           format_score(s.mean_residual) + "," + format_score(o->mean_score) + "," +
           format_score(o->mean_residual) + "," + bool_str(s.pooled) + "," + outlier(s.tag) +
           "\n";
  }
  for (const auto &tag : report.only_in_a) {
    const SystemRank *s = a.find(tag);
    out += tag + "," + std::to_string(s->rank) + ",,," + format_score(s->mean_score) + "," +
           format_score(s->mean_residual) + ",,," + bool_str(s->pooled) + ",\n";
  }
  for (const auto &tag : report.only_in_b) {
    const SystemRank *s = b.find(tag);
    out += tag + ",," + std::to_string(s->rank) + ",,,," + format_score(s->mean_score) + "," +
           format_score(s->mean_residual) + "," + bool_str(s->pooled) + ",\n";
  }
  return out;
}

std::string export_curves(const std::vector<RbpResult> &evals, CurveMode mode) {
  if (evals.empty())
    throw Error(Errc::InvalidArgument, "no evaluations to export");
  std::string out;
  if (mode == CurveMode::PerSystem) {
    std::vector<const RbpResult *> order;
    for (const auto &e : evals)
      order.push_back(&e);
    std::stable_sort(order.begin(), order.end(), [](const RbpResult *x, const RbpResult *y) {
      if (x->mean_score != y->mean_score)
        return x->mean_score > y->mean_score;
      return x->tag < y->tag;
    });
    out = "position,tag,score,score_plus_residual,pooled\n";
    for (std::size_t i = 0; i < order.size(); ++i)
      out += std::to_string(i + 1) + "," + order[i]->tag + "," +
             format_score(order[i]->mean_score) + "," +
             format_score(order[i]->mean_score + order[i]->mean_residual) + "," +
             bool_str(order[i]->pooled) + "\n";
    return out;
  }
  out = "tag,position,topic,score,score_plus_residual\n";
  TopicLess topic_less;
  for (const auto &e : evals) {
    std::vector<std::pair<std::string, RbpScore>> topics(e.per_topic.begin(), e.per_topic.end());
    std::stable_sort(topics.begin(), topics.end(), [&](const auto &x, const auto &y) {
      if (x.second.score != y.second.score)
        return x.second.score > y.second.score;
      return topic_less(x.first, y.first);
    });
    for (std::size_t i = 0; i < topics.size(); ++i)
      out += e.tag + "," + std::to_string(i + 1) + "," + topics[i].first + "," +
             format_score(topics[i].second.score) + "," +
             format_score(topics[i].second.score + topics[i].second.residual) + "\n";
  }
  return out;
}

} // namespace rankfuse
