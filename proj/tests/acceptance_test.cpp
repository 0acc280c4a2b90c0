// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fusion_oracle.hpp"
#include "generators.hpp"
#include "rankfuse/analysis.hpp"
#include "rankfuse/cli.hpp"
#include "rankfuse/corpus.hpp"
#include "rankfuse/eval.hpp"
#include "rankfuse/freshness.hpp"
#include "rankfuse/fusion.hpp"
#include "rankfuse/pooling.hpp"
#include "rankfuse/retrieval.hpp"

namespace fs = std::filesystem;
using namespace rankfuse;
using rankfuse::testing::OracleList;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Pass;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
struct Checker {
  int failures = 0;
  std::ostringstream first;

  void expect(bool ok, const std::string &what) {
    if (ok)
      return;
    if (failures++ < 3)
      first << (failures > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string &summary) const {
    if (failures == 0)
      return {Status::Pass, summary};
    return {Status::Fail, std::to_string(failures) + " failure(s): " + first.str()};
  }
};

std::string num(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// 1 ------------------------------------------------------------------------

Outcome decay_fit() {
  DecayParams p(make_date(2020, 4, 10));
  Checker c;
  c.expect(std::abs(decay(0, p) - 1.0) <= 1e-12, "decay(0) = " + num(decay(0, p), 17));
  c.expect(std::abs(decay(120, p) - 0.01) <= 1e-9, "decay(120) = " + num(decay(120, p), 17));
  c.expect(std::abs(decay(60, p) - 0.1) <= 1e-9, "decay(60) = " + num(decay(60, p), 17));
  c.expect(std::abs(decay(240, p) - 1e-4) <= 1e-9, "decay(240) = " + num(decay(240, p), 17));
  return c.outcome("base " + num(p.base(), 10));
}

// 2 ------------------------------------------------------------------------

JudgmentSet random_qrels(std::mt19937_64 &rng, const Run &run, int doc_universe) {
  std::bernoulli_distribution judged(0.5);
  std::uniform_int_distribution<int> grade(0, 2);
  JudgmentSet q;
  for (const auto &[topic, _] : run.topics)
    for (int d = 0; d < doc_universe; ++d)
      if (judged(rng))
        q.add(topic, "d" + std::to_string(d), grade(rng));
  return q;
}

JudgmentSet random_subset(std::mt19937_64 &rng, const JudgmentSet &q) {
  std::bernoulli_distribution keep(0.6);
  JudgmentSet out;
  for (const auto &[topic, docs] : q.topics())
    for (const auto &[doc, grade] : docs)
      if (keep(rng))
        out.add(topic, doc, grade);
  return out;
}

Outcome rbp_properties() {
  constexpr int kInstances = 2000;
  constexpr double kSlack = 1e-12;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> phi_dist(0.05, 0.95);
  Checker c;
  for (int i = 0; i < kInstances; ++i) {
    Run run = rankfuse::testing::random_run(rng, "r", 5, 30, 40);
    JudgmentSet big = random_qrels(rng, run, 40);
    // One topic nobody judged.
    run.topics["999"] = {{"d1", 1, 2.0}, {"d2", 2, 1.0}};
    JudgmentSet small = random_subset(rng, big);
    std::vector<std::string> topics;
    for (const auto &[t, _] : run.topics)
      topics.push_back(t);
    EvalConfig cfg{phi_dist(rng), 1 + i % 2};
    auto rq = rbp_eval(run, small, cfg, topics);
    auto rqp = rbp_eval(run, big, cfg, topics);
    for (const auto &t : topics) {
      const auto &a = rq.per_topic.at(t), &b = rqp.per_topic.at(t);
      for (const auto *s : {&a, &b})
        c.expect(s->score >= 0 && s->residual >= 0 && s->score + s->residual <= 1.0,
                 "bounds topic " + t + " instance " + std::to_string(i));
      c.expect(a.score <= b.score + kSlack && b.score <= a.score + a.residual + kSlack,
               "score monotonicity topic " + t + " instance " + std::to_string(i));
      c.expect(b.residual <= a.residual + kSlack,
               "residual monotonicity topic " + t + " instance " + std::to_string(i));
    }
    c.expect(rq.per_topic.at("999") == RbpScore{0.0, 1.0} &&
                 rqp.per_topic.at("999") == RbpScore{0.0, 1.0},
             "unjudged topic is not exactly (0, 1)");
  }
  return c.outcome(std::to_string(kInstances) + " instances, slack " + num(kSlack));
}

// 3 ------------------------------------------------------------------------

Ranking random_ranking(std::mt19937_64 &rng, int universe, int max_len) {
  std::vector<int> pick(universe);
  for (int i = 0; i < universe; ++i)
    pick[i] = i;
  std::shuffle(pick.begin(), pick.end(), rng);
  std::uniform_int_distribution<int> len(1, max_len), bucket(0, 4);
  std::uniform_real_distribution<double> s(-10, 40);
  Ranking r;
  r.topic_id = "1";
  int n = len(rng);
  for (int i = 0; i < n; ++i)
    r.docs.push_back({"doc" + std::to_string(pick[i]), bucket(rng) == 0 ? 2.5 : s(rng)});
  sort_by_score(r.docs);
  return r;
}

OracleList as_list(const Ranking &r) {
  OracleList out;
  for (const auto &d : r.docs)
    out.emplace_back(d.doc_id, d.score);
  return out;
}

void compare_to_oracle(Checker &c, const Ranking &got, const OracleList &want,
                       const std::string &where) {
  if (got.docs.size() != want.size()) {
    c.expect(false, where + ": length " + std::to_string(got.docs.size()) + " vs " +
                        std::to_string(want.size()));
    return;
  }
  for (std::size_t k = 0; k < want.size(); ++k) {
    c.expect(got.docs[k].doc_id == want[k].first, where + ": order differs at " + std::to_string(k));
    c.expect(std::abs(got.docs[k].score - want[k].second) <= 1e-12,
             where + ": score differs at " + std::to_string(k));
  }
}

Outcome combsum_oracle() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> nsrc(1, 5);
  Checker c;
  for (int i = 0; i < 500; ++i) {
    std::vector<NormalizedRanking> sources;
    std::vector<OracleList> oracle;
    int n = nsrc(rng);
    for (int s = 0; s < n; ++s) {
      Ranking r = random_ranking(rng, 12, 8);
      sources.push_back(minmax_normalize(r));
      oracle.push_back(rankfuse::testing::oracle_normalize(as_list(r)));
    }
    compare_to_oracle(c, combsum(sources, kDefaultDepth),
                      rankfuse::testing::oracle_combsum(oracle, kDefaultDepth),
                      "instance " + std::to_string(i));
  }

  std::vector<DocMeta> docs;
  const char *texts[] = {"coronavirus spread in humid weather", "heat and humidity slow the virus",
                         "climate models of coronavirus transmission", "weather weather weather",
                         "masks reduce spread", "humidity heat climate coronavirus"};
  for (int d = 0; d < 6; ++d) {
    DocMeta m;
    m.doc_id = "w" + std::to_string(d);
    m.abstract = texts[d];
    docs.push_back(m);
  }
  Index index = build_index(docs, {});
  int matrices = 0;
  for (const char *roster : {"BM25,TF_IDF", "TF_IDF,Hiemstra_LM", "Hiemstra_LM,DPH", "BM25,DPH"}) {
    auto models = parse_roster(roster);
    std::vector<QueryVariation> vars{{"1", "coronavirus weather"}, {"2", "humidity heat climate"}};
    std::vector<OracleList> oracle;
    for (const auto &v : vars)
      for (const auto &m : models)
        oracle.push_back(rankfuse::testing::oracle_normalize(
            as_list(search(index, v.text, *m, kDefaultDepth))));
    compare_to_oracle(c, double_fuse("1", vars, models, index),
                      rankfuse::testing::oracle_combsum(oracle, kDefaultDepth),
                      std::string("2x2 ") + roster);
    ++matrices;
  }
  return c.outcome("500 instances, " + std::to_string(matrices) + " 2x2 matrices");
}

// 4 ------------------------------------------------------------------------

Outcome freshness_identity() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> day(1, 28), month(1, 12);
  Checker c;
  const int kTrials = 500;
  for (int i = 0; i < kTrials; ++i) {
    Run run = rankfuse::testing::random_run(rng, "r", 4, 25, 30);
    Date shared = make_date(2019, month(rng), day(rng));
    std::vector<DocMeta> docs;
    for (int d = 0; d < 30; ++d) {
      DocMeta m;
      m.doc_id = "d" + std::to_string(d);
      m.pub_date = shared;
      docs.push_back(m);
    }
    auto meta = index_by_id(docs);
    Run out = freshness_rerank(run, meta, DecayParams(make_date(2020, 4, 10)));
    for (const auto &[topic, entries] : run.topics) {
      const auto &after = out.topics.at(topic);
      bool same = after.size() == entries.size();
      for (std::size_t k = 0; same && k < entries.size(); ++k)
        same = after[k].doc_id == entries[k].doc_id;
      c.expect(same, "order changed, trial " + std::to_string(i) + " topic " + topic);
    }
  }
  return c.outcome(std::to_string(kTrials) + " random runs");
}

// 5 ------------------------------------------------------------------------

JudgmentSet truth_for(std::mt19937_64 &rng, int topics, int universe) {
  std::uniform_int_distribution<int> grade(0, 2);
  JudgmentSet truth;
  for (int t = 1; t <= topics; ++t) {
    for (int d = 0; d < universe; ++d)
      truth.add(std::to_string(t), "d" + std::to_string(d), grade(rng));
    truth.add(std::to_string(t), "u_unique", grade(rng));
  }
  return truth;
}

Outcome pooling_correctness() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> nruns(1, 6), kdist(1, 10);
  Checker c;
  int strict_trials = 0;
  const int kTrials = 300;
  for (int i = 0; i < kTrials; ++i) {
    std::vector<Run> runs;
    int n = nruns(rng);
    for (int r = 0; r < n; ++r)
      runs.push_back(rankfuse::testing::random_run(rng, "r" + std::to_string(r), 4, 20, 30));
    std::size_t k = static_cast<std::size_t>(kdist(rng));

    std::set<std::pair<std::string, std::string>> brute;
    for (const auto &run : runs)
      for (const auto &[topic, entries] : run.topics)
        for (std::size_t j = 0; j < entries.size() && j < k; ++j)
          brute.emplace(topic, entries[j].doc_id);
    Pool pool = pool_runs(runs, k);
    c.expect(std::equal(brute.begin(), brute.end(), pool.members.begin(), pool.members.end()) &&
                 brute.size() == pool.members.size(),
             "pool differs from brute force, trial " + std::to_string(i));

    JudgmentSet truth = truth_for(rng, 4, 30);
    JudgmentSet round1 = judge_pool(pool, truth);
    for (const auto &run : runs)
      for (std::size_t depth = 1; depth <= k; ++depth)
        for (const auto &[topic, cov] : judgment_coverage(run, round1, depth).per_topic)
          c.expect(cov == 1.0, "coverage below 1 for " + run.tag + " at depth " +
                                   std::to_string(depth) + ", trial " + std::to_string(i));

    // An unpooled system with at least one document no pooled run retrieved.
    Run unpooled = rankfuse::testing::random_run(rng, "u", 4, 20, 30);
    unpooled.topics.begin()->second.front().doc_id = "u_unique";
    std::vector<std::string> topics = truth.topic_ids();
    auto before = rbp_eval(unpooled, round1, {}, topics);
    Pool own = pool_runs({residual_filter(unpooled, round1)}, k);
    JudgmentSet round2 = merge_judgments(round1, judge_pool(own, truth));
    auto after = rbp_eval(unpooled, round2, {}, topics);
    bool strict = false;
    for (const auto &t : topics) {
      double b = before.per_topic.at(t).residual, a = after.per_topic.at(t).residual;
      c.expect(a <= b, "residual increased, trial " + std::to_string(i) + " topic " + t);
      strict = strict || a < b;
    }
    c.expect(strict, "no residual decreased, trial " + std::to_string(i));
    strict_trials += strict;
  }
  return c.outcome(std::to_string(kTrials) + " trials, strict decrease in " +
                   std::to_string(strict_trials));
}

// 6 ------------------------------------------------------------------------

Outcome iqr_check() {
  Checker c;
  std::vector<LabeledValue> values{{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}, {"e", 100}};
  auto r = iqr_outliers(values, 3.0);
  c.expect(r.upper_fence == 10.0, "upper fence " + num(r.upper_fence));
  c.expect(r.outliers.size() == 1 && r.outliers[0].value == 100.0, "outlier set is not {100}");

  std::mt19937_64 rng(6);
  std::cauchy_distribution<double> heavy(0, 1);
  std::uniform_int_distribution<int> size(4, 80);
  for (int i = 0; i < 1000; ++i) {
    std::vector<LabeledValue> v;
    int n = size(rng);
    for (int j = 0; j < n; ++j)
      v.push_back({std::to_string(j), std::round(heavy(rng) * 4)});
    std::set<std::string> mild;
    for (const auto &o : iqr_outliers(v, 1.5).outliers)
      mild.insert(o.label);
    for (const auto &o : iqr_outliers(v, 3.0).outliers)
      c.expect(mild.count(o.label) > 0, "3.0 outlier not a 1.5 outlier, trial " + std::to_string(i));
  }
  return c.outcome("Q1=" + num(r.q1) + " Q3=" + num(r.q3) + ", 1000 nesting trials");
}

// 7 ------------------------------------------------------------------------

std::vector<Run> read_all_runs(const fs::path &dir) {
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file())
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Run> runs;
  for (const auto &f : files)
    runs.push_back(read_run_file(f.string(), kDefaultDepth, nullptr));
  return runs;
}

Outcome trec_covid_reproduction() {
  const char *root = std::getenv("RANKFUSE_TREC_COVID_DIR");
  if (!root)
    return {Status::Skip, "set RANKFUSE_TREC_COVID_DIR to run"};
  fs::path dir(root);
  fs::path q1 = dir / "qrels-rnd1.txt", qc = dir / "qrels-complete.txt", runs_dir = dir / "runs";
  for (const auto &p : {q1, qc, runs_dir})
    if (!fs::exists(p))
      return {Status::Skip, p.string() + " not found"};

  auto runs = read_all_runs(runs_dir);
  auto round1 = read_qrels_file(q1.string());
  auto complete = read_qrels_file(qc.string());
  auto topics = round1.topic_ids();
  const std::string target = "RMITBFuseM2";

  std::ostringstream detail;
  for (int threshold : {1, 2}) {
    EvalConfig cfg{0.5, threshold};
    std::vector<RbpResult> ea, eb;
    for (const auto &run : runs) {
      ea.push_back(rbp_eval(run, round1, cfg, topics));
      eb.push_back(rbp_eval(run, complete, cfg, topics));
    }
    auto ra = rank_systems(ea), rb = rank_systems(eb);
    const SystemRank *a = ra.find(target), *b = rb.find(target);
    if (!a || !b)
      return {Status::Fail, target + " not among " + std::to_string(runs.size()) + " runs"};
    auto report = rank_shift(ra, rb);
    auto near = [](double x, double want) { return std::abs(x - want) <= 0.001; };
    bool scores = near(a->mean_score, 0.586) && near(a->mean_residual, 0.246) &&
                  near(b->mean_score, 0.674) && near(b->mean_residual, 0.045);
    bool ranks = a->rank == 65 && b->rank == 30 && report.deltas.at(target) == 35 &&
                 report.is_extreme(target);
    detail << "threshold " << threshold << ": " << num(a->mean_score, 4) << "/"
           << num(a->mean_residual, 4) << " -> " << num(b->mean_score, 4) << "/"
           << num(b->mean_residual, 4) << ", rank " << a->rank << " -> " << b->rank
           << (report.is_extreme(target) ? " (extreme)" : "") << "; ";
    if (scores && ranks)
      return {Status::Pass, detail.str() + std::to_string(runs.size()) + " runs"};
  }
  return {Status::Fail, detail.str() + std::to_string(runs.size()) + " runs"};
}

// 8 ------------------------------------------------------------------------

struct PipelineOutput {
  std::map<std::string, std::string> files;
  std::size_t rankings = 0;
  std::string error;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

PipelineOutput run_pipeline(const fs::path &work, unsigned threads) {
  const fs::path fixtures = RANKFUSE_FIXTURES;
  fs::remove_all(work);
  fs::create_directories(work);
  auto p = [&](const std::string &name) { return (work / name).string(); };
  std::string t = std::to_string(threads);
  PipelineOutput result;
  auto step = [&](std::vector<std::string> args, const std::string &stdout_name = "") {
    if (!result.error.empty())
      return;
    args.insert(args.begin(), {"--threads", t});
    std::ostringstream out, err;
    int status = run_command(args, out, err);
    if (status != 0)
      result.error = args[2] + " exited " + std::to_string(status) + ": " + err.str();
    else if (!stdout_name.empty())
      result.files[stdout_name] = out.str();
  };
  step({"index", "--corpus", (fixtures / "metadata.csv").string(), "--stopwords",
        (fixtures / "stopwords.txt").string(), "--out", p("corpus.idx")});
  step({"search", "--index", p("corpus.idx"), "--topics", (fixtures / "topics.tsv").string(),
        "--depth", "50", "--out-dir", p("matrix")});
  step({"fuse", "--runs", p("matrix"), "--depth", "50", "--tag", "fused", "--out", p("fused.run")});
  step({"rerank", "--run", p("fused.run"), "--metadata", (fixtures / "metadata.csv").string(),
        "--ref-date", "2020-04-10", "--tag", "fresh", "--out", p("fresh.run")});
  step({"eval", "--qrels", (fixtures / "qrels_b.txt").string(), "--run", p("fresh.run"),
        "--per-topic", "--out", p("fresh.rbp.csv")});
  if (result.error.empty()) {
    fs::create_directories(work / "systems");
    for (const auto &e : fs::directory_iterator(work / "matrix")) {
      result.rankings += read_run_file(e.path().string()).topics.size();
      fs::copy_file(e.path(), work / "systems" / e.path().filename());
    }
    fs::copy_file(p("fused.run"), work / "systems" / "fused.run");
    fs::copy_file(p("fresh.run"), work / "systems" / "fresh.run");
  }
  step({"pool", "--runs", p("systems"), "--depth", "7", "--exclude-qrels",
        (fixtures / "qrels_a.txt").string(), "--out", p("pool.txt")});
  step({"analyze", "rank-shift", "--runs", p("systems"), "--qrels-a",
        (fixtures / "qrels_a.txt").string(), "--qrels-b", (fixtures / "qrels_b.txt").string(),
        "--out", p("shift.csv")});
  step({"analyze", "curves", "--runs", p("systems"), "--qrels",
        (fixtures / "qrels_b.txt").string()},
       "curves.csv");
  if (!result.error.empty())
    return result;
  for (const auto &e : fs::recursive_directory_iterator(work))
    if (e.is_regular_file())
      result.files[fs::relative(e.path(), work).string()] = slurp(e.path());
  return result;
}

Outcome desk_pipeline() {
  std::random_device rd;
  fs::path base = fs::temp_directory_path() / ("rankfuse_accept_" + std::to_string(rd()));
  auto start = std::chrono::steady_clock::now();
  auto first = run_pipeline(base / "a", 1);
  auto second = run_pipeline(base / "b", 1);
  auto threaded = run_pipeline(base / "c", 4);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fs::remove_all(base);

  Checker c;
  for (const auto *r : {&first, &second, &threaded})
    c.expect(r->error.empty(), r->error);
  if (c.failures)
    return c.outcome("");
  c.expect(first.rankings == 120, std::to_string(first.rankings) + " rankings, expected 120");
  c.expect(first.files == second.files, "repeated runs differ");
  c.expect(first.files == threaded.files, "1 and 4 threads differ");
  c.expect(!first.files.at("pool.txt").empty(), "empty pool");
  c.expect(seconds < 30.0, "three replays took " + num(seconds) + " s");
  return c.outcome(std::to_string(first.rankings) + " rankings, " +
                   std::to_string(first.files.size()) + " files, 3 replays in " +
                   num(seconds, 3) + " s");
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    double budget_seconds;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "decay fit points", 1, decay_fit},
      {2, "RBP property suite", 10, rbp_properties},
      {3, "CombSUM oracle equivalence", 10, combsum_oracle},
      {4, "freshness identity", 10, freshness_identity},
      {5, "pooling correctness", 10, pooling_correctness},
      {6, "IQR outlier hand-check", 10, iqr_check},
      {7, "TREC-COVID round-1 reproduction", 300, trec_covid_reproduction},
      {8, "desk-scale pipeline replay", 30, desk_pipeline},
  };

  int failed = 0;
  for (const auto &cr : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.fn();
    } catch (const std::exception &e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status != Status::Skip && seconds > cr.budget_seconds)
      o = {Status::Fail, o.detail + "; took " + num(seconds, 3) + " s, budget " +
                             num(cr.budget_seconds) + " s"};
    const char *label = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    std::cout << "criterion " << cr.id << ": " << label << "  " << cr.name << "  (" << o.detail
              << ", " << std::fixed << std::setprecision(2) << seconds << " s)\n"
              << std::defaultfloat;
    failed += o.status == Status::Fail;
  }
  return failed == 0 ? 0 : 1;
}
