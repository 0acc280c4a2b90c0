#include "rankfuse/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "rankfuse/analysis.hpp"
#include "rankfuse/corpus.hpp"
#include "rankfuse/eval.hpp"
#include "rankfuse/freshness.hpp"
#include "rankfuse/fusion.hpp"
#include "rankfuse/parallel.hpp"
#include "rankfuse/pooling.hpp"
#include "rankfuse/retrieval.hpp"
#include "rankfuse/trec_io.hpp"

namespace fs = std::filesystem;

namespace rankfuse {

void write_file_atomic(const std::string &path, const std::string &content) {
  fs::path target(path);
  if (target.has_parent_path())
    fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(Errc::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error(Errc::Io, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(Errc::Io, "cannot rename onto " + path + ": " + ec.message());
  }
}

namespace {

const std::vector<std::string> kSubcommands = {"index", "search", "fuse",   "rerank",
                                               "eval",  "pool",   "analyze"};

struct CorpusFlags {
  std::string format; // csv | tsv; empty = by extension
  MetadataColumns columns;
};

void add_corpus_flags(CLI::App *cmd, CorpusFlags &flags) {
  cmd->add_option("--format", flags.format, "csv (metadata) or tsv (doc_id<TAB>text)")
      ->check(CLI::IsMember({"csv", "tsv"}));
  cmd->add_option("--id-column", flags.columns.id, "metadata id column")->capture_default_str();
  cmd->add_option("--title-column", flags.columns.title)->capture_default_str();
  cmd->add_option("--abstract-column", flags.columns.abstract)->capture_default_str();
  cmd->add_option("--date-column", flags.columns.date)->capture_default_str();
  cmd->add_option("--body-column", flags.columns.body, "optional body text column")
      ->capture_default_str();
}

std::vector<DocMeta> load_corpus(const std::string &path, const CorpusFlags &flags,
                                 const CleaningContext &ctx, Warnings *warnings) {
  std::string format = flags.format;
  if (format.empty())
    format = fs::path(path).extension() == ".csv" ? "csv" : "tsv";
  if (format == "csv")
    return read_metadata_file(path, ctx, flags.columns, warnings);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::Io, "cannot open " + path);
  try {
    return ingest_doc_records(in, ctx);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

Stopwords load_stopwords(const std::string &path) {
  Stopwords words;
  if (path.empty())
    return words;
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::Io, "cannot open " + path);
  std::string line;
  while (std::getline(in, line))
    for (auto &t : tokenize(line))
      words.insert(t);
  return words;
}

std::set<std::string> load_tag_list(const std::string &path) {
  std::set<std::string> tags;
  if (path.empty())
    return tags;
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::Io, "cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty() && t.front() != '#')
      tags.emplace(t);
  }
  return tags;
}

void emit(const std::string &path, const std::string &content, std::ostream &out) {
  if (path.empty() || path == "-")
    out << content;
  else
    write_file_atomic(path, content);
}

void require_file(const std::string &path) {
  if (!fs::exists(path))
    throw Error(Errc::Io, path + " does not exist");
}

void add_model_flags(CLI::App *cmd, std::string &roster, ModelParams &params) {
  cmd->add_option("--models", roster, "comma-separated model roster")->capture_default_str();
  cmd->add_option("--bm25-k1", params.bm25_k1)->capture_default_str();
  cmd->add_option("--bm25-b", params.bm25_b)->capture_default_str();
  cmd->add_option("--tfidf-k1", params.tfidf_k1)->capture_default_str();
  cmd->add_option("--tfidf-b", params.tfidf_b)->capture_default_str();
  cmd->add_option("--lm-lambda", params.lm_lambda)->capture_default_str();
}

std::string default_roster() {
  std::string r;
  for (const auto &n : builtin_model_names())
    r += (r.empty() ? "" : ",") + n;
  return r;
}

struct MeasureFlags {
  std::string measure = "rbp";
  double phi = 0.5;
  int threshold = 1;
  std::size_t k = 5;
};

void add_measure_flags(CLI::App *cmd, MeasureFlags &flags) {
  cmd->add_option("--measure", flags.measure)->check(CLI::IsMember({"rbp", "p"}))->capture_default_str();
  cmd->add_option("--phi", flags.phi, "RBP persistence")->capture_default_str();
  cmd->add_option("--threshold", flags.threshold, "minimum relevant grade")->capture_default_str();
  cmd->add_option("--k", flags.k, "precision cutoff")->capture_default_str();
}

// Mean score/residual per run under one measure. Precision has no residual.
std::vector<RbpResult> evaluate_runs(const std::vector<Run> &runs, const JudgmentSet &qrels,
                                     const MeasureFlags &m, const std::vector<std::string> &topics,
                                     unsigned threads) {
  std::vector<RbpResult> results(runs.size());
  parallel_for(runs.size(), threads, [&](std::size_t i) {
    if (m.measure == "rbp") {
      results[i] = rbp_eval(runs[i], qrels, {m.phi, m.threshold}, topics);
    } else {
      auto p = precision_at_k(runs[i], qrels, m.k, m.threshold, topics);
      RbpResult r;
      r.tag = p.tag;
      for (const auto &[t, v] : p.per_topic)
        r.per_topic[t] = {v, 0.0};
      r.mean_score = p.mean;
      r.mean_residual = 0.0;
      results[i] = std::move(r);
    }
  });
  return results;
}

void flush_warnings(Warnings &w, std::ostream &err) {
  for (const auto &m : w.messages)
    err << "warning: " << m << "\n";
  w.messages.clear();
}

} // namespace

int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  if (!args.empty() && !args.front().empty() && args.front().front() != '-' &&
      std::find(kSubcommands.begin(), kSubcommands.end(), args.front()) == kSubcommands.end()) {
    err << "error: " << Error(Errc::UnknownSubcommand, "'" + args.front() + "'").what() << "\n";
    return 2;
  }

  CLI::App app{"Query-variation fusion, freshness re-ranking and RBP residual analysis"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  bool show_version = false;
  unsigned threads = 0;
  app.add_flag("--version", show_version, "print version information");
  app.add_option("--threads", threads, "worker threads (0 = RANKFUSE_THREADS or all cores)");

  // index
  auto *index_cmd = app.add_subcommand("index", "build an index from a corpus");
  std::string corpus_path, index_out, stopword_path;
  CorpusFlags corpus_flags;
  index_cmd->add_option("--corpus", corpus_path, "metadata CSV or doc_id<TAB>text file")->required();
  index_cmd->add_option("--stopwords", stopword_path, "stopword list, one or more per line");
  index_cmd->add_option("--out", index_out, "index file")->required();
  add_corpus_flags(index_cmd, corpus_flags);

  // search
  auto *search_cmd = app.add_subcommand("search", "write one run per (model, variation)");
  std::string index_path, topics_path, out_dir, roster = default_roster();
  std::size_t depth = kDefaultDepth, source_depth = kDefaultDepth;
  ModelParams model_params;
  search_cmd->add_option("--index", index_path)->required();
  search_cmd->add_option("--topics", topics_path, "topic<TAB>variation<TAB>query")->required();
  search_cmd->add_option("--depth", depth)->capture_default_str();
  search_cmd->add_option("--out-dir", out_dir, "directory for <model>.<variation>.run")->required();
  add_model_flags(search_cmd, roster, model_params);

  // fuse
  auto *fuse_cmd = app.add_subcommand("fuse", "CombSUM over a run directory or in-process matrix");
  std::string runs_dir, tag = "fused", out_path;
  fuse_cmd->add_option("--runs", runs_dir, "directory of .run files");
  fuse_cmd->add_option("--index", index_path, "search in-process instead of --runs");
  fuse_cmd->add_option("--topics", topics_path);
  fuse_cmd->add_option("--depth", depth, "output depth")->capture_default_str();
  fuse_cmd->add_option("--source-depth", source_depth)->capture_default_str();
  fuse_cmd->add_option("--tag", tag)->capture_default_str();
  fuse_cmd->add_option("--out", out_path)->required();
  add_model_flags(fuse_cmd, roster, model_params);

  // rerank
  auto *rerank_cmd = app.add_subcommand("rerank", "freshness re-ranking");
  std::string run_path, metadata_path, ref_date_text, rerank_tag;
  rerank_cmd->add_option("--run", run_path)->required();
  rerank_cmd->add_option("--metadata", metadata_path)->required();
  rerank_cmd->add_option("--ref-date", ref_date_text, "YYYY-MM-DD")->required();
  rerank_cmd->add_option("--tag", rerank_tag, "output tag (default: input tag)");
  rerank_cmd->add_option("--out", out_path)->required();
  add_corpus_flags(rerank_cmd, corpus_flags);

  // eval
  auto *eval_cmd = app.add_subcommand("eval", "RBP with residual or precision@k");
  std::string qrels_path;
  MeasureFlags measure;
  bool per_topic = false;
  eval_cmd->add_option("--qrels", qrels_path)->required();
  eval_cmd->add_option("--run", run_path)->required();
  eval_cmd->add_flag("--per-topic", per_topic);
  eval_cmd->add_option("--out", out_path, "CSV output (default stdout)");
  add_measure_flags(eval_cmd, measure);

  // pool
  auto *pool_cmd = app.add_subcommand("pool", "depth-k pooling");
  std::string exclude_path;
  std::size_t pool_depth = 7;
  pool_cmd->add_option("--depth", pool_depth)->capture_default_str();
  pool_cmd->add_option("--runs", runs_dir)->required();
  pool_cmd->add_option("--exclude-qrels", exclude_path, "prior judgments removed before pooling");
  pool_cmd->add_option("--out", out_path)->required();

  // analyze
  auto *analyze_cmd = app.add_subcommand("analyze", "system ranking analysis");
  analyze_cmd->require_subcommand(1);
  auto *shift_cmd = analyze_cmd->add_subcommand("rank-shift", "rank changes between two qrels");
  std::string qrels_a, qrels_b, pooled_path;
  RankShiftOptions shift_options;
  shift_cmd->add_option("--runs", runs_dir)->required();
  shift_cmd->add_option("--qrels-a", qrels_a)->required();
  shift_cmd->add_option("--qrels-b", qrels_b)->required();
  shift_cmd->add_option("--outlier-multiplier", shift_options.extreme_multiplier)->capture_default_str();
  shift_cmd->add_option("--mild-multiplier", shift_options.mild_multiplier)->capture_default_str();
  shift_cmd->add_option("--pooled", pooled_path, "file listing pooled run tags");
  shift_cmd->add_flag("--pooled-only", shift_options.pooled_only,
                      "boxplot statistics over pooled systems only");
  shift_cmd->add_option("--out", out_path, "CSV output (default stdout)");
  add_measure_flags(shift_cmd, measure);

  auto *curves_cmd = analyze_cmd->add_subcommand("curves", "RBP plot data");
  std::string curve_mode = "per-system";
  curves_cmd->add_option("--runs", runs_dir)->required();
  curves_cmd->add_option("--qrels", qrels_path)->required();
  curves_cmd->add_option("--mode", curve_mode)->check(CLI::IsMember({"per-system", "per-topic"}))->capture_default_str();
  curves_cmd->add_option("--pooled", pooled_path, "file listing pooled run tags");
  curves_cmd->add_option("--out", out_path, "CSV output (default stdout)");
  add_measure_flags(curves_cmd, measure);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    std::ostringstream cli_out, cli_err;
    int status = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return status;
  }

  if (show_version) {
    out << "rankfuse " << kVersion << " (index format " << Index::kFormatVersion
        << ", run format trec-6col)\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    out << app.help();
    return 0;
  }

  Warnings warnings;
  try {
    if (index_cmd->parsed()) {
      require_file(corpus_path);
      auto docs = load_corpus(corpus_path, corpus_flags, CleaningContext{}, &warnings);
      auto index = build_index(docs, load_stopwords(stopword_path));
      std::ostringstream buf;
      index.save(buf);
      write_file_atomic(index_out, buf.str());
      err << "indexed " << index.doc_count() << " documents, " << index.term_count()
          << " terms\n";
    } else if (search_cmd->parsed()) {
      require_file(index_path);
      require_file(topics_path);
      auto models = parse_roster(roster, model_params);
      auto index = Index::load_file(index_path);
      auto topics = read_topics_file(topics_path);
      auto runs = search_matrix(topics, models, index, depth, threads, &warnings);
      fs::create_directories(out_dir);
      for (const auto &run : runs)
        write_file_atomic((fs::path(out_dir) / (run.tag + ".run")).string(), write_run(run));
      err << "wrote " << runs.size() << " runs to " << out_dir << "\n";
    } else if (fuse_cmd->parsed()) {
      FuseOptions options{source_depth, depth, threads};
      Run fused;
      if (!runs_dir.empty()) {
        if (!index_path.empty())
          throw Error(Errc::InvalidArgument, "use either --runs or --index/--topics");
        auto runs = load_run_directory(runs_dir, source_depth, &warnings);
        fused = fuse_runs(runs, tag, options);
      } else {
        if (index_path.empty() || topics_path.empty())
          throw Error(Errc::InvalidArgument, "fuse needs --runs or --index with --topics");
        require_file(index_path);
        require_file(topics_path);
        auto models = parse_roster(roster, model_params);
        auto index = Index::load_file(index_path);
        auto topics = read_topics_file(topics_path);
        fused = double_fuse_topics(topics, models, index, tag, options, &warnings);
      }
      write_file_atomic(out_path, write_run(fused));
    } else if (rerank_cmd->parsed()) {
      require_file(run_path);
      require_file(metadata_path);
      Date ref = parse_iso_date(ref_date_text);
      CleaningContext ctx;
      ctx.today = ref;
      auto run = read_run_file(run_path, kDefaultDepth, &warnings);
      auto docs = load_corpus(metadata_path, corpus_flags, ctx, &warnings);
      auto meta = index_by_id(docs);
      Run reranked = freshness_rerank(run, meta, DecayParams(ref), &warnings);
      if (!rerank_tag.empty())
        reranked.tag = rerank_tag;
      write_file_atomic(out_path, write_run(reranked));
    } else if (eval_cmd->parsed()) {
      require_file(qrels_path);
      require_file(run_path);
      auto qrels = read_qrels_file(qrels_path);
      auto run = read_run_file(run_path, kDefaultDepth, &warnings);
      auto topics = qrels.topic_ids();
      auto result = evaluate_runs({run}, qrels, measure, topics, threads).front();
      std::string csv = measure.measure == "rbp" ? "topic,score,residual\n" : "topic,score\n";
      auto row = [&](const std::string &label, double s, double r) {
        csv += label + "," + format_score(s);
        if (measure.measure == "rbp")
          csv += "," + format_score(r);
        csv += "\n";
      };
      if (per_topic)
        for (const auto &[t, s] : result.per_topic)
          row(t, s.score, s.residual);
      row("mean", result.mean_score, result.mean_residual);
      emit(out_path, csv, out);
    } else if (pool_cmd->parsed()) {
      auto runs = load_run_directory(runs_dir, kDefaultDepth, &warnings);
      if (!exclude_path.empty()) {
        require_file(exclude_path);
        auto prior = read_qrels_file(exclude_path);
        for (auto &r : runs)
          r = residual_filter(r, prior);
      }
      auto pool = pool_runs(runs, pool_depth);
      write_file_atomic(out_path, write_pool(pool));
      err << "pooled " << pool.members.size() << " documents from " << runs.size() << " runs\n";
    } else if (shift_cmd->parsed()) {
      require_file(qrels_a);
      require_file(qrels_b);
      auto runs = load_run_directory(runs_dir, kDefaultDepth, &warnings);
      auto qa = read_qrels_file(qrels_a);
      auto qb = read_qrels_file(qrels_b);
      // Both judgment sets are evaluated over the topics judged in the first.
      auto topics = qa.topic_ids();
      auto pooled = load_tag_list(pooled_path);
      auto ea = evaluate_runs(runs, qa, measure, topics, threads);
      auto eb = evaluate_runs(runs, qb, measure, topics, threads);
      for (auto *set : {&ea, &eb})
        for (auto &e : *set)
          e.pooled = pooled.count(e.tag) > 0;
      auto ra = rank_systems(ea);
      auto rb = rank_systems(eb);
      auto report = rank_shift(ra, rb, shift_options);
      emit(out_path, write_rank_shift_csv(ra, rb, report), out);
      if (report.extreme) {
        const auto &x = *report.extreme;
        err << "Q1=" << format_score(x.q1) << " Q3=" << format_score(x.q3)
            << " IQR=" << format_score(x.iqr) << " fences(" << format_score(x.multiplier)
            << "x)=[" << format_score(x.lower_fence) << ", " << format_score(x.upper_fence)
            << "]\n";
        for (const auto &v : x.outliers)
          err << "extreme outlier: " << v.label << " delta " << format_score(v.value) << "\n";
      }
      for (const auto &t : report.only_in_a)
        err << "only under qrels-a: " << t << "\n";
      for (const auto &t : report.only_in_b)
        err << "only under qrels-b: " << t << "\n";
    } else if (curves_cmd->parsed()) {
      require_file(qrels_path);
      auto runs = load_run_directory(runs_dir, kDefaultDepth, &warnings);
      auto qrels = read_qrels_file(qrels_path);
      auto pooled = load_tag_list(pooled_path);
      auto evals = evaluate_runs(runs, qrels, measure, qrels.topic_ids(), threads);
      for (auto &e : evals)
        e.pooled = pooled.count(e.tag) > 0;
      emit(out_path,
           export_curves(evals, curve_mode == "per-system" ? CurveMode::PerSystem
                                                           : CurveMode::PerTopic),
           out);
    }
  } catch (const Error &e) {
    flush_warnings(warnings, err);
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    flush_warnings(warnings, err);
    err << "error: " << e.what() << "\n";
    return 1;
  }
  flush_warnings(warnings, err);
  return 0;
}

} // namespace rankfuse
