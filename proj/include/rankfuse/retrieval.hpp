#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankfuse/corpus.hpp"
#include "rankfuse/ranking.hpp"

namespace rankfuse {

using Stopwords = std::set<std::string, std::less<>>;

// Lowercases ASCII and splits on maximal runs of ASCII characters that are
// not letters or digits. Bytes >= 0x80 are kept inside tokens so UTF-8 words
// stay whole.
std::vector<std::string> tokenize(std::string_view text, const Stopwords *stopwords = nullptr);

struct Posting {
  std::uint32_t doc = 0;
  std::uint32_t tf = 0;

  friend bool operator==(const Posting &, const Posting &) = default;
};

struct TermEntry {
  std::vector<Posting> postings; // ascending doc ordinal
  std::uint64_t cf = 0;          // collection frequency

  std::size_t df() const { return postings.size(); }
  friend bool operator==(const TermEntry &, const TermEntry &) = default;
};

class Index {
public:
  static constexpr std::uint32_t kFormatVersion = 1;

  std::size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_length() const { return avgdl_; }
  std::uint64_t token_count() const { return token_count_; }
  const std::vector<std::string> &doc_ids() const { return doc_ids_; }
  const std::vector<std::uint32_t> &doc_lengths() const { return doc_lengths_; }
  const Stopwords &stopwords() const { return stopwords_; }
  std::size_t term_count() const { return terms_.size(); }

  const TermEntry *term(std::string_view t) const;
  std::size_t df(std::string_view t) const;

  void save(std::ostream &out) const;
  static Index load(std::istream &in);
  void save_file(const std::string &path) const;
  static Index load_file(const std::string &path);

  friend bool operator==(const Index &, const Index &) = default;
  friend Index build_index(const std::vector<DocMeta> &docs, const Stopwords &stopwords);

private:
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, TermEntry> terms_;
  std::uint64_t token_count_ = 0;
  double avgdl_ = 0.0;
  Stopwords stopwords_;
};

// Indexes DocMeta::text(). Throws EmptyCorpus or DuplicateDocId.
Index build_index(const std::vector<DocMeta> &docs, const Stopwords &stopwords = {});

// Statistics handed to a scorer for one (query term, document) match.
struct TermMatch {
  double tf = 0;          // occurrences in the document
  double doc_length = 0;  // tokens in the document
  double df = 0;          // documents containing the term
  double cf = 0;          // occurrences in the collection
  double doc_count = 0;   // N
  double avg_doc_length = 0;
  double token_count = 0; // tokens in the collection
};

// Scorer contract: score() is the contribution of one matching query term
// occurrence to a document. It is evaluated only for tf >= 1, is multiplied by
// the term's frequency in the query, and summed over query terms. It must be a
// pure function of its arguments. name() must not contain '.' or whitespace
// since it is used in run file names and tags.
class Scorer {
public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual double score(const TermMatch &m) const = 0;
};

// Okapi BM25, idf = ln((N - df + 0.5) / (df + 0.5)) floored at 0.
class Bm25 final : public Scorer {
public:
  explicit Bm25(double k1 = 1.2, double b = 0.75);
  std::string name() const override { return "BM25"; }
  double score(const TermMatch &m) const override;

private:
  double k1_, b_;
};

// Robertson tf times idf = log2(N / df + 1).
class TfIdf final : public Scorer {
public:
  explicit TfIdf(double k1 = 1.2, double b = 0.75);
  std::string name() const override { return "TF_IDF"; }
  double score(const TermMatch &m) const override;

private:
  double k1_, b_;
};

// Hiemstra's language model with mixing weight lambda:
// log2(1 + lambda * tf * T / ((1 - lambda) * cf * dl)).
class HiemstraLm final : public Scorer {
public:
  explicit HiemstraLm(double lambda = 0.15);
  std::string name() const override { return "Hiemstra_LM"; }
  double score(const TermMatch &m) const override;

private:
  double lambda_;
};

// Parameter-free DFR hypergeometric model (DPH).
class Dph final : public Scorer {
public:
  std::string name() const override { return "DPH"; }
  double score(const TermMatch &m) const override;
};

using ScoringModel = std::shared_ptr<const Scorer>;

struct ModelParams {
  double bm25_k1 = 1.2;
  double bm25_b = 0.75;
  double tfidf_k1 = 1.2;
  double tfidf_b = 0.75;
  double lm_lambda = 0.15;
};

// Names: BM25, TF_IDF, Hiemstra_LM, DPH (case-insensitive).
ScoringModel make_model(std::string_view name, const ModelParams &params = {});
// Comma-separated list of model names.
std::vector<ScoringModel> parse_roster(std::string_view roster, const ModelParams &params = {});
std::vector<std::string> builtin_model_names();

// Top `depth` documents matching at least one query term, scored by `model`,
// ties broken by ascending doc id. Throws EmptyQuery when the query has no
// tokens and InvalidArgument when depth is 0.
Ranking search(const Index &index, std::string_view query, const Scorer &model,
               std::size_t depth);

} // namespace rankfuse
