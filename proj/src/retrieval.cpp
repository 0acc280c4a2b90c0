#include "rankfuse/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <unordered_set>

namespace rankfuse {

namespace {

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

const char kMagic[8] = {'R', 'F', 'I', 'D', 'X', 0, 0, 0};

void put_u32(std::ostream &out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i)
    b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream &out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i)
    b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_str(std::ostream &out, const std::string &s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_exact(std::istream &in, char *buf, std::size_t n) {
  if (!in.read(buf, static_cast<std::streamsize>(n)))
    throw Error(Errc::BadIndexFormat, "truncated index");
}

std::uint32_t get_u32(std::istream &in) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char *>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream &in) {
  unsigned char b[8];
  read_exact(in, reinterpret_cast<char *>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
    v = (v << 8) | b[i];
  return v;
}

std::string get_str(std::istream &in) {
  std::uint32_t n = get_u32(in);
  std::string s(n, '\0');
  read_exact(in, s.data(), n);
  return s;
}

void require(bool ok, const char *what) {
  if (!ok)
    throw Error(Errc::InvalidArgument, what);
}

} // namespace

std::vector<std::string> tokenize(std::string_view text, const Stopwords *stopwords) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_token_char(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t start = i;
    while (i < text.size() && is_token_char(static_cast<unsigned char>(text[i])))
      ++i;
    if (i == start)
      continue;
    std::string tok(text.substr(start, i - start));
    for (auto &c : tok)
      if (c >= 'A' && c <= 'Z')
        c = static_cast<char>(c - 'A' + 'a');
    if (stopwords != nullptr && stopwords->count(tok))
      continue;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

const TermEntry *Index::term(std::string_view t) const {
  auto it = terms_.find(std::string(t));
  return it == terms_.end() ? nullptr : &it->second;
}

std::size_t Index::df(std::string_view t) const {
  const TermEntry *e = term(t);
  return e == nullptr ? 0 : e->df();
}

Index build_index(const std::vector<DocMeta> &docs, const Stopwords &stopwords) {
  if (docs.empty())
    throw Error(Errc::EmptyCorpus, "no documents to index");
  Index index;
  index.stopwords_ = stopwords;
  std::unordered_set<std::string> seen;
  index.doc_ids_.reserve(docs.size());
  index.doc_lengths_.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!seen.insert(docs[d].doc_id).second)
      throw Error(Errc::DuplicateDocId, "document " + docs[d].doc_id + " appears twice");
    auto tokens = tokenize(docs[d].text(), &index.stopwords_);
    std::map<std::string, std::uint32_t> counts;
    for (auto &t : tokens)
      ++counts[t];
    for (auto &[t, tf] : counts) {
      auto &entry = index.terms_[t];
      entry.postings.push_back({static_cast<std::uint32_t>(d), tf});
      entry.cf += tf;
    }
    index.doc_ids_.push_back(docs[d].doc_id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    index.token_count_ += tokens.size();
  }
  index.avgdl_ = static_cast<double>(index.token_count_) / static_cast<double>(docs.size());
  return index;
}

void Index::save(std::ostream &out) const {
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u64(out, doc_ids_.size());
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    put_str(out, doc_ids_[d]);
    put_u32(out, doc_lengths_[d]);
  }
  put_u64(out, stopwords_.size());
  for (const auto &s : stopwords_)
    put_str(out, s);
  std::vector<const std::pair<const std::string, TermEntry> *> sorted;
  sorted.reserve(terms_.size());
  for (const auto &kv : terms_)
    sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(), [](auto *a, auto *b) { return a->first < b->first; });
  put_u64(out, sorted.size());
  for (const auto *kv : sorted) {
    put_str(out, kv->first);
    put_u64(out, kv->second.cf);
    put_u64(out, kv->second.postings.size());
    for (const auto &p : kv->second.postings) {
      put_u32(out, p.doc);
      put_u32(out, p.tf);
    }
  }
  if (!out)
    throw Error(Errc::Io, "failed writing index");
}

Index Index::load(std::istream &in) {
  char magic[sizeof(kMagic)];
  read_exact(in, magic, sizeof(magic));
  if (!std::equal(magic, magic + sizeof(magic), kMagic))
    throw Error(Errc::BadIndexFormat, "not a rankfuse index");
  std::uint32_t version = get_u32(in);
  if (version != kFormatVersion)
    throw Error(Errc::BadIndexFormat, "unsupported index version " + std::to_string(version));
  Index index;
  std::uint64_t n = get_u64(in);
  for (std::uint64_t d = 0; d < n; ++d) {
    index.doc_ids_.push_back(get_str(in));
    index.doc_lengths_.push_back(get_u32(in));
    index.token_count_ += index.doc_lengths_.back();
  }
  std::uint64_t nstop = get_u64(in);
  for (std::uint64_t i = 0; i < nstop; ++i)
    index.stopwords_.insert(get_str(in));
  std::uint64_t nterms = get_u64(in);
  for (std::uint64_t i = 0; i < nterms; ++i) {
    std::string t = get_str(in);
    TermEntry entry;
    entry.cf = get_u64(in);
    std::uint64_t np = get_u64(in);
    entry.postings.reserve(np);
    for (std::uint64_t j = 0; j < np; ++j) {
      Posting p;
      p.doc = get_u32(in);
      p.tf = get_u32(in);
      if (p.doc >= n)
        throw Error(Errc::BadIndexFormat, "posting references unknown document");
      entry.postings.push_back(p);
    }
    index.terms_.emplace(std::move(t), std::move(entry));
  }
  index.avgdl_ = n == 0 ? 0.0 : static_cast<double>(index.token_count_) / static_cast<double>(n);
  return index;
}

void Index::save_file(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(Errc::Io, "cannot write " + path);
  save(out);
}

Index Index::load_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::Io, "cannot open " + path);
  try {
    return load(in);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

Bm25::Bm25(double k1, double b) : k1_(k1), b_(b) {
  require(k1 >= 0, "BM25 k1 must be >= 0");
  require(b >= 0 && b <= 1, "BM25 b must be in [0, 1]");
}

double Bm25::score(const TermMatch &m) const {
  double idf = std::log((m.doc_count - m.df + 0.5) / (m.df + 0.5));
  if (idf < 0)
    idf = 0;
  double norm = m.avg_doc_length > 0 ? m.doc_length / m.avg_doc_length : 0.0;
  const double saturation = m.tf / (m.tf + k1_ * (1 - b_ + b_ * norm));
  return idf * (k1_ + 1) * saturation;
}

TfIdf::TfIdf(double k1, double b) : k1_(k1), b_(b) {
  require(k1 >= 0, "TF_IDF k1 must be >= 0");
  require(b >= 0 && b <= 1, "TF_IDF b must be in [0, 1]");
}

double TfIdf::score(const TermMatch &m) const {
  double norm = m.avg_doc_length > 0 ? m.doc_length / m.avg_doc_length : 0.0;
  double robertson_tf = k1_ * (m.tf / (m.tf + k1_ * (1 - b_ + b_ * norm)));
  double idf = std::log2(m.doc_count / m.df + 1);
  return robertson_tf * idf;
}

HiemstraLm::HiemstraLm(double lambda) : lambda_(lambda) {
  require(lambda > 0 && lambda < 1, "Hiemstra_LM lambda must be in (0, 1)");
}

double HiemstraLm::score(const TermMatch &m) const {
  return std::log2(1 + (lambda_ * m.tf * m.token_count) / ((1 - lambda_) * m.cf * m.doc_length));
}

double Dph::score(const TermMatch &m) const {
  const double f = m.tf / m.doc_length;
  // A document made only of this term carries no information under DPH.
  if (f >= 1)
    return 0.0;
  const double norm = (1 - f) * (1 - f) / (m.tf + 1);
  return norm * (m.tf * std::log2((m.tf * m.avg_doc_length / m.doc_length) *
                                  (m.doc_count / m.cf)) +
                 0.5 * std::log2(2 * std::numbers::pi * m.tf * (1 - f)));
}

ScoringModel make_model(std::string_view name, const ModelParams &params) {
  std::string key(name);
  for (auto &c : key)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (key == "bm25")
    return std::make_shared<Bm25>(params.bm25_k1, params.bm25_b);
  if (key == "tf_idf" || key == "tfidf")
    return std::make_shared<TfIdf>(params.tfidf_k1, params.tfidf_b);
  if (key == "hiemstra_lm" || key == "hiemstralm")
    return std::make_shared<HiemstraLm>(params.lm_lambda);
  if (key == "dph")
    return std::make_shared<Dph>();
  throw Error(Errc::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

std::vector<ScoringModel> parse_roster(std::string_view roster, const ModelParams &params) {
  std::vector<ScoringModel> models;
  std::set<std::string> names;
  std::size_t start = 0;
  while (start <= roster.size()) {
    auto comma = roster.find(',', start);
    auto part = trim(roster.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start));
    if (!part.empty()) {
      auto model = make_model(part, params);
      if (!names.insert(model->name()).second)
        throw Error(Errc::InvalidArgument, "model " + model->name() + " listed twice");
      models.push_back(std::move(model));
    }
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  if (models.empty())
    throw Error(Errc::InvalidArgument, "empty model roster");
  return models;
}

std::vector<std::string> builtin_model_names() { return {"BM25", "TF_IDF", "Hiemstra_LM", "DPH"}; }

Ranking search(const Index &index, std::string_view query, const Scorer &model,
               std::size_t depth) {
  if (depth == 0)
    throw Error(Errc::InvalidArgument, "search depth must be >= 1");
  auto tokens = tokenize(query, &index.stopwords());
  if (tokens.empty())
    throw Error(Errc::EmptyQuery, "query '" + std::string(query) + "' has no terms");
  std::map<std::string, int> qtf;
  for (auto &t : tokens)
    ++qtf[t];

  const std::size_t n = index.doc_count();
  std::vector<double> acc(n, 0.0);
  std::vector<char> matched(n, 0);
  TermMatch m;
  m.doc_count = static_cast<double>(n);
  m.avg_doc_length = index.avg_doc_length();
  m.token_count = static_cast<double>(index.token_count());
  for (const auto &[t, count] : qtf) {
    const TermEntry *entry = index.term(t);
    if (entry == nullptr)
      continue;
    m.df = static_cast<double>(entry->df());
    m.cf = static_cast<double>(entry->cf);
    for (const auto &p : entry->postings) {
      m.tf = p.tf;
      m.doc_length = index.doc_lengths()[p.doc];
      acc[p.doc] += count * model.score(m);
      matched[p.doc] = 1;
    }
  }
  Ranking ranking;
  ranking.model = model.name();
  for (std::size_t d = 0; d < n; ++d)
    if (matched[d])
      ranking.docs.push_back({index.doc_ids()[d], acc[d]});
  auto cmp = [](const ScoredDoc &a, const ScoredDoc &b) {
    if (a.score != b.score)
      return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  if (ranking.docs.size() > depth) {
    std::partial_sort(ranking.docs.begin(), ranking.docs.begin() + static_cast<long>(depth),
                      ranking.docs.end(), cmp);
    ranking.docs.resize(depth);
  } else {
    std::sort(ranking.docs.begin(), ranking.docs.end(), cmp);
  }
  return ranking;
}

} // namespace rankfuse
