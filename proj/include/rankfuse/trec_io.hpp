#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankfuse/error.hpp"

namespace rankfuse {

// Orders topic ids numerically when both are digit strings ("2" < "10"),
// lexicographically otherwise; numeric ids sort before non-numeric ones.
struct TopicLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

inline constexpr std::size_t kDefaultDepth = 1000;

// One line of a run. The topic and tag are held by the enclosing Run.
struct RunEntry {
  std::string doc_id;
  int rank = 0;
  double score = 0.0;

  friend bool operator==(const RunEntry &, const RunEntry &) = default;
};

// A system's ranked output over a set of topics. Entries of each topic are
// canonical: scores non-increasing, ranks 1..n, doc ids unique.
struct Run {
  std::string tag;
  std::map<std::string, std::vector<RunEntry>, TopicLess> topics;
  std::size_t max_depth = kDefaultDepth;

  const std::vector<RunEntry> *find(std::string_view topic) const;
  std::size_t entry_count() const;

  friend bool operator==(const Run &a, const Run &b) {
    return a.tag == b.tag && a.topics == b.topics;
  }
};

// Sorts entries by descending score, then stated rank, then doc id, and
// rewrites ranks as 1..n.
void canonicalize(std::vector<RunEntry> &entries);

// True when entries satisfy the rank contiguity, score monotonicity and
// unique doc id invariants.
bool is_canonical(const std::vector<RunEntry> &entries);

Run parse_run(std::istream &in, std::size_t max_depth = kDefaultDepth,
              Warnings *warnings = nullptr);
Run parse_run(std::string_view text, std::size_t max_depth = kDefaultDepth,
              Warnings *warnings = nullptr);
Run read_run_file(const std::string &path, std::size_t max_depth = kDefaultDepth,
                  Warnings *warnings = nullptr);

std::string write_run(const Run &run);

// Shortest decimal string that parses back to exactly `value`.
std::string format_score(double value);

// Concatenates runs of one system (e.g. split by topic). Throws MixedTags when
// tags differ and DuplicateDocument when a topic's documents collide.
Run merge_runs(const std::vector<Run> &runs);

class JudgmentSet {
public:
  using TopicJudgments = std::map<std::string, int>;

  // Throws NegativeGrade or DuplicateJudgment (same pair, different grade).
  void add(const std::string &topic, const std::string &doc, int grade);

  std::optional<int> grade(std::string_view topic, std::string_view doc) const;
  bool contains(std::string_view topic, std::string_view doc) const {
    return grade(topic, doc).has_value();
  }
  const TopicJudgments *topic(std::string_view topic) const;

  const std::map<std::string, TopicJudgments, TopicLess> &topics() const {
    return judgments_;
  }
  std::vector<std::string> topic_ids() const;
  std::size_t size() const;
  bool empty() const { return judgments_.empty(); }

  // Judgments restricted to the given topics.
  JudgmentSet subset(const std::vector<std::string> &topic_ids) const;
  // Every judgment of *this appears with the same grade in `other`.
  bool is_subset_of(const JudgmentSet &other) const;

  friend bool operator==(const JudgmentSet &, const JudgmentSet &) = default;

private:
  std::map<std::string, TopicJudgments, TopicLess> judgments_;
};

JudgmentSet parse_qrels(std::istream &in);
JudgmentSet parse_qrels(std::string_view text);
JudgmentSet read_qrels_file(const std::string &path);
std::string write_qrels(const JudgmentSet &qrels);

struct QueryVariation {
  std::string variation_id;
  std::string text;

  friend bool operator==(const QueryVariation &,
                         const QueryVariation &) = default;
};

// Topics with their query variations in file order.
struct TopicSet {
  std::map<std::string, std::vector<QueryVariation>, TopicLess> topics;

  std::size_t variation_count() const;
};

TopicSet parse_topics(std::istream &in);
TopicSet parse_topics(std::string_view text);
TopicSet read_topics_file(const std::string &path);

std::vector<std::string_view> split_whitespace(std::string_view line);
std::string_view trim(std::string_view s);

} // namespace rankfuse
