#include "rankfuse/trec_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rankfuse {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string line_context(std::size_t line_no) {
  return "line " + std::to_string(line_no);
}

template <typename T> bool parse_number(std::string_view s, T &out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::ifstream open_input(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::Io, "cannot open " + path);
  return in;
}

template <typename Parse> auto with_file_context(const std::string &path, Parse parse) {
  try {
    return parse();
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

} // namespace

bool TopicLess::operator()(std::string_view a, std::string_view b) const {
  const bool na = all_digits(a), nb = all_digits(b);
  if (na && nb) {
    auto strip = [](std::string_view s) {
      auto p = s.find_first_not_of('0');
      return p == std::string_view::npos ? std::string_view("0") : s.substr(p);
    };
    auto sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size())
      return sa.size() < sb.size();
    if (sa != sb)
      return sa < sb;
    return a < b;
  }
  if (na != nb)
    return na;
  return a < b;
}

std::string_view trim(std::string_view s) {
  const char *ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (i < line.size()) {
    while (i < line.size() && is_ws(line[i]))
      ++i;
    std::size_t start = i;
    while (i < line.size() && !is_ws(line[i]))
      ++i;
    if (i > start)
      out.push_back(line.substr(start, i - start));
  }
  return out;
}

const std::vector<RunEntry> *Run::find(std::string_view topic) const {
  auto it = topics.find(topic);
  return it == topics.end() ? nullptr : &it->second;
}

std::size_t Run::entry_count() const {
  std::size_t n = 0;
  for (const auto &[_, entries] : topics)
    n += entries.size();
  return n;
}

void canonicalize(std::vector<RunEntry> &entries) {
  std::sort(entries.begin(), entries.end(), [](const RunEntry &a, const RunEntry &b) {
    if (a.score != b.score)
      return a.score > b.score;
    if (a.rank != b.rank)
      return a.rank < b.rank;
    return a.doc_id < b.doc_id;
  });
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i].rank = static_cast<int>(i + 1);
}

bool is_canonical(const std::vector<RunEntry> &entries) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].rank != static_cast<int>(i + 1))
      return false;
    if (i > 0 && entries[i].score > entries[i - 1].score)
      return false;
    if (!seen.insert(entries[i].doc_id).second)
      return false;
  }
  return true;
}

Run parse_run(std::istream &in, std::size_t max_depth, Warnings *warnings) {
  Run run;
  run.max_depth = max_depth;
  std::map<std::string, std::set<std::string>, TopicLess> seen;
  std::string line;
  std::size_t line_no = 0;
  bool have_tag = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto cols = split_whitespace(line);
    if (cols.size() != 6)
      throw Error(Errc::MalformedLine, line_context(line_no) + ": expected 6 columns, got " +
                                           std::to_string(cols.size()));
    RunEntry entry;
    entry.doc_id = std::string(cols[2]);
    if (!parse_number(cols[3], entry.rank))
      throw Error(Errc::MalformedLine, line_context(line_no) + ": non-integer rank '" +
                                           std::string(cols[3]) + "'");
    if (!parse_number(cols[4], entry.score) || !std::isfinite(entry.score))
      throw Error(Errc::MalformedLine, line_context(line_no) + ": bad score '" +
                                           std::string(cols[4]) + "'");
    if (!have_tag) {
      run.tag = std::string(cols[5]);
      have_tag = true;
    } else if (cols[5] != run.tag) {
      throw Error(Errc::MixedTags, line_context(line_no) + ": tag '" + std::string(cols[5]) +
                                       "' differs from '" + run.tag + "'");
    }
    std::string topic(cols[0]);
    if (!seen[topic].insert(entry.doc_id).second)
      throw Error(Errc::DuplicateDocument, line_context(line_no) + ": document " +
                                               entry.doc_id + " repeated in topic " + topic);
    run.topics[topic].push_back(std::move(entry));
  }
  for (auto &[topic, entries] : run.topics) {
    auto by_rank = entries;
    std::stable_sort(by_rank.begin(), by_rank.end(),
                     [](const RunEntry &a, const RunEntry &b) { return a.rank < b.rank; });
    bool agrees = true;
    for (std::size_t i = 1; i < by_rank.size() && agrees; ++i)
      agrees = by_rank[i].score <= by_rank[i - 1].score;
    if (!agrees)
      warn(warnings, "topic " + topic + ": stated ranks disagree with score order; re-ranked by score");
    canonicalize(entries);
    if (entries.size() > max_depth) {
      warn(warnings, "topic " + topic + ": " + std::to_string(entries.size()) +
                         " entries truncated to depth " + std::to_string(max_depth));
      entries.resize(max_depth);
    }
  }
  return run;
}

Run parse_run(std::string_view text, std::size_t max_depth, Warnings *warnings) {
  std::istringstream in{std::string(text)};
  return parse_run(in, max_depth, warnings);
}

Run read_run_file(const std::string &path, std::size_t max_depth, Warnings *warnings) {
  return with_file_context(path, [&] {
    auto in = open_input(path);
    return parse_run(in, max_depth, warnings);
  });
}

std::string format_score(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string write_run(const Run &run) {
  std::string out;
  for (const auto &[topic, entries] : run.topics) {
    for (const auto &e : entries) {
      out += topic;
      out += " Q0 ";
      out += e.doc_id;
      out += ' ';
      out += std::to_string(e.rank);
      out += ' ';
      out += format_score(e.score);
      out += ' ';
      out += run.tag;
      out += '\n';
    }
  }
  return out;
}

Run merge_runs(const std::vector<Run> &runs) {
  Run merged;
  if (runs.empty())
    return merged;
  merged.tag = runs.front().tag;
  merged.max_depth = runs.front().max_depth;
  for (const auto &run : runs) {
    if (run.tag != merged.tag)
      throw Error(Errc::MixedTags, "cannot merge run '" + run.tag + "' into '" + merged.tag + "'");
    for (const auto &[topic, entries] : run.topics) {
      auto &dest = merged.topics[topic];
      for (const auto &e : entries) {
        auto dup = std::find_if(dest.begin(), dest.end(),
                                [&](const RunEntry &d) { return d.doc_id == e.doc_id; });
        if (dup != dest.end())
          throw Error(Errc::DuplicateDocument,
                      "document " + e.doc_id + " repeated in topic " + topic);
        dest.push_back(e);
      }
    }
  }
  for (auto &[_, entries] : merged.topics)
    canonicalize(entries);
  return merged;
}

void JudgmentSet::add(const std::string &topic, const std::string &doc, int grade) {
  if (grade < 0)
    throw Error(Errc::NegativeGrade, "topic " + topic + " document " + doc + ": grade " +
                                         std::to_string(grade));
  auto [it, inserted] = judgments_[topic].emplace(doc, grade);
  if (!inserted && it->second != grade)
    throw Error(Errc::DuplicateJudgment, "topic " + topic + " document " + doc +
                                             " judged both " + std::to_string(it->second) +
                                             " and " + std::to_string(grade));
}

std::optional<int> JudgmentSet::grade(std::string_view topic, std::string_view doc) const {
  auto t = judgments_.find(topic);
  if (t == judgments_.end())
    return std::nullopt;
  auto d = t->second.find(std::string(doc));
  if (d == t->second.end())
    return std::nullopt;
  return d->second;
}

const JudgmentSet::TopicJudgments *JudgmentSet::topic(std::string_view topic) const {
  auto t = judgments_.find(topic);
  return t == judgments_.end() ? nullptr : &t->second;
}

std::vector<std::string> JudgmentSet::topic_ids() const {
  std::vector<std::string> ids;
  for (const auto &[t, _] : judgments_)
    ids.push_back(t);
  return ids;
}

std::size_t JudgmentSet::size() const {
  std::size_t n = 0;
  for (const auto &[_, docs] : judgments_)
    n += docs.size();
  return n;
}

JudgmentSet JudgmentSet::subset(const std::vector<std::string> &topic_ids) const {
  JudgmentSet out;
  for (const auto &t : topic_ids) {
    auto it = judgments_.find(t);
    if (it != judgments_.end())
      out.judgments_[it->first] = it->second;
  }
  return out;
}

bool JudgmentSet::is_subset_of(const JudgmentSet &other) const {
  for (const auto &[t, docs] : judgments_)
    for (const auto &[d, g] : docs)
      if (other.grade(t, d) != g)
        return false;
  return true;
}

JudgmentSet parse_qrels(std::istream &in) {
  JudgmentSet qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto cols = split_whitespace(line);
    if (cols.size() != 4)
      throw Error(Errc::MalformedLine, line_context(line_no) + ": expected 4 columns, got " +
                                           std::to_string(cols.size()));
    int grade = 0;
    if (!parse_number(cols[3], grade))
      throw Error(Errc::MalformedLine, line_context(line_no) + ": non-integer grade '" +
                                           std::string(cols[3]) + "'");
    try {
      qrels.add(std::string(cols[0]), std::string(cols[2]), grade);
    } catch (const Error &e) {
      throw Error(e.code(), line_context(line_no) + ": " + e.what());
    }
  }
  return qrels;
}

JudgmentSet parse_qrels(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_qrels(in);
}

JudgmentSet read_qrels_file(const std::string &path) {
  return with_file_context(path, [&] {
    auto in = open_input(path);
    return parse_qrels(in);
  });
}

std::string write_qrels(const JudgmentSet &qrels) {
  std::string out;
  for (const auto &[topic, docs] : qrels.topics())
    for (const auto &[doc, grade] : docs)
      out += topic + " 0 " + doc + " " + std::to_string(grade) + "\n";
  return out;
}

std::size_t TopicSet::variation_count() const {
  std::size_t n = 0;
  for (const auto &[_, vs] : topics)
    n += vs.size();
  return n;
}

TopicSet parse_topics(std::istream &in) {
  TopicSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (trim(line).empty())
      continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw Error(Errc::MalformedLine,
                  line_context(line_no) + ": expected topic<TAB>variation<TAB>query");
    auto topic = trim(std::string_view(line).substr(0, t1));
    auto variation = trim(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    auto text = trim(std::string_view(line).substr(t2 + 1));
    if (topic.empty() || variation.empty() || text.empty())
      throw Error(Errc::MalformedLine, line_context(line_no) + ": empty field");
    auto &vars = set.topics[std::string(topic)];
    for (const auto &v : vars)
      if (v.variation_id == variation)
        throw Error(Errc::DuplicateVariation, line_context(line_no) + ": topic " +
                                                  std::string(topic) + " variation " +
                                                  std::string(variation) + " repeated");
    vars.push_back({std::string(variation), std::string(text)});
  }
  return set;
}

TopicSet parse_topics(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_topics(in);
}

TopicSet read_topics_file(const std::string &path) {
  return with_file_context(path, [&] {
    auto in = open_input(path);
    return parse_topics(in);
  });
}

} // namespace rankfuse
