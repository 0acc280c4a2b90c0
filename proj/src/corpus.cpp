#include "rankfuse/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "rankfuse/trec_io.hpp"

namespace rankfuse {

namespace {

bool digits(std::string_view s, std::size_t min_len, std::size_t max_len) {
  return s.size() >= min_len && s.size() <= max_len &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// YYYY-M(M)-D(D); returns false when the shape does not match.
bool parse_ymd(std::string_view s, Date &out) {
  auto d1 = s.find('-');
  if (d1 == std::string_view::npos)
    return false;
  auto d2 = s.find('-', d1 + 1);
  if (d2 == std::string_view::npos)
    return false;
  auto y = s.substr(0, d1), m = s.substr(d1 + 1, d2 - d1 - 1), d = s.substr(d2 + 1);
  if (!digits(y, 4, 4) || !digits(m, 1, 2) || !digits(d, 1, 2))
    return false;
  out = make_date(to_int(y), static_cast<unsigned>(to_int(m)), static_cast<unsigned>(to_int(d)));
  return out.ok();
}

} // namespace

Date parse_iso_date(std::string_view text) {
  Date d;
  auto t = trim(text);
  if (t.size() != 10 || !parse_ymd(t, d))
    throw Error(Errc::UnparseableDate, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  return d;
}

std::string format_date(const Date &date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string DocMeta::text() const {
  std::string out;
  for (const std::string *part : {&title, &abstract, &body_text}) {
    if (part->empty())
      continue;
    if (!out.empty())
      out += ' ';
    out += *part;
  }
  return out;
}

Date parse_pub_date(std::string_view raw, const CleaningContext &ctx) {
  auto s = trim(raw);
  if (s.empty())
    return ctx.empty_date;
  if (digits(s, 4, 4))
    return make_date(to_int(s), 1, 1);
  Date d;
  if (!parse_ymd(s, d))
    throw Error(Errc::UnparseableDate, "'" + std::string(raw) + "'");
  if (d == ctx.misdated)
    return ctx.misdated_fix;
  return d;
}

int days_since(const Date &pub, const Date &ref) {
  using std::chrono::sys_days;
  auto diff = (sys_days{ref} - sys_days{pub}).count();
  return diff < 0 ? 0 : static_cast<int>(diff);
}

std::vector<std::vector<std::string>> parse_csv(std::istream &in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool any = false;
  char c;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty()))
      rows.push_back(std::move(row));
    row.clear();
  };
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
    case '"':
      if (!field_started && field.empty())
        in_quotes = true;
      else
        field += c;
      field_started = true;
      break;
    case ',':
      end_field();
      break;
    case '\r':
      if (in.peek() == '\n')
        in.get(c);
      end_row();
      break;
    case '\n':
      end_row();
      break;
    default:
      field += c;
      field_started = true;
    }
  }
  if (in_quotes)
    throw Error(Errc::MalformedLine, "unterminated quoted CSV field");
  if (any && (!field.empty() || !row.empty()))
    end_row();
  return rows;
}

std::vector<DocMeta> ingest_metadata(std::istream &csv, const CleaningContext &ctx,
                                     const MetadataColumns &columns, Warnings *warnings) {
  auto rows = parse_csv(csv);
  if (rows.empty())
    throw Error(Errc::MissingColumn, "metadata has no header row");
  const auto &header = rows.front();
  auto locate = [&](const std::string &name, bool required) -> long {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      if (required)
        throw Error(Errc::MissingColumn, "column '" + name + "' not in header");
      return -1;
    }
    return it - header.begin();
  };
  const long id_col = locate(columns.id, true);
  const long title_col = locate(columns.title, true);
  const long abstract_col = locate(columns.abstract, true);
  const long date_col = locate(columns.date, true);
  const long body_col = columns.body.empty() ? -1 : locate(columns.body, false);

  std::vector<DocMeta> docs;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto &row = rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    if (row.size() != header.size())
      throw Error(Errc::MalformedLine, where + ": expected " + std::to_string(header.size()) +
                                           " fields, got " + std::to_string(row.size()));
    DocMeta doc;
    doc.doc_id = std::string(trim(row[id_col]));
    if (doc.doc_id.empty())
      throw Error(Errc::MalformedLine, where + ": empty document id");
    if (!seen.insert(doc.doc_id).second) {
      warn(warnings, where + ": duplicate document " + doc.doc_id + " ignored");
      continue;
    }
    doc.title = row[title_col];
    doc.abstract = row[abstract_col];
    if (body_col >= 0)
      doc.body_text = row[body_col];
    doc.raw_date = row[date_col];
    try {
      doc.pub_date = parse_pub_date(doc.raw_date, ctx);
    } catch (const Error &e) {
      throw Error(e.code(), where + ": " + e.what());
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<DocMeta> read_metadata_file(const std::string &path, const CleaningContext &ctx,
                                        const MetadataColumns &columns, Warnings *warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::Io, "cannot open " + path);
  try {
    return ingest_metadata(in, ctx, columns, warnings);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::vector<DocMeta> ingest_doc_records(std::istream &in, const CleaningContext &ctx) {
  std::vector<DocMeta> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (trim(line).empty())
      continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": expected doc_id<TAB>text");
    DocMeta doc;
    doc.doc_id = std::string(trim(std::string_view(line).substr(0, tab)));
    if (doc.doc_id.empty())
      throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": empty document id");
    doc.body_text = line.substr(tab + 1);
    doc.pub_date = parse_pub_date("", ctx);
    docs.push_back(std::move(doc));
  }
  return docs;
}

MetadataIndex index_by_id(const std::vector<DocMeta> &docs) {
  MetadataIndex index;
  for (const auto &d : docs)
    index.emplace(d.doc_id, &d);
  return index;
}

} // namespace rankfuse
