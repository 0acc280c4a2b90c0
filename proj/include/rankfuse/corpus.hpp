#pragma once

#include <chrono>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankfuse/error.hpp"

namespace rankfuse {

using Date = std::chrono::year_month_day;

constexpr Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

// Strict YYYY-MM-DD; throws UnparseableDate otherwise.
Date parse_iso_date(std::string_view text);
std::string format_date(const Date &date);

// Date rules for the CORD-19 metadata snapshot. The corpus stamped some
// records with the placeholder `misdated`; they are moved to `misdated_fix`.
// Empty dates become `empty_date`; bare years become January 1st.
struct CleaningContext {
  Date today = make_date(2020, 4, 10);
  Date misdated = make_date(2020, 12, 31);
  Date misdated_fix = make_date(2019, 12, 31);
  Date empty_date = make_date(2020, 1, 1);
};

struct DocMeta {
  std::string doc_id;
  std::string title;
  std::string abstract;
  std::string body_text;
  std::string raw_date;
  Date pub_date = make_date(2020, 1, 1);

  // title, abstract and body joined by single spaces, empty parts skipped.
  std::string text() const;
};

// Accepts "", "YYYY" and "YYYY-MM-DD". Future dates pass through unchanged.
Date parse_pub_date(std::string_view raw, const CleaningContext &ctx);

// ref - pub in calendar days, clamped at 0.
int days_since(const Date &pub, const Date &ref);

struct MetadataColumns {
  std::string id = "cord_uid";
  std::string title = "title";
  std::string abstract = "abstract";
  std::string date = "publish_time";
  // Optional; the body is left empty when the column is absent.
  std::string body = "body_text";
};

// RFC 4180 records; quoted fields may contain commas, newlines and "" escapes.
std::vector<std::vector<std::string>> parse_csv(std::istream &in);

// One DocMeta per data row in input order. Repeated ids keep the first row and
// add a warning. Throws MissingColumn, MalformedLine or UnparseableDate with
// the row number.
std::vector<DocMeta> ingest_metadata(std::istream &csv, const CleaningContext &ctx,
                                     const MetadataColumns &columns = {},
                                     Warnings *warnings = nullptr);
std::vector<DocMeta> read_metadata_file(const std::string &path, const CleaningContext &ctx,
                                        const MetadataColumns &columns = {},
                                        Warnings *warnings = nullptr);

// `doc_id<TAB>text` records. Dates are unknown and cleaned as empty strings.
std::vector<DocMeta> ingest_doc_records(std::istream &in, const CleaningContext &ctx);

using MetadataIndex = std::unordered_map<std::string, const DocMeta *>;
MetadataIndex index_by_id(const std::vector<DocMeta> &docs);

} // namespace rankfuse
