#pragma once

#include <string>
#include <vector>

#include "sigregime/streams.hpp"

namespace sigregime {

struct CsvSchema {
  std::string time_column;           // empty: first column
  std::vector<std::string> columns;  // empty: every non-time column
  double max_bad_fraction = 0.01;
};

struct IngestResult {
  Stream stream;
  std::vector<std::string> columns;
  std::vector<std::string> stamps;  // original timestamp text, sorted order
  std::size_t total_rows = 0;
  std::size_t missing_rows = 0;  // dropped: some value empty or NA
  std::size_t bad_rows = 0;      // dropped: unparseable
};

// Calendar timestamps ("YYYY-MM-DD", optionally followed by " HH:MM[:SS]" or
// "T..."): each distinct date is one trading day of 1/252 years, intraday time
// adds its share of that day. Numeric timestamps are taken as year fractions.
double date_to_day_number(const std::string& date);  // days since 1970-01-01
IngestResult ingest_csv(const std::string& path, const CsvSchema& schema = {});
IngestResult parse_csv(const std::string& text, const CsvSchema& schema = {});

void write_stream_csv(const std::string& path, const IngestResult& r);

}  // namespace sigregime
