#include "sigregime/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "sigregime/error.hpp"

namespace sigregime {

namespace {

constexpr double kTradingDays = 252.0;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else
      cur += c;
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

bool is_missing(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  return l.empty() || l == "na" || l == "nan" || l == "null" || l == "n/a" || l == "-";
}

int digits(const std::string& s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return -1;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return -1;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

struct Stamp {
  long day = 0;          // days since epoch; unused for numeric stamps
  double intraday = 0;   // fraction of the day
  double numeric = 0;
};

// false when the text is neither a date nor a number
bool parse_stamp(const std::string& s, bool& is_date, Stamp& out) {
  if (s.size() >= 10 && s[4] == '-' && s[7] == '-') {
    try {
      out.day = static_cast<long>(date_to_day_number(s.substr(0, 10)));
    } catch (const Error&) {
      return false;
    }
    out.intraday = 0.0;
    if (s.size() > 10) {
      if (s[10] != ' ' && s[10] != 'T') return false;
      int hh = digits(s, 11, 2), mm = digits(s, 14, 2), ss = 0;
      if (hh < 0 || mm < 0 || s.size() < 16 || s[13] != ':') return false;
      if (s.size() > 16) {
        if (s[16] != ':') return false;
        ss = digits(s, 17, 2);
        if (ss < 0 || s.size() != 19) return false;
      }
      if (hh > 23 || mm > 59 || ss > 60) return false;
      out.intraday = (hh * 3600.0 + mm * 60.0 + ss) / 86400.0;
    }
    is_date = true;
    return true;
  }
  is_date = false;
  return parse_number(s, out.numeric);
}

}  // namespace

double date_to_day_number(const std::string& date) {
  using namespace std::chrono;
  const int y = digits(date, 0, 4), m = digits(date, 5, 2), d = digits(date, 8, 2);
  require(date.size() == 10 && y >= 0 && m >= 0 && d >= 0 && date[4] == '-' && date[7] == '-',
          ErrorKind::Format, "bad date '" + date + "'");
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  require(ymd.ok(), ErrorKind::Format, "invalid calendar date '" + date + "'");
  return static_cast<double>(sys_days{ymd}.time_since_epoch().count());
}

IngestResult parse_csv(const std::string& text, const CsvSchema& schema) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line) && trim(line).empty()) {
  }
  require(!trim(line).empty(), ErrorKind::Ingestion, "CSV has no header row");
  const auto header = split(line);

  std::size_t tcol = 0;
  if (!schema.time_column.empty()) {
    auto it = std::find(header.begin(), header.end(), schema.time_column);
    require(it != header.end(), ErrorKind::Ingestion, "time column '" + schema.time_column + "' not in header");
    tcol = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::size_t> vcols;
  IngestResult r;
  if (schema.columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != tcol) {
        vcols.push_back(c);
        r.columns.push_back(header[c]);
      }
  } else {
    for (const auto& name : schema.columns) {
      auto it = std::find(header.begin(), header.end(), name);
      require(it != header.end(), ErrorKind::Ingestion, "column '" + name + "' not in header");
      vcols.push_back(static_cast<std::size_t>(it - header.begin()));
      r.columns.push_back(name);
    }
  }
  require(!vcols.empty(), ErrorKind::Ingestion, "CSV has no value columns");
  const std::size_t d = vcols.size();

  struct Row {
    Stamp stamp;
    std::string text;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  int date_kind = -1;  // 1 dates, 0 numeric, fixed by the first good row
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++r.total_rows;
    const auto f = split(line);
    if (f.size() != header.size()) {
      ++r.bad_rows;
      continue;
    }
    Row row;
    bool is_date = false;
    if (!parse_stamp(f[tcol], is_date, row.stamp) || (date_kind >= 0 && date_kind != int(is_date))) {
      ++r.bad_rows;
      continue;
    }
    bool missing = false, bad = false;
    row.values.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
      const auto& cell = f[vcols[c]];
      if (is_missing(cell)) missing = true;
      else if (!parse_number(cell, row.values[c])) bad = true;
    }
    if (bad) {
      ++r.bad_rows;
      continue;
    }
    if (missing) {
      ++r.missing_rows;
      continue;
    }
    date_kind = is_date;
    row.text = f[tcol];
    rows.push_back(std::move(row));
  }
  require(r.total_rows > 0, ErrorKind::Ingestion, "CSV has no data rows");
  const double bad_share = static_cast<double>(r.bad_rows) / r.total_rows;
  require(bad_share <= schema.max_bad_fraction, ErrorKind::Ingestion,
          std::to_string(r.bad_rows) + " of " + std::to_string(r.total_rows) +
              " rows are unparseable (limit " + std::to_string(schema.max_bad_fraction * 100.0) + "%)");
  require(rows.size() >= 2, ErrorKind::Ingestion, "fewer than 2 usable rows");

  std::vector<double> t(rows.size());
  if (date_kind == 1) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.stamp.day != b.stamp.day ? a.stamp.day < b.stamp.day : a.stamp.intraday < b.stamp.intraday;
    });
    long ordinal = -1, last_day = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == 0 || rows[i].stamp.day != last_day) ++ordinal;
      last_day = rows[i].stamp.day;
      t[i] = (static_cast<double>(ordinal) + rows[i].stamp.intraday) / kTradingDays;
    }
  } else {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.stamp.numeric < b.stamp.numeric; });
    for (std::size_t i = 0; i < rows.size(); ++i) t[i] = rows[i].stamp.numeric;
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    require(t[i] > t[i - 1], ErrorKind::Format, "duplicate timestamp '" + rows[i].text + "'");

  std::vector<double> vals;
  vals.reserve(rows.size() * d);
  for (auto& row : rows) {
    vals.insert(vals.end(), row.values.begin(), row.values.end());
    r.stamps.push_back(std::move(row.text));
  }
  r.stream = Stream(std::move(t), std::move(vals), d);
  return r;
}

IngestResult ingest_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Ingestion, "cannot open CSV '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema);
}

void write_stream_csv(const std::string& path, const IngestResult& r) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Ingestion, "cannot write '" + path + "'");
  out.precision(17);
  out << "stamp,t";
  for (const auto& c : r.columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < r.stream.size(); ++i) {
    out << r.stamps[i] << ',' << r.stream.time(i);
    for (std::size_t c = 0; c < r.stream.dim(); ++c) out << ',' << r.stream.at(i, c);
    out << '\n';
  }
}

}  // namespace sigregime
