#include "rrm/market_data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "rrm/errors.hpp"
#include "rrm/logging.hpp"
#include "rrm/text.hpp"

namespace rrm {
namespace {

char detect_delimiter(std::string_view header) {
  for (char candidate : {',', ';', '\t'}) {
    if (header.find(candidate) != std::string_view::npos) return candidate;
  }
  return ',';
}

std::optional<Date> try_parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const auto y = text::to_integer<int>(s.substr(0, 4));
  const auto m = text::to_integer<unsigned>(s.substr(5, 2));
  const auto d = text::to_integer<unsigned>(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

struct Timestamp {
  Date date;
  int minute_of_day;
};

// Accepts "YYYY-MM-DDTHH:MM[:SS]" and "YYYY-MM-DD HH:MM[:SS]".
std::optional<Timestamp> parse_timestamp(std::string_view s) {
  s = text::trim(s);
  if (s.size() < 16 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') return std::nullopt;
  const auto date = try_parse_date(s.substr(0, 10));
  const auto hh = text::to_integer<int>(s.substr(11, 2));
  const auto mm = text::to_integer<int>(s.substr(14, 2));
  if (!date || !hh || !mm || *hh > 23 || *mm > 59) return std::nullopt;
  if (s.size() > 16) {
    if (s[16] != ':' || s.size() < 19) return std::nullopt;
    const auto ss = text::to_integer<int>(s.substr(17, 2));
    if (!ss || *ss > 60) return std::nullopt;
  }
  return Timestamp{*date, *hh * 60 + *mm};
}

struct DayAccumulator {
  std::vector<std::optional<double>> prices =
      std::vector<std::optional<double>>(kSessionMinutes + 1);
  std::vector<double> volumes = std::vector<double>(kSessionMinutes, 0.0);
  bool seen_any_row = false;
};

}  // namespace

void IntradayDay::validate() const {
  if (log_prices.size() != kSessionMinutes + 1) {
    throw DataError("day " + format_date(date) + ": expected 391 log prices, got " +
                    std::to_string(log_prices.size()));
  }
  if (volumes.size() != kSessionMinutes) {
    throw DataError("day " + format_date(date) + ": expected 390 volumes, got " +
                    std::to_string(volumes.size()));
  }
  for (double s : log_prices) {
    if (!std::isfinite(s)) throw DataError("day " + format_date(date) + ": non-finite log price");
  }
  for (double v : volumes) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DataError("day " + format_date(date) + ": volume must be finite and >= 0");
    }
  }
}

void DayPanel::validate() const {
  for (std::size_t i = 0; i < days.size(); ++i) {
    days[i].validate();
    if (i > 0 && !(std::chrono::sys_days{days[i - 1].date} < std::chrono::sys_days{days[i].date})) {
      throw DataError("panel dates must be strictly increasing at " + format_date(days[i].date));
    }
  }
}

std::string format_date(const Date& date) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buffer;
}

Date parse_date(std::string_view text) {
  const auto date = try_parse_date(text::trim(text));
  if (!date) throw DataError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  return *date;
}

DayPanel parse_minute_csv(std::istream& source, const SessionSpec& session, std::string asset_id) {
  if (session.close_minute - session.open_minute != kSessionMinutes) {
    throw std::invalid_argument("session must span exactly 390 minutes");
  }
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(source, line)) throw ParseError(1, "missing header row");
  ++line_no;
  const char delim = detect_delimiter(line);
  const auto header = text::split(line, delim);
  int col_time = -1;
  int col_price = -1;
  int col_volume = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = text::lower(header[i]);
    if (name == "timestamp" || name == "time" || name == "datetime") col_time = static_cast<int>(i);
    if (name == "price" || name == "close") col_price = static_cast<int>(i);
    if (name == "volume") col_volume = static_cast<int>(i);
  }
  if (col_time < 0 || col_price < 0 || col_volume < 0) {
    throw ParseError(1, "header must name timestamp, price and volume columns");
  }
  const std::size_t needed = static_cast<std::size_t>(std::max({col_time, col_price, col_volume})) + 1;

  std::map<std::chrono::sys_days, DayAccumulator> by_day;
  while (std::getline(source, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, delim);
    if (fields.size() < needed) throw ParseError(line_no, "expected at least " + std::to_string(needed) + " fields");
    const auto ts = parse_timestamp(fields[static_cast<std::size_t>(col_time)]);
    if (!ts) throw ParseError(line_no, "invalid timestamp '" + std::string(fields[static_cast<std::size_t>(col_time)]) + "'");
    const auto price = text::to_double(fields[static_cast<std::size_t>(col_price)]);
    if (!price || !std::isfinite(*price) || *price <= 0.0) throw ParseError(line_no, "price must be a positive number");
    const auto volume = text::to_double(fields[static_cast<std::size_t>(col_volume)]);
    if (!volume || !std::isfinite(*volume) || *volume < 0.0) throw ParseError(line_no, "volume must be a non-negative number");

    auto& acc = by_day[std::chrono::sys_days{ts->date}];
    acc.seen_any_row = true;
    const int slot = ts->minute_of_day - session.open_minute;
    if (slot < 0 || slot > kSessionMinutes) continue;
    acc.prices[static_cast<std::size_t>(slot)] = *price;
    if (slot > 0) acc.volumes[static_cast<std::size_t>(slot - 1)] = *volume;
  }

  DayPanel panel;
  panel.asset_id = std::move(asset_id);
  for (auto& [day, acc] : by_day) {
    const Date date{day};
    const auto observed = static_cast<int>(
        std::count_if(acc.prices.begin(), acc.prices.end(), [](const auto& p) { return p.has_value(); }));
    if (observed == 0) {
      log_warning("skipping " + format_date(date) + ": no prices inside the session");
      continue;
    }
    if (observed < session.min_observed_minutes) {
      log_warning("skipping " + format_date(date) + ": only " + std::to_string(observed) +
                  " observed session minutes");
      continue;
    }
    IntradayDay out;
    out.date = date;
    out.observed_minutes = observed;
    out.log_prices.resize(kSessionMinutes + 1);
    const auto first = std::find_if(acc.prices.begin(), acc.prices.end(),
                                    [](const auto& p) { return p.has_value(); });
    double last = std::log(**first);
    for (std::size_t i = 0; i <= kSessionMinutes; ++i) {
      if (acc.prices[i]) last = std::log(*acc.prices[i]);
      out.log_prices[i] = last;
    }
    out.volumes = std::move(acc.volumes);
    panel.days.push_back(std::move(out));
  }
  return panel;
}

void write_panel_csv(std::ostream& out, const DayPanel& panel) {
  out << "date,minute,log_price,volume\n";
  for (const auto& day : panel.days) {
    const std::string date = format_date(day.date);
    for (std::size_t i = 0; i < day.log_prices.size(); ++i) {
      const double volume = i == 0 ? 0.0 : day.volumes[i - 1];
      out << date << ',' << i << ',' << text::format_double(day.log_prices[i]) << ','
          << text::format_double(volume) << '\n';
    }
  }
}

DayPanel read_panel_csv(std::istream& source, std::string asset_id) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(source, line)) throw ParseError(1, "missing header row");
  ++line_no;
  if (text::lower(text::trim(line)) != "date,minute,log_price,volume") {
    throw ParseError(1, "expected header date,minute,log_price,volume");
  }
  DayPanel panel;
  panel.asset_id = std::move(asset_id);
  while (std::getline(source, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() != 4) throw ParseError(line_no, "expected 4 fields");
    const auto date = try_parse_date(fields[0]);
    const auto minute = text::to_integer<int>(fields[1]);
    const auto log_price = text::to_double(fields[2]);
    const auto volume = text::to_double(fields[3]);
    if (!date || !minute || !log_price || !volume || *minute < 0 || *minute > kSessionMinutes) {
      throw ParseError(line_no, "malformed panel row");
    }
    if (panel.days.empty() || panel.days.back().date != *date) {
      if (!panel.days.empty() && panel.days.back().log_prices.size() != kSessionMinutes + 1) {
        throw ParseError(line_no, "previous day is incomplete");
      }
      IntradayDay day;
      day.date = *date;
      day.log_prices.reserve(kSessionMinutes + 1);
      day.volumes.reserve(kSessionMinutes);
      panel.days.push_back(std::move(day));
    }
    auto& day = panel.days.back();
    if (static_cast<std::size_t>(*minute) != day.log_prices.size()) {
      throw ParseError(line_no, "minutes must appear in order 0..390");
    }
    day.log_prices.push_back(*log_price);
    if (*minute > 0) day.volumes.push_back(*volume);
  }
  panel.validate();
  return panel;
}

std::string read_text_file(const std::string& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw DataError("cannot open " + path);
  std::string content;
  char buffer[1 << 16];
  for (;;) {
    const int n = gzread(file, buffer, sizeof(buffer));
    if (n < 0) {
      int code = 0;
      const std::string message = gzerror(file, &code);
      gzclose(file);
      throw DataError("read error in " + path + ": " + message);
    }
    if (n == 0) break;
    content.append(buffer, static_cast<std::size_t>(n));
  }
  gzclose(file);
  return content;
}

double daily_return(const IntradayDay& day) {
  return day.log_prices.back() - day.log_prices.front();
}

}  // namespace rrm
