#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rrm {

using Date = std::chrono::year_month_day;

// Number of one-minute intervals in the regular session (09:30-16:00).
inline constexpr int kSessionMinutes = 390;

struct MinuteBar {
  Date date{};
  int minute_of_day = 0;  // minutes since midnight, exchange-local
  double price = 0.0;
  double volume = 0.0;
};

struct SessionSpec {
  int open_minute = 9 * 60 + 30;
  int close_minute = 16 * 60;
  // Days with fewer observed session minutes are skipped.
  int min_observed_minutes = 195;
};

// One trading day on the minute grid: log_prices[i] is S_i for i = 0..390,
// volumes[i-1] is the volume traded over interval (i-1, i].
struct IntradayDay {
  Date date{};
  std::vector<double> log_prices;
  std::vector<double> volumes;
  int observed_minutes = kSessionMinutes + 1;

  // Throws DataError when a structural invariant is broken.
  void validate() const;
};

struct DayPanel {
  std::string asset_id;
  std::vector<IntradayDay> days;

  void validate() const;
};

std::string format_date(const Date& date);
Date parse_date(std::string_view text);  // YYYY-MM-DD, throws DataError

// Parses a delimited minute-bar table with a header naming the columns
// timestamp, price and volume. Rows outside the session are dropped, each day
// is gridded to 391 prices with forward fill, and the result holds log prices.
DayPanel parse_minute_csv(std::istream& source, const SessionSpec& session = {},
                          std::string asset_id = {});

// Columnar export (date, minute, log_price, volume) and its reader. Values are
// written with shortest round-trip formatting, so re-reading is bit-exact.
void write_panel_csv(std::ostream& out, const DayPanel& panel);
DayPanel read_panel_csv(std::istream& source, std::string asset_id = {});

// Reads a whole file, transparently inflating gzip input.
std::string read_text_file(const std::string& path);

double daily_return(const IntradayDay& day);

}  // namespace rrm
