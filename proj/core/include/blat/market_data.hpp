#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "blat/date.hpp"
#include "blat/indicators.hpp"
#include "blat/linalg.hpp"

namespace blat {

using SeriesMap = std::map<std::string, OhlcvSeries>;

/// Reads `date,ticker,open,high,low,close,adj_close,volume` rows. Rows may be
/// in any order; each ticker's bars come back sorted by date.
/// Throws ParseError(source:line) and InvariantViolation(ticker date).
SeriesMap parse_ohlcv(std::istream& in, const std::string& source = "<stream>");
SeriesMap load_ohlcv(const std::filesystem::path& path);

/// Writes the same CSV layout with shortest round-trip number formatting.
void write_ohlcv(std::ostream& out, const SeriesMap& series);

struct MembershipEntry {
  std::string ticker;
  Date start;
  Date end;
};

struct MembershipCalendar {
  std::vector<MembershipEntry> entries;
};

/// start ≤ end per entry and no overlapping entries per ticker.
void validate_calendar(const MembershipCalendar& calendar);

/// Reads `ticker,start_date,end_date` rows.
MembershipCalendar parse_membership(std::istream& in, const std::string& source = "<stream>");
MembershipCalendar load_membership(const std::filesystem::path& path);
void write_membership(std::ostream& out, const MembershipCalendar& calendar);

/// Tickers whose [start, end] contains asof, sorted.
std::vector<std::string> active_universe(const MembershipCalendar& calendar, Date asof);

/// The S&P sector ETF and Dow Jones Industrial Average membership windows
/// used by the reference experiments.
MembershipCalendar sector_etf_calendar();
MembershipCalendar djia_calendar();

/// Sorted union of the bar dates of the given tickers, up to and including `last`.
std::vector<Date> trading_calendar(const SeriesMap& series, const std::vector<std::string>& tickers,
                                   Date last);

/// Simple returns over the last window_len trading days ending at window_end.
struct ReturnPanel {
  std::vector<Date> dates;            // window_len return dates
  std::vector<std::string> tickers;   // included tickers, sorted
  Matrix returns;                     // window_len × tickers
  Matrix prices;                      // (window_len + 1) × tickers adjusted closes
  std::vector<std::string> excluded;  // universe members without complete data
};

/// Uses the union calendar of the universe. A ticker missing any of the
/// window_len + 1 closes is excluded. Throws InsufficientData when the calendar
/// is too short and EmptyUniverse when nothing is left.
ReturnPanel build_return_panel(const SeriesMap& series, const std::vector<std::string>& universe,
                               Date window_end, Index window_len);

}  // namespace blat
