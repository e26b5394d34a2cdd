#include "blat/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string_view>

#include "blat/errors.hpp"

namespace blat {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

double parse_number(std::string_view text, const std::string& at) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::ParseError, at, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

Date parse_date_at(std::string_view text, const std::string& at) {
  try {
    return parse_date(text);
  } catch (const Error&) {
    throw Error(ErrorCode::ParseError, at, "bad date: '" + std::string(text) + "'");
  }
}

void write_number(std::ostream& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.write(buf, ptr - buf);
}

// Reads the header and hands every non-blank data line to `row`.
template <typename Row>
void read_csv(std::istream& in, const std::string& source, std::string_view header, Row&& row) {
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (!seen_header) {
      if (text != header) {
        throw Error(ErrorCode::ParseError, where(source, number),
                    "expected header '" + std::string(header) + "'");
      }
      seen_header = true;
      continue;
    }
    const auto fields = split(text);
    row(fields, where(source, number));
  }
  if (!seen_header) throw Error(ErrorCode::ParseError, where(source, 1), "missing header");
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path.string(), "cannot open file");
  return in;
}

constexpr std::string_view kOhlcvHeader = "date,ticker,open,high,low,close,adj_close,volume";
constexpr std::string_view kMembershipHeader = "ticker,start_date,end_date";

MembershipCalendar make_calendar(std::initializer_list<const char*> rows) {
  MembershipCalendar cal;
  for (const char* row : rows) {
    const std::string_view text(row);
    const auto f = split(text);
    cal.entries.push_back({std::string(f[0]), parse_date(f[1]), parse_date(f[2])});
  }
  return cal;
}

}  // namespace

SeriesMap parse_ohlcv(std::istream& in, const std::string& source) {
  SeriesMap out;
  read_csv(in, source, kOhlcvHeader, [&](const std::vector<std::string_view>& f, const std::string& at) {
    if (f.size() != 8) throw Error(ErrorCode::ParseError, at, "expected 8 fields");
    if (f[1].empty()) throw Error(ErrorCode::ParseError, at, "empty ticker");
    OhlcvBar bar;
    bar.date = parse_date_at(f[0], at);
    bar.open = parse_number(f[2], at);
    bar.high = parse_number(f[3], at);
    bar.low = parse_number(f[4], at);
    bar.close = parse_number(f[5], at);
    bar.adj_close = parse_number(f[6], at);
    bar.volume = parse_number(f[7], at);
    const std::string ticker(f[1]);
    // Validate the row on its own so the error can name the line.
    const OhlcvSeries single{ticker, {bar}};
    try {
      validate_series(single);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvariantViolation, e.subject(), at + ": " + e.what());
    }
    auto& series = out[ticker];
    series.ticker = ticker;
    series.bars.push_back(bar);
  });
  for (auto& [ticker, series] : out) {
    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const OhlcvBar& a, const OhlcvBar& b) { return a.date < b.date; });
    validate_series(series);
  }
  return out;
}

SeriesMap load_ohlcv(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_ohlcv(in, path.string());
}

void write_ohlcv(std::ostream& out, const SeriesMap& series) {
  out << kOhlcvHeader << '\n';
  for (const auto& [ticker, s] : series) {
    for (const auto& b : s.bars) {
      out << format_date(b.date) << ',' << ticker;
      for (double v : {b.open, b.high, b.low, b.close, b.adj_close, b.volume}) {
        out << ',';
        write_number(out, v);
      }
      out << '\n';
    }
  }
}

void validate_calendar(const MembershipCalendar& calendar) {
  std::map<std::string, std::vector<const MembershipEntry*>> by_ticker;
  for (const auto& e : calendar.entries) {
    if (e.end < e.start) {
      throw Error(ErrorCode::InvariantViolation, e.ticker, "start_date after end_date");
    }
    by_ticker[e.ticker].push_back(&e);
  }
  for (auto& [ticker, list] : by_ticker) {
    std::sort(list.begin(), list.end(),
              [](const MembershipEntry* a, const MembershipEntry* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (!(list[i - 1]->end < list[i]->start)) {
        throw Error(ErrorCode::InvariantViolation, ticker, "overlapping membership windows");
      }
    }
  }
}

MembershipCalendar parse_membership(std::istream& in, const std::string& source) {
  MembershipCalendar cal;
  read_csv(in, source, kMembershipHeader,
           [&](const std::vector<std::string_view>& f, const std::string& at) {
             if (f.size() != 3) throw Error(ErrorCode::ParseError, at, "expected 3 fields");
             if (f[0].empty()) throw Error(ErrorCode::ParseError, at, "empty ticker");
             cal.entries.push_back(
                 {std::string(f[0]), parse_date_at(f[1], at), parse_date_at(f[2], at)});
           });
  validate_calendar(cal);
  return cal;
}

MembershipCalendar load_membership(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_membership(in, path.string());
}

void write_membership(std::ostream& out, const MembershipCalendar& calendar) {
  out << kMembershipHeader << '\n';
  for (const auto& e : calendar.entries) {
    out << e.ticker << ',' << format_date(e.start) << ',' << format_date(e.end) << '\n';
  }
}

std::vector<std::string> active_universe(const MembershipCalendar& calendar, Date asof) {
  std::set<std::string> active;
  for (const auto& e : calendar.entries) {
    if (!(asof < e.start) && !(e.end < asof)) active.insert(e.ticker);
  }
  return {active.begin(), active.end()};
}

MembershipCalendar sector_etf_calendar() {
  return make_calendar({
      "XLB,2004-04-13,2024-02-22",  "XLE,2004-04-13,2024-02-22", "XLF,2004-04-13,2024-02-22",
      "XLI,2004-04-13,2024-02-22",  "XLK,2004-04-13,2024-02-22", "XLP,2004-04-13,2024-02-22",
      "XLU,2004-04-13,2024-02-22",  "XLV,2004-04-13,2024-02-22", "XLY,2004-04-13,2024-02-22",
      "XLRE,2015-10-08,2024-02-22", "XLC,2018-06-19,2024-02-22",
  });
}

MembershipCalendar djia_calendar() {
  return make_calendar({
      "AA,1994-01-05,2013-09-22",   "AIG,2004-04-08,2008-09-21",  "AAPL,2015-03-19,2024-02-22",
      "AMGN,2020-08-31,2024-02-22", "AXP,1994-01-05,2024-02-22",  "BA,1994-01-05,2024-02-22",
      "BAC,2008-02-19,2013-09-22",  "C,1999-11-01,2009-06-07",    "CAT,1994-01-05,2024-02-22",
      "CSCO,2009-06-08,2024-02-22", "CVX,2008-02-19,2024-02-22",  "DD,1994-01-05,2019-04-01",
      "DIS,1994-01-05,2024-02-22",  "FL,1994-01-05,1997-03-17",   "GE,1994-01-05,2018-06-25",
      "GS,2013-09-23,2024-02-22",   "GT,1994-01-05,1999-11-01",   "HD,1999-11-01,2024-02-22",
      "HON,1994-01-05,2024-02-22",  "HPQ,1997-03-17,2013-09-22",  "IBM,1994-01-05,2024-02-22",
      "INTC,1999-11-01,2024-02-22", "IP,1994-01-05,2004-04-08",   "JNJ,1997-03-17,2024-02-22",
      "JPM,1994-01-05,2024-02-22",  "KO,1994-01-05,2024-02-22",   "MCD,1994-01-05,2024-02-22",
      "MMM,1994-01-05,2024-02-22",  "MO,1994-01-05,2008-02-18",   "MRK,1994-01-05,2024-02-22",
      "MSFT,1999-11-01,2024-02-22", "NKE,2013-09-23,2024-02-22",  "PFE,2004-04-08,2024-02-22",
      "PG,1994-01-05,2024-02-22",   "T,1994-01-05,2015-03-18",    "TRV,1997-03-17,2024-02-22",
      "UNH,2012-09-24,2024-02-22",  "VZ,2004-04-08,2024-02-22",   "WBA,2018-06-26,2024-02-22",
      "WMT,1994-01-05,2024-02-22",  "XOM,1994-01-05,2024-02-22",
  });
}

std::vector<Date> trading_calendar(const SeriesMap& series, const std::vector<std::string>& tickers,
                                   Date last) {
  std::set<Date> dates;
  for (const auto& t : tickers) {
    const auto it = series.find(t);
    if (it == series.end()) continue;
    for (const auto& b : it->second.bars) {
      if (last < b.date) break;
      dates.insert(b.date);
    }
  }
  return {dates.begin(), dates.end()};
}

ReturnPanel build_return_panel(const SeriesMap& series, const std::vector<std::string>& universe,
                               Date window_end, Index window_len) {
  if (window_len < 2) throw Error(ErrorCode::OutOfRange, "window_len", "must be >= 2");
  const auto calendar = trading_calendar(series, universe, window_end);
  if (std::none_of(universe.begin(), universe.end(),
                   [&](const std::string& t) { return series.count(t) > 0; })) {
    throw Error(ErrorCode::EmptyUniverse, format_date(window_end), "no universe member has data");
  }
  const auto needed = static_cast<std::size_t>(window_len) + 1;
  if (calendar.size() < needed) {
    throw Error(ErrorCode::InsufficientData, format_date(window_end),
                "need " + std::to_string(needed) + " trading days, have " +
                    std::to_string(calendar.size()));
  }
  const std::vector<Date> days(calendar.end() - static_cast<std::ptrdiff_t>(needed), calendar.end());

  ReturnPanel panel;
  panel.dates.assign(days.begin() + 1, days.end());
  std::vector<std::string> sorted = universe;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<Vector> closes;
  for (const auto& t : sorted) {
    const auto it = series.find(t);
    bool complete = it != series.end();
    Vector c(static_cast<Index>(needed));
    if (complete) {
      const auto& bars = it->second.bars;
      auto pos = std::lower_bound(bars.begin(), bars.end(), days.front(),
                                  [](const OhlcvBar& b, Date d) { return b.date < d; });
      for (std::size_t j = 0; j < needed; ++j, ++pos) {
        if (pos == bars.end() || pos->date != days[j]) {
          complete = false;
          break;
        }
        c(static_cast<Index>(j)) = pos->adj_close;
      }
    }
    if (complete) {
      panel.tickers.push_back(t);
      closes.push_back(std::move(c));
    } else {
      panel.excluded.push_back(t);
    }
  }
  if (panel.tickers.empty()) {
    throw Error(ErrorCode::EmptyUniverse, format_date(window_end),
                "no ticker has complete data in the window");
  }
  const Index m = static_cast<Index>(panel.tickers.size());
  panel.prices.resize(static_cast<Index>(needed), m);
  for (Index i = 0; i < m; ++i) panel.prices.col(i) = closes[static_cast<std::size_t>(i)];
  panel.returns = (panel.prices.bottomRows(window_len).array() /
                   panel.prices.topRows(window_len).array()) - 1.0;
  return panel;
}

}  // namespace blat
