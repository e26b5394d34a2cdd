#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "blat/errors.hpp"
#include "blat/market_data.hpp"
#include "support/synthetic.hpp"

namespace blat {
namespace {

constexpr const char* kHeader = "date,ticker,open,high,low,close,adj_close,volume\n";

Date day(const char* iso) { return parse_date(iso); }

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

TEST(Ohlcv, HeaderOnlyIsEmpty) {
  std::istringstream in(kHeader);
  EXPECT_TRUE(parse_ohlcv(in).empty());
}

TEST(Ohlcv, OneRow) {
  std::istringstream in(std::string(kHeader) + "2020-01-02,AAA,10,11,9,10.5,10.4,1000\n");
  const auto m = parse_ohlcv(in);
  ASSERT_EQ(m.size(), 1u);
  const auto& bars = m.at("AAA").bars;
  ASSERT_EQ(bars.size(), 1u);
  EXPECT_EQ(bars[0].date, day("2020-01-02"));
  EXPECT_EQ(bars[0].adj_close, 10.4);
  EXPECT_EQ(bars[0].volume, 1000.0);
}

TEST(Ohlcv, HighBelowLowNamesTheRow) {
  std::istringstream in(std::string(kHeader) + "2020-01-02,AAA,10,11,9,10.5,10.4,1000\n" +
                        "2020-01-03,AAA,10,8,9,10,10,1000\n");
  try {
    parse_ohlcv(in, "prices.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
    EXPECT_EQ(e.subject(), "AAA 2020-01-03");
    EXPECT_NE(std::string(e.what()).find("prices.csv:3"), std::string::npos);
  }
}

TEST(Ohlcv, ParseErrors) {
  for (const std::string body : {std::string("date,ticker,open\n"),
                                 std::string(kHeader) + "2020-13-02,AAA,1,1,1,1,1,1\n",
                                 std::string(kHeader) + "2020-01-02,AAA,1,x,1,1,1,1\n",
                                 std::string(kHeader) + "2020-01-02,AAA,1,1,1,1,1\n"}) {
    std::istringstream in(body);
    try {
      parse_ohlcv(in);
      FAIL() << body;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << body;
    }
  }
}

TEST(Ohlcv, SortsRowsPerTicker) {
  std::istringstream in(std::string(kHeader) + "2020-01-03,AAA,1,1,1,1,1,1\n" +
                        "2020-01-02,BBB,1,1,1,1,1,1\n2020-01-02,AAA,1,1,1,1,1,1\n");
  const auto m = parse_ohlcv(in);
  EXPECT_EQ(m.at("AAA").bars[0].date, day("2020-01-02"));
  EXPECT_EQ(m.at("AAA").bars[1].date, day("2020-01-03"));
}

TEST(Ohlcv, RoundTrip) {
  const auto series = testing::synthetic_gbm({"AAA", "BBB"}, day("2020-01-01"), 50, 3);
  std::stringstream buf;
  write_ohlcv(buf, series);
  const auto back = parse_ohlcv(buf);
  ASSERT_EQ(back.size(), 2u);
  for (const auto& [ticker, s] : series) {
    const auto& b = back.at(ticker).bars;
    ASSERT_EQ(b.size(), s.bars.size());
    for (std::size_t t = 0; t < b.size(); ++t) {
      EXPECT_EQ(b[t].date, s.bars[t].date);
      EXPECT_EQ(b[t].open, s.bars[t].open);
      EXPECT_EQ(b[t].high, s.bars[t].high);
      EXPECT_EQ(b[t].low, s.bars[t].low);
      EXPECT_EQ(b[t].close, s.bars[t].close);
      EXPECT_EQ(b[t].adj_close, s.bars[t].adj_close);
      EXPECT_EQ(b[t].volume, s.bars[t].volume);
    }
  }
}

TEST(Membership, ValidationAndRoundTrip) {
  MembershipCalendar bad{{{"A", day("2020-02-01"), day("2020-01-01")}}};
  EXPECT_THROW(validate_calendar(bad), Error);
  MembershipCalendar overlap{{{"A", day("2020-01-01"), day("2020-03-01")},
                              {"A", day("2020-02-01"), day("2020-04-01")}}};
  EXPECT_THROW(validate_calendar(overlap), Error);

  std::stringstream buf;
  write_membership(buf, djia_calendar());
  const auto back = parse_membership(buf);
  ASSERT_EQ(back.entries.size(), djia_calendar().entries.size());
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].ticker, djia_calendar().entries[i].ticker);
    EXPECT_EQ(back.entries[i].start, djia_calendar().entries[i].start);
    EXPECT_EQ(back.entries[i].end, djia_calendar().entries[i].end);
  }
}

TEST(Membership, ActiveUniverse) {
  EXPECT_TRUE(active_universe(sector_etf_calendar(), day("1990-01-01")).empty());

  const auto etfs = active_universe(sector_etf_calendar(), day("2010-01-04"));
  const std::vector<std::string> nine = {"XLB", "XLE", "XLF", "XLI", "XLK", "XLP", "XLU", "XLV", "XLY"};
  EXPECT_EQ(etfs, nine);

  const auto dow = active_universe(djia_calendar(), day("2009-06-08"));
  EXPECT_TRUE(contains(dow, "CSCO"));
  EXPECT_FALSE(contains(dow, "C"));
  EXPECT_TRUE(std::is_sorted(dow.begin(), dow.end()));
  // The reference table lists 29 names active on this date.
  EXPECT_EQ(dow.size(), 29u);
}

TEST(ReturnPanel, SimpleReturnExample) {
  SeriesMap m{{"A", testing::series_from_closes("A", {100.0, 100.0, 110.0})}};
  const auto p = build_return_panel(m, {"A"}, m["A"].bars.back().date, 2);
  ASSERT_EQ(p.returns.rows(), 2);
  EXPECT_DOUBLE_EQ(p.returns(0, 0), 0.0);
  EXPECT_NEAR(p.returns(1, 0), 0.10, 1e-15);
  EXPECT_EQ(p.dates.back(), m["A"].bars.back().date);
}

TEST(ReturnPanel, ConstantPricesGiveZeroReturns) {
  SeriesMap m{{"A", testing::series_from_closes("A", std::vector<double>(30, 5.0))}};
  const auto p = build_return_panel(m, {"A"}, m["A"].bars.back().date, 20);
  EXPECT_EQ(p.returns, Matrix::Zero(20, 1));
}

TEST(ReturnPanel, LateListingIsExcluded) {
  const Date first = day("2020-01-01");
  SeriesMap m{{"A", testing::series_from_closes("A", std::vector<double>(30, 5.0), first)},
              {"B", testing::series_from_closes("B", std::vector<double>(10, 7.0), day("2020-02-03"))}};
  const auto p = build_return_panel(m, {"A", "B"}, m["A"].bars.back().date, 20);
  EXPECT_EQ(p.tickers, std::vector<std::string>{"A"});
  EXPECT_EQ(p.excluded, std::vector<std::string>{"B"});
}

TEST(ReturnPanel, Errors) {
  SeriesMap m{{"A", testing::series_from_closes("A", std::vector<double>(10, 5.0))}};
  const Date end = m["A"].bars.back().date;
  try {
    build_return_panel(m, {"A"}, end, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
  try {
    build_return_panel(m, {"A"}, end, 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
  try {
    build_return_panel(m, {"Z"}, end, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyUniverse);
  }
}

TEST(ReturnPanel, NoLookAhead) {
  const auto full = testing::synthetic_gbm({"A", "B", "C"}, day("2020-01-01"), 200, 4);
  const Date end = full.at("A").bars[120].date;
  SeriesMap truncated = full;
  for (auto& [t, s] : truncated) s.bars.resize(121);
  const auto a = build_return_panel(full, {"A", "B", "C"}, end, 50);
  const auto b = build_return_panel(truncated, {"A", "B", "C"}, end, 50);
  EXPECT_EQ(a.returns, b.returns);
  EXPECT_EQ(a.dates, b.dates);
  EXPECT_EQ(a.prices, b.prices);
}

TEST(TradingCalendar, UnionUpToLast) {
  SeriesMap m{{"A", testing::series_from_closes("A", {1, 2, 3}, day("2020-01-01"))},
              {"B", testing::series_from_closes("B", {1, 2, 3}, day("2020-01-03"))}};
  const auto cal = trading_calendar(m, {"A", "B"}, day("2020-01-06"));
  const std::vector<Date> expected = {day("2020-01-01"), day("2020-01-02"), day("2020-01-03"),
                                      day("2020-01-06")};
  EXPECT_EQ(cal, expected);
}

TEST(Membership, ShippedFilesMatchBuiltInTables) {
  for (const auto& [file, table] : {std::pair{"sector_etf_members.csv", sector_etf_calendar()},
                                    std::pair{"djia_members.csv", djia_calendar()}}) {
    const auto loaded = load_membership(std::string(BLAT_DATA_DIR) + "/" + file);
    ASSERT_EQ(loaded.entries.size(), table.entries.size()) << file;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      EXPECT_EQ(loaded.entries[i].ticker, table.entries[i].ticker);
      EXPECT_EQ(loaded.entries[i].start, table.entries[i].start);
      EXPECT_EQ(loaded.entries[i].end, table.entries[i].end);
    }
  }
}

}  // namespace
}  // namespace blat
