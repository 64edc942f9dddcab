#include <gtest/gtest.h>

#include "gocf/core/csv.hpp"
#include "gocf/core/digest.hpp"
#include "gocf/core/types.hpp"
#include "gocf/core/zip.hpp"
#include "gocf/testing/oracles.hpp"

using namespace gocf;

TEST(Point, SgfCoordinateBijection) {
  for (int i = 0; i < kNumPoints; ++i) {
    Point p = Point::from_index(i);
    auto back = Point::from_sgf(p.to_sgf());
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, p);
  }
  EXPECT_EQ(Point::from_sgf("dd")->col(), 3);
  EXPECT_EQ(Point::from_sgf("pp")->row(), 15);
  EXPECT_TRUE(Point::from_sgf("tt")->is_pass());
  EXPECT_TRUE(Point::from_sgf("")->is_pass());
  EXPECT_FALSE(Point::from_sgf("zz").has_value());
  EXPECT_FALSE(Point::from_sgf("a").has_value());
}

TEST(Date, LenientParsingAndResolution) {
  auto d = Date::parse_lenient("2016-03-15");
  ASSERT_TRUE(d);
  EXPECT_EQ(d->precision(), Date::Precision::Day);
  auto m = Date::parse_lenient("1998-07");
  ASSERT_TRUE(m);
  EXPECT_EQ(m->precision(), Date::Precision::Month);
  EXPECT_EQ(m->ordinal(), (Date{1998, 7, 15}).ordinal());
  auto y = Date::parse_lenient("1975");
  ASSERT_TRUE(y);
  EXPECT_EQ(y->ordinal(), (Date{1975, 7, 1}).ordinal());
  EXPECT_EQ(Date::parse_lenient("2001-05-06,07")->to_string(), "2001-05-06");
  EXPECT_FALSE(Date::parse_lenient("garbage").has_value());
  EXPECT_THROW(Date::parse_iso("2016-03"), std::invalid_argument);
  EXPECT_EQ((Date{1970, 1, 1}).ordinal(), 0);
}

TEST(Csv, QuotingRoundTrip) {
  csv::Writer w({"a", "b"});
  w.row({"plain", "has,comma"});
  w.row({"has \"quote\"", "line\nbreak"});
  EXPECT_EQ(w.rows(), 2u);
  EXPECT_NE(w.str().find("\"has,comma\""), std::string::npos);
  EXPECT_NE(w.str().find("\r\n"), std::string::npos);
  csv::Table t = csv::parse(w.str());
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "has,comma");
  EXPECT_EQ(t.rows[1][0], "has \"quote\"");
  EXPECT_EQ(t.rows[1][1], "line\nbreak");
  EXPECT_THROW(w.row({"only one"}), std::logic_error);
  EXPECT_THROW(t.col("missing"), std::runtime_error);
}

TEST(Digest, KnownSha256) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Digest, SourceDateEpochPinsTimestamps) {
  ::setenv("SOURCE_DATE_EPOCH", "1234567890", 1);
  EXPECT_EQ(unix_time_now(), 1234567890);
  ::unsetenv("SOURCE_DATE_EPOCH");
  EXPECT_GT(unix_time_now(), 1600000000);
}

TEST(Zip, ReadsStoredArchive) {
  const std::string archive = oracle::make_stored_zip({{"a.sgf", "(;FF[4])"}, {"dir/b.sgf", "(;B[dd])"}});
  auto entries = read_zip(archive);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].name, "a.sgf");
  EXPECT_EQ(entries[1].data, "(;B[dd])");
  EXPECT_THROW(read_zip("not a zip"), std::runtime_error);
}
