#include <string>
#include <vector>

#include "doctest.h"
#include "mnar/csv.hpp"
#include "mnar/error.hpp"

using mnar::Errc;
using mnar::Error;
using mnar::model::UnitRecord;
namespace io = mnar::io;

TEST_CASE("a minimal header needs only r and y") {
  auto data = io::parse_csv("r,y\n1,2\n0,\n1,1\n", "input");
  REQUIRE(data.records.size() == 3);
  CHECK_FALSE(data.has_f);
  CHECK_FALSE(data.has_stratum);
  CHECK_FALSE(data.has_d);
  CHECK(data.records[0].r == 1);
  CHECK(data.records[0].y == 2);
  CHECK(data.records[0].f == 0);
  CHECK(data.records[1].r == 0);
  CHECK(data.records[1].y == 0);
  CHECK(data.records[2].y == 1);
}

TEST_CASE("the full layout carries stratum, treatment and truth") {
  auto data = io::parse_csv("stratum,f,r,y,d,y_true\na,2,1,3,0,3\nb,1,0,,1,4\nb,1,1,2,,2\n",
                            "input", true);
  REQUIRE(data.records.size() == 3);
  CHECK(data.has_stratum);
  CHECK(data.has_f);
  CHECK(data.has_d);
  CHECK(data.has_y_true);
  CHECK(data.records[0].stratum == "a");
  CHECK(data.records[0].f == 2);
  CHECK(data.records[0].d == 0);
  CHECK(data.records[1].y == 0);
  CHECK(data.records[1].d == 1);
  CHECK(data.records[2].d == -1);  // blank treatment stays unset
  REQUIRE(data.y_true.size() == 3);
  CHECK(data.y_true[0] == 3);
  CHECK(data.y_true[1] == 4);
  CHECK(data.y_true[2] == 2);
}

TEST_CASE("headers are validated as an ordered subsequence") {
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y,foo\n1,2,3\n", "input"),
                       "io: input: unknown column 'foo'", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,r,y\n1,1,2\n", "input"),
                       "io: input: duplicate column 'r'", Error);
  CHECK_THROWS_WITH_AS(
      io::parse_csv("y,r\n2,1\n", "input"),
      "io: input: column 'r' out of order (expected subsequence of stratum,f,r,y,d,y_true)",
      Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("f,y\n1,2\n", "input"),
                       "io: input: columns r and y are mandatory", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r\n1\n", "input"),
                       "io: input: columns r and y are mandatory", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y,y_true\n1,2,2\n", "input"),
                       "io: input: column y_true is only accepted by the benchmark command",
                       Error);
  CHECK(io::parse_csv("r,y,y_true\n1,2,2\n", "input", true).records.size() == 1);
}

TEST_CASE("data rows are checked line by line") {
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y\n1\n", "input"),
                       "io: line 2: expected 2 fields, got 1", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y\nx,2\n", "input"),
                       "io: line 2: malformed r value 'x'", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y\n2,2\n", "input"),
                       "io: line 2: r must be 0 or 1", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y\n1,2\n1,\n", "input"),
                       "io: line 3: empty y field", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y\n0,3\n", "input"),
                       "io: line 2: y must be empty when r = 0", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("f,r,y\n,1,2\n", "input"),
                       "io: line 2: empty f field", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y,y_true\n1,2,zz\n", "input", true),
                       "io: line 2: malformed y_true value 'zz'", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y\n1,2.5\n", "input"),
                       "io: line 2: malformed y value '2.5'", Error);
}

TEST_CASE("blank lines are skipped and empty inputs are refused") {
  auto data = io::parse_csv("r,y\n\n1,2\n\n", "input");
  CHECK(data.records.size() == 1);
  CHECK_THROWS_WITH_AS(io::parse_csv("", "input"), "io: input: empty file", Error);
  CHECK_THROWS_WITH_AS(io::parse_csv("r,y\n", "input"), "io: input: no data rows", Error);
}

TEST_CASE("formatting writes the canonical column order") {
  UnitRecord a;
  a.stratum = "s1";
  a.f = 2;
  a.r = 1;
  a.y = 3;
  a.d = 1;
  UnitRecord b;
  b.stratum = "s2";
  b.f = 1;
  b.r = 0;
  b.y = 0;
  b.d = -1;
  std::vector<UnitRecord> recs = {a, b};

  io::WriteOptions all;
  all.stratum = true;
  all.d = true;
  all.y_true = true;
  CHECK(io::format_csv(recs, {3, 2}, all) ==
        "stratum,f,r,y,d,y_true\ns1,2,1,3,1,3\ns2,1,0,,-1,2\n");

  io::WriteOptions plain;
  CHECK(io::format_csv(recs, {}, plain) == "f,r,y\n2,1,3\n1,0,\n");

  CHECK_THROWS_WITH_AS(io::format_csv(recs, {3}, all),
                       "contract: csv: truth column length mismatch", Error);
}

TEST_CASE("a formatted dataset parses back unchanged") {
  std::vector<UnitRecord> recs;
  for (int i = 0; i < 12; ++i) {
    UnitRecord rec;
    rec.stratum = i % 2 ? "hi" : "lo";
    rec.f = 1 + i % 3;
    rec.r = i % 4 == 0 ? 0 : 1;
    rec.y = rec.r == 1 ? 1 + (2 * i) % 5 : 0;
    rec.d = i % 2;
    recs.push_back(rec);
  }
  std::vector<int> truth(12, 0);
  for (int i = 0; i < 12; ++i) truth[i] = 1 + (2 * i) % 5;

  io::WriteOptions opt;
  opt.stratum = true;
  opt.d = true;
  opt.y_true = true;
  auto parsed = io::parse_csv(io::format_csv(recs, truth, opt), "roundtrip", true);
  REQUIRE(parsed.records.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(parsed.records[i].stratum == recs[i].stratum);
    CHECK(parsed.records[i].f == recs[i].f);
    CHECK(parsed.records[i].r == recs[i].r);
    CHECK(parsed.records[i].y == recs[i].y);
    CHECK(parsed.records[i].d == recs[i].d);
    CHECK(parsed.y_true[i] == truth[i]);
  }
}

TEST_CASE("file io reports the failing path") {
  const std::string path = "/tmp/mnar_csv_roundtrip_test.csv";
  io::write_text_file(path, "r,y\n1,4\n");
  auto data = io::read_csv(path);
  REQUIRE(data.records.size() == 1);
  CHECK(data.records[0].y == 4);

  CHECK_THROWS_WITH_AS(io::read_text_file("/no/such/dir/data.csv"),
                       "io: cannot open /no/such/dir/data.csv", Error);
  CHECK_THROWS_WITH_AS(io::write_text_file("/no/such/dir/data.csv", "x"),
                       "io: cannot write /no/such/dir/data.csv", Error);
}
