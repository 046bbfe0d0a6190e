#include <gtest/gtest.h>

#include <sstream>

#include "thorin/cli/io.hpp"
#include "thorin/numkit/errors.hpp"

using namespace thorin;

namespace {

laguerre::SampleMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return cli::read_csv(in, "t.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ReadCsv, HeaderDetectionAndShape) {
  const auto a = parse("loss,alae\n1.5,2\n0,3e2\n");
  ASSERT_EQ(a.rows(), 2u);
  ASSERT_EQ(a.dim(), 2u);
  EXPECT_DOUBLE_EQ(a(1, 1), 300.0);
  const auto b = parse("1.5, 2\r\n\n0,3\n");
  EXPECT_EQ(b.rows(), 2u);
  EXPECT_DOUBLE_EQ(b(0, 1), 2.0);
}

TEST(ReadCsv, DiagnosticsNameTheCell) {
  EXPECT_NE(error_of("x,y\n1,2\n3,-4\n").find("line 3, column 2"), std::string::npos);
  EXPECT_NE(error_of("1,2\n3,abc\n").find("line 2, column 2"), std::string::npos);
  EXPECT_NE(error_of("1\nnan\n").find("not finite"), std::string::npos);
  EXPECT_NE(error_of("1\ninf\n").find("not finite"), std::string::npos);
  EXPECT_NE(error_of("1,2\n3\n").find("columns"), std::string::npos);
  EXPECT_NE(error_of("1,2\n3,\n").find("line 2, column 2"), std::string::npos);
  EXPECT_NE(error_of("x\n").find("no data"), std::string::npos);
}

TEST(WriteCsv, RoundTripsExactly) {
  const laguerre::SampleMatrix s(2, {0.1, 1.0 / 3.0, 1e-300, 12345.678901234567});
  std::ostringstream out;
  cli::write_csv(out, s);
  const auto back = parse(out.str());
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(back(i, j), s(i, j));
  }
  EXPECT_EQ(out.str().substr(0, 6), "x1,x2\n");
}

TEST(ParseConfig, KeyValueAndJson) {
  const auto kv = cli::parse_config("# settings\nn = 3\nm=4,4  # truncation\n\nseed=7\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"n", "3"}));
  EXPECT_EQ(kv[1].second, "4,4");
  const auto js = cli::parse_config(R"({"n": 2, "m": [4, 5], "dist": "lognormal", "eps": 0.25})");
  ASSERT_EQ(js.size(), 4u);
  for (const auto& [k, v] : js) {
    if (k == "m") EXPECT_EQ(v, "4,5");
    if (k == "dist") EXPECT_EQ(v, "lognormal");
    if (k == "eps") EXPECT_EQ(v, "0.25");
  }
  EXPECT_THROW(cli::parse_config("n 3\n"), ConfigError);
  EXPECT_THROW(cli::parse_config("{\"n\": }"), ConfigError);
  EXPECT_THROW(cli::parse_config(R"({"n": {"a": 1}})"), ConfigError);
}
