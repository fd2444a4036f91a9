#include "embedstab/error.hpp"
#include "embedstab/report.hpp"
#include "synthetic.hpp"

#include <nlohmann/json.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace embedstab;

namespace {

Report sample_report() {
  Report r("instability", {"word", "value", "note"});
  r.add_meta("seed", "7");
  r.add_meta("proxy_size", cell(std::size_t{1000}));
  r.add_row({"cat", cell(0.125), "plain"});
  r.add_row({"dog", cell(std::optional<double>{}), "with space"});
  r.add_row({"émigré", cell(1.0 / 3.0), "-"});
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cell, RoundTripsDoubles) {
  for (double x : {0.1, 1.0 / 3.0, 2.6442208586859327e-33, -1e300, 12345678.0}) {
    EXPECT_EQ(std::stod(cell(x)), x) << cell(x);
  }
  EXPECT_EQ(cell(0.5), "0.5");
  EXPECT_EQ(cell(std::size_t{42}), "42");
  EXPECT_EQ(cell(std::optional<double>{}), "undefined");
  EXPECT_EQ(cell(std::optional<double>{2.0}), "2");
}

TEST(Sha256, KnownDigest) {
  const auto dir = testkit::temp_dir("sha");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(dir / "abc.txt"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::ofstream(dir / "empty.txt", std::ios::binary);
  EXPECT_EQ(sha256_file(dir / "empty.txt"),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_THROW(sha256_file(dir / "missing"), DataError);
}

TEST(Report, InputHashInMeta) {
  const auto dir = testkit::temp_dir("input");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  Report r("x", {"a"});
  r.add_input("vectors", dir / "abc.txt");
  ASSERT_EQ(r.meta.size(), 4u);
  EXPECT_EQ(r.meta[0], (std::pair<std::string, std::string>{"tool", "embedstab"}));
  EXPECT_EQ(r.meta[3].first, "input:vectors");
  EXPECT_NE(r.meta[3].second.find("sha256=ba7816bf"), std::string::npos);
}

TEST(Report, RowWidthChecked) {
  Report r("x", {"a", "b"});
  EXPECT_THROW(r.add_row({"1"}), UsageError);
}

TEST(Report, TsvRoundTrip) {
  const auto dir = testkit::temp_dir("tsv");
  const auto r = sample_report();
  write_tsv(r, dir / "r.tsv");
  EXPECT_EQ(read_tsv(dir / "r.tsv"), r);
  const auto text = slurp(dir / "r.tsv");
  EXPECT_NE(text.find("word\tvalue\tnote\n"), std::string::npos);
  EXPECT_NE(text.find("cat\t0.125\tplain\n"), std::string::npos);
}

TEST(Report, JsonRoundTripAndTypes) {
  const auto dir = testkit::temp_dir("json");
  const auto r = sample_report();
  write_json(r, dir / "r.json");
  EXPECT_EQ(read_json(dir / "r.json"), r);
  const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
  EXPECT_EQ(j["command"], "instability");
  EXPECT_TRUE(j["rows"][0][1].is_number());
  EXPECT_DOUBLE_EQ(j["rows"][0][1].get<double>(), 0.125);
  EXPECT_TRUE(j["rows"][1][1].is_string());
}

TEST(Report, TsvAndJsonCarryTheSameTable) {
  const auto dir = testkit::temp_dir("cross");
  const auto r = sample_report();
  write_tsv(r, dir / "r.tsv");
  write_json(r, dir / "r.json");
  EXPECT_EQ(read_tsv(dir / "r.tsv"), read_json(dir / "r.json"));
}

TEST(Report, MalformedFilesAreDataErrors) {
  const auto dir = testkit::temp_dir("bad");
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(read_json(dir / "bad.json"), DataError);
  std::ofstream(dir / "bad.tsv") << "a\tb\n1\n";
  EXPECT_THROW(read_tsv(dir / "bad.tsv"), DataError);
  EXPECT_THROW(read_tsv(dir / "missing.tsv"), DataError);
}
