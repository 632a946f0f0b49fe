#include <gtest/gtest.h>

#include <cmath>

#include "osgood/report.hpp"
#include "test_util.hpp"

namespace osgood {
namespace {

VerificationReport sample(const std::string& module, std::initializer_list<const char*> ids) {
  VerificationReport r(module);
  for (const char* id : ids) r.add(id, "plumbing", true).with("x", 1.0);
  return r;
}

TEST(Report, SummaryCountsMatchRows) {
  VerificationReport r("m");
  r.add("a", "plumbing", true);
  r.add("b", "plumbing", false);
  r.add("c", "", true);
  const auto s = r.summary();
  EXPECT_EQ(s.total, 3u);
  EXPECT_EQ(s.passed, 2u);
  EXPECT_EQ(s.failed, 1u);
  EXPECT_FALSE(r.all_passed());
  EXPECT_EQ(r.find("c")->anchor, "plumbing");
}

TEST(Report, MergeSingleIsIdentity) {
  auto r = sample("m", {"b", "a"});
  r.provenance().config_hash = "h";
  const auto merged = report_merge({r});
  ASSERT_EQ(merged.rows().size(), 2u);
  EXPECT_EQ(merged.module(), "m");
  EXPECT_EQ(merged.rows()[0].check_id, "a");
  EXPECT_EQ(merged.provenance().config_hash, "h");
}

TEST(Report, MergeDisjointSumsRows) {
  const auto merged = report_merge({sample("x", {"a", "b"}), sample("y", {"c"})});
  EXPECT_EQ(merged.rows().size(), 3u);
  EXPECT_EQ(merged.summary().total, 3u);
  EXPECT_EQ(merged.module(), "merged");
}

TEST(Report, MergeSuffixesDuplicatesDeterministically) {
  const auto merged = report_merge({sample("x", {"a"}), sample("x", {"a"}), sample("x", {"a"})});
  ASSERT_EQ(merged.rows().size(), 3u);
  EXPECT_EQ(merged.rows()[0].check_id, "a");
  EXPECT_EQ(merged.rows()[1].check_id, "a#2");
  EXPECT_EQ(merged.rows()[2].check_id, "a#3");
}

TEST(Report, JsonRoundTripKeepsRowsAndNonFinite) {
  VerificationReport r("m");
  r.add("a", "anchor", true, 1e-6, "note").with("v", 0.5).with("inf", INFINITY);
  r.add("b", "plumbing", false);
  r.provenance().seed = 7;
  r.provenance().config_hash = "abc";
  const Json j = r.to_json();
  EXPECT_TRUE(j["rows"][0]["measured"]["inf"].is_null());
  EXPECT_EQ(j["summary"]["failed"], 1);
  const auto back = VerificationReport::from_json(j);
  EXPECT_EQ(back.to_json().dump(), j.dump());
  EXPECT_TRUE(std::isnan(*back.rows()[0].value("inf")));
}

TEST(Report, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Report, PropertyMergeOrderIndependentRowCount) {
  testing::Gen g(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<VerificationReport> parts;
    std::size_t total = 0;
    for (int p = 0, np = g.integer(1, 5); p < np; ++p) {
      VerificationReport r("m" + std::to_string(g.integer(0, 2)));
      for (int i = 0, ni = g.integer(0, 6); i < ni; ++i)
        r.add("id" + std::to_string(g.integer(0, 3)), "plumbing", g.integer(0, 1) == 1);
      total += r.rows().size();
      parts.push_back(r);
    }
    const auto merged = report_merge(parts);
    EXPECT_EQ(merged.rows().size(), total);
    for (std::size_t i = 1; i < merged.rows().size(); ++i) {
      const auto& a = merged.rows()[i - 1];
      const auto& b = merged.rows()[i];
      EXPECT_TRUE(a.module < b.module || (a.module == b.module && a.check_id <= b.check_id));
    }
  }
}

}  // namespace
}  // namespace osgood
