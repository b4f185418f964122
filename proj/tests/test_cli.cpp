#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "symspace/suites.hpp"

using namespace symspace;

namespace {

std::size_t usage_position(const std::string& spec) {
  try {
    parse_fn_spec(spec);
  } catch (const UsageError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no usage error for '" << spec << "'";
  return 0;
}

std::string without_wall_time(const SuiteReport& r) { return r.to_json(false).dump(); }

}  // namespace

TEST(FnSpec, Indicator) {
  const FnSpec s = parse_fn_spec("indicator:0,0.5");
  EXPECT_EQ(s.function.breakpoints().size(), 3u);
  EXPECT_EQ(s.function(0.25), 1.0);
  EXPECT_EQ(s.function(0.75), 0.0);
  EXPECT_EQ(s.function.integral(), 0.5);
  EXPECT_EQ(s.kind, "indicator");
}

TEST(FnSpec, Constant) {
  const FnSpec s = parse_fn_spec("const:1");
  EXPECT_EQ(s.function.piece_count(), 1u);
  EXPECT_EQ(s.function(0.3), 1.0);
  EXPECT_EQ(s.primitive(0.5), 0.5);
}

TEST(FnSpec, PowerRecordsPieces) {
  const FnSpec s = parse_fn_spec("power:-0.25,m=300");
  EXPECT_EQ(s.parameters["pieces"], 300);
  EXPECT_EQ(s.function.piece_count(), 300u);
  EXPECT_TRUE(s.function.is_decreasing());
  EXPECT_NEAR(s.function.integral(), 4.0 / 3.0, 1e-12);
  EXPECT_EQ(parse_fn_spec("power:0").parameters["pieces"], default_profile_pieces);
}

TEST(FnSpec, PowerRejectsNonSquareIntegrable) {
  try {
    parse_fn_spec("power:-0.5");
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_EQ(e.position(), 6u);
    EXPECT_NE(std::string(e.what()).find("L_2"), std::string::npos);
  }
}

TEST(FnSpec, InvPhi) {
  const FnSpec s = parse_fn_spec("invphi:k=64,m=100");
  EXPECT_EQ(s.parameters["k"], 64.0);
  EXPECT_EQ(s.parameters["pieces"], 100);
  EXPECT_EQ(s.function(0.0), 64.0);
  EXPECT_TRUE(s.function.is_decreasing());
  EXPECT_NEAR(s.function.integral(), InvPhiProfile(64.0).primitive(1.0), 1e-12);
  const FnSpec bare = parse_fn_spec("invphi");
  EXPECT_EQ(bare.parameters["k"], default_invphi_k);
  EXPECT_EQ(parse_fn_spec("invphi:m=50").parameters["pieces"], 50);
}

TEST(FnSpec, RandomDecreasingIsDeterministic) {
  const FnSpec a = parse_fn_spec("random-decreasing:42,100");
  const FnSpec b = parse_fn_spec("random-decreasing:42,100");
  ASSERT_EQ(a.function.piece_count(), b.function.piece_count());
  for (std::size_t i = 0; i < a.function.piece_count(); ++i) {
    EXPECT_EQ(a.function.values()[i], b.function.values()[i]);
    EXPECT_EQ(a.function.breakpoints()[i], b.function.breakpoints()[i]);
  }
  EXPECT_TRUE(a.function.is_decreasing());
  EXPECT_NE(parse_fn_spec("random-decreasing:43,100").function.values()[1], a.function.values()[1]);
}

TEST(FnSpec, CsvRoundTrip) {
  const std::string path = ::testing::TempDir() + "symspace_fn.csv";
  const StepFunction f = StepFunction::indicator(0.25, 0.75, 1.0, 3.0);
  save_csv(path, f);
  const FnSpec s = parse_fn_spec("csv:" + path);
  EXPECT_EQ(s.function.integral(), f.integral());
  EXPECT_EQ(usage_position("csv:" + path + ".missing"), 4u);
  std::remove(path.c_str());
}

TEST(FnSpec, MalformedInputReportsPosition) {
  EXPECT_EQ(usage_position("indicator:0,x"), 12u);
  EXPECT_EQ(usage_position("indicator:0.6,0.5"), 10u);
  EXPECT_EQ(usage_position("indicator:0"), 11u);
  EXPECT_EQ(usage_position("const:1x"), 7u);
  EXPECT_EQ(usage_position("const"), 5u);
  EXPECT_EQ(usage_position("invphi:k=0.5"), 9u);
  EXPECT_EQ(usage_position("invphi:q=2"), 7u);
  EXPECT_EQ(usage_position("random-decreasing:42"), 20u);
  EXPECT_EQ(usage_position("random-decreasing:42,0"), 21u);
  EXPECT_EQ(usage_position("power:-0.25,m=1"), 14u);
  EXPECT_EQ(usage_position("sine:1"), 0u);
}

TEST(RunSuite, UnknownSuite) {
  EXPECT_THROW(run_suite("bogus"), UsageError);
  EXPECT_THROW(run_suite("extremizer", SuiteOptions{.trials = 0}), UsageError);
  EXPECT_THROW(run_suite("postcritical", SuiteOptions{.n = 100}), UsageError);
}

TEST(RunSuite, ExtremizerTwoHundredPasses) {
  SuiteOptions o;
  o.trials = 200;
  o.seed = 7;
  const SuiteReport r = run_suite("extremizer", o);
  EXPECT_EQ(r.cases.size(), 200u);
  EXPECT_EQ(r.count(CheckStatus::pass), 200u);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.seed, 7u);
}

TEST(RunSuite, PostcriticalAllPass) {
  SuiteOptions o;
  o.d = 1;
  o.n = 4096;
  o.trials = 50;
  const SuiteReport r = run_suite("postcritical", o);
  EXPECT_EQ(r.count(CheckStatus::fail), 0u);
  EXPECT_GE(r.cases.size(), 51u);
}

TEST(RunSuite, ReportIsDeterministicAndSorted) {
  SuiteOptions o;
  o.trials = 30;
  o.seed = 99;
  for (const char* name : {"extremizer", "cesaro-claim", "rearrange"}) {
    const SuiteReport a = run_suite(name, o);
    const SuiteReport b = run_suite(name, o);
    EXPECT_EQ(without_wall_time(a), without_wall_time(b)) << name;
    EXPECT_TRUE(std::is_sorted(a.cases.begin(), a.cases.end(),
                               [](const CaseRecord& x, const CaseRecord& y) { return x.name < y.name; }));
  }
  o.seed = 100;
  EXPECT_NE(without_wall_time(run_suite("extremizer", o)), without_wall_time(run_suite("extremizer", SuiteOptions{.trials = 30, .seed = 99})));
}

TEST(RunSuite, JsonSchema) {
  const SuiteReport r = run_suite("orlicz-gate");
  const nlohmann::json j = r.to_json();
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["suite"], "orlicz-gate");
  EXPECT_EQ(j["version"], version);
  EXPECT_TRUE(j.contains("wall_time"));
  EXPECT_FALSE(r.to_json(false).contains("wall_time"));
  ASSERT_EQ(j["cases"].size(), 3u);
  for (const auto& c : j["cases"]) {
    for (const char* key : {"name", "parameters", "lhs", "rhs", "margin", "status"}) EXPECT_TRUE(c.contains(key));
    EXPECT_EQ(c["status"], "pass");
  }
}

TEST(RunSuite, ExitCodeFollowsFailures) {
  SuiteReport r;
  r.cases.push_back({"a", {}, 0.0, 1.0, 1.0, CheckStatus::pass});
  r.cases.push_back({"b", {}, 0.0, 1.0, 1.0, CheckStatus::inconclusive});
  EXPECT_EQ(r.exit_code(), 0);
  r.cases.push_back({"c", {}, 2.0, 1.0, -1.0, CheckStatus::fail});
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(RunSuite, FunctionSpecDrivesSuites) {
  SuiteOptions o;
  o.fn = "invphi:k=64";
  const SuiteReport ext = run_suite("extremizer", o);
  ASSERT_EQ(ext.cases.size(), 1u);
  EXPECT_EQ(ext.cases[0].status, CheckStatus::pass);
  o.d = 1;
  o.n = 1024;
  const SuiteReport up = run_suite("cwikel-upper", o);
  EXPECT_EQ(up.count(CheckStatus::fail), 0u);
  EXPECT_EQ(up.csv.substr(0, up.csv.find('\n')), "case,norm,f_norm,ratio,n,d,converged_iters");
}

TEST(RunSuite, CasesCsv) {
  const SuiteReport r = run_suite("orlicz-gate");
  const std::string csv = cases_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "case,lhs,rhs,margin,status");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
