#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "relife/io.hpp"
#include "relife/scenario.hpp"
#include "support/generators.hpp"

namespace relife::scenario {
namespace {

using relife::testing::TempDir;

int run_cli(const std::string& args) {
  const std::string cmd = relife::testing::cli_path().string() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

rules::RuleSet default_rules() {
  return rules::load_ruleset(relife::testing::source_dir() / "config/ruleset.default.json");
}

TEST(Generate, DeterministicPerSeed) {
  const auto a = generate({7, 5, 40});
  const auto b = generate({7, 5, 40});
  const auto c = generate({8, 5, 40});
  EXPECT_EQ(serialize_catalog(a.catalog), serialize_catalog(b.catalog));
  EXPECT_EQ(a.returns, b.returns);
  EXPECT_NE(serialize_catalog(a.catalog), serialize_catalog(c.catalog));
}

TEST(Generate, CountsAndValidity) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto f = generate({seed, 1 + static_cast<int>(seed % 7), 50});
    EXPECT_EQ(f.catalog.products().size(), 1 + seed % 7);
    ASSERT_EQ(f.returns.size(), 50u);
    for (const auto& r : f.returns) {
      EXPECT_NO_THROW(validate(r));
      EXPECT_NE(f.catalog.find_product(r.product_id), nullptr);
    }
    for (const auto& [id, p] : f.catalog.products()) {
      EXPECT_GT(total_mass(p, f.catalog.materials()), 0.0);
    }
  }
}

TEST(Generate, RejectsNonPositiveCounts) {
  EXPECT_THROW(generate({1, 0, 10}), Error);
  EXPECT_THROW(generate({1, 3, 0}), Error);
}

TEST(Generate, FixtureFilesReload) {
  TempDir dir;
  const GeneratorParams params{3, 4, 25};
  const auto f = generate(params);
  write_fixture(f, params, dir.path());
  EXPECT_EQ(serialize_catalog(load_catalog(dir.path() / "catalog.json")), serialize_catalog(f.catalog));
  EXPECT_EQ(load_returns(dir.path() / "returns.json"), f.returns);
  const auto doc = parse_json(read_file(dir.path() / "returns.json"), "returns");
  EXPECT_EQ(doc["generator"]["algorithm"], kGeneratorAlgorithm);
  EXPECT_EQ(doc["generator"]["seed"], 3);
}

TEST(ReturnsDocument, BareArrayAndValidation) {
  const auto doc = nlohmann::json::parse(R"([{"return_id":"r","product_id":"p","reason":"defective",
      "cosmetic_grade":1,"functional_grade":2,"completeness_grade":3,"age_months":4,"notes":""}])");
  EXPECT_EQ(parse_returns(doc).size(), 1u);
  auto bad = doc;
  bad[0]["functional_grade"] = 7;
  EXPECT_THROW(parse_returns(bad), Error);
  EXPECT_THROW(parse_returns(nlohmann::json::object()), Error);
}

TEST(Pipeline, EmptyStream) {
  const auto f = generate({1, 3, 1});
  const auto r = run_pipeline(f.catalog, {}, default_rules(), cbr::CaseBase{}, true);
  EXPECT_EQ(r.report.total_returns, 0);
  EXPECT_FALSE(r.report.recovery_rate.has_value());
  EXPECT_TRUE(r.log.empty());
}

TEST(Pipeline, RecoveryRateMatchesLogRecount) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto f = generate({seed, 6, 60});
    const auto r = run_pipeline(f.catalog, f.returns, default_rules(), cbr::CaseBase{}, true);
    ASSERT_EQ(r.log.size(), 60u);
    int disposed = 0;
    for (const auto& e : r.log) disposed += e.chosen == Disposition::dispose;
    EXPECT_DOUBLE_EQ(*r.report.recovery_rate, 1.0 - disposed / 60.0);
    EXPECT_TRUE(runtime::check_conformance([&] {
                  std::vector<runtime::AclMessage> msgs;
                  std::istringstream in(r.trace_jsonl);
                  for (std::string line; std::getline(in, line);) {
                    msgs.push_back(nlohmann::json::parse(line).get<runtime::AclMessage>());
                  }
                  return msgs;
                }())
                    .empty());
  }
}

TEST(Pipeline, WithoutAutoAcceptNothingIsDecided) {
  const auto f = generate({2, 4, 20});
  const auto r = run_pipeline(f.catalog, f.returns, default_rules(), cbr::CaseBase{}, false);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.cases.size(), 0u);
  for (const auto& o : r.outcomes) {
    EXPECT_FALSE(o.decided.has_value());
    EXPECT_EQ(o.rationale, "rule-based escalation");
  }
}

// A second pass over the same stream finds an exact precedent for every
// return.
TEST(Pipeline, SecondPassIsCaseBased) {
  for (std::uint64_t seed : {4u, 9u, 13u}) {
    const auto f = generate({seed, 5, 50});
    const auto first = run_pipeline(f.catalog, f.returns, default_rules(), cbr::CaseBase{}, true);
    const auto second = run_pipeline(f.catalog, f.returns, default_rules(), first.cases, true);
    int first_cb = 0, second_cb = 0;
    for (const auto& o : first.outcomes) first_cb += o.rationale == "case-based";
    for (const auto& o : second.outcomes) second_cb += o.rationale == "case-based";
    EXPECT_GE(second_cb, first_cb);
    EXPECT_EQ(second_cb, 50);
  }
}

// ---------------------------------------------------------------------------
// File driver and CLI

TEST(RunCommand, FailureRemovesOutputs) {
  TempDir dir;
  RunOptions o;
  o.catalog = dir.path() / "missing.json";
  o.returns = dir.path() / "returns.json";
  o.report = dir.path() / "report.json";
  write_file_atomic(o.report, "stale");
  std::ostringstream err;
  EXPECT_EQ(run_command(o, err), 1);
  EXPECT_FALSE(std::filesystem::exists(o.report));
  EXPECT_NE(err.str().find("IoError"), std::string::npos);
}

TEST(ReportCommand, TableAndJson) {
  TempDir dir;
  const auto f = generate({5, 3, 15});
  const auto r = run_pipeline(f.catalog, f.returns, default_rules(), cbr::CaseBase{}, true);
  write_file_atomic(dir.path() / "log.jsonl", serialize_decision_log(r.log));
  std::ostringstream out, err;
  ASSERT_EQ(report_command(dir.path() / "log.jsonl", ReportFormat::json, out, err), 0);
  EXPECT_EQ(out.str(), dump_document(r.report));
  std::ostringstream table;
  ASSERT_EQ(report_command(dir.path() / "log.jsonl", ReportFormat::table, table, err), 0);
  EXPECT_EQ(table.str(), render_table(r.report));
  EXPECT_EQ(report_command(dir.path() / "absent.jsonl", ReportFormat::json, out, err), 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("generate --seed 1 --products 0 --returns 5 --out /tmp/x"), 2);
  EXPECT_EQ(run_cli("run --catalog a.json"), 2);
  EXPECT_EQ(run_cli("report --log x --format xml"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Cli, PipelineErrorExitsOne) {
  TempDir dir;
  const auto d = dir.path().string();
  EXPECT_EQ(run_cli("run --catalog " + d + "/none.json --returns " + d + "/none.json --report " + d + "/r.json"), 1);
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "r.json"));
}

TEST(Cli, GenerateRunReportRoundTrip) {
  TempDir dir;
  const auto d = dir.path().string();
  ASSERT_EQ(run_cli("generate --seed 11 --products 4 --returns 30 --out " + d + "/fx"), 0);
  const auto base = "run --catalog " + d + "/fx/catalog.json --returns " + d + "/fx/returns.json --ruleset " +
                    (relife::testing::source_dir() / "config/ruleset.default.json").string() + " --auto-accept-top";
  ASSERT_EQ(run_cli(base + " --report " + d + "/a.json --trace " + d + "/a.trace --log " + d + "/a.log"), 0);
  ASSERT_EQ(run_cli(base + " --report " + d + "/b.json --trace " + d + "/b.trace --log " + d + "/b.log"), 0);
  EXPECT_EQ(read_file(dir.path() / "a.json"), read_file(dir.path() / "b.json"));
  EXPECT_EQ(read_file(dir.path() / "a.trace"), read_file(dir.path() / "b.trace"));
  EXPECT_EQ(read_file(dir.path() / "a.log"), read_file(dir.path() / "b.log"));
  const auto report = parse_json(read_file(dir.path() / "a.json"), "report");
  EXPECT_EQ(report["total_returns"], 30);
  EXPECT_EQ(run_cli("report --log " + d + "/a.log --format json"), 0);
}

TEST(Cli, CasesFileIsWrittenBack) {
  TempDir dir;
  const auto d = dir.path().string();
  ASSERT_EQ(run_cli("generate --seed 2 --products 3 --returns 20 --out " + d), 0);
  const auto args = "run --catalog " + d + "/catalog.json --returns " + d + "/returns.json --cases " + d +
                    "/cases.json --report " + d + "/r.json --auto-accept-top";
  ASSERT_EQ(run_cli(args), 0);
  const auto after_first = cbr::load_case_base(dir.path() / "cases.json").size();
  EXPECT_GT(after_first, 0u);
  ASSERT_EQ(run_cli(args), 0);
  EXPECT_GE(cbr::load_case_base(dir.path() / "cases.json").size(), after_first);
}

}  // namespace
}  // namespace relife::scenario
