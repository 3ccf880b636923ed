#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/cbr.hpp"
#include "relife/platform.hpp"
#include "relife/plm_store.hpp"
#include "relife/report.hpp"
#include "relife/rules.hpp"

namespace relife::scenario {

/// Name written into generated fixtures so a reader can reproduce them.
inline constexpr const char* kGeneratorAlgorithm = "mt19937_64";

struct GeneratorParams {
  std::uint64_t seed = 1;
  int products = 10;
  int returns = 100;
};

struct Fixture {
  Catalog catalog;
  std::vector<ReturnedItem> returns;
};

/// Deterministic synthetic catalog and return stream. Draws come from
/// std::mt19937_64 seeded with `seed`; integers in [lo, hi] use
/// lo + engine() % (hi - lo + 1) and reals use the top 53 bits, so output is
/// identical across standard libraries. About a third of the returns repeat
/// an earlier return's product and condition under a fresh id.
Fixture generate(const GeneratorParams& params);

/// Writes catalog.json and returns.json into `out_dir` (created if needed).
void write_fixture(const Fixture& fixture, const GeneratorParams& params,
                   const std::filesystem::path& out_dir);

/// Accepts either {"returns": [...]} or a bare array.
std::vector<ReturnedItem> parse_returns(const nlohmann::json& doc);
std::vector<ReturnedItem> load_returns(const std::filesystem::path& path);
nlohmann::json returns_document(const std::vector<ReturnedItem>& returns,
                                const std::optional<GeneratorParams>& params = std::nullopt);

struct ReturnOutcome {
  std::string return_id;
  std::string rationale;
  Disposition top = Disposition::dispose;
  std::optional<Disposition> decided;
};

struct RunResult {
  std::vector<ReturnOutcome> outcomes;
  SustainabilityReport report;
  std::vector<DecisionLogEntry> log;
  std::string trace_jsonl;
  cbr::CaseBase cases;
};

/// Evaluates every return in order through the platform and, when
/// `auto_accept_top` is set, confirms the rank-1 disposition.
RunResult run_pipeline(Catalog catalog, const std::vector<ReturnedItem>& returns, rules::RuleSet ruleset,
                       cbr::CaseBase cases, bool auto_accept_top, const PlatformConfig& config = {});

struct RunOptions {
  std::filesystem::path catalog;
  std::filesystem::path returns;
  std::optional<std::filesystem::path> ruleset;
  /// Loaded when the file exists; the updated case base is written back.
  std::optional<std::filesystem::path> cases;
  std::filesystem::path report;
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> log;
  bool auto_accept_top = false;
};

/// File-level driver for `relife run`. Returns 0 or 1; on failure every
/// output this call created is removed and a diagnostic goes to `err`.
int run_command(const RunOptions& options, std::ostream& err);

enum class ReportFormat { table, json };

/// Recomputes the report from a decision log file. Returns 0 or 1.
int report_command(const std::filesystem::path& log, ReportFormat format, std::ostream& out,
                   std::ostream& err);

}  // namespace relife::scenario
