// relife: batch driver and HTTP service for returned-product disposition.
//
//   relife generate --seed N --products P --returns R --out DIR
//   relife run --catalog F --returns F --report F [--ruleset F] [--cases F]
//              [--trace F] [--log F] [--auto-accept-top]
//   relife report --log F [--format table|json]
//   relife serve [--config F]
//
// Exit codes: 0 success, 1 pipeline error, 2 usage error.

#include <cstdint>
#include <iostream>

#include "CLI11.hpp"
#include "relife/scenario.hpp"
#include "relife/service.hpp"

namespace {

constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Returned-product disposition platform"};
  app.require_subcommand(1);

  relife::scenario::GeneratorParams gen;
  std::string out_dir;
  auto* generate = app.add_subcommand("generate", "Write a deterministic synthetic catalog and return stream");
  generate->add_option("--seed", gen.seed, "PRNG seed")->required();
  generate->add_option("--products", gen.products, "Number of products")->required()->check(CLI::PositiveNumber);
  generate->add_option("--returns", gen.returns, "Number of returns")->required()->check(CLI::PositiveNumber);
  generate->add_option("--out", out_dir, "Output directory")->required();

  relife::scenario::RunOptions run_opts;
  std::string ruleset, cases, trace, log;
  auto* run = app.add_subcommand("run", "Replay a return stream through the full pipeline");
  run->add_option("--catalog", run_opts.catalog, "Catalog document")->required();
  run->add_option("--returns", run_opts.returns, "Returns document")->required();
  run->add_option("--ruleset", ruleset, "Ruleset document (built-in defaults when omitted)");
  run->add_option("--cases", cases, "Case base, loaded if present and written back");
  run->add_option("--report", run_opts.report, "Sustainability report output")->required();
  run->add_option("--trace", trace, "ACL message trace output (JSON lines)");
  run->add_option("--log", log, "Decision log output (JSON lines)");
  run->add_flag("--auto-accept-top", run_opts.auto_accept_top, "Confirm the rank-1 disposition of every return");

  std::string report_log;
  std::string format = "table";
  auto* report = app.add_subcommand("report", "Recompute the sustainability report from a decision log");
  report->add_option("--log", report_log, "Decision log")->required();
  report->add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json"}));

  std::string config_path;
  auto* serve = app.add_subcommand("serve", "Run the HTTP decision service");
  serve->add_option("--config", config_path, "Service config (default $RELIFE_CONFIG or config/service.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (generate->parsed()) {
    try {
      const auto fixture = relife::scenario::generate(gen);
      relife::scenario::write_fixture(fixture, gen, out_dir);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "relife generate: " << e.what() << "\n";
      return 1;
    }
  }
  if (run->parsed()) {
    if (!ruleset.empty()) run_opts.ruleset = ruleset;
    if (!cases.empty()) run_opts.cases = cases;
    if (!trace.empty()) run_opts.trace = trace;
    if (!log.empty()) run_opts.log = log;
    return relife::scenario::run_command(run_opts, std::cerr);
  }
  if (report->parsed()) {
    const auto fmt = format == "json" ? relife::scenario::ReportFormat::json
                                      : relife::scenario::ReportFormat::table;
    return relife::scenario::report_command(report_log, fmt, std::cout, std::cerr);
  }
  if (serve->parsed()) {
    try {
      const auto path = config_path.empty() ? relife::service_config_path() : std::filesystem::path(config_path);
      return relife::serve(relife::load_service_config(path));
    } catch (const std::exception& e) {
      std::cerr << "relife serve: " << e.what() << "\n";
      return 1;
    }
  }
  return kUsageError;
}
