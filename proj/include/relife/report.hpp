#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/plm_store.hpp"

namespace relife {

struct SustainabilityReport {
  std::optional<std::string> window_from;
  std::optional<std::string> window_to;
  int total_returns = 0;
  /// Absent when nothing was decided.
  std::optional<double> recovery_rate;
  double landfill_mass_g = 0.0;
  std::optional<double> mean_env_score;
  std::map<Disposition, int> per_disposition_counts;

  bool operator==(const SustainabilityReport&) const = default;
};

/// Pure fold over the decision log. Entries outside [from, to] (inclusive,
/// compared as ISO-8601 text) are skipped. The reported window is the
/// requested bounds, or the first/last timestamps seen when unbounded.
SustainabilityReport compute_report(const std::vector<DecisionLogEntry>& entries,
                                    const std::optional<std::string>& from = std::nullopt,
                                    const std::optional<std::string>& to = std::nullopt);

void to_json(nlohmann::json& j, const SustainabilityReport& r);

/// Fixed-width table: a header, one row per disposition, and summary lines.
std::string render_table(const SustainabilityReport& r);

}  // namespace relife
