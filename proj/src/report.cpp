#include "relife/report.hpp"

#include <cstdio>

namespace relife {

SustainabilityReport compute_report(const std::vector<DecisionLogEntry>& entries,
                                    const std::optional<std::string>& from,
                                    const std::optional<std::string>& to) {
  SustainabilityReport r;
  for (auto d : kWasteHierarchy) r.per_disposition_counts[d] = 0;
  double env_sum = 0.0;
  std::optional<std::string> first, last;
  for (const auto& e : entries) {
    if (from && e.timestamp < *from) continue;
    if (to && e.timestamp > *to) continue;
    if (!first) first = e.timestamp;
    last = e.timestamp;
    r.total_returns += 1;
    r.per_disposition_counts[e.chosen] += 1;
    r.landfill_mass_g += e.landfill_mass_g;
    env_sum += e.env_score_of_chosen;
  }
  r.window_from = from ? from : first;
  r.window_to = to ? to : last;
  if (r.total_returns > 0) {
    const double decided = r.total_returns;
    r.recovery_rate = 1.0 - r.per_disposition_counts[Disposition::dispose] / decided;
    r.mean_env_score = env_sum / decided;
  }
  return r;
}

void to_json(nlohmann::json& j, const SustainabilityReport& r) {
  auto opt_s = [](const std::optional<std::string>& s) {
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
  };
  auto opt_d = [](const std::optional<double>& d) {
    return d ? nlohmann::json(*d) : nlohmann::json(nullptr);
  };
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [d, n] : r.per_disposition_counts) counts[std::string(to_string(d))] = n;
  j = {{"window", {{"from", opt_s(r.window_from)}, {"to", opt_s(r.window_to)}}},
       {"total_returns", r.total_returns},
       {"recovery_rate", opt_d(r.recovery_rate)},
       {"landfill_mass_g", r.landfill_mass_g},
       {"mean_env_score", opt_d(r.mean_env_score)},
       {"per_disposition_counts", counts}};
}

std::string render_table(const SustainabilityReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %8s %8s\n", "disposition", "count", "share");
  out += line;
  for (auto d : kWasteHierarchy) {
    const int n = r.per_disposition_counts.count(d) ? r.per_disposition_counts.at(d) : 0;
    const double share = r.total_returns > 0 ? static_cast<double>(n) / r.total_returns : 0.0;
    std::snprintf(line, sizeof line, "%-12s %8d %8.3f\n", std::string(to_string(d)).c_str(), n, share);
    out += line;
  }
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return std::string(buf);
  };
  std::snprintf(line, sizeof line, "total_returns:   %d\n", r.total_returns);
  out += line;
  out += "recovery_rate:   " + opt(r.recovery_rate) + "\n";
  std::snprintf(line, sizeof line, "landfill_mass_g: %.1f\n", r.landfill_mass_g);
  out += line;
  out += "mean_env_score:  " + opt(r.mean_env_score) + "\n";
  return out;
}

}  // namespace relife
