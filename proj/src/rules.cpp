#include "relife/rules.hpp"

#include <algorithm>
#include <cmath>

#include "relife/io.hpp"

namespace relife::rules {

namespace {

constexpr std::array<std::string_view, 5> kSubjectNames = {
    "hazard_index", "recyclability_index", "recycled_content_fraction", "manual_pages",
    "total_mass"};

}  // namespace

std::string_view to_string(Subject s) { return kSubjectNames.at(static_cast<std::size_t>(s)); }

std::string_view to_string(Comparator c) { return c == Comparator::at_most ? "<=" : ">="; }

Subject parse_subject(std::string_view s) {
  for (std::size_t i = 0; i < kSubjectNames.size(); ++i) {
    if (kSubjectNames[i] == s) return static_cast<Subject>(i);
  }
  throw Error(ErrorCode::UnknownSubject, "rule subject '" + std::string(s) + "' is not computable",
              std::string(s));
}

Comparator parse_comparator(std::string_view s) {
  if (s == "<=" || s == "≤") return Comparator::at_most;
  if (s == ">=" || s == "≥") return Comparator::at_least;
  throw Error(ErrorCode::ValidationFailed, "unknown comparator '" + std::string(s) + "'");
}

DispositionTable default_env_base() {
  return {{Disposition::reuse, 1.0},    {Disposition::resale, 0.95},
          {Disposition::repair, 0.85},  {Disposition::redesign, 0.70},
          {Disposition::recycle, 0.60}, {Disposition::dispose, 0.10}};
}

DispositionTable default_econ_base() {
  return {{Disposition::resale, 0.9},  {Disposition::reuse, 0.8},
          {Disposition::repair, 0.5},  {Disposition::recycle, 0.3},
          {Disposition::redesign, 0.2}, {Disposition::dispose, 0.0}};
}

double observe(Subject subject, const ProductRecord& product, const MaterialTable& materials) {
  switch (subject) {
    case Subject::hazard_index: return hazard_index(product, materials);
    case Subject::recyclability_index: return recyclability_index(product, materials);
    case Subject::recycled_content_fraction: return recycled_content_fraction(product, materials);
    case Subject::manual_pages: return static_cast<double>(product.manual_pages);
    case Subject::total_mass: return total_mass(product, materials);
  }
  throw Error(ErrorCode::UnknownSubject, "unhandled rule subject");
}

ComplianceReport evaluate_rules(const ProductRecord& product, const MaterialTable& materials,
                                const RuleSet& rules) {
  ComplianceReport report;
  double penalty = 0.0;
  for (const auto& rule : rules.rules) {
    const double observed = observe(rule.subject, product, materials);
    const bool passed = rule.comparator == Comparator::at_most ? observed <= rule.threshold
                                                               : observed >= rule.threshold;
    if (!passed) penalty += rule.penalty;
    report.compliant = report.compliant && passed;
    report.evaluated.push_back({rule.rule_id, passed, observed});
  }
  report.total_penalty = std::min(1.0, penalty);
  return report;
}

double env_score(const ProductRecord& product, const MaterialTable& materials, Disposition d,
                 const RuleSet& rules) {
  double modifier = 1.0;
  if (d == Disposition::recycle) modifier = recyclability_index(product, materials);
  if (d == Disposition::dispose) modifier = 1.0 - hazard_index(product, materials);
  const double base = rules.env_base.at(d) * modifier;
  const double penalty = evaluate_rules(product, materials, rules).total_penalty;
  return std::clamp(base - penalty, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ValidationFailed, what); }

void read_table(const nlohmann::json& doc, const char* key, DispositionTable& table) {
  if (!doc.contains(key)) return;
  const auto& j = doc.at(key);
  if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string("ruleset.") + key + ": expected an object");
  for (const auto& [name, value] : j.items()) {
    const auto d = parse_disposition(name);
    const auto v = decode<double>(value, std::string("ruleset.") + key + "." + name);
    if (!(v >= 0.0 && v <= 1.0)) bad(std::string("ruleset.") + key + "." + name + " outside [0,1]");
    table[d] = v;
  }
}

EnvRule read_rule(const nlohmann::json& j) {
  EnvRule r;
  try {
    j.at("rule_id").get_to(r.rule_id);
    r.description = j.value("description", std::string{});
    r.subject = parse_subject(j.at("subject").get<std::string>());
    r.comparator = parse_comparator(j.at("comparator").get<std::string>());
    j.at("threshold").get_to(r.threshold);
    j.at("penalty").get_to(r.penalty);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("ruleset.rules: ") + e.what());
  }
  if (!std::isfinite(r.threshold)) bad("rule '" + r.rule_id + "': threshold must be finite");
  if (!(r.penalty >= 0.0 && r.penalty <= 1.0)) bad("rule '" + r.rule_id + "': penalty outside [0,1]");
  return r;
}

}  // namespace

RuleSet ruleset_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "ruleset: expected a JSON object");
  RuleSet rs;
  if (doc.contains("rules")) {
    if (!doc.at("rules").is_array()) throw Error(ErrorCode::ParseError, "ruleset.rules: expected an array");
    for (const auto& jr : doc.at("rules")) rs.rules.push_back(read_rule(jr));
  }
  read_table(doc, "env_base", rs.env_base);
  read_table(doc, "econ_base", rs.econ_base);
  if (doc.contains("score_weights")) {
    const auto& w = doc.at("score_weights");
    auto weight = [&](const char* key) {
      if (!w.is_object() || !w.contains(key)) {
        throw Error(ErrorCode::ParseError, std::string("ruleset.score_weights: missing '") + key + "'");
      }
      return decode<double>(w.at(key), std::string("ruleset.score_weights.") + key);
    };
    rs.score_weights.env = weight("env");
    rs.score_weights.econ = weight("econ");
    rs.score_weights.cases = weight("case");
  }
  const auto& sw = rs.score_weights;
  if (sw.env < 0.0 || sw.econ < 0.0 || sw.cases < 0.0 || std::fabs(sw.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidWeights,
                "score_weights must be non-negative and sum to 1 (got " +
                    nlohmann::json(sw.sum()).dump() + ")");
  }
  return rs;
}

nlohmann::json ruleset_to_json(const RuleSet& rs) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : rs.rules) {
    rules.push_back({{"rule_id", r.rule_id},
                     {"description", r.description},
                     {"subject", to_string(r.subject)},
                     {"comparator", to_string(r.comparator)},
                     {"threshold", r.threshold},
                     {"penalty", r.penalty}});
  }
  auto table = [](const DispositionTable& t) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [d, v] : t) j[std::string(to_string(d))] = v;
    return j;
  };
  return {{"rules", rules},
          {"env_base", table(rs.env_base)},
          {"econ_base", table(rs.econ_base)},
          {"score_weights",
           {{"env", rs.score_weights.env},
            {"econ", rs.score_weights.econ},
            {"case", rs.score_weights.cases}}}};
}

RuleSet load_ruleset(const std::filesystem::path& path) {
  return ruleset_from_json(parse_json(read_file(path), path.string()));
}

void to_json(nlohmann::json& j, const ComplianceReport& r) {
  nlohmann::json evaluated = nlohmann::json::array();
  for (const auto& e : r.evaluated) {
    evaluated.push_back({{"rule_id", e.rule_id}, {"passed", e.passed}, {"observed", e.observed}});
  }
  j = {{"evaluated", evaluated}, {"total_penalty", r.total_penalty}, {"compliant", r.compliant}};
}

}  // namespace relife::rules
