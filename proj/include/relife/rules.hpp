#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/domain.hpp"

namespace relife::rules {

enum class Subject {
  hazard_index,
  recyclability_index,
  recycled_content_fraction,
  manual_pages,
  total_mass
};

enum class Comparator { at_most, at_least };

std::string_view to_string(Subject s);
std::string_view to_string(Comparator c);
/// Throws UnknownSubject.
Subject parse_subject(std::string_view s);
/// Accepts "<=", ">=", "≤", "≥".
Comparator parse_comparator(std::string_view s);

struct EnvRule {
  std::string rule_id;
  std::string description;
  Subject subject = Subject::hazard_index;
  Comparator comparator = Comparator::at_most;
  double threshold = 0.0;
  double penalty = 0.0;

  bool operator==(const EnvRule&) const = default;
};

struct ScoreWeights {
  double env = 0.6;
  double econ = 0.2;
  double cases = 0.2;

  double sum() const { return env + econ + cases; }
  ScoreWeights scaled(double c) const { return {env * c, econ * c, cases * c}; }
  bool operator==(const ScoreWeights&) const = default;
};

using DispositionTable = std::map<Disposition, double>;

/// Waste-hierarchy environmental bases.
DispositionTable default_env_base();
/// Revenue-ordered economic scores.
DispositionTable default_econ_base();

struct RuleSet {
  std::vector<EnvRule> rules;
  DispositionTable env_base = default_env_base();
  DispositionTable econ_base = default_econ_base();
  ScoreWeights score_weights;

  bool operator==(const RuleSet&) const = default;
};

struct RuleEvaluation {
  std::string rule_id;
  bool passed = true;
  double observed = 0.0;

  bool operator==(const RuleEvaluation&) const = default;
};

struct ComplianceReport {
  std::vector<RuleEvaluation> evaluated;
  double total_penalty = 0.0;
  bool compliant = true;
};

double observe(Subject subject, const ProductRecord& product, const MaterialTable& materials);

ComplianceReport evaluate_rules(const ProductRecord& product, const MaterialTable& materials,
                                const RuleSet& rules);

/// env_base[d] scaled by the disposition's material modifier, minus the
/// total compliance penalty, floored at zero.
double env_score(const ProductRecord& product, const MaterialTable& materials, Disposition d,
                 const RuleSet& rules);

/// Missing env_base/econ_base entries take the defaults. Throws ParseError,
/// UnknownSubject, InvalidWeights, ValidationFailed.
RuleSet ruleset_from_json(const nlohmann::json& doc);
nlohmann::json ruleset_to_json(const RuleSet& rules);
RuleSet load_ruleset(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const ComplianceReport& r);

}  // namespace relife::rules
