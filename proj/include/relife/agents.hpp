#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/domain.hpp"
#include "relife/plm_store.hpp"
#include "relife/rules.hpp"
#include "relife/runtime.hpp"

namespace relife::agents {

// ---------------------------------------------------------------------------
// Specialist payloads

enum class RecoveryKind { repair_steps, part_reuse, material_substitution };

struct RecoverySolution {
  RecoveryKind kind = RecoveryKind::repair_steps;
  std::string detail;
  std::vector<std::string> affected_components;
  /// Present iff kind == material_substitution.
  std::optional<std::string> substitute_material;

  bool operator==(const RecoverySolution&) const = default;
};

enum class RedesignKind {
  manual_redesign,
  recycled_content_increase,
  mass_reduction,
  disassembly_improvement
};

struct RedesignAdvice {
  RedesignKind kind = RedesignKind::manual_redesign;
  std::string detail;
  rules::Subject target_metric = rules::Subject::manual_pages;
  double suggested_delta = 0.0;

  bool operator==(const RedesignAdvice&) const = default;
};

struct LabelingAction {
  std::string material_id;
  std::string label_text;

  bool operator==(const LabelingAction&) const = default;
};

struct DisposalPlan {
  std::vector<std::string> reclaimable_components;
  std::vector<LabelingAction> labeling_actions;
  double landfill_mass_g = 0.0;

  bool operator==(const DisposalPlan&) const = default;
};

std::string_view to_string(RecoveryKind k);
std::string_view to_string(RedesignKind k);

void to_json(nlohmann::json& j, const RecoverySolution& v);
void from_json(const nlohmann::json& j, RecoverySolution& v);
void to_json(nlohmann::json& j, const RedesignAdvice& v);
void from_json(const nlohmann::json& j, RedesignAdvice& v);
void to_json(nlohmann::json& j, const DisposalPlan& v);
void from_json(const nlohmann::json& j, DisposalPlan& v);

struct RedesignSettings {
  double disassembly_threshold_s = 600.0;
  double recycled_content_target = 0.5;
};

/// Repair steps for replaceable parts of non-functional units, part reuse
/// for replaceable parts of reasonably complete units, and lower-hazard
/// same-category substitutes for every high-hazard material.
std::vector<RecoverySolution> recover_solutions(const ReturnedItem& item,
                                                const ProductRecord& product,
                                                const Catalog& catalog);

std::vector<RedesignAdvice> redesign_advice(const ReturnedItem& item, const ProductRecord& product,
                                            const Catalog& catalog,
                                            const RedesignSettings& settings = {});

/// Partitions the product mass into reclaimable components, recyclable
/// material outside them, and landfill.
DisposalPlan disposal_plan(const ReturnedItem& item, const ProductRecord& product,
                           const MaterialTable& materials);

/// Median total mass of the catalog products sharing `category`.
std::optional<double> category_median_mass(const Catalog& catalog, ProductCategory category);

// ---------------------------------------------------------------------------
// Disposition gates and scoring

std::set<Disposition> feasible_dispositions(const ReturnedItem& item, const ProductRecord& product,
                                            const MaterialTable& materials);

struct ScoredDisposition {
  Disposition disposition = Disposition::dispose;
  double total_score = 0.0;
  // Weighted contributions; they sum to total_score.
  double env_component = 0.0;
  double econ_component = 0.0;
  double case_component = 0.0;
  /// Unweighted environmental score of the disposition.
  double env_score = 0.0;

  bool operator==(const ScoredDisposition&) const = default;
};

void to_json(nlohmann::json& j, const ScoredDisposition& v);
void from_json(const nlohmann::json& j, ScoredDisposition& v);

using CaseSupport = std::map<Disposition, double>;

double econ_score(Disposition d, const ReturnedItem& item, const rules::RuleSet& rules);

ScoredDisposition score_disposition(Disposition d, const ReturnedItem& item,
                                    const ProductRecord& product, const MaterialTable& materials,
                                    const rules::RuleSet& rules, const CaseSupport& case_support);

/// Scores every feasible disposition and sorts by total descending, ties by
/// the waste hierarchy. Weights are normalized by their sum. Throws
/// EmptyFeasibleSet.
std::vector<ScoredDisposition> score_dispositions(const std::set<Disposition>& feasible,
                                                  const ReturnedItem& item,
                                                  const ProductRecord& product,
                                                  const MaterialTable& materials,
                                                  const rules::RuleSet& rules,
                                                  const CaseSupport& case_support);

// ---------------------------------------------------------------------------
// Specialist agents. Stateless over requests: everything they know comes
// from the request content and a read-only view of the catalog.

/// Request content understood by the specialists.
nlohmann::json make_solution_request(const ReturnedItem& item, const ProductRecord& product);

class RecoverAgent {
 public:
  explicit RecoverAgent(const Catalog& catalog) : catalog_(catalog) {}
  void handle(const runtime::AclMessage& msg, runtime::AgentContext& ctx) const;
  runtime::Handler handler() const;

 private:
  const Catalog& catalog_;
};

class RedesignAgent {
 public:
  RedesignAgent(const Catalog& catalog, RedesignSettings settings)
      : catalog_(catalog), settings_(settings) {}
  void handle(const runtime::AclMessage& msg, runtime::AgentContext& ctx) const;
  runtime::Handler handler() const;

 private:
  const Catalog& catalog_;
  RedesignSettings settings_;
};

class DisposalAgent {
 public:
  explicit DisposalAgent(const Catalog& catalog) : catalog_(catalog) {}
  void handle(const runtime::AclMessage& msg, runtime::AgentContext& ctx) const;
  runtime::Handler handler() const;

 private:
  const Catalog& catalog_;
};

}  // namespace relife::agents
