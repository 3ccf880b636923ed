#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/agents.hpp"
#include "relife/cbr.hpp"
#include "relife/clock.hpp"
#include "relife/plm_store.hpp"
#include "relife/rules.hpp"
#include "relife/runtime.hpp"

namespace relife {

inline constexpr const char* kCaseBasedPath = "case-based";
inline constexpr const char* kEscalationPath = "rule-based escalation";

struct SpecialistSolutions {
  std::vector<agents::RecoverySolution> recovery;
  std::vector<agents::RedesignAdvice> redesign;
  std::optional<agents::DisposalPlan> disposal;
  /// Agent role -> performative of its answer; empty on the case-based path.
  std::map<std::string, std::string> replies;

  bool operator==(const SpecialistSolutions&) const = default;
};

struct Recommendation {
  std::string return_id;
  std::vector<agents::ScoredDisposition> ranked;
  std::vector<Disposition> feasible;
  std::vector<std::string> supporting_cases;
  SpecialistSolutions specialist_solutions;
  rules::ComplianceReport compliance;
  /// kCaseBasedPath or kEscalationPath.
  std::string rationale;
  std::optional<std::string> conversation_id;
};

void to_json(nlohmann::json& j, const Recommendation& r);

struct PlatformConfig {
  cbr::RetrievalParams retrieval;
  std::size_t step_budget = 10000;
  agents::RedesignSettings redesign;
};

class Platform;

/// The orchestrating agent: classifies returns from its case base and asks
/// the specialists when its own knowledge has no usable precedent.
class InspectAgent {
 public:
  explicit InspectAgent(Platform& platform) : platform_(platform) {}

  /// featurize -> retrieve -> (adapt | escalate) -> gate -> score.
  /// Throws ValidationFailed, UnknownProduct, BudgetExhausted,
  /// SpecialistTimeout.
  Recommendation evaluate(const ReturnedItem& item);

  /// Score breakdown of one disposition for an evaluated return; touches no
  /// state. Throws NoSession, InfeasibleChoice.
  agents::ScoredDisposition what_if(const std::string& return_id, Disposition d) const;

  /// Retains the episode as a case, appends to the decision log and moves the
  /// product to recovery (or disposal). Throws NoSession, InfeasibleChoice,
  /// AlreadyResolved.
  DecisionLogEntry confirm(const std::string& return_id, Disposition chosen);

  const Recommendation* recommendation(const std::string& return_id) const;

  void handle(const runtime::AclMessage& msg, runtime::AgentContext& ctx);

 private:
  struct Evaluation {
    ReturnedItem item;
    cbr::FeatureVector features;
    agents::CaseSupport support;
    Recommendation recommendation;
    bool decided = false;
  };

  SpecialistSolutions escalate(const ReturnedItem& item, const ProductRecord& product,
                               std::string& conversation_id);

  Platform& platform_;
  std::map<std::string, Evaluation> evaluations_;
  // conversation id -> replier name -> terminal reply
  std::map<std::string, std::map<std::string, runtime::AclMessage>> replies_;
};

/// Owns the stores and the agent system with the four agents registered in
/// the order inspect, recover, redesign, disposal.
class Platform {
 public:
  Platform(Catalog catalog, cbr::CaseBase cases, rules::RuleSet rules, DecisionLog log,
           std::unique_ptr<Clock> clock, PlatformConfig config = {});
  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  InspectAgent& inspect() { return inspect_agent_; }
  const InspectAgent& inspect() const { return inspect_agent_; }

  const Catalog& catalog() const { return catalog_; }
  const cbr::CaseBase& cases() const { return cases_; }
  const rules::RuleSet& ruleset() const { return rules_; }
  const DecisionLog& log() const { return log_; }
  const PlatformConfig& config() const { return config_; }
  runtime::AgentSystem& system() { return system_; }
  const runtime::AgentSystem& system() const { return system_; }

  void record_outcome(const std::string& case_id, cbr::Outcome outcome);

  const runtime::AgentId& inspect_id() const { return inspect_id_; }
  const runtime::AgentId& recover_id() const { return recover_id_; }
  const runtime::AgentId& redesign_id() const { return redesign_id_; }
  const runtime::AgentId& disposal_id() const { return disposal_id_; }

 private:
  friend class InspectAgent;

  Catalog catalog_;
  cbr::CaseBase cases_;
  rules::RuleSet rules_;
  DecisionLog log_;
  std::unique_ptr<Clock> clock_;
  PlatformConfig config_;

  runtime::AgentSystem system_;
  runtime::AgentId inspect_id_{"inspect", runtime::AgentRole::inspect};
  runtime::AgentId recover_id_{"recover", runtime::AgentRole::recover};
  runtime::AgentId redesign_id_{"redesign", runtime::AgentRole::redesign};
  runtime::AgentId disposal_id_{"disposal", runtime::AgentRole::disposal};

  InspectAgent inspect_agent_;
  agents::RecoverAgent recover_agent_;
  agents::RedesignAgent redesign_agent_;
  agents::DisposalAgent disposal_agent_;
};

}  // namespace relife
