#include "relife/platform.hpp"

#include <algorithm>

namespace relife {

using runtime::AclMessage;
using runtime::AgentContext;
using runtime::Performative;
using runtime::Topic;

void to_json(nlohmann::json& j, const Recommendation& r) {
  const auto& s = r.specialist_solutions;
  j = {{"return_id", r.return_id},
       {"ranked", r.ranked},
       {"feasible", r.feasible},
       {"supporting_cases", r.supporting_cases},
       {"specialist_solutions",
        {{"recovery", s.recovery},
         {"redesign", s.redesign},
         {"disposal", s.disposal ? nlohmann::json(*s.disposal) : nlohmann::json(nullptr)},
         {"replies", s.replies}}},
       {"compliance", r.compliance},
       {"rationale", r.rationale},
       {"conversation_id",
        r.conversation_id ? nlohmann::json(*r.conversation_id) : nlohmann::json(nullptr)}};
}

// ---------------------------------------------------------------------------

Recommendation InspectAgent::evaluate(const ReturnedItem& item) {
  validate(item);
  auto& p = platform_;
  const auto* product = p.catalog_.find_product(item.product_id);
  if (product == nullptr) {
    throw Error(ErrorCode::UnknownProduct, "return '" + item.return_id + "' names unknown product '" +
                                               item.product_id + "'",
                item.product_id);
  }
  if (auto it = evaluations_.find(item.return_id); it != evaluations_.end() && it->second.decided) {
    throw Error(ErrorCode::AlreadyResolved, "return '" + item.return_id + "' is already decided",
                item.return_id);
  }
  const auto& materials = p.catalog_.materials();

  Evaluation ev;
  ev.item = item;
  ev.features = cbr::featurize(item, *product, materials);
  const auto hits = p.cases_.retrieve(ev.features, p.config_.retrieval);

  Recommendation& rec = ev.recommendation;
  rec.return_id = item.return_id;
  for (const auto& h : hits) rec.supporting_cases.push_back(h.c.case_id);

  if (!hits.empty() && hits.front().c.outcome != cbr::Outcome::failure) {
    const auto adapted = cbr::adapt(hits.front().c, ev.features);
    ev.support[adapted] = hits.front().similarity;
    rec.rationale = kCaseBasedPath;
  } else {
    std::string conversation;
    rec.specialist_solutions = escalate(item, *product, conversation);
    rec.conversation_id = conversation;
    rec.rationale = kEscalationPath;
  }

  const auto feasible = agents::feasible_dispositions(item, *product, materials);
  rec.feasible.assign(feasible.begin(), feasible.end());
  rec.ranked = agents::score_dispositions(feasible, item, *product, materials, p.rules_, ev.support);
  rec.compliance = rules::evaluate_rules(*product, materials, p.rules_);

  evaluations_[item.return_id] = ev;
  return rec;
}

SpecialistSolutions InspectAgent::escalate(const ReturnedItem& item, const ProductRecord& product,
                                           std::string& conversation_id) {
  auto& p = platform_;
  conversation_id = p.system_.broadcast_request(
      p.inspect_id_, Topic::solution_request, agents::make_solution_request(item, product),
      {p.recover_id_, p.redesign_id_, p.disposal_id_});
  p.system_.run_until_idle(p.config_.step_budget);

  const auto* conv = p.system_.conversation(conversation_id);
  const auto pending = conv->pending();
  if (!pending.empty()) {
    std::string who;
    for (const auto& name : pending) who += (who.empty() ? "" : ", ") + name;
    replies_.erase(conversation_id);
    throw Error(ErrorCode::SpecialistTimeout, "no reply from " + who + " in conversation " +
                                                  conversation_id,
                who);
  }

  SpecialistSolutions out;
  auto replies = std::move(replies_[conversation_id]);
  replies_.erase(conversation_id);
  for (const auto& [name, msg] : replies) {
    out.replies[std::string(runtime::to_string(msg.sender.role))] =
        std::string(runtime::to_string(msg.performative));
    if (msg.performative != Performative::inform) continue;
    switch (msg.sender.role) {
      case runtime::AgentRole::recover:
        out.recovery = msg.content.at("solutions").get<std::vector<agents::RecoverySolution>>();
        break;
      case runtime::AgentRole::redesign:
        out.redesign = msg.content.at("advice").get<std::vector<agents::RedesignAdvice>>();
        break;
      case runtime::AgentRole::disposal:
        out.disposal = msg.content.at("plan").get<agents::DisposalPlan>();
        break;
      case runtime::AgentRole::inspect:
        break;
    }
  }
  return out;
}

void InspectAgent::handle(const AclMessage& msg, AgentContext& ctx) {
  if (msg.performative == Performative::request) {
    ctx.reply(msg, Performative::not_understood, Topic::solution_reply,
              {{"reason", "the inspect agent takes no requests"}});
    return;
  }
  if (runtime::is_terminal_reply(msg.performative)) {
    replies_[msg.conversation_id][msg.sender.name] = msg;
  }
}

const Recommendation* InspectAgent::recommendation(const std::string& return_id) const {
  auto it = evaluations_.find(return_id);
  return it == evaluations_.end() ? nullptr : &it->second.recommendation;
}

agents::ScoredDisposition InspectAgent::what_if(const std::string& return_id, Disposition d) const {
  auto it = evaluations_.find(return_id);
  if (it == evaluations_.end()) {
    throw Error(ErrorCode::NoSession, "no evaluation for return '" + return_id + "'", return_id);
  }
  const auto& ev = it->second;
  const auto& feasible = ev.recommendation.feasible;
  if (std::find(feasible.begin(), feasible.end(), d) == feasible.end()) {
    throw Error(ErrorCode::InfeasibleChoice,
                std::string(to_string(d)) + " is not feasible for return '" + return_id + "'",
                std::string(to_string(d)));
  }
  const auto& p = platform_;
  const auto& product = p.catalog_.get_product(ev.item.product_id);
  return agents::score_disposition(d, ev.item, product, p.catalog_.materials(), p.rules_, ev.support);
}

DecisionLogEntry InspectAgent::confirm(const std::string& return_id, Disposition chosen) {
  auto it = evaluations_.find(return_id);
  if (it == evaluations_.end()) {
    throw Error(ErrorCode::NoSession, "no evaluation for return '" + return_id + "'", return_id);
  }
  auto& ev = it->second;
  if (ev.decided) {
    throw Error(ErrorCode::AlreadyResolved, "return '" + return_id + "' is already decided", return_id);
  }
  const auto& ranked = ev.recommendation.ranked;
  auto pos = std::find_if(ranked.begin(), ranked.end(),
                          [&](const auto& s) { return s.disposition == chosen; });
  if (pos == ranked.end()) {
    throw Error(ErrorCode::InfeasibleChoice,
                std::string(to_string(chosen)) + " is not feasible for return '" + return_id + "'",
                std::string(to_string(chosen)));
  }

  auto& p = platform_;
  const auto& product = p.catalog_.get_product(ev.item.product_id);
  const auto& materials = p.catalog_.materials();
  const auto now = p.clock_->now();

  DecisionLogEntry entry;
  entry.sequence = p.log_.next_sequence();
  entry.timestamp = now;
  entry.return_id = return_id;
  entry.product_id = ev.item.product_id;
  entry.chosen = chosen;
  entry.recommendation_rank_of_chosen = static_cast<int>(pos - ranked.begin()) + 1;
  entry.env_score_of_chosen = pos->env_score;
  if (chosen == Disposition::recycle || chosen == Disposition::dispose) {
    entry.landfill_mass_g =
        std::max(0.0, total_mass(product, materials) - recyclable_mass(product, materials));
  }
  p.log_.append(entry);

  cbr::Case episode;
  episode.case_id = p.cases_.next_case_id();
  episode.problem = ev.features;
  episode.solution = chosen;
  episode.env_score_observed = pos->env_score;
  episode.created_at = now;
  p.cases_.retain(std::move(episode), p.config_.retrieval.weights);

  const auto target =
      chosen == Disposition::dispose ? LifecycleStage::disposal : LifecycleStage::recovery;
  // A record already at the terminal disposal stage has no path onward and
  // keeps its stage.
  if (auto path = stage_path(product.lifecycle_stage, target); path && !path->empty()) {
    ProductRecord moved = product;
    for (auto stage : *path) moved = advance_stage(std::move(moved), stage);
    p.catalog_.upsert_product(std::move(moved));
  }

  ev.decided = true;
  return entry;
}

// ---------------------------------------------------------------------------

Platform::Platform(Catalog catalog, cbr::CaseBase cases, rules::RuleSet rules, DecisionLog log,
                   std::unique_ptr<Clock> clock, PlatformConfig config)
    : catalog_(std::move(catalog)),
      cases_(std::move(cases)),
      rules_(std::move(rules)),
      log_(std::move(log)),
      clock_(clock ? std::move(clock) : std::make_unique<LogicalClock>()),
      config_(std::move(config)),
      inspect_agent_(*this),
      recover_agent_(catalog_),
      redesign_agent_(catalog_, config_.redesign),
      disposal_agent_(catalog_) {
  system_.register_agent(inspect_id_,
                         [this](const AclMessage& m, AgentContext& c) { inspect_agent_.handle(m, c); });
  system_.register_agent(recover_id_, recover_agent_.handler());
  system_.register_agent(redesign_id_, redesign_agent_.handler());
  system_.register_agent(disposal_id_, disposal_agent_.handler());
}

void Platform::record_outcome(const std::string& case_id, cbr::Outcome outcome) {
  cases_.record_outcome(case_id, outcome);
}

}  // namespace relife
