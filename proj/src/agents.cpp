#include "relife/agents.hpp"

#include <algorithm>
#include <cmath>

#include "relife/cbr.hpp"
#include "relife/io.hpp"

namespace relife::agents {

using runtime::AclMessage;
using runtime::AgentContext;
using runtime::Performative;
using runtime::Topic;

std::string_view to_string(RecoveryKind k) {
  switch (k) {
    case RecoveryKind::repair_steps: return "repair_steps";
    case RecoveryKind::part_reuse: return "part_reuse";
    case RecoveryKind::material_substitution: return "material_substitution";
  }
  return "repair_steps";
}

std::string_view to_string(RedesignKind k) {
  switch (k) {
    case RedesignKind::manual_redesign: return "manual_redesign";
    case RedesignKind::recycled_content_increase: return "recycled_content_increase";
    case RedesignKind::mass_reduction: return "mass_reduction";
    case RedesignKind::disassembly_improvement: return "disassembly_improvement";
  }
  return "manual_redesign";
}

namespace {

RecoveryKind parse_recovery_kind(std::string_view s) {
  for (auto k : {RecoveryKind::repair_steps, RecoveryKind::part_reuse,
                 RecoveryKind::material_substitution}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::ValidationFailed, "unknown recovery kind '" + std::string(s) + "'");
}

RedesignKind parse_redesign_kind(std::string_view s) {
  for (auto k : {RedesignKind::manual_redesign, RedesignKind::recycled_content_increase,
                 RedesignKind::mass_reduction, RedesignKind::disassembly_improvement}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::ValidationFailed, "unknown redesign kind '" + std::string(s) + "'");
}

std::string format_grams(double g) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f g", g);
  return buf;
}

}  // namespace

void to_json(nlohmann::json& j, const RecoverySolution& v) {
  j = {{"kind", to_string(v.kind)},
       {"detail", v.detail},
       {"affected_components", v.affected_components},
       {"substitute_material",
        v.substitute_material ? nlohmann::json(*v.substitute_material) : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, RecoverySolution& v) {
  v.kind = parse_recovery_kind(j.at("kind").get<std::string>());
  j.at("detail").get_to(v.detail);
  j.at("affected_components").get_to(v.affected_components);
  const auto& sub = j.at("substitute_material");
  v.substitute_material = sub.is_null() ? std::nullopt : std::optional<std::string>(sub.get<std::string>());
}

void to_json(nlohmann::json& j, const RedesignAdvice& v) {
  j = {{"kind", to_string(v.kind)},
       {"detail", v.detail},
       {"target_metric", rules::to_string(v.target_metric)},
       {"suggested_delta", v.suggested_delta}};
}

void from_json(const nlohmann::json& j, RedesignAdvice& v) {
  v.kind = parse_redesign_kind(j.at("kind").get<std::string>());
  j.at("detail").get_to(v.detail);
  v.target_metric = rules::parse_subject(j.at("target_metric").get<std::string>());
  j.at("suggested_delta").get_to(v.suggested_delta);
}

void to_json(nlohmann::json& j, const DisposalPlan& v) {
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : v.labeling_actions) {
    labels.push_back({{"material_id", l.material_id}, {"label_text", l.label_text}});
  }
  j = {{"reclaimable_components", v.reclaimable_components},
       {"labeling_actions", labels},
       {"landfill_mass_g", v.landfill_mass_g}};
}

void from_json(const nlohmann::json& j, DisposalPlan& v) {
  j.at("reclaimable_components").get_to(v.reclaimable_components);
  v.labeling_actions.clear();
  for (const auto& l : j.at("labeling_actions")) {
    v.labeling_actions.push_back({l.at("material_id").get<std::string>(),
                                  l.at("label_text").get<std::string>()});
  }
  j.at("landfill_mass_g").get_to(v.landfill_mass_g);
}

// ---------------------------------------------------------------------------
// Recover

std::vector<RecoverySolution> recover_solutions(const ReturnedItem& item,
                                                const ProductRecord& product,
                                                const Catalog& catalog) {
  std::vector<RecoverySolution> out;
  std::vector<const ComponentNode*> replaceable;
  for_each_component(product.bom, [&](const ComponentNode& n) {
    if (n.replaceable) replaceable.push_back(&n);
  });

  if (item.functional_grade < 3) {
    for (const auto* n : replaceable) {
      out.push_back({RecoveryKind::repair_steps,
                     "Diagnose and replace " + n->name + " to restore function",
                     {n->component_id},
                     std::nullopt});
    }
  }
  if (item.completeness_grade >= 2) {
    for (const auto* n : replaceable) {
      out.push_back({RecoveryKind::part_reuse,
                     "Harvest " + n->name + " as a tested spare part",
                     {n->component_id},
                     std::nullopt});
    }
  }

  // material id -> components that contain it, for high-hazard materials.
  std::map<std::string, std::vector<std::string>> hazardous;
  for_each_component(product.bom, [&](const ComponentNode& n) {
    for (const auto& id : n.materials) {
      if (resolve_material(catalog.materials(), id).hazard_class != HazardClass::high) continue;
      auto& comps = hazardous[id];
      if (comps.empty() || comps.back() != n.component_id) comps.push_back(n.component_id);
    }
  });
  for (const auto& [id, components] : hazardous) {
    const auto& bad = catalog.materials().at(id);
    const MaterialSpec* best = nullptr;
    for (const auto& [alt_id, alt] : catalog.materials()) {
      if (alt.category != bad.category || alt.hazard_class == HazardClass::high) continue;
      const auto key = [](const MaterialSpec& m) {
        return std::make_tuple(hazard_weight(m.hazard_class), !m.recyclable);
      };
      if (best == nullptr || key(alt) < key(*best)) best = &alt;
    }
    if (best == nullptr) continue;
    out.push_back({RecoveryKind::material_substitution,
                   "Substitute " + bad.name + " with " + best->name + " (" +
                       std::string(to_string(best->hazard_class)) + " hazard" +
                       (best->recyclable ? ", recyclable" : "") + ")",
                   components,
                   best->material_id});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Redesign

std::optional<double> category_median_mass(const Catalog& catalog, ProductCategory category) {
  std::vector<double> masses;
  for (const auto& [id, p] : catalog.products()) {
    if (p.category == category) masses.push_back(total_mass(p, catalog.materials()));
  }
  if (masses.empty()) return std::nullopt;
  std::sort(masses.begin(), masses.end());
  const auto n = masses.size();
  return n % 2 == 1 ? masses[n / 2] : (masses[n / 2 - 1] + masses[n / 2]) / 2.0;
}

std::vector<RedesignAdvice> redesign_advice(const ReturnedItem& item, const ProductRecord& product,
                                            const Catalog& catalog,
                                            const RedesignSettings& settings) {
  std::vector<RedesignAdvice> out;
  const auto& materials = catalog.materials();

  if (item.reason == ReturnReason::usage_confusion && product.has_user_manual) {
    out.push_back({RedesignKind::manual_redesign,
                   "Customers could not operate the product: rewrite the user manual around the "
                   "missed steps and cut its paper use",
                   rules::Subject::manual_pages, -std::ceil(product.manual_pages / 2.0)});
  }

  const double recycled = recycled_content_fraction(product, materials);
  if (recycled < settings.recycled_content_target) {
    out.push_back({RedesignKind::recycled_content_increase,
                   "Increase the share of recycled material in the product",
                   rules::Subject::recycled_content_fraction,
                   settings.recycled_content_target - recycled});
  }

  const double mass = total_mass(product, materials);
  const auto median = category_median_mass(catalog, product.category);
  if (median && mass > *median) {
    out.push_back({RedesignKind::mass_reduction,
                   "Reduce weight and size of components: product weighs " + format_grams(mass) +
                       " against a category median of " + format_grams(*median),
                   rules::Subject::total_mass, *median - mass});
  }

  const double seconds = total_disassembly_time(product);
  if (seconds > settings.disassembly_threshold_s) {
    out.push_back({RedesignKind::disassembly_improvement,
                   "Design for disassembly: teardown takes " + std::to_string(std::lround(seconds)) +
                       " s; faster separation lets more of the mass be recovered",
                   rules::Subject::recyclability_index,
                   1.0 - recyclability_index(product, materials)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Disposal

DisposalPlan disposal_plan(const ReturnedItem& /*item*/, const ProductRecord& product,
                           const MaterialTable& materials) {
  DisposalPlan plan;
  double reclaimable_mass = 0.0;
  double other_recyclable_mass = 0.0;
  std::map<MaterialCategory, std::string> first_of_category;

  for_each_component(product.bom, [&](const ComponentNode& n) {
    bool all_recyclable = !n.materials.empty();
    double own_mass = 0.0;
    for (const auto& id : n.materials) {
      const auto& m = resolve_material(materials, id);
      all_recyclable = all_recyclable && m.recyclable;
      own_mass += m.mass_g;
      auto [it, inserted] = first_of_category.emplace(m.category, id);
      if (!inserted && id < it->second) it->second = id;
    }
    if (n.replaceable && all_recyclable) {
      plan.reclaimable_components.push_back(n.component_id);
      reclaimable_mass += own_mass;
    } else {
      for (const auto& id : n.materials) {
        const auto& m = materials.at(id);
        if (m.recyclable) other_recyclable_mass += m.mass_g;
      }
    }
  });

  for (const auto& [category, id] : first_of_category) {
    const auto& m = materials.at(id);
    plan.labeling_actions.push_back(
        {id, "Label material type: " + std::string(to_string(category)) + " (" + m.name + ")"});
  }
  plan.landfill_mass_g =
      std::max(0.0, total_mass(product, materials) - reclaimable_mass - other_recyclable_mass);
  return plan;
}

// ---------------------------------------------------------------------------
// Gates and scoring

std::set<Disposition> feasible_dispositions(const ReturnedItem& item, const ProductRecord& product,
                                            const MaterialTable& materials) {
  std::set<Disposition> out{Disposition::dispose};
  if (item.functional_grade >= 3 && item.completeness_grade >= 3) out.insert(Disposition::reuse);
  if (item.functional_grade >= 3 && item.cosmetic_grade >= 2) out.insert(Disposition::resale);
  if (item.functional_grade >= 1 && has_replaceable_component(product)) out.insert(Disposition::repair);
  if (recyclability_index(product, materials) > 0.0) out.insert(Disposition::recycle);
  if (item.reason == ReturnReason::usage_confusion ||
      item.reason == ReturnReason::customer_dissatisfaction) {
    out.insert(Disposition::redesign);
  }
  return out;
}

void to_json(nlohmann::json& j, const ScoredDisposition& v) {
  j = {{"disposition", v.disposition},
       {"total_score", v.total_score},
       {"env_component", v.env_component},
       {"econ_component", v.econ_component},
       {"case_component", v.case_component},
       {"env_score", v.env_score}};
}

void from_json(const nlohmann::json& j, ScoredDisposition& v) {
  j.at("disposition").get_to(v.disposition);
  j.at("total_score").get_to(v.total_score);
  j.at("env_component").get_to(v.env_component);
  j.at("econ_component").get_to(v.econ_component);
  j.at("case_component").get_to(v.case_component);
  j.at("env_score").get_to(v.env_score);
}

double econ_score(Disposition d, const ReturnedItem& /*item*/, const rules::RuleSet& rules) {
  auto it = rules.econ_base.find(d);
  return it == rules.econ_base.end() ? rules::default_econ_base().at(d) : it->second;
}

ScoredDisposition score_disposition(Disposition d, const ReturnedItem& item,
                                    const ProductRecord& product, const MaterialTable& materials,
                                    const rules::RuleSet& rules, const CaseSupport& case_support) {
  const auto& w = rules.score_weights;
  const double wsum = w.sum();
  if (!(wsum > 0.0) || w.env < 0.0 || w.econ < 0.0 || w.cases < 0.0) {
    throw Error(ErrorCode::InvalidWeights, "score weights must be non-negative with a positive sum");
  }
  const double env = rules::env_score(product, materials, d, rules);
  const double econ = econ_score(d, item, rules);
  auto cs = case_support.find(d);
  const double support = cs == case_support.end() ? 0.0 : std::clamp(cs->second, 0.0, 1.0);

  ScoredDisposition s;
  s.disposition = d;
  s.env_score = env;
  s.env_component = cbr::quantize(w.env * env / wsum);
  s.econ_component = cbr::quantize(w.econ * econ / wsum);
  s.case_component = cbr::quantize(w.cases * support / wsum);
  s.total_score = cbr::quantize((w.env * env + w.econ * econ + w.cases * support) / wsum);
  return s;
}

std::vector<ScoredDisposition> score_dispositions(const std::set<Disposition>& feasible,
                                                  const ReturnedItem& item,
                                                  const ProductRecord& product,
                                                  const MaterialTable& materials,
                                                  const rules::RuleSet& rules,
                                                  const CaseSupport& case_support) {
  if (feasible.empty()) throw Error(ErrorCode::EmptyFeasibleSet, "no feasible disposition to score");
  std::vector<ScoredDisposition> ranked;
  for (auto d : feasible) {
    ranked.push_back(score_disposition(d, item, product, materials, rules, case_support));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.total_score != b.total_score) return a.total_score > b.total_score;
    return hierarchy_rank(a.disposition) < hierarchy_rank(b.disposition);
  });
  return ranked;
}

// ---------------------------------------------------------------------------
// Specialist agents

nlohmann::json make_solution_request(const ReturnedItem& item, const ProductRecord& product) {
  return {{"item", item}, {"product", product}};
}

namespace {

struct RequestContent {
  ReturnedItem item;
  ProductRecord product;
};

// Returns nullopt after answering the message itself (not_understood/refuse).
std::optional<RequestContent> accept_request(const AclMessage& msg, AgentContext& ctx,
                                             const Catalog& catalog) {
  if (msg.performative != Performative::request) return std::nullopt;
  if (msg.topic != Topic::solution_request) {
    ctx.reply(msg, Performative::not_understood, Topic::solution_reply,
              {{"reason", "unsupported topic " + std::string(to_string(msg.topic))}});
    return std::nullopt;
  }
  RequestContent rc;
  try {
    rc.item = msg.content.at("item").get<ReturnedItem>();
    rc.product = msg.content.at("product").get<ProductRecord>();
  } catch (const std::exception& e) {
    ctx.reply(msg, Performative::not_understood, Topic::solution_reply, {{"reason", e.what()}});
    return std::nullopt;
  }
  try {
    validate(rc.product, catalog.materials());
  } catch (const Error& e) {
    ctx.reply(msg, Performative::refuse, Topic::solution_reply, {{"reason", e.what()}});
    return std::nullopt;
  }
  return rc;
}

}  // namespace

void RecoverAgent::handle(const AclMessage& msg, AgentContext& ctx) const {
  auto rc = accept_request(msg, ctx, catalog_);
  if (!rc) return;
  ctx.reply(msg, Performative::inform, Topic::solution_reply,
            {{"solutions", recover_solutions(rc->item, rc->product, catalog_)}});
}

void RedesignAgent::handle(const AclMessage& msg, AgentContext& ctx) const {
  auto rc = accept_request(msg, ctx, catalog_);
  if (!rc) return;
  ctx.reply(msg, Performative::inform, Topic::solution_reply,
            {{"advice", redesign_advice(rc->item, rc->product, catalog_, settings_)}});
}

void DisposalAgent::handle(const AclMessage& msg, AgentContext& ctx) const {
  auto rc = accept_request(msg, ctx, catalog_);
  if (!rc) return;
  ctx.reply(msg, Performative::inform, Topic::solution_reply,
            {{"plan", disposal_plan(rc->item, rc->product, catalog_.materials())}});
}

runtime::Handler RecoverAgent::handler() const {
  return [this](const AclMessage& m, AgentContext& c) { handle(m, c); };
}
runtime::Handler RedesignAgent::handler() const {
  return [this](const AclMessage& m, AgentContext& c) { handle(m, c); };
}
runtime::Handler DisposalAgent::handler() const {
  return [this](const AclMessage& m, AgentContext& c) { handle(m, c); };
}

}  // namespace relife::agents
