#include "relife/domain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace relife {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::string_view, N>& names,
                std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw Error(ErrorCode::ValidationFailed,
              "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array<std::string_view, 7> kMaterialCategoryNames = {
    "metal", "plastic", "electronic", "glass", "paper", "composite", "other"};
constexpr std::array<std::string_view, 3> kHazardNames = {"none", "low", "high"};
constexpr std::array<std::string_view, 5> kProductCategoryNames = {
    "appliance", "electronics", "furniture", "packaging", "other"};
constexpr std::array<std::string_view, 7> kStageNames = {
    "design", "production", "distribution", "use", "returned", "recovery", "disposal"};
constexpr std::array<std::string_view, 6> kReasonNames = {
    "defective", "end_of_life", "end_of_use", "customer_dissatisfaction", "usage_confusion",
    "recall"};
constexpr std::array<std::string_view, 6> kDispositionNames = {
    "reuse", "resale", "repair", "redesign", "recycle", "dispose"};

}  // namespace

std::string_view to_string(ErrorCode code) {
  constexpr std::array<std::string_view, 23> names = {
      "ZeroMass",         "IllegalTransition", "ValidationFailed",  "UnknownMaterial",
      "NotFound",         "SequenceGap",       "StorageFailure",    "ParseError",
      "IoError",          "NoSharedFeatures",  "DuplicateId",       "AlreadyResolved",
      "UnknownSubject",   "InvalidWeights",    "DuplicateName",     "UnknownReceiver",
      "ProtocolViolation", "BudgetExhausted",  "EmptyFeasibleSet",  "UnknownProduct",
      "SpecialistTimeout", "NoSession",        "InfeasibleChoice"};
  return names.at(static_cast<std::size_t>(code));
}

std::string_view to_string(MaterialCategory v) { return kMaterialCategoryNames.at(static_cast<std::size_t>(v)); }
std::string_view to_string(HazardClass v) { return kHazardNames.at(static_cast<std::size_t>(v)); }
std::string_view to_string(ProductCategory v) { return kProductCategoryNames.at(static_cast<std::size_t>(v)); }
std::string_view to_string(LifecycleStage v) { return kStageNames.at(static_cast<std::size_t>(v)); }
std::string_view to_string(ReturnReason v) { return kReasonNames.at(static_cast<std::size_t>(v)); }
std::string_view to_string(Disposition v) { return kDispositionNames.at(static_cast<std::size_t>(v)); }

MaterialCategory parse_material_category(std::string_view s) {
  return parse_enum<MaterialCategory>(s, kMaterialCategoryNames, "material category");
}
HazardClass parse_hazard_class(std::string_view s) {
  return parse_enum<HazardClass>(s, kHazardNames, "hazard class");
}
ProductCategory parse_product_category(std::string_view s) {
  return parse_enum<ProductCategory>(s, kProductCategoryNames, "product category");
}
LifecycleStage parse_lifecycle_stage(std::string_view s) {
  return parse_enum<LifecycleStage>(s, kStageNames, "lifecycle stage");
}
ReturnReason parse_return_reason(std::string_view s) {
  return parse_enum<ReturnReason>(s, kReasonNames, "return reason");
}
Disposition parse_disposition(std::string_view s) {
  return parse_enum<Disposition>(s, kDispositionNames, "disposition");
}

const MaterialSpec& resolve_material(const MaterialTable& materials, const std::string& id) {
  auto it = materials.find(id);
  if (it == materials.end()) {
    throw Error(ErrorCode::UnknownMaterial, "unknown material '" + id + "'", id);
  }
  return it->second;
}

namespace {

// Sums f(material) over every material occurrence of the BOM.
template <typename Fn>
double sum_over_materials(const ProductRecord& product, const MaterialTable& materials, Fn&& f) {
  double sum = 0.0;
  for_each_component(product.bom, [&](const ComponentNode& node) {
    for (const auto& id : node.materials) sum += f(resolve_material(materials, id));
  });
  return sum;
}

double checked_total(const ProductRecord& product, const MaterialTable& materials) {
  const double total = total_mass(product, materials);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ZeroMass, "product '" + product.product_id + "' has zero mass",
                product.product_id);
  }
  return total;
}

}  // namespace

double total_mass(const ProductRecord& product, const MaterialTable& materials) {
  return sum_over_materials(product, materials, [](const MaterialSpec& m) { return m.mass_g; });
}

double recyclable_mass(const ProductRecord& product, const MaterialTable& materials) {
  return sum_over_materials(product, materials,
                            [](const MaterialSpec& m) { return m.recyclable ? m.mass_g : 0.0; });
}

double recyclability_index(const ProductRecord& product, const MaterialTable& materials) {
  const double total = checked_total(product, materials);
  return std::clamp(recyclable_mass(product, materials) / total, 0.0, 1.0);
}

double hazard_weight(HazardClass h) {
  switch (h) {
    case HazardClass::none: return 0.0;
    case HazardClass::low: return 0.5;
    case HazardClass::high: return 1.0;
  }
  return 0.0;
}

double hazard_index(const ProductRecord& product, const MaterialTable& materials) {
  const double total = checked_total(product, materials);
  const double weighted = sum_over_materials(
      product, materials, [](const MaterialSpec& m) { return m.mass_g * hazard_weight(m.hazard_class); });
  return std::clamp(weighted / total, 0.0, 1.0);
}

double recycled_content_fraction(const ProductRecord& product, const MaterialTable& materials) {
  const double total = checked_total(product, materials);
  const double weighted = sum_over_materials(product, materials, [](const MaterialSpec& m) {
    return m.mass_g * m.recycled_content_fraction;
  });
  return std::clamp(weighted / total, 0.0, 1.0);
}

double total_disassembly_time(const ProductRecord& product) {
  double t = 0.0;
  for_each_component(product.bom, [&](const ComponentNode& n) { t += n.disassembly_time_s; });
  return t;
}

bool has_replaceable_component(const ProductRecord& product) {
  bool any = false;
  for_each_component(product.bom, [&](const ComponentNode& n) { any = any || n.replaceable; });
  return any;
}

// ---------------------------------------------------------------------------
// Lifecycle stage graph

std::vector<LifecycleStage> stage_successors(LifecycleStage from) {
  using S = LifecycleStage;
  switch (from) {
    case S::design: return {S::production};
    case S::production: return {S::distribution};
    case S::distribution: return {S::use};
    case S::use: return {S::returned};
    case S::returned: return {S::recovery, S::disposal};
    case S::recovery: return {S::production};
    case S::disposal: return {};
  }
  return {};
}

bool stage_edge_exists(LifecycleStage from, LifecycleStage to) {
  const auto next = stage_successors(from);
  return std::find(next.begin(), next.end(), to) != next.end();
}

IllegalTransition::IllegalTransition(LifecycleStage from, LifecycleStage to)
    : Error(ErrorCode::IllegalTransition,
            "illegal lifecycle transition " + std::string(to_string(from)) + " -> " +
                std::string(to_string(to)),
            std::string(to_string(from)) + "->" + std::string(to_string(to))),
      from_(from),
      to_(to) {}

ProductRecord advance_stage(ProductRecord product, LifecycleStage to) {
  if (!stage_edge_exists(product.lifecycle_stage, to)) {
    throw IllegalTransition(product.lifecycle_stage, to);
  }
  product.lifecycle_stage = to;
  return product;
}

std::optional<std::vector<LifecycleStage>> stage_path(LifecycleStage from, LifecycleStage to) {
  if (from == to) return std::vector<LifecycleStage>{};
  std::map<LifecycleStage, LifecycleStage> parent;
  std::deque<LifecycleStage> frontier{from};
  std::set<LifecycleStage> seen{from};
  while (!frontier.empty()) {
    const auto cur = frontier.front();
    frontier.pop_front();
    for (auto next : stage_successors(cur)) {
      if (!seen.insert(next).second) continue;
      parent[next] = cur;
      if (next == to) {
        std::vector<LifecycleStage> path{to};
        for (auto s = cur; s != from; s = parent.at(s)) path.push_back(s);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push_back(next);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::ValidationFailed, what);
}

}  // namespace

void validate(const MaterialSpec& m) {
  if (m.material_id.empty()) invalid("material_id must not be empty");
  if (!std::isfinite(m.mass_g) || m.mass_g <= 0.0) {
    invalid("material '" + m.material_id + "': mass_g must be > 0");
  }
  if (!(m.recycled_content_fraction >= 0.0 && m.recycled_content_fraction <= 1.0)) {
    invalid("material '" + m.material_id + "': recycled_content_fraction outside [0,1]");
  }
}

void validate(const ProductRecord& p, const MaterialTable& materials) {
  if (p.product_id.empty()) invalid("product_id must not be empty");
  if (p.manual_pages < 0) invalid("product '" + p.product_id + "': manual_pages must be >= 0");
  std::set<std::string> ids;
  for_each_component(p.bom, [&](const ComponentNode& n) {
    if (n.component_id.empty()) invalid("product '" + p.product_id + "': empty component_id");
    if (!ids.insert(n.component_id).second) {
      invalid("product '" + p.product_id + "': component '" + n.component_id +
              "' appears more than once in the BOM");
    }
    if (!std::isfinite(n.disassembly_time_s) || n.disassembly_time_s < 0.0) {
      invalid("component '" + n.component_id + "': disassembly_time_s must be >= 0");
    }
    for (const auto& id : n.materials) resolve_material(materials, id);
  });
  if (!(total_mass(p, materials) > 0.0)) {
    invalid("product '" + p.product_id + "': total mass must be > 0");
  }
}

void validate(const ReturnedItem& item) {
  if (item.return_id.empty()) invalid("return_id must not be empty");
  if (item.product_id.empty()) invalid("product_id must not be empty");
  auto grade = [&](int g, const char* name) {
    if (g < 0 || g > 4) invalid(std::string(name) + " must be in 0..4");
  };
  grade(item.cosmetic_grade, "cosmetic_grade");
  grade(item.functional_grade, "functional_grade");
  grade(item.completeness_grade, "completeness_grade");
  if (item.age_months < 0) invalid("age_months must be >= 0");
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const MaterialSpec& v) {
  j = {{"material_id", v.material_id},
       {"name", v.name},
       {"category", v.category},
       {"hazard_class", v.hazard_class},
       {"recyclable", v.recyclable},
       {"recycled_content_fraction", v.recycled_content_fraction},
       {"mass_g", v.mass_g}};
}

void from_json(const nlohmann::json& j, MaterialSpec& v) {
  j.at("material_id").get_to(v.material_id);
  j.at("name").get_to(v.name);
  j.at("category").get_to(v.category);
  j.at("hazard_class").get_to(v.hazard_class);
  j.at("recyclable").get_to(v.recyclable);
  j.at("recycled_content_fraction").get_to(v.recycled_content_fraction);
  j.at("mass_g").get_to(v.mass_g);
}

void to_json(nlohmann::json& j, const ComponentNode& v) {
  j = {{"component_id", v.component_id},
       {"name", v.name},
       {"materials", v.materials},
       {"subcomponents", v.subcomponents},
       {"disassembly_time_s", v.disassembly_time_s},
       {"replaceable", v.replaceable}};
}

void from_json(const nlohmann::json& j, ComponentNode& v) {
  j.at("component_id").get_to(v.component_id);
  j.at("name").get_to(v.name);
  j.at("materials").get_to(v.materials);
  v.subcomponents = j.value("subcomponents", std::vector<ComponentNode>{});
  j.at("disassembly_time_s").get_to(v.disassembly_time_s);
  j.at("replaceable").get_to(v.replaceable);
}

void to_json(nlohmann::json& j, const ProductRecord& v) {
  j = {{"product_id", v.product_id},
       {"name", v.name},
       {"version", v.version},
       {"category", v.category},
       {"bom", v.bom},
       {"lifecycle_stage", v.lifecycle_stage},
       {"has_user_manual", v.has_user_manual},
       {"manual_pages", v.manual_pages}};
}

void from_json(const nlohmann::json& j, ProductRecord& v) {
  j.at("product_id").get_to(v.product_id);
  j.at("name").get_to(v.name);
  j.at("version").get_to(v.version);
  j.at("category").get_to(v.category);
  j.at("bom").get_to(v.bom);
  j.at("lifecycle_stage").get_to(v.lifecycle_stage);
  j.at("has_user_manual").get_to(v.has_user_manual);
  j.at("manual_pages").get_to(v.manual_pages);
}

void to_json(nlohmann::json& j, const ReturnedItem& v) {
  j = {{"return_id", v.return_id},
       {"product_id", v.product_id},
       {"reason", v.reason},
       {"cosmetic_grade", v.cosmetic_grade},
       {"functional_grade", v.functional_grade},
       {"completeness_grade", v.completeness_grade},
       {"age_months", v.age_months},
       {"notes", v.notes}};
}

void from_json(const nlohmann::json& j, ReturnedItem& v) {
  j.at("return_id").get_to(v.return_id);
  j.at("product_id").get_to(v.product_id);
  j.at("reason").get_to(v.reason);
  j.at("cosmetic_grade").get_to(v.cosmetic_grade);
  j.at("functional_grade").get_to(v.functional_grade);
  j.at("completeness_grade").get_to(v.completeness_grade);
  j.at("age_months").get_to(v.age_months);
  v.notes = j.value("notes", std::string{});
}

}  // namespace relife
