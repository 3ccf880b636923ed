#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/error.hpp"

namespace relife {

enum class MaterialCategory { metal, plastic, electronic, glass, paper, composite, other };
enum class HazardClass { none, low, high };
enum class ProductCategory { appliance, electronics, furniture, packaging, other };
enum class LifecycleStage { design, production, distribution, use, returned, recovery, disposal };
enum class ReturnReason {
  defective,
  end_of_life,
  end_of_use,
  customer_dissatisfaction,
  usage_confusion,
  recall
};

/// Destinations for a returned unit. Declaration order is the waste
/// hierarchy (most preferred first) and is relied on for tie-breaks.
enum class Disposition { reuse, resale, repair, redesign, recycle, dispose };

inline constexpr std::array<Disposition, 6> kWasteHierarchy = {
    Disposition::reuse,    Disposition::resale,  Disposition::repair,
    Disposition::redesign, Disposition::recycle, Disposition::dispose};

/// Position in the waste hierarchy, 0 = most preferred.
constexpr int hierarchy_rank(Disposition d) { return static_cast<int>(d); }

std::string_view to_string(MaterialCategory v);
std::string_view to_string(HazardClass v);
std::string_view to_string(ProductCategory v);
std::string_view to_string(LifecycleStage v);
std::string_view to_string(ReturnReason v);
std::string_view to_string(Disposition v);

// Parsers throw Error{ValidationFailed} on unknown symbols.
MaterialCategory parse_material_category(std::string_view s);
HazardClass parse_hazard_class(std::string_view s);
ProductCategory parse_product_category(std::string_view s);
LifecycleStage parse_lifecycle_stage(std::string_view s);
ReturnReason parse_return_reason(std::string_view s);
Disposition parse_disposition(std::string_view s);

struct MaterialSpec {
  std::string material_id;
  std::string name;
  MaterialCategory category = MaterialCategory::other;
  HazardClass hazard_class = HazardClass::none;
  bool recyclable = false;
  double recycled_content_fraction = 0.0;
  double mass_g = 0.0;

  bool operator==(const MaterialSpec&) const = default;
};

struct ComponentNode {
  std::string component_id;
  std::string name;
  std::vector<std::string> materials;
  std::vector<ComponentNode> subcomponents;
  double disassembly_time_s = 0.0;
  bool replaceable = false;

  bool operator==(const ComponentNode&) const = default;
};

struct ProductRecord {
  std::string product_id;
  std::string name;
  std::string version;
  ProductCategory category = ProductCategory::other;
  ComponentNode bom;
  LifecycleStage lifecycle_stage = LifecycleStage::design;
  bool has_user_manual = false;
  int manual_pages = 0;

  bool operator==(const ProductRecord&) const = default;
};

struct ReturnedItem {
  std::string return_id;
  std::string product_id;
  ReturnReason reason = ReturnReason::defective;
  int cosmetic_grade = 0;
  int functional_grade = 0;
  int completeness_grade = 0;
  int age_months = 0;
  std::string notes;

  bool operator==(const ReturnedItem&) const = default;
};

using MaterialTable = std::map<std::string, MaterialSpec>;

/// Visits every node of the BOM in pre-order.
template <typename Fn>
void for_each_component(const ComponentNode& node, Fn&& fn) {
  fn(node);
  for (const auto& child : node.subcomponents) for_each_component(child, fn);
}

/// Resolves a material reference or throws Error{UnknownMaterial}.
const MaterialSpec& resolve_material(const MaterialTable& materials, const std::string& id);

// Mass-derived indices. Every material occurrence in the flattened BOM
// counts once per reference.
double total_mass(const ProductRecord& product, const MaterialTable& materials);
double recyclable_mass(const ProductRecord& product, const MaterialTable& materials);
double recyclability_index(const ProductRecord& product, const MaterialTable& materials);
double hazard_weight(HazardClass h);
double hazard_index(const ProductRecord& product, const MaterialTable& materials);
/// Mass-weighted mean recycled content over all material occurrences.
double recycled_content_fraction(const ProductRecord& product, const MaterialTable& materials);
double total_disassembly_time(const ProductRecord& product);
bool has_replaceable_component(const ProductRecord& product);

bool stage_edge_exists(LifecycleStage from, LifecycleStage to);
std::vector<LifecycleStage> stage_successors(LifecycleStage from);

class IllegalTransition : public Error {
 public:
  IllegalTransition(LifecycleStage from, LifecycleStage to);
  LifecycleStage from() const noexcept { return from_; }
  LifecycleStage to() const noexcept { return to_; }

 private:
  LifecycleStage from_;
  LifecycleStage to_;
};

ProductRecord advance_stage(ProductRecord product, LifecycleStage to);

/// Shortest legal stage path from `from` to `to`, excluding `from`.
/// Empty when already there; nullopt when unreachable.
std::optional<std::vector<LifecycleStage>> stage_path(LifecycleStage from, LifecycleStage to);

void validate(const MaterialSpec& material);
void validate(const ProductRecord& product, const MaterialTable& materials);
void validate(const ReturnedItem& item);

void to_json(nlohmann::json& j, const MaterialSpec& v);
void from_json(const nlohmann::json& j, MaterialSpec& v);
void to_json(nlohmann::json& j, const ComponentNode& v);
void from_json(const nlohmann::json& j, ComponentNode& v);
void to_json(nlohmann::json& j, const ProductRecord& v);
void from_json(const nlohmann::json& j, ProductRecord& v);
void to_json(nlohmann::json& j, const ReturnedItem& v);
void from_json(const nlohmann::json& j, ReturnedItem& v);

}  // namespace relife

namespace nlohmann {

#define RELIFE_ENUM_SERIALIZER(Enum, parser)                                     \
  template <>                                                                   \
  struct adl_serializer<relife::Enum> {                                         \
    static void to_json(json& j, relife::Enum v) { j = relife::to_string(v); }  \
    static void from_json(const json& j, relife::Enum& v) {                     \
      v = relife::parser(j.get<std::string>());                                 \
    }                                                                           \
  };

RELIFE_ENUM_SERIALIZER(MaterialCategory, parse_material_category)
RELIFE_ENUM_SERIALIZER(HazardClass, parse_hazard_class)
RELIFE_ENUM_SERIALIZER(ProductCategory, parse_product_category)
RELIFE_ENUM_SERIALIZER(LifecycleStage, parse_lifecycle_stage)
RELIFE_ENUM_SERIALIZER(ReturnReason, parse_return_reason)
RELIFE_ENUM_SERIALIZER(Disposition, parse_disposition)

#undef RELIFE_ENUM_SERIALIZER

}  // namespace nlohmann
