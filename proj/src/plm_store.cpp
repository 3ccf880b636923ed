#include "relife/plm_store.hpp"

#include <fstream>
#include <sstream>

#include "relife/io.hpp"

namespace relife {

void Catalog::upsert_material(MaterialSpec material) {
  validate(material);
  const auto id = material.material_id;
  materials_[id] = std::move(material);
  ++revision_;
}

void Catalog::upsert_product(ProductRecord record) {
  for_each_component(record.bom, [&](const ComponentNode& node) {
    for (const auto& id : node.materials) resolve_material(materials_, id);
  });
  validate(record, materials_);
  const auto id = record.product_id;
  products_[id] = std::move(record);
  ++revision_;
}

const ProductRecord& Catalog::get_product(const std::string& product_id) const {
  if (const auto* p = find_product(product_id)) return *p;
  throw Error(ErrorCode::NotFound, "no product '" + product_id + "'", product_id);
}

const ProductRecord* Catalog::find_product(const std::string& product_id) const {
  auto it = products_.find(product_id);
  return it == products_.end() ? nullptr : &it->second;
}

nlohmann::json Catalog::to_json() const {
  nlohmann::json materials = nlohmann::json::object();
  for (const auto& [id, m] : materials_) materials[id] = m;
  nlohmann::json products = nlohmann::json::object();
  for (const auto& [id, p] : products_) products[id] = p;
  return {{"revision", revision_}, {"materials", materials}, {"products", products}};
}

Catalog Catalog::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "catalog: expected a JSON object");
  Catalog c;
  for (const auto& key : {"revision", "materials", "products"}) {
    if (!doc.contains(key)) {
      throw Error(ErrorCode::ParseError, std::string("catalog: missing key '") + key + "'");
    }
  }
  c.revision_ = decode<std::int64_t>(doc.at("revision"), "catalog.revision");
  if (c.revision_ < 0) throw Error(ErrorCode::ValidationFailed, "catalog: negative revision");
  for (const auto& [key, value] : doc.at("materials").items()) {
    auto m = decode<MaterialSpec>(value, "catalog.materials." + key);
    if (m.material_id != key) {
      throw Error(ErrorCode::ValidationFailed, "catalog: material key '" + key +
                                                   "' does not match material_id '" +
                                                   m.material_id + "'");
    }
    validate(m);
    c.materials_.emplace(key, std::move(m));
  }
  for (const auto& [key, value] : doc.at("products").items()) {
    auto p = decode<ProductRecord>(value, "catalog.products." + key);
    if (p.product_id != key) {
      throw Error(ErrorCode::ValidationFailed, "catalog: product key '" + key +
                                                   "' does not match product_id '" +
                                                   p.product_id + "'");
    }
    validate(p, c.materials_);
    c.products_.emplace(key, std::move(p));
  }
  return c;
}

std::string serialize_catalog(const Catalog& catalog) { return dump_document(catalog.to_json()); }

Catalog load_catalog(const std::filesystem::path& path) {
  return Catalog::from_json(parse_json(read_file(path), path.string()));
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_catalog(catalog));
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const DecisionLogEntry& e) {
  j = {{"sequence", e.sequence},
       {"timestamp", e.timestamp},
       {"return_id", e.return_id},
       {"product_id", e.product_id},
       {"chosen", e.chosen},
       {"recommendation_rank_of_chosen", e.recommendation_rank_of_chosen},
       {"env_score_of_chosen", e.env_score_of_chosen},
       {"landfill_mass_g", e.landfill_mass_g}};
}

void from_json(const nlohmann::json& j, DecisionLogEntry& e) {
  j.at("sequence").get_to(e.sequence);
  j.at("timestamp").get_to(e.timestamp);
  j.at("return_id").get_to(e.return_id);
  j.at("product_id").get_to(e.product_id);
  j.at("chosen").get_to(e.chosen);
  j.at("recommendation_rank_of_chosen").get_to(e.recommendation_rank_of_chosen);
  j.at("env_score_of_chosen").get_to(e.env_score_of_chosen);
  e.landfill_mass_g = j.value("landfill_mass_g", 0.0);
}

std::vector<DecisionLogEntry> parse_decision_log(std::string_view jsonl) {
  std::vector<DecisionLogEntry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    const std::string where = "decision log line " + std::to_string(line_no);
    if (line.empty()) throw Error(ErrorCode::ParseError, where + ": blank line");
    auto entry = decode<DecisionLogEntry>(parse_json(line, where), where);
    const std::int64_t expected = entries.empty() ? 1 : entries.back().sequence + 1;
    if (entry.sequence != expected) {
      throw Error(ErrorCode::SequenceGap, where + ": expected sequence " +
                                              std::to_string(expected) + ", found " +
                                              std::to_string(entry.sequence));
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string serialize_decision_log(const std::vector<DecisionLogEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += nlohmann::json(e).dump();
    out += '\n';
  }
  return out;
}

DecisionLog::DecisionLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(*path_)) entries_ = parse_decision_log(read_file(*path_));
}

void DecisionLog::append(const DecisionLogEntry& entry) {
  if (entry.sequence != next_sequence()) {
    throw Error(ErrorCode::SequenceGap,
                "decision log expects sequence " + std::to_string(next_sequence()) + ", got " +
                    std::to_string(entry.sequence));
  }
  if (path_) {
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    const auto line = nlohmann::json(entry).dump() + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) {
      throw Error(ErrorCode::StorageFailure, "cannot append to '" + path_->string() + "'");
    }
  }
  entries_.push_back(entry);
}

}  // namespace relife
