#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/domain.hpp"

namespace relife {

/// The product repository agents consult for product information. Every
/// successful mutation bumps `revision` by exactly one.
class Catalog {
 public:
  Catalog() = default;

  const std::map<std::string, ProductRecord>& products() const { return products_; }
  const MaterialTable& materials() const { return materials_; }
  std::int64_t revision() const { return revision_; }

  void upsert_material(MaterialSpec material);
  /// Throws UnknownMaterial for dangling references, ValidationFailed for
  /// anything else the domain rules reject.
  void upsert_product(ProductRecord record);

  /// Throws NotFound.
  const ProductRecord& get_product(const std::string& product_id) const;
  const ProductRecord* find_product(const std::string& product_id) const;

  bool operator==(const Catalog&) const = default;

  nlohmann::json to_json() const;
  static Catalog from_json(const nlohmann::json& doc);

 private:
  std::map<std::string, ProductRecord> products_;
  MaterialTable materials_;
  std::int64_t revision_ = 0;
};

Catalog load_catalog(const std::filesystem::path& path);
void save_catalog(const Catalog& catalog, const std::filesystem::path& path);
std::string serialize_catalog(const Catalog& catalog);

struct DecisionLogEntry {
  std::int64_t sequence = 0;
  std::string timestamp;
  std::string return_id;
  std::string product_id;
  Disposition chosen = Disposition::dispose;
  int recommendation_rank_of_chosen = 1;
  double env_score_of_chosen = 0.0;
  /// Mass sent to landfill by this decision (zero unless recycle/dispose).
  double landfill_mass_g = 0.0;

  bool operator==(const DecisionLogEntry&) const = default;
};

void to_json(nlohmann::json& j, const DecisionLogEntry& e);
void from_json(const nlohmann::json& j, DecisionLogEntry& e);

std::vector<DecisionLogEntry> parse_decision_log(std::string_view jsonl);
std::string serialize_decision_log(const std::vector<DecisionLogEntry>& entries);

/// Append-only JSON-lines decision log, optionally backed by a file. Entries
/// are never rewritten; each append writes exactly one line.
class DecisionLog {
 public:
  /// In-memory log.
  DecisionLog() = default;
  /// File-backed log; existing entries are loaded when the file exists.
  explicit DecisionLog(std::filesystem::path path);

  /// Throws SequenceGap unless entry.sequence == next_sequence(); throws
  /// StorageFailure when the backing file cannot be written.
  void append(const DecisionLogEntry& entry);

  std::int64_t next_sequence() const {
    return entries_.empty() ? 1 : entries_.back().sequence + 1;
  }
  const std::vector<DecisionLogEntry>& entries() const { return entries_; }
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
  std::vector<DecisionLogEntry> entries_;
};

}  // namespace relife
