#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/domain.hpp"

namespace relife::cbr {

/// Problem description of one return. Numeric features live in [0,1];
/// a name appears in at most one of the two maps.
struct FeatureVector {
  std::map<std::string, std::string> categorical;
  std::map<std::string, double> numeric;

  /// Stores `value` clamped to [0,1].
  void set_numeric(const std::string& name, double value);
  std::optional<double> numeric_value(const std::string& name) const;

  bool operator==(const FeatureVector&) const = default;
};

struct SimilarityWeights {
  std::map<std::string, double> weights;
  double default_weight = 1.0;

  /// Missing names weigh default_weight.
  double weight(const std::string& name) const;
  SimilarityWeights scaled(double c) const;
};

enum class Outcome { unknown, success, failure };

std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view s);

struct Case {
  std::string case_id;
  FeatureVector problem;
  Disposition solution = Disposition::dispose;
  Outcome outcome = Outcome::unknown;
  std::optional<double> env_score_observed;
  std::string created_at;

  bool operator==(const Case&) const = default;
};

struct ScoredCase {
  Case c;
  double similarity = 0.0;

  bool operator==(const ScoredCase&) const = default;
};

struct RetrievalParams {
  int k = 3;
  double tau = 0.6;
  SimilarityWeights weights;
};

/// Scores are reported on a 1e-12 grid so that mathematically equal values
/// computed along different floating-point paths compare equal.
double quantize(double x);

/// Weighted overlap over the shared features: numeric features contribute
/// 1 - |a - b|, categorical ones 1 when the symbols match. Throws
/// NoSharedFeatures when no shared feature carries positive weight.
double similarity(const FeatureVector& a, const FeatureVector& b, const SimilarityWeights& w);

/// Retrieval ordering: similarity descending, then newer created_at, then
/// case_id ascending.
bool ranks_before(const ScoredCase& x, const ScoredCase& y);

struct RetainResult {
  bool retained = false;
  /// Id of the existing case that absorbed the candidate, when not retained.
  std::optional<std::string> duplicate_of;
};

class CaseBase {
 public:
  explicit CaseBase(double dedup_threshold = 0.95);

  const std::vector<Case>& cases() const { return cases_; }
  double dedup_threshold() const { return dedup_threshold_; }
  std::size_t size() const { return cases_.size(); }
  const Case* find(const std::string& case_id) const;

  /// Top-k cases with similarity >= tau, best first. Empty is a valid result.
  std::vector<ScoredCase> retrieve(const FeatureVector& query, const RetrievalParams& params) const;

  /// Appends the candidate unless a case with the same solution is already
  /// within dedup_threshold of it. Throws DuplicateId.
  RetainResult retain(Case candidate, const SimilarityWeights& weights = {});

  /// unknown -> success|failure only. Throws NotFound, AlreadyResolved.
  void record_outcome(const std::string& case_id, Outcome outcome);

  /// Smallest "case-NNNNNN" id not yet used.
  std::string next_case_id() const;

  bool operator==(const CaseBase&) const = default;

  nlohmann::json to_json() const;
  static CaseBase from_json(const nlohmann::json& doc);

 private:
  std::vector<Case> cases_;
  double dedup_threshold_;
};

CaseBase load_case_base(const std::filesystem::path& path);
void save_case_base(const CaseBase& base, const std::filesystem::path& path);
std::string serialize_case_base(const CaseBase& base);

/// Feature names produced by featurize().
namespace feature {
inline constexpr const char* kReason = "reason";
inline constexpr const char* kProductCategory = "product_category";
inline constexpr const char* kCosmetic = "cosmetic";
inline constexpr const char* kFunctional = "functional";
inline constexpr const char* kCompleteness = "completeness";
inline constexpr const char* kAge = "age";
inline constexpr const char* kHazard = "hazard";
inline constexpr const char* kRecyclability = "recyclability";
}  // namespace feature

FeatureVector featurize(const ReturnedItem& item, const ProductRecord& product,
                        const MaterialTable& materials);

/// Fallback chain used when a precedent failed. Redesign is reason-driven
/// rather than condition-driven, so the chain passes over it:
/// reuse -> resale -> repair -> recycle -> dispose, and redesign -> recycle.
Disposition next_after_failure(Disposition d);

/// CBR reuse step: returns the precedent's solution, stepping down the
/// fallback chain if it failed and downgrading reuse/resale to repair when
/// the query unit is not functional enough (functional < 0.75).
Disposition adapt(const Case& best, const FeatureVector& query);

void to_json(nlohmann::json& j, const FeatureVector& v);
void from_json(const nlohmann::json& j, FeatureVector& v);
void to_json(nlohmann::json& j, const Case& v);
void from_json(const nlohmann::json& j, Case& v);

}  // namespace relife::cbr
