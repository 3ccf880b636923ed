#include "relife/cbr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "relife/io.hpp"

namespace relife::cbr {

void FeatureVector::set_numeric(const std::string& name, double value) {
  numeric[name] = std::isnan(value) ? 0.0 : std::clamp(value, 0.0, 1.0);
}

std::optional<double> FeatureVector::numeric_value(const std::string& name) const {
  auto it = numeric.find(name);
  if (it == numeric.end()) return std::nullopt;
  return it->second;
}

double SimilarityWeights::weight(const std::string& name) const {
  auto it = weights.find(name);
  return it == weights.end() ? default_weight : it->second;
}

SimilarityWeights SimilarityWeights::scaled(double c) const {
  SimilarityWeights out = *this;
  out.default_weight *= c;
  for (auto& [name, w] : out.weights) w *= c;
  return out;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::unknown: return "unknown";
    case Outcome::success: return "success";
    case Outcome::failure: return "failure";
  }
  return "unknown";
}

Outcome parse_outcome(std::string_view s) {
  if (s == "unknown") return Outcome::unknown;
  if (s == "success") return Outcome::success;
  if (s == "failure") return Outcome::failure;
  throw Error(ErrorCode::ValidationFailed, "unknown outcome '" + std::string(s) + "'");
}

double quantize(double x) { return std::round(x * 1e12) / 1e12; }

double similarity(const FeatureVector& a, const FeatureVector& b, const SimilarityWeights& w) {
  double weighted = 0.0;
  double total_weight = 0.0;
  // std::map iteration order is by name, identical for (a,b) and (b,a).
  for (const auto& [name, x] : a.numeric) {
    auto it = b.numeric.find(name);
    if (it == b.numeric.end()) continue;
    const double wi = w.weight(name);
    weighted += wi * (1.0 - std::fabs(x - it->second));
    total_weight += wi;
  }
  for (const auto& [name, x] : a.categorical) {
    auto it = b.categorical.find(name);
    if (it == b.categorical.end()) continue;
    const double wi = w.weight(name);
    weighted += wi * (x == it->second ? 1.0 : 0.0);
    total_weight += wi;
  }
  if (!(total_weight > 0.0)) {
    throw Error(ErrorCode::NoSharedFeatures, "feature vectors share no positively weighted feature");
  }
  return std::clamp(quantize(weighted / total_weight), 0.0, 1.0);
}

bool ranks_before(const ScoredCase& x, const ScoredCase& y) {
  if (x.similarity != y.similarity) return x.similarity > y.similarity;
  if (x.c.created_at != y.c.created_at) return x.c.created_at > y.c.created_at;
  return x.c.case_id < y.c.case_id;
}

CaseBase::CaseBase(double dedup_threshold) : dedup_threshold_(dedup_threshold) {
  if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0)) {
    throw Error(ErrorCode::ValidationFailed, "dedup_threshold must be in (0,1]");
  }
}

const Case* CaseBase::find(const std::string& case_id) const {
  auto it = std::find_if(cases_.begin(), cases_.end(),
                         [&](const Case& c) { return c.case_id == case_id; });
  return it == cases_.end() ? nullptr : &*it;
}

namespace {

// Similarity that treats "nothing comparable" as dissimilar.
double similarity_or_zero(const FeatureVector& a, const FeatureVector& b,
                          const SimilarityWeights& w) {
  try {
    return similarity(a, b, w);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoSharedFeatures) return 0.0;
    throw;
  }
}

}  // namespace

std::vector<ScoredCase> CaseBase::retrieve(const FeatureVector& query,
                                           const RetrievalParams& params) const {
  std::vector<ScoredCase> hits;
  if (params.k < 1) return hits;
  for (const auto& c : cases_) {
    const double s = similarity_or_zero(query, c.problem, params.weights);
    if (s >= params.tau) hits.push_back({c, s});
  }
  const auto keep = std::min<std::size_t>(hits.size(), static_cast<std::size_t>(params.k));
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    ranks_before);
  hits.resize(keep);
  return hits;
}

RetainResult CaseBase::retain(Case candidate, const SimilarityWeights& weights) {
  if (find(candidate.case_id) != nullptr) {
    throw Error(ErrorCode::DuplicateId, "case '" + candidate.case_id + "' already exists",
                candidate.case_id);
  }
  for (const auto& c : cases_) {
    if (c.solution != candidate.solution) continue;
    if (similarity_or_zero(candidate.problem, c.problem, weights) >= dedup_threshold_) {
      return {false, c.case_id};
    }
  }
  cases_.push_back(std::move(candidate));
  return {true, std::nullopt};
}

void CaseBase::record_outcome(const std::string& case_id, Outcome outcome) {
  auto it = std::find_if(cases_.begin(), cases_.end(),
                         [&](const Case& c) { return c.case_id == case_id; });
  if (it == cases_.end()) throw Error(ErrorCode::NotFound, "no case '" + case_id + "'", case_id);
  if (it->outcome != Outcome::unknown) {
    throw Error(ErrorCode::AlreadyResolved,
                "case '" + case_id + "' already resolved as " + std::string(to_string(it->outcome)),
                case_id);
  }
  if (outcome == Outcome::unknown) {
    throw Error(ErrorCode::ValidationFailed, "outcome must be success or failure");
  }
  it->outcome = outcome;
}

std::string CaseBase::next_case_id() const {
  for (std::size_t n = cases_.size() + 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "case-%06zu", n);
    if (find(buf) == nullptr) return buf;
  }
}

nlohmann::json CaseBase::to_json() const {
  return {{"dedup_threshold", dedup_threshold_}, {"cases", cases_}};
}

CaseBase CaseBase::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("cases")) {
    throw Error(ErrorCode::ParseError, "case base: expected an object with a 'cases' array");
  }
  CaseBase base(decode<double>(doc.value("dedup_threshold", nlohmann::json(0.95)),
                               "case base.dedup_threshold"));
  for (const auto& jc : doc.at("cases")) {
    auto c = decode<Case>(jc, "case base.cases");
    if (base.find(c.case_id) != nullptr) {
      throw Error(ErrorCode::DuplicateId, "case '" + c.case_id + "' appears twice", c.case_id);
    }
    base.cases_.push_back(std::move(c));
  }
  return base;
}

std::string serialize_case_base(const CaseBase& base) { return dump_document(base.to_json()); }

CaseBase load_case_base(const std::filesystem::path& path) {
  return CaseBase::from_json(parse_json(read_file(path), path.string()));
}

void save_case_base(const CaseBase& base, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_case_base(base));
}

// ---------------------------------------------------------------------------

FeatureVector featurize(const ReturnedItem& item, const ProductRecord& product,
                        const MaterialTable& materials) {
  FeatureVector v;
  v.categorical[feature::kReason] = std::string(to_string(item.reason));
  v.categorical[feature::kProductCategory] = std::string(to_string(product.category));
  v.set_numeric(feature::kCosmetic, item.cosmetic_grade / 4.0);
  v.set_numeric(feature::kFunctional, item.functional_grade / 4.0);
  v.set_numeric(feature::kCompleteness, item.completeness_grade / 4.0);
  v.set_numeric(feature::kAge, std::min(item.age_months / 120.0, 1.0));
  v.set_numeric(feature::kHazard, hazard_index(product, materials));
  v.set_numeric(feature::kRecyclability, recyclability_index(product, materials));
  return v;
}

Disposition next_after_failure(Disposition d) {
  switch (d) {
    case Disposition::reuse: return Disposition::resale;
    case Disposition::resale: return Disposition::repair;
    case Disposition::repair: return Disposition::recycle;
    case Disposition::redesign: return Disposition::recycle;
    case Disposition::recycle: return Disposition::dispose;
    case Disposition::dispose: return Disposition::dispose;
  }
  return Disposition::dispose;
}

Disposition adapt(const Case& best, const FeatureVector& query) {
  Disposition d = best.solution;
  if (best.outcome == Outcome::failure) d = next_after_failure(d);
  const double functional = query.numeric_value(feature::kFunctional).value_or(0.0);
  if ((d == Disposition::reuse || d == Disposition::resale) && functional < 0.75) {
    d = Disposition::repair;
  }
  return d;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const FeatureVector& v) {
  j = {{"categorical", v.categorical}, {"numeric", v.numeric}};
}

void from_json(const nlohmann::json& j, FeatureVector& v) {
  v = {};
  j.at("categorical").get_to(v.categorical);
  for (const auto& [name, value] : j.at("numeric").items()) {
    if (v.categorical.count(name) != 0) {
      throw Error(ErrorCode::ValidationFailed,
                  "feature '" + name + "' is both categorical and numeric");
    }
    v.set_numeric(name, value.get<double>());
  }
}

void to_json(nlohmann::json& j, const Case& v) {
  j = {{"case_id", v.case_id},
       {"problem", v.problem},
       {"solution", v.solution},
       {"outcome", to_string(v.outcome)},
       {"env_score_observed", v.env_score_observed ? nlohmann::json(*v.env_score_observed)
                                                   : nlohmann::json(nullptr)},
       {"created_at", v.created_at}};
}

void from_json(const nlohmann::json& j, Case& v) {
  j.at("case_id").get_to(v.case_id);
  j.at("problem").get_to(v.problem);
  j.at("solution").get_to(v.solution);
  v.outcome = parse_outcome(j.at("outcome").get<std::string>());
  const auto& env = j.at("env_score_observed");
  v.env_score_observed = env.is_null() ? std::nullopt : std::optional<double>(env.get<double>());
  j.at("created_at").get_to(v.created_at);
}

}  // namespace relife::cbr
