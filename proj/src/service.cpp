#include "relife/service.hpp"

#include <cstdlib>

#include "relife/io.hpp"

namespace relife {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationFailed: return 400;
    case ErrorCode::NotFound:
    case ErrorCode::NoSession:
    case ErrorCode::UnknownProduct: return 404;
    case ErrorCode::DuplicateId:
    case ErrorCode::AlreadyResolved: return 409;
    case ErrorCode::InfeasibleChoice: return 422;
    case ErrorCode::BudgetExhausted:
    case ErrorCode::SpecialistTimeout: return 503;
    default: return 500;
  }
}

Response from_error(const Error& e) {
  return error_response(status_for(e.code()), to_string(e.code()), e.what(), e.detail());
}

Disposition parse_disposition_body(const std::string& body) {
  const auto j = parse_json(body, "request body");
  if (j.is_string()) return parse_disposition(j.get<std::string>());
  if (j.is_object() && j.contains("disposition") && j.at("disposition").is_string()) {
    return parse_disposition(j.at("disposition").get<std::string>());
  }
  throw Error(ErrorCode::ParseError,
              "expected a disposition string or an object with a 'disposition' field");
}

template <typename Range, typename Fn>
nlohmann::json limited(const Range& range, std::optional<std::size_t> limit, Fn&& fn) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : range) {
    if (limit && out.size() >= *limit) break;
    out.push_back(fn(v));
  }
  return out;
}

// A logical clock resumes one second after the last logged decision so
// timestamps keep increasing across restarts.
std::unique_ptr<Clock> make_clock(const ServiceConfig& c, const DecisionLog& log) {
  if (c.clock == "system") return std::make_unique<SystemClock>();
  std::int64_t start = c.clock_epoch;
  if (!log.entries().empty()) {
    if (auto last = parse_utc(log.entries().back().timestamp); last && *last >= start) start = *last + 1;
  }
  return std::make_unique<LogicalClock>(start);
}

std::unique_ptr<Platform> build_platform(const ServiceConfig& c) {
  if (c.catalog_path.empty()) {
    throw Error(ErrorCode::ValidationFailed, "service configuration lacks catalog_path");
  }
  auto catalog = load_catalog(c.catalog_path);
  cbr::CaseBase cases(c.dedup_threshold);
  if (!c.cases_path.empty() && std::filesystem::exists(c.cases_path)) {
    cases = cbr::load_case_base(c.cases_path);
  }
  rules::RuleSet ruleset;
  if (!c.ruleset_path.empty()) ruleset = rules::load_ruleset(c.ruleset_path);
  DecisionLog log = c.decision_log_path.empty() ? DecisionLog() : DecisionLog(c.decision_log_path);
  auto clock = make_clock(c, log);
  return std::make_unique<Platform>(std::move(catalog), std::move(cases), std::move(ruleset),
                                    std::move(log), std::move(clock), c.platform);
}

}  // namespace

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::pending: return "pending";
    case SessionState::recommended: return "recommended";
    case SessionState::decided: return "decided";
  }
  return "pending";
}

Response error_response(int status, std::string_view code, const std::string& message,
                        const std::string& detail) {
  return {status, {{"code", code}, {"message", message}, {"detail", detail}}};
}

// ---------------------------------------------------------------------------
// Configuration

PlatformConfig platform_config_from_json(const nlohmann::json& doc) {
  PlatformConfig pc;
  if (doc.contains("cbr")) {
    const auto& c = doc.at("cbr");
    pc.retrieval.k = c.value("k", pc.retrieval.k);
    pc.retrieval.tau = c.value("tau", pc.retrieval.tau);
    if (c.contains("weights")) {
      pc.retrieval.weights.weights = decode<std::map<std::string, double>>(c.at("weights"), "cbr.weights");
    }
  }
  pc.step_budget = doc.value("step_budget", pc.step_budget);
  pc.redesign.disassembly_threshold_s =
      doc.value("disassembly_threshold_s", pc.redesign.disassembly_threshold_s);
  if (pc.retrieval.k < 1) throw Error(ErrorCode::ValidationFailed, "cbr.k must be >= 1");
  if (!(pc.retrieval.tau >= 0.0 && pc.retrieval.tau <= 1.0)) {
    throw Error(ErrorCode::ValidationFailed, "cbr.tau must be in [0,1]");
  }
  if (pc.step_budget < 1) throw Error(ErrorCode::ValidationFailed, "step_budget must be >= 1");
  for (const auto& [name, w] : pc.retrieval.weights.weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::ValidationFailed, "cbr weight '" + name + "' must be >= 0");
  }
  return pc;
}

ServiceConfig service_config_from_json(const nlohmann::json& doc,
                                       const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "service config: expected an object");
  ServiceConfig c;
  auto path = [&](const char* key) -> std::filesystem::path {
    if (!doc.contains(key) || doc.at(key).is_null()) return {};
    std::filesystem::path p = decode<std::string>(doc.at(key), key);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  try {
    c.host = doc.value("host", c.host);
    c.port = doc.value("port", c.port);
    c.clock = doc.value("clock", c.clock);
    c.clock_epoch = doc.value("clock_epoch", c.clock_epoch);
    if (doc.contains("cbr")) c.dedup_threshold = doc.at("cbr").value("dedup_threshold", c.dedup_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("service config: ") + e.what());
  }
  c.catalog_path = path("catalog_path");
  c.cases_path = path("cases_path");
  c.decision_log_path = path("decision_log_path");
  c.ruleset_path = path("ruleset_path");
  c.static_dir = path("static_dir");
  c.platform = platform_config_from_json(doc);
  if (c.clock != "logical" && c.clock != "system") {
    throw Error(ErrorCode::ValidationFailed, "clock must be 'logical' or 'system'");
  }
  return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  return service_config_from_json(parse_json(read_file(path), path.string()), path.parent_path());
}

std::filesystem::path service_config_path(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("RELIFE_CONFIG"); env != nullptr && *env != '\0') return env;
  return fallback;
}

// ---------------------------------------------------------------------------

DecisionService::DecisionService(const ServiceConfig& config)
    : config_(config), platform_(build_platform(config)) {}

DecisionService::DecisionService(std::unique_ptr<Platform> platform, ServiceConfig config)
    : config_(std::move(config)), platform_(std::move(platform)) {}

nlohmann::json DecisionService::session_json(const Session& s) const {
  return {{"return_id", s.item.return_id},
          {"state", to_string(s.state)},
          {"item", s.item},
          {"recommendation", s.recommendation ? *s.recommendation : nlohmann::json(nullptr)},
          {"decided", s.decided ? nlohmann::json(*s.decided) : nlohmann::json(nullptr)},
          {"decision", s.decision ? nlohmann::json(*s.decision) : nlohmann::json(nullptr)}};
}

void DecisionService::persist() {
  if (!config_.cases_path.empty()) cbr::save_case_base(platform_->cases(), config_.cases_path);
  if (!config_.catalog_path.empty()) save_catalog(platform_->catalog(), config_.catalog_path);
}

Response DecisionService::create_return(const std::string& body) {
  std::lock_guard lock(mutex_);
  try {
    auto item = decode<ReturnedItem>(parse_json(body, "request body"), "returned item");
    validate(item);
    if (platform_->catalog().find_product(item.product_id) == nullptr) {
      return error_response(404, to_string(ErrorCode::UnknownProduct),
                            "unknown product '" + item.product_id + "'", item.product_id);
    }
    if (sessions_.count(item.return_id) != 0) {
      return error_response(409, to_string(ErrorCode::DuplicateId),
                            "return '" + item.return_id + "' already exists", item.return_id);
    }
    const auto id = item.return_id;
    auto& s = sessions_[id];
    s.item = std::move(item);
    order_.push_back(id);
    return {201, session_json(s)};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response DecisionService::list_returns(std::optional<std::size_t> limit) const {
  std::lock_guard lock(mutex_);
  return {200, limited(order_, limit, [&](const std::string& id) {
            const auto& s = sessions_.at(id);
            return nlohmann::json{{"return_id", id},
                                  {"product_id", s.item.product_id},
                                  {"state", to_string(s.state)},
                                  {"decided", s.decided ? nlohmann::json(*s.decided) : nlohmann::json(nullptr)}};
          })};
}

Response DecisionService::get_return(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    return error_response(404, to_string(ErrorCode::NoSession), "no return '" + id + "'", id);
  }
  return {200, session_json(it->second)};
}

Response DecisionService::get_recommendation(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    return error_response(404, to_string(ErrorCode::NoSession), "no return '" + id + "'", id);
  }
  auto& s = it->second;
  if (s.recommendation) return {200, *s.recommendation};
  try {
    s.recommendation = nlohmann::json(platform_->inspect().evaluate(s.item));
    s.state = SessionState::recommended;
    return {200, *s.recommendation};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response DecisionService::what_if(const std::string& id, const std::string& body) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    return error_response(404, to_string(ErrorCode::NoSession), "no return '" + id + "'", id);
  }
  if (it->second.state == SessionState::pending) {
    return error_response(409, "NotRecommended", "return '" + id + "' has no recommendation yet", id);
  }
  try {
    const auto d = parse_disposition_body(body);
    return {200, platform_->inspect().what_if(id, d)};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response DecisionService::decide(const std::string& id, const std::string& body) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    return error_response(404, to_string(ErrorCode::NoSession), "no return '" + id + "'", id);
  }
  auto& s = it->second;
  if (s.state == SessionState::decided) {
    return error_response(409, "AlreadyDecided", "return '" + id + "' is already decided", id);
  }
  if (s.state == SessionState::pending) {
    return error_response(409, "NotRecommended", "return '" + id + "' has no recommendation yet", id);
  }
  try {
    const auto d = parse_disposition_body(body);
    auto entry = platform_->inspect().confirm(id, d);
    s.state = SessionState::decided;
    s.decided = d;
    s.decision = entry;
    persist();
    return {200, entry};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response DecisionService::sustainability_report(const std::optional<std::string>& from,
                                                const std::optional<std::string>& to) const {
  std::lock_guard lock(mutex_);
  return {200, compute_report(platform_->log().entries(), from, to)};
}

Response DecisionService::list_products(std::optional<std::size_t> limit) const {
  std::lock_guard lock(mutex_);
  return {200, limited(platform_->catalog().products(), limit,
                       [](const auto& kv) { return nlohmann::json(kv.second); })};
}

Response DecisionService::get_product(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto* p = platform_->catalog().find_product(id);
  if (p == nullptr) {
    return error_response(404, to_string(ErrorCode::NotFound), "no product '" + id + "'", id);
  }
  return {200, *p};
}

Response DecisionService::list_cases(std::optional<std::size_t> limit) const {
  std::lock_guard lock(mutex_);
  return {200, limited(platform_->cases().cases(), limit,
                       [](const cbr::Case& c) { return nlohmann::json(c); })};
}

}  // namespace relife
