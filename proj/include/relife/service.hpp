#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/platform.hpp"
#include "relife/report.hpp"

namespace httplib {
class Server;
}

namespace relife {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  // Empty paths mean "not persisted" (catalog is required).
  std::filesystem::path catalog_path;
  std::filesystem::path cases_path;
  std::filesystem::path decision_log_path;
  std::filesystem::path ruleset_path;
  std::filesystem::path static_dir;
  double dedup_threshold = 0.95;
  PlatformConfig platform;
  /// "logical" (deterministic, the default) or "system".
  std::string clock = "logical";
  std::int64_t clock_epoch = 946684800;
};

/// Relative paths resolve against the config file's directory.
ServiceConfig load_service_config(const std::filesystem::path& path);
ServiceConfig service_config_from_json(const nlohmann::json& doc,
                                       const std::filesystem::path& base_dir = {});
/// $RELIFE_CONFIG when set, otherwise `fallback`.
std::filesystem::path service_config_path(const std::filesystem::path& fallback = "config/service.json");

PlatformConfig platform_config_from_json(const nlohmann::json& doc);

enum class SessionState { pending, recommended, decided };
std::string_view to_string(SessionState s);

struct Response {
  int status = 200;
  nlohmann::json body;
};

Response error_response(int status, std::string_view code, const std::string& message,
                        const std::string& detail = {});

/// Transport-independent request handling. Every public call is serialized
/// through one mutex, so per-session operations are linearizable.
class DecisionService {
 public:
  explicit DecisionService(const ServiceConfig& config);
  /// In-memory service over an existing platform (nothing is persisted
  /// beyond what the platform's decision log already does).
  explicit DecisionService(std::unique_ptr<Platform> platform, ServiceConfig config = {});

  Response create_return(const std::string& body);
  Response list_returns(std::optional<std::size_t> limit = std::nullopt) const;
  Response get_return(const std::string& id) const;
  Response get_recommendation(const std::string& id);
  Response what_if(const std::string& id, const std::string& body) const;
  Response decide(const std::string& id, const std::string& body);
  Response sustainability_report(const std::optional<std::string>& from = std::nullopt,
                                 const std::optional<std::string>& to = std::nullopt) const;
  Response list_products(std::optional<std::size_t> limit = std::nullopt) const;
  Response get_product(const std::string& id) const;
  Response list_cases(std::optional<std::size_t> limit = std::nullopt) const;

  const Platform& platform() const { return *platform_; }
  const ServiceConfig& config() const { return config_; }

 private:
  struct Session {
    ReturnedItem item;
    SessionState state = SessionState::pending;
    std::optional<nlohmann::json> recommendation;
    std::optional<Disposition> decided;
    std::optional<DecisionLogEntry> decision;
  };

  nlohmann::json session_json(const Session& s) const;
  void persist();

  ServiceConfig config_;
  std::unique_ptr<Platform> platform_;
  std::map<std::string, Session> sessions_;
  std::vector<std::string> order_;
  mutable std::mutex mutex_;
};

/// Registers every route on `server`.
void mount_routes(httplib::Server& server, DecisionService& service);

/// Blocking server loop. Returns a process exit code.
int serve(const ServiceConfig& config);

}  // namespace relife
