#include <cstdio>

#include "httplib.h"
#include "relife/service.hpp"

namespace relife {

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

// Returns false (after writing a 400) when `limit` is present but malformed.
bool parse_limit(const httplib::Request& req, httplib::Response& res,
                 std::optional<std::size_t>& out) {
  const auto raw = query(req, "limit");
  if (!raw) return true;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(*raw, &used);
    if (used == raw->size() && v >= 0) {
      out = static_cast<std::size_t>(v);
      return true;
    }
  } catch (const std::exception&) {
  }
  send(res, error_response(400, to_string(ErrorCode::ValidationFailed),
                           "limit must be a non-negative integer", *raw));
  return false;
}

}  // namespace

void mount_routes(httplib::Server& server, DecisionService& service) {
  server.Post("/returns", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.create_return(req.body));
  });
  server.Get("/returns", [&](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> limit;
    if (parse_limit(req, res, limit)) send(res, service.list_returns(limit));
  });
  server.Get(R"(/returns/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_return(req.matches[1]));
  });
  server.Get(R"(/returns/([^/]+)/recommendation)",
             [&](const httplib::Request& req, httplib::Response& res) {
               send(res, service.get_recommendation(req.matches[1]));
             });
  server.Post(R"(/returns/([^/]+)/whatif)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.what_if(req.matches[1], req.body));
  });
  server.Post(R"(/returns/([^/]+)/decision)",
              [&](const httplib::Request& req, httplib::Response& res) {
                send(res, service.decide(req.matches[1], req.body));
              });
  server.Get("/reports/sustainability", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.sustainability_report(query(req, "from"), query(req, "to")));
  });
  server.Get("/products", [&](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> limit;
    if (parse_limit(req, res, limit)) send(res, service.list_products(limit));
  });
  server.Get(R"(/products/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_product(req.matches[1]));
  });
  server.Get("/cases", [&](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> limit;
    if (parse_limit(req, res, limit)) send(res, service.list_cases(limit));
  });

  // The console is served from another origin during development.
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    send(res, error_response(res.status, res.status == 404 ? "NotFound" : "HttpError",
                             "no route for " + req.method + " " + req.path, req.path));
  });
}

int serve(const ServiceConfig& config) {
  DecisionService service(config);
  httplib::Server server;
  mount_routes(server, service);
  if (!config.static_dir.empty()) server.set_mount_point("/", config.static_dir.string());
  std::fprintf(stderr, "relife: listening on %s:%d\n", config.host.c_str(), config.port);
  if (!server.listen(config.host, config.port)) {
    std::fprintf(stderr, "relife: cannot listen on %s:%d\n", config.host.c_str(), config.port);
    return 1;
  }
  return 0;
}

}  // namespace relife
