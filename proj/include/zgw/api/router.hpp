#pragma once

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "zgw/gateway/gateway.hpp"
#include "zgw/telemetry/store.hpp"

namespace zgw::api {

struct ApiRequest {
  std::string method;  // GET, POST, DELETE
  std::string target;  // path with optional query string
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON text, empty for 204
  std::string content_type = "application/json";
};

std::string percent_decode(std::string_view s);
// Splits "a=1&b=x%20y" into decoded pairs; later keys overwrite earlier ones.
std::map<std::string, std::string> parse_query(std::string_view query);

// HTTP semantics of the operator API without any socket. Must be called on
// the thread that owns the gateway, which is how mutations stay ordered with
// simulator and MQTT work.
class ApiRouter {
 public:
  ApiRouter(gateway::Gateway& gateway, telemetry::TelemetryStore& telemetry);

  ApiResponse handle(const ApiRequest& request);

 private:
  ApiResponse devices() const;
  ApiResponse permit_join(const nlohmann::json& body);
  ApiResponse set(const std::string& name, const nlohmann::json& body);
  ApiResponse rename(const std::string& name, const nlohmann::json& body);
  ApiResponse remove(const std::string& name);
  ApiResponse metric(const std::string& series, const std::map<std::string, std::string>& query) const;
  ApiResponse parse_credential(const std::map<std::string, std::string>& query) const;

  gateway::Gateway& gateway_;
  telemetry::TelemetryStore& telemetry_;
};

}  // namespace zgw::api
