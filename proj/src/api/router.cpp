#include "zgw/api/router.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "zgw/install_code/credential.hpp"

namespace zgw::api {

using nlohmann::json;

namespace {

ApiResponse reply(int status, const json& body) { return {status, body.dump(), "application/json"}; }

ApiResponse no_content() { return {204, "", "application/json"}; }

ApiResponse error(int status, std::string_view code, std::string_view message) {
  return reply(status, {{"error", code}, {"message", message}});
}

int status_for(gateway::GatewayErrc code) {
  switch (code) {
    case gateway::GatewayErrc::UnknownDevice: return 404;
    case gateway::GatewayErrc::NameTaken: return 409;
    case gateway::GatewayErrc::InvalidName:
    case gateway::GatewayErrc::DurationOutOfRange:
    case gateway::GatewayErrc::InvalidPayload: return 400;
    case gateway::GatewayErrc::CorruptRegistry:
    case gateway::GatewayErrc::IoError: return 500;
  }
  return 500;
}

ApiResponse from_gateway_error(const gateway::GatewayError& e) {
  return error(status_for(e.code()), e.code_name(), e.what());
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > start) out.push_back(percent_decode(path.substr(start, end - start)));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return out;
}

std::optional<double> number_param(const std::map<std::string, std::string>& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  double v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument(key);
  }
  return v;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const int hi = hex_digit(s[i + 1]);
      const int lo = hex_digit(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += s[i] == '+' ? ' ' : s[i];
  }
  return out;
}

std::map<std::string, std::string> parse_query(std::string_view query) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start < query.size()) {
    auto amp = query.find('&', start);
    if (amp == std::string_view::npos) amp = query.size();
    const auto pair = query.substr(start, amp - start);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      if (eq == std::string_view::npos) {
        out[percent_decode(pair)] = "";
      } else {
        out[percent_decode(pair.substr(0, eq))] = percent_decode(pair.substr(eq + 1));
      }
    }
    start = amp + 1;
  }
  return out;
}

ApiRouter::ApiRouter(gateway::Gateway& gateway, telemetry::TelemetryStore& telemetry)
    : gateway_(gateway), telemetry_(telemetry) {}

ApiResponse ApiRouter::handle(const ApiRequest& request) {
  const std::string_view target = request.target;
  const auto qmark = target.find('?');
  const auto path = split_path(target.substr(0, qmark));
  const auto query = qmark == std::string_view::npos ? std::map<std::string, std::string>{}
                                                     : parse_query(target.substr(qmark + 1));
  if (path.size() < 2 || path[0] != "api") return error(404, "NotFound", request.target);
  const std::string& m = request.method;

  json body;
  if (m == "POST") {
    body = json::parse(request.body.empty() ? std::string("{}") : request.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return error(400, "InvalidPayload", "body must be a JSON object");
  }

  try {
    if (path[1] == "devices") {
      if (path.size() == 2 && m == "GET") return devices();
      if (path.size() == 3 && m == "GET") {
        const auto* r = gateway_.registry().find(std::string_view(path[2]));
        if (!r) return error(404, "UnknownDevice", path[2]);
        return reply(200, gateway_.device_view(*r));
      }
      if (path.size() == 3 && m == "DELETE") return remove(path[2]);
      if (path.size() == 4 && m == "POST" && path[3] == "set") return set(path[2], body);
      if (path.size() == 4 && m == "POST" && path[3] == "rename") return rename(path[2], body);
    } else if (path[1] == "permit_join" && path.size() == 2 && m == "POST") {
      return permit_join(body);
    } else if (path[1] == "bridge" && path.size() == 3 && path[2] == "state" && m == "GET") {
      return reply(200, gateway_.bridge_state());
    } else if (path[1] == "metrics" && m == "GET") {
      if (path.size() == 2) return reply(200, telemetry_.series_names());
      if (path.size() == 3) return metric(path[2], query);
    } else if (path[1] == "credentials" && path.size() == 3 && path[2] == "parse" && m == "GET") {
      return parse_credential(query);
    }
  } catch (const gateway::GatewayError& e) {
    return from_gateway_error(e);
  }
  return error(404, "NotFound", m + " " + request.target);
}

ApiResponse ApiRouter::devices() const {
  json out = json::array();
  for (const auto& r : gateway_.devices()) out.push_back(gateway_.device_view(r));
  return reply(200, out);
}

ApiResponse ApiRouter::permit_join(const json& body) {
  const auto it = body.find("duration_s");
  if (it == body.end() || !it->is_number()) return error(400, "InvalidPayload", "duration_s must be a number");
  gateway_.permit_join(it->get<double>());
  return no_content();
}

ApiResponse ApiRouter::set(const std::string& name, const json& body) {
  const auto result = gateway_.command(name, body);
  if (result.status != "error") return reply(202, gateway::to_json(result));
  int status = 409;
  if (result.gateway_error) status = status_for(*result.gateway_error);
  if (result.converter_error) status = 422;
  return reply(status, {{"error", result.reason}, {"result", gateway::to_json(result)}});
}

ApiResponse ApiRouter::rename(const std::string& name, const json& body) {
  const auto it = body.find("new");
  if (it == body.end() || !it->is_string()) return error(400, "InvalidPayload", "new must be a string");
  gateway_.rename(name, it->get<std::string>());
  return no_content();
}

ApiResponse ApiRouter::remove(const std::string& name) {
  gateway_.remove(name);
  return no_content();
}

ApiResponse ApiRouter::metric(const std::string& series, const std::map<std::string, std::string>& query) const {
  if (!telemetry_.has_series(series)) return error(404, "UnknownSeries", series);
  double from = 0;
  double to = std::numeric_limits<double>::infinity();
  try {
    from = number_param(query, "from").value_or(from);
    to = number_param(query, "to").value_or(to);
  } catch (const std::invalid_argument& e) {
    return error(400, "InvalidRange", std::string(e.what()) + " must be a number");
  }
  try {
    if (auto it = query.find("bucket"); it != query.end()) {
      if (it->second != "hour") return error(400, "InvalidRange", "bucket must be hour");
      if (!std::isfinite(to)) to = std::max(gateway_.now(), from);
      json out = json::array();
      for (const auto& h : telemetry_.hourly_count(series, from, to)) {
        out.push_back({{"hour", h.hour}, {"count", h.count}});
      }
      return reply(200, out);
    }
    json out = json::array();
    for (const auto& s : telemetry_.query(series, from, to)) out.push_back({{"t", s.t}, {"value", s.value}});
    return reply(200, out);
  } catch (const telemetry::TelemetryError& e) {
    const int status = e.code() == telemetry::TelemetryErrc::UnknownSeries ? 404 : 400;
    return error(status, e.code_name(), e.what());
  }
}

ApiResponse ApiRouter::parse_credential(const std::map<std::string, std::string>& query) const {
  const auto it = query.find("qr");
  const std::string qr = it == query.end() ? std::string{} : it->second;
  try {
    return reply(200, install_code::to_json(install_code::parse_qr_payload(qr)));
  } catch (const install_code::CredentialError& e) {
    return reply(422, {{"error", e.code_name()}, {"reason", e.code_name()}, {"message", e.what()}});
  }
}

}  // namespace zgw::api
