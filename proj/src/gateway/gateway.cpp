#include "zgw/gateway/gateway.hpp"

#include <cmath>
#include <stdexcept>

namespace zgw::gateway {

using nlohmann::json;

json to_json(const CommandResult& r) {
  json j{{"status", r.status}, {"transaction", r.transaction}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

Gateway::Gateway(GatewayOptions options, sim::Network& network, mqtt::BrokerHost& broker,
                 telemetry::TelemetryStore& telemetry, conv::DefinitionRegistry definitions)
    : options_(std::move(options)),
      network_(network),
      broker_(broker),
      telemetry_(telemetry),
      definitions_(std::move(definitions)),
      alive_(std::make_shared<bool>(true)) {
  if (!options_.registry_path.empty()) registry_ = DeviceRegistry::load(options_.registry_path);

  std::weak_ptr<bool> alive = alive_;
  network_.subscribe([this, alive](const sim::SimEvent& e) {
    if (alive.expired()) return;
    SimWork w{e, std::nullopt};
    if (e.kind == sim::EventKind::FrameDelivered && e.frame) {
      if (const auto* src = network_.find(e.frame->src)) w.source = src->config.ieee;
    }
    post(std::move(w));
  });

  broker_.on_publish([this, alive](const mqtt::Publish& p, double) {
    if (alive.expired() || p.topic.empty() || p.topic.front() == '$') return;
    telemetry_.record(telemetry::kMessagesSeries, network_.now(), 1);
  });

  client_ = std::make_unique<mqtt::LocalClient>(
      broker_, "zgw-gateway",
      [this](const mqtt::Publish& p) {
        // <base>/<name>/set
        const std::string prefix = options_.base + "/";
        const std::string suffix = "/set";
        if (p.topic.size() <= prefix.size() + suffix.size()) return;
        if (p.topic.compare(0, prefix.size(), prefix) != 0) return;
        if (p.topic.compare(p.topic.size() - suffix.size(), suffix.size(), suffix) != 0) return;
        const std::string name = p.topic.substr(prefix.size(), p.topic.size() - prefix.size() - suffix.size());
        if (name.find('/') != std::string::npos) return;
        post(CommandWork{name, p.payload});
      },
      network_.now());
  client_->subscribe(options_.base + "/+/set", 0, network_.now());

  const auto first_hour = static_cast<std::int64_t>(std::floor(network_.now() / 3600.0)) + 1;
  network_.schedule_at(static_cast<double>(first_hour) * 3600.0, [this, alive, first_hour] {
    if (!alive.expired()) post(HourWork{first_hour});
  });

  run_inline([this] { publish_bridge_state(); });
}

Gateway::~Gateway() {
  alive_.reset();
  client_.reset();
}

void Gateway::post(Work work) {
  queue_.push_back(std::move(work));
  drain();
}

void Gateway::drain() {
  if (draining_) return;
  draining_ = true;
  try {
    while (!queue_.empty()) {
      Work w = std::move(queue_.front());
      queue_.pop_front();
      std::visit(
          [this](auto& item) {
            using T = std::decay_t<decltype(item)>;
            if constexpr (std::is_same_v<T, SimWork>) {
              on_sim(item);
            } else if constexpr (std::is_same_v<T, CommandWork>) {
              on_command_message(item);
            } else if constexpr (std::is_same_v<T, HourWork>) {
              on_hour(item.hour);
            } else {
              item();
            }
          },
          w);
    }
  } catch (...) {
    draining_ = false;
    throw;
  }
  draining_ = false;
}

void Gateway::run_inline(const std::function<void()>& fn) {
  if (draining_) throw std::logic_error("gateway operation called from inside a gateway handler");
  std::exception_ptr error;
  post(std::function<void()>([&] {
    try {
      fn();
    } catch (...) {
      error = std::current_exception();
    }
  }));
  if (error) std::rethrow_exception(error);
}

// --- publishing ---------------------------------------------------------------

void Gateway::publish(const std::string& topic, const std::string& payload, bool retain) {
  client_->publish(topic, payload, 0, retain, network_.now());
}

void Gateway::publish_json(const std::string& topic, const json& body, bool retain) {
  publish(topic, body.dump(), retain);
}

void Gateway::bridge_event(json body) {
  body["t"] = network_.now();
  ++counters_.bridge_events;
  publish_json(options_.base + "/bridge/event", body, false);
}

void Gateway::bridge_log(json body) {
  body["t"] = network_.now();
  publish_json(options_.base + "/bridge/log", body, false);
}

json Gateway::bridge_state() const {
  json j{{"permit_join", network_.permit_join_open()}};
  if (auto until = network_.permit_join_until()) {
    j["until"] = *until;
  } else {
    j["until"] = nullptr;
  }
  return j;
}

void Gateway::publish_bridge_state() { publish_json(options_.base + "/bridge/state", bridge_state(), true); }

void Gateway::persist() {
  if (!options_.registry_path.empty()) registry_.save(options_.registry_path);
}

void Gateway::save_registry() {
  run_inline([this] { persist(); });
}

// --- simulator events ---------------------------------------------------------

void Gateway::on_sim(const SimWork& w) {
  const sim::SimEvent& e = w.event;
  switch (e.kind) {
    case sim::EventKind::DeviceJoined: on_joined(e); break;
    case sim::EventKind::DeviceLeft: {
      const auto* r = registry_.find(*e.ieee);
      bridge_event({{"type", "device_left"},
                    {"ieee_addr", e.ieee->str()},
                    {"friendly_name", r ? r->friendly_name : e.ieee->str()}});
      persist();
      break;
    }
    case sim::EventKind::JoinRejected:
      bridge_log({{"type", "join_rejected"}, {"ieee_addr", e.ieee->str()}, {"reason", e.reason}});
      break;
    case sim::EventKind::PermitJoinOpened:
    case sim::EventKind::PermitJoinClosed: publish_bridge_state(); break;
    case sim::EventKind::FrameDelivered:
      if (e.frame && e.frame->kind == sim::FrameKind::Report && e.short_addr == sim::kCoordinatorAddr &&
          w.source) {
        on_report(*e.frame, *w.source);
      }
      break;
    case sim::EventKind::FrameExpired:
    case sim::EventKind::DroppedPending:
      if (e.frame && e.frame->kind == sim::FrameKind::WriteAttributes) {
        bridge_log({{"type", e.kind == sim::EventKind::FrameExpired ? "command_expired" : "command_dropped"},
                    {"transaction", e.frame->transaction},
                    {"reason", e.reason}});
      }
      break;
    default: break;
  }
}

void Gateway::on_joined(const sim::SimEvent& e) {
  DeviceRecord& r = registry_.ensure(*e.ieee, e.model_id, e.t);
  ++counters_.joins;
  json body{{"type", "device_joined"},
            {"ieee_addr", e.ieee->str()},
            {"friendly_name", r.friendly_name},
            {"model_id", r.model_id}};
  if (e.short_addr) body["short_addr"] = e.short_addr->str();
  if (e.parent) body["parent"] = e.parent->str();
  const std::string name = r.friendly_name;
  const std::string model = r.model_id;
  bridge_event(std::move(body));
  if (!definitions_.find(model)) {
    bridge_log({{"type", "unsupported_device"}, {"friendly_name", name}, {"model_id", model}});
  }
  persist();
}

void Gateway::on_report(const sim::Frame& frame, sim::IeeeAddr source) {
  DeviceRecord* r = registry_.find(source);
  if (!r) r = &registry_.ensure(source, network_.node(source).config.model_id, network_.now());
  r->last_seen = network_.now();
  r->last_lqi = frame.lqi_at_receiver;
  ++counters_.reports_delivered;
  telemetry_.record(telemetry::lqi_series(r->friendly_name), network_.now(), frame.lqi_at_receiver);

  const auto def = definitions_.find(r->model_id);
  if (!def) {
    ++counters_.unsupported_reports;
    bridge_log({{"type", "unsupported_device"}, {"friendly_name", r->friendly_name}, {"model_id", r->model_id}});
    return;
  }
  json& state = state_[source];
  if (!state.is_object()) state = json::object();
  for (const auto& attr : frame.attributes) {
    try {
      const auto payload = conv::convert_report(*def, attr, frame.lqi_at_receiver);
      for (const auto& [name, value] : payload.values) {
        state[name] = conv::to_json(value);
        if (const auto* d = std::get_if<double>(&value)) {
          telemetry_.record(telemetry::state_series(r->friendly_name, name), network_.now(), *d);
        } else if (const auto* b = std::get_if<bool>(&value)) {
          telemetry_.record(telemetry::state_series(r->friendly_name, name), network_.now(), *b ? 1.0 : 0.0);
        }
      }
    } catch (const conv::ConvError& err) {
      ++counters_.converter_errors;
      bridge_log({{"type", "converter_error"},
                  {"friendly_name", r->friendly_name},
                  {"cluster", attr.cluster_id},
                  {"attribute", attr.attribute_id},
                  {"reason", std::string(err.code_name())},
                  {"message", err.what()}});
    }
  }
  state["linkquality"] = frame.lqi_at_receiver;
  ++counters_.state_publishes;
  publish_json(state_topic(r->friendly_name), state, true);
}

void Gateway::on_hour(std::int64_t hour) {
  const double t0 = static_cast<double>(hour - 1) * 3600.0;
  std::size_t count = 0;
  if (telemetry_.has_series(telemetry::kMessagesSeries)) {
    count = telemetry_.query(telemetry::kMessagesSeries, t0, t0 + 3600.0).size();
  }
  publish_json(options_.base + "/bridge/metric",
               {{"type", "hourly"}, {"series", telemetry::kMessagesSeries}, {"hour", hour - 1}, {"count", count}},
               false);
  std::weak_ptr<bool> alive = alive_;
  network_.schedule_at(static_cast<double>(hour + 1) * 3600.0, [this, alive, hour] {
    if (!alive.expired()) post(HourWork{hour + 1});
  });
}

// --- commands -------------------------------------------------------------------

void Gateway::on_command_message(const CommandWork& w) {
  json payload;
  try {
    payload = json::parse(w.payload);
  } catch (const json::parse_error&) {
    payload = nullptr;
  }
  execute_command(w.name, payload);
}

CommandResult Gateway::execute_command(const std::string& name, const json& payload) {
  ++counters_.commands;
  CommandResult result;
  result.transaction = next_transaction_++;
  auto fail = [&](std::string reason) {
    result.status = "error";
    result.reason = std::move(reason);
  };

  const DeviceRecord* r = registry_.find(std::string_view(name));
  std::shared_ptr<const conv::DeviceDefinition> def;
  if (!r) {
    result.gateway_error = GatewayErrc::UnknownDevice;
    fail("UnknownDevice");
  } else if (!payload.is_object() || payload.empty()) {
    result.gateway_error = GatewayErrc::InvalidPayload;
    fail("InvalidPayload");
  } else if (!(def = definitions_.find(r->model_id))) {
    result.converter_error = conv::ConvErrc::NotSupported;
    fail("NotSupported");
  }

  std::map<std::uint16_t, std::vector<AttributeReport>> writes;
  if (result.status.empty()) {
    try {
      for (const auto& [key, value] : payload.items()) {
        auto attr = conv::convert_command(*def, key, conv::expose_value_from_json(value));
        writes[attr.cluster_id].push_back(attr);
      }
    } catch (const conv::ConvError& e) {
      result.converter_error = e.code();
      fail(std::string(e.code_name()));
    }
  }

  if (result.status.empty()) {
    const sim::Node& node = network_.node(r->ieee);
    if (!node.joined()) {
      fail("NotJoined");
    } else {
      bool queued = false;
      try {
        for (auto& [cluster, attrs] : writes) {
          sim::Frame f;
          f.src = sim::kCoordinatorAddr;
          f.dst = *node.short_addr;
          f.cluster_id = cluster;
          f.kind = sim::FrameKind::WriteAttributes;
          f.attributes = std::move(attrs);
          f.transaction = result.transaction;
          queued |= network_.deliver(std::move(f)).status == sim::DeliveryStatus::Queued;
        }
        result.status = queued ? "queued" : "ok";
      } catch (const sim::SimError& e) {
        fail(std::string(e.code_name()));
      }
    }
  }

  publish_json(state_topic(name) + "/set/result", to_json(result), false);
  return result;
}

// --- operator surface -------------------------------------------------------------

void Gateway::permit_join(double duration_s) {
  if (!(duration_s >= 0.0 && duration_s <= 254.0)) {
    throw GatewayError(GatewayErrc::DurationOutOfRange, std::to_string(duration_s));
  }
  run_inline([&] { network_.permit_join(duration_s); });
}

// By value: callers may pass the record's own name, which registry_.rename overwrites.
void Gateway::rename(std::string from, std::string to) {
  run_inline([&] {
    const auto ieee = registry_.at(from).ieee;
    registry_.rename(from, to);
    if (from == to) return;
    if (auto it = state_.find(ieee); it != state_.end()) {
      publish(state_topic(from), "", true);
      publish_json(state_topic(to), it->second, true);
    }
    bridge_event({{"type", "device_renamed"}, {"ieee_addr", ieee.str()}, {"from", from}, {"to", to}});
    persist();
  });
}

void Gateway::remove(const std::string& friendly_name) {
  run_inline([&] {
    const DeviceRecord record = registry_.remove(friendly_name);
    try {
      if (network_.node(record.ieee).joined()) network_.leave(record.ieee);
    } catch (const sim::SimError&) {
      // Known to the registry from an earlier run but absent from this network.
    }
    state_.erase(record.ieee);
    publish(state_topic(friendly_name), "", true);
    bridge_event({{"type", "device_removed"}, {"ieee_addr", record.ieee.str()}, {"friendly_name", friendly_name}});
    persist();
  });
}

CommandResult Gateway::command(const std::string& friendly_name, const json& payload) {
  CommandResult result;
  run_inline([&] { result = execute_command(friendly_name, payload); });
  return result;
}

std::optional<json> Gateway::state(const std::string& friendly_name) const {
  const auto* r = registry_.find(std::string_view(friendly_name));
  if (!r) return std::nullopt;
  auto it = state_.find(r->ieee);
  if (it == state_.end()) return std::nullopt;
  return it->second;
}

json Gateway::device_view(const DeviceRecord& record) const {
  json j = to_json(record);
  bool joined = false;
  try {
    joined = network_.node(record.ieee).joined();
  } catch (const sim::SimError&) {
  }
  j["joined"] = joined;
  if (auto it = state_.find(record.ieee); it != state_.end()) {
    j["state"] = it->second;
  } else {
    j["state"] = nullptr;
  }
  if (const auto def = definitions_.find(record.model_id)) {
    j["definition"] = conv::to_json(*def);
  } else {
    j["definition"] = nullptr;
  }
  return j;
}

}  // namespace zgw::gateway
