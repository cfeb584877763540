#include <doctest.h>

#include <chrono>
#include <thread>

#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>

#include "zgw/mqtt/codec.hpp"
#include "zgw/net/runtime.hpp"

using namespace zgw;
using nlohmann::json;
namespace asio = boost::asio;
namespace beast = boost::beast;
using tcp = asio::ip::tcp;
using namespace std::chrono_literals;

namespace {

net::RuntimeConfig local_config() {
  net::RuntimeConfig cfg;
  cfg.mqtt_bind = "127.0.0.1";
  cfg.mqtt_port = 0;
  cfg.http_bind = "127.0.0.1";
  cfg.http_port = 0;
  cfg.time_scale = 200;
  cfg.step_ms = 20;
  cfg.http.heartbeat_s = 0.2;
  return cfg;
}

// Owns a Runtime and the thread running its loop.
struct Running {
  explicit Running(net::RuntimeConfig cfg) : rt(std::move(cfg)), thread([this] { rt.run(); }) {}
  ~Running() {
    rt.stop();
    thread.join();
  }
  net::Runtime rt;
  std::thread thread;
};

template <class Pred>
bool eventually(Pred pred, std::chrono::milliseconds limit = 10s) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return pred();
}

// Blocking MQTT client over a plain socket, for poking the broker from outside.
class RawClient {
 public:
  explicit RawClient(std::uint16_t port) : socket_(io_) {
    socket_.connect({asio::ip::make_address("127.0.0.1"), port});
  }

  void send(const mqtt::MqttPacket& p) { asio::write(socket_, asio::buffer(mqtt::encode_packet(p))); }

  std::optional<mqtt::MqttPacket> next(std::chrono::milliseconds limit = 5s) {
    const auto deadline = std::chrono::steady_clock::now() + limit;
    for (;;) {
      auto r = mqtt::decode_packet(buffer_);
      if (r.status == mqtt::DecodeStatus::Complete) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(r.consumed));
        return r.packet;
      }
      if (std::chrono::steady_clock::now() > deadline) return std::nullopt;
      boost::system::error_code ec;
      const auto n = socket_.available(ec);
      if (ec) return std::nullopt;
      if (n == 0) {
        std::this_thread::sleep_for(5ms);
        continue;
      }
      std::vector<std::uint8_t> chunk(n);
      asio::read(socket_, asio::buffer(chunk));
      buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
    }
  }

  template <class T>
  std::optional<T> next_of(std::chrono::milliseconds limit = 5s) {
    const auto deadline = std::chrono::steady_clock::now() + limit;
    while (std::chrono::steady_clock::now() < deadline) {
      auto p = next(limit);
      if (!p) return std::nullopt;
      if (auto* t = std::get_if<T>(&*p)) return *t;
    }
    return std::nullopt;
  }

 private:
  asio::io_context io_;
  tcp::socket socket_;
  std::vector<std::uint8_t> buffer_;
};

}  // namespace

TEST_CASE("runtime configuration file") {
  const auto cfg = net::parse_runtime_config(R"(
[mqtt]
port = 11883
[http]
port = 18080
heartbeat_s = 5
[gateway]
base = "edge"
registry = "reg.json"
[simulation]
scenario = "office"
seed = 4
time_scale = 60
auto_permit = false
[uplink]
host = "fog.local"
port = 1884
topics = ["edge/bridge/#"]
capacity = 50
)");
  CHECK(cfg.mqtt_port == 11883);
  CHECK(cfg.http_port == 18080);
  CHECK(cfg.http.heartbeat_s == 5);
  CHECK(cfg.base == "edge");
  CHECK(cfg.registry == "reg.json");
  CHECK(cfg.seed == 4u);
  CHECK(cfg.time_scale == 60);
  CHECK(cfg.auto_permit == false);
  REQUIRE(cfg.uplink);
  CHECK(cfg.uplink->host == "fog.local");
  CHECK(cfg.uplink->topics == std::vector<std::string>{"edge/bridge/#"});
  CHECK(cfg.uplink->buffer.capacity == 50);

  const auto defaults = net::parse_runtime_config("");
  CHECK(defaults.mqtt_port == 1883);
  CHECK(defaults.http_port == 8080);
  CHECK_FALSE(defaults.uplink);

  CHECK_THROWS_AS(net::parse_runtime_config("[mqtt]\nport = 70000\n"), scenario::ScenarioError);
  CHECK_THROWS_AS(net::parse_runtime_config("[simulation]\ntime_scale = 0\n"), scenario::ScenarioError);
  CHECK_THROWS_AS(net::parse_runtime_config("[mqtt"), scenario::ScenarioError);
}

TEST_CASE("HTTP API over a socket") {
  auto cfg = local_config();
  cfg.auto_permit = false;
  Running run(cfg);
  httplib::Client http("127.0.0.1", run.rt.http_port());

  auto res = http.Get("/api/devices");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).empty());

  res = http.Post("/api/permit_join", R"({"duration_s": 254})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 204);
  CHECK(eventually([&] {
    auto r = http.Get("/api/devices");
    return r && json::parse(r->body).size() == 10;
  }));

  res = http.Post("/api/devices/ghost/set", R"({"occupied_heating_setpoint": 21})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = http.Post("/api/devices/office2_thermostat/set", R"({"occupied_heating_setpoint": 19.5})",
                  "application/json");
  REQUIRE(res);
  CHECK(res->status == 202);
  CHECK(eventually([&] {
    auto r = http.Get("/api/devices/office2_thermostat");
    if (!r) return false;
    const auto state = json::parse(r->body)["state"];
    return state.is_object() && state.value("occupied_heating_setpoint", 0.0) == 19.5;
  }));

  res = http.Get("/api/credentials/parse?qr=");
  REQUIRE(res);
  CHECK(res->status == 422);
  res = http.Get("/api/metrics/lqi.nobody");
  REQUIRE(res);
  CHECK(res->status == 404);
}

TEST_CASE("WebSocket event stream with heartbeat") {
  auto cfg = local_config();
  cfg.auto_permit = false;
  Running run(cfg);

  asio::io_context io;
  beast::websocket::stream<tcp::socket> ws(io);
  ws.next_layer().connect({asio::ip::make_address("127.0.0.1"), run.rt.http_port()});
  ws.handshake("127.0.0.1", "/api/events");
  int pings = 0;
  ws.control_callback([&](beast::websocket::frame_type kind, beast::string_view) {
    if (kind == beast::websocket::frame_type::ping) ++pings;
  });

  httplib::Client http("127.0.0.1", run.rt.http_port());
  REQUIRE(http.Post("/api/permit_join", R"({"duration_s": 254})", "application/json"));

  std::vector<json> events;
  std::size_t joined = 0;
  const auto deadline = std::chrono::steady_clock::now() + 15s;
  while (joined < 10 && std::chrono::steady_clock::now() < deadline) {
    beast::flat_buffer buffer;
    ws.read(buffer);
    events.push_back(json::parse(beast::buffers_to_string(buffer.data())));
    if (events.back()["type"] == "device_joined") ++joined;
  }
  CHECK(joined == 10);
  REQUIRE(!events.empty());
  CHECK(events.front()["type"] == "bridge_state");
  CHECK(events.front()["body"]["permit_join"] == true);
  for (std::size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i]["t"].get<double>() >= events[i - 1]["t"].get<double>());
  }
  // Keep reading until a heartbeat ping has been seen.
  const auto ping_deadline = std::chrono::steady_clock::now() + 5s;
  while (pings == 0 && std::chrono::steady_clock::now() < ping_deadline) {
    beast::flat_buffer buffer;
    ws.read(buffer);
  }
  CHECK(pings > 0);
  ws.close(beast::websocket::close_code::normal);
}

TEST_CASE("MQTT over TCP: retained state and an end-to-end setpoint") {
  Running run(local_config());
  REQUIRE(eventually([&] { return run.rt.call([&] { return run.rt.study().joined_count(); }) == 10; }));

  RawClient client(run.rt.mqtt_port());
  mqtt::Connect c;
  c.client_id = "tcp-operator";
  // Broker timers follow simulated time, which runs 200x here.
  c.keepalive_s = 0;
  client.send(c);
  auto ack = client.next_of<mqtt::Connack>();
  REQUIRE(ack);
  CHECK(ack->return_code == mqtt::connack::kAccepted);

  client.send(mqtt::Subscribe{1, {{"gw/office1_thermostat", 1}}});
  auto suback = client.next_of<mqtt::Suback>();
  REQUIRE(suback);
  CHECK(suback->return_codes == std::vector<std::uint8_t>{1});

  mqtt::Publish set;
  set.topic = "gw/office1_thermostat/set";
  set.payload = R"({"occupied_heating_setpoint": 24.0})";
  set.qos = 1;
  set.packet_id = 7;
  client.send(set);

  bool puback = false, confirmed = false;
  const auto deadline = std::chrono::steady_clock::now() + 10s;
  while (!(puback && confirmed) && std::chrono::steady_clock::now() < deadline) {
    auto p = client.next(1s);
    if (!p) continue;
    if (auto* a = std::get_if<mqtt::Puback>(&*p)) puback |= a->packet_id == 7;
    if (auto* pub = std::get_if<mqtt::Publish>(&*p)) {
      if (pub->qos == 1) client.send(mqtt::Puback{*pub->packet_id});
      const auto state = json::parse(pub->payload);
      if (std::abs(state.value("occupied_heating_setpoint", 0.0) - 24.0) <= 0.01) confirmed = true;
    }
  }
  CHECK(puback);
  CHECK(confirmed);

  // Garbage on the wire closes the connection without hurting the broker.
  RawClient rogue(run.rt.mqtt_port());
  rogue.send(mqtt::Pingreq{});  // before CONNECT: protocol violation
  CHECK_FALSE(rogue.next_of<mqtt::Pingresp>(500ms));
  client.send(mqtt::Pingreq{});
  CHECK(client.next_of<mqtt::Pingresp>());
}

TEST_CASE("uplink buffers through an outage and delivers in order") {
  // The fog broker: a bare BrokerHost on its own loop.
  asio::io_context fog_io;
  auto guard = asio::make_work_guard(fog_io);
  mqtt::BrokerHost fog;
  const auto t0 = std::chrono::steady_clock::now();
  const net::Clock wall = [t0] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  std::vector<std::string> received;
  std::mutex received_mu;
  mqtt::LocalClient sink(fog, "fog-sink", [&](const mqtt::Publish& p) {
    std::lock_guard lock(received_mu);
    received.push_back(p.payload);
  });
  sink.subscribe("gw/test/#", 1, 0);
  auto fog_server = std::make_unique<net::MqttServer>(fog_io, fog, wall, tcp::endpoint{asio::ip::make_address("127.0.0.1"), 0});
  const auto fog_port = fog_server->port();
  std::thread fog_thread([&] { fog_io.run(); });

  auto cfg = local_config();
  net::UplinkConfig up;
  up.port = fog_port;
  up.topics = {"gw/test/#"};
  up.retry_s = 0.1;
  cfg.uplink = up;
  Running run(cfg);
  auto publish = [&](int from, int to) {
    run.rt.call([&] {
      mqtt::LocalClient producer(run.rt.study().broker(), "producer", nullptr, run.rt.study().now());
      for (int i = from; i < to; ++i) {
        producer.publish("gw/test/seq", std::to_string(i), 1, false, run.rt.study().now());
      }
      return 0;
    });
  };
  auto count = [&] {
    std::lock_guard lock(received_mu);
    return received.size();
  };

  REQUIRE(eventually([&] { return run.rt.call([&] { return run.rt.uplink()->connected(); }); }));
  publish(0, 10);
  REQUIRE(eventually([&] { return count() == 10; }));

  // Fog goes away; 100 messages pile up at the edge.
  std::promise<void> stopped;
  asio::post(fog_io, [&] {
    fog_server.reset();
    stopped.set_value();
  });
  stopped.get_future().wait();
  REQUIRE(eventually([&] { return !run.rt.call([&] { return run.rt.uplink()->connected(); }); }));
  publish(10, 110);
  CHECK(run.rt.call([&] { return run.rt.uplink()->stats().buffered; }) == 100);

  // Fog returns on the same port.
  std::promise<void> started;
  asio::post(fog_io, [&] {
    fog_server = std::make_unique<net::MqttServer>(fog_io, fog, wall,
                                                   tcp::endpoint{asio::ip::make_address("127.0.0.1"), fog_port});
    started.set_value();
  });
  started.get_future().wait();
  REQUIRE(eventually([&] { return count() >= 110; }));
  REQUIRE(eventually([&] { return run.rt.call([&] { return run.rt.uplink()->stats().buffered; }) == 0; }));

  std::vector<int> seen;
  {
    std::lock_guard lock(received_mu);
    for (const auto& s : received) {
      const int v = std::stoi(s);
      if (seen.empty() || v != seen.back()) seen.push_back(v);
    }
  }
  std::vector<int> expected(110);
  for (int i = 0; i < 110; ++i) expected[static_cast<std::size_t>(i)] = i;
  CHECK(seen == expected);
  const auto stats = run.rt.call([&] { return run.rt.uplink()->stats(); });
  CHECK(stats.dropped == 0);
  CHECK(stats.acked == 110);

  asio::post(fog_io, [&] {
    fog_server.reset();
    guard.reset();
  });
  fog_thread.join();
}
