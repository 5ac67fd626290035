#include "pta/session/server.hpp"

#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "pta/error.hpp"
#include "pta/session/protocol.hpp"

namespace pta::session {

using json_util::OrderedJson;

namespace {

struct Channel {
  std::string id;
  std::mutex mutex;
  std::condition_variable changed;
  std::unique_ptr<Session> session;
  std::vector<std::string> frames;
  std::chrono::steady_clock::time_point opened = std::chrono::steady_clock::now();

  // Caller holds `mutex`.
  void push(OrderedJson frame) {
    frame["seq"] = frames.size();
    frames.push_back(frame.dump());
    changed.notify_all();
  }
};

}  // namespace

struct Server::Impl {
  SessionConfig config;
  ServerOptions options;
  std::shared_ptr<const Models> models;

  std::mutex channels_mutex;
  std::map<std::string, std::shared_ptr<Channel>> channels;
  std::uint64_t next_channel = 1;

  httplib::Server http;
  bool bound = false;
  std::atomic<bool> running{true};
  std::thread ticker;
  std::mutex ticker_mutex;
  std::condition_variable ticker_wake;

  std::shared_ptr<Channel> find(const std::string& id) {
    std::lock_guard lock(channels_mutex);
    auto it = channels.find(id);
    if (it == channels.end()) throw Error(Errc::protocol, "unknown channel", id);
    return it->second;
  }

  std::int64_t clock_of(const Channel& c) const {
    if (options.clock) return options.clock(c.id);
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - c.opened).count();
  }

  // Caller holds c.mutex.
  void advance(Channel& c) {
    const auto now = clock_of(c);
    if (now > c.session->now()) c.session->advance_to(now);
  }

  void save(Channel& c) {
    try {
      c.session->write_outputs();
    } catch (const Error& e) {
      c.push(protocol::error_frame(to_string(e.code()), e.what()));
    }
  }
};

Server::Server(SessionConfig config, ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->options = std::move(options);
  impl_->models = load_models(impl_->config);

  auto& http = impl_->http;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  auto fail = [](httplib::Response& res, int status, const Error& e) {
    res.status = status;
    res.set_content(protocol::error_frame(to_string(e.code()), e.what()).dump(), "application/json");
  };
  http.Post("/api/channels", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(OrderedJson{{"channel", open_channel()}}.dump(), "application/json");
  });
  http.Post("/api/channels/:id/frames", [this, fail](const httplib::Request& req, httplib::Response& res) {
    try {
      submit(req.path_params.at("id"), req.body);
      res.set_content(R"({"accepted":true})", "application/json");
    } catch (const Error& e) {
      fail(res, 404, e);
    }
  });
  http.Get("/api/channels/:id/frames", [this, fail](const httplib::Request& req, httplib::Response& res) {
    try {
      std::size_t after = 0;
      std::int64_t wait_ms = 0;
      if (req.has_param("after")) after = std::stoull(req.get_param_value("after"));
      if (req.has_param("wait_ms")) wait_ms = std::stoll(req.get_param_value("wait_ms"));
      std::size_t next = 0;
      OrderedJson body;
      body["frames"] = OrderedJson::array();
      for (const auto& f : frames(req.path_params.at("id"), after, std::chrono::milliseconds(wait_ms), &next))
        body["frames"].push_back(OrderedJson::parse(f));
      body["next"] = next;
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      fail(res, 404, e);
    } catch (const std::exception& e) {
      fail(res, 400, Error(Errc::protocol, e.what()));
    }
  });
  http.Get("/api/channels/:id/logs", [this, fail](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto l = logs(req.path_params.at("id"));
      OrderedJson body{{"events_jsonl", l.events_jsonl},
                       {"traversal_jsonl", l.traversal_jsonl},
                       {"trace", OrderedJson::parse(serialize_trace(l.trace))}};
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      fail(res, 404, e);
    }
  });

  if (impl_->options.tick_interval.count() > 0) {
    impl_->ticker = std::thread([this] {
      std::unique_lock lock(impl_->ticker_mutex);
      while (impl_->running) {
        impl_->ticker_wake.wait_for(lock, impl_->options.tick_interval);
        if (!impl_->running) break;
        lock.unlock();
        tick_all();
        lock.lock();
      }
    });
  }
}

Server::~Server() {
  stop();
  if (impl_->ticker.joinable()) impl_->ticker.join();
}

std::string Server::open_channel() {
  auto c = std::make_shared<Channel>();
  {
    std::lock_guard lock(impl_->channels_mutex);
    c->id = "c" + std::to_string(impl_->next_channel++);
  }
  auto cfg = impl_->config;
  if (!cfg.out_dir.empty()) cfg.out_dir /= c->id;
  c->session = std::make_unique<Session>(cfg, impl_->models);
  Channel* raw = c.get();
  c->session->set_listener([this, raw](const reasoning::CycleRecord& record, const SessionState& state) {
    for (auto& f : protocol::frames_for_cycle(record, state, raw->session->kb())) raw->push(std::move(f));
    impl_->save(*raw);
  });
  c->opened = std::chrono::steady_clock::now();
  std::lock_guard lock(impl_->channels_mutex);
  impl_->channels.emplace(c->id, c);
  return c->id;
}

void Server::submit(const std::string& channel, std::string_view frame_text) {
  auto c = impl_->find(channel);
  std::lock_guard lock(c->mutex);
  try {
    impl_->advance(*c);
    const auto frame = protocol::parse_client_frame(frame_text);
    if (auto step = protocol::to_step(frame, c->session->now())) {
      c->session->apply(*step);
      impl_->save(*c);
    }
    for (auto& f : protocol::frames_for_state(c->session->state(), c->session->kb())) c->push(std::move(f));
  } catch (const Error& e) {
    c->push(protocol::error_frame(to_string(e.code()), e.what()));
  }
}

std::vector<std::string> Server::frames(const std::string& channel, std::size_t after, std::chrono::milliseconds wait,
                                        std::size_t* next) {
  auto c = impl_->find(channel);
  std::unique_lock lock(c->mutex);
  if (wait > impl_->options.max_wait) wait = impl_->options.max_wait;
  if (wait.count() > 0)
    c->changed.wait_for(lock, wait, [&] { return c->frames.size() > after || !impl_->running; });
  std::vector<std::string> out;
  for (std::size_t i = after; i < c->frames.size(); ++i) out.push_back(c->frames[i]);
  if (next) *next = c->frames.size();
  return out;
}

void Server::tick_all() {
  std::vector<std::shared_ptr<Channel>> all;
  {
    std::lock_guard lock(impl_->channels_mutex);
    for (auto& [id, c] : impl_->channels) all.push_back(c);
  }
  for (auto& c : all) {
    std::lock_guard lock(c->mutex);
    try {
      impl_->advance(*c);
    } catch (const Error& e) {
      c->push(protocol::error_frame(to_string(e.code()), e.what()));
    }
  }
}

Server::Logs Server::logs(const std::string& channel) {
  auto c = impl_->find(channel);
  std::lock_guard lock(c->mutex);
  return Logs{c->session->events_jsonl(), c->session->traversal_jsonl(), c->session->recorded()};
}

int Server::bind(const std::string& host, int port) {
  // SO_REUSEPORT (httplib's default) would let two servers share a port.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  int bound = 0;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
    if (bound <= 0) throw Error(Errc::bind, "cannot bind any port", host);
  } else {
    if (!impl_->http.bind_to_port(host, port)) throw Error(Errc::bind, "cannot bind port " + std::to_string(port), host);
    bound = port;
  }
  impl_->bound = true;
  return bound;
}

void Server::listen() {
  if (!impl_->bound) throw Error(Errc::precondition_violation, "listen() before bind()");
  impl_->http.listen_after_bind();
}

void Server::stop() {
  impl_->running = false;
  impl_->ticker_wake.notify_all();
  {
    std::lock_guard lock(impl_->channels_mutex);
    for (auto& [id, c] : impl_->channels) c->changed.notify_all();
  }
  impl_->http.stop();
}

}  // namespace pta::session
