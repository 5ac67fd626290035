#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pta/session/config.hpp"
#include "pta/session/session.hpp"

namespace pta::session {

struct ServerOptions {
  // How often every session is advanced to its clock; zero disables the
  // background ticker (tests then call tick_all()).
  std::chrono::milliseconds tick_interval{100};
  // Virtual time of a channel in ms. Defaults to wall time since the channel
  // was opened.
  std::function<std::int64_t(const std::string& channel)> clock;
  // Upper bound for one long-poll request.
  std::chrono::milliseconds max_wait{25'000};
};

// Live sessions over HTTP long-poll. Each channel owns one Session; every
// frame, timer tick and cycle of a channel runs under that channel's lock.
//
//   POST /api/channels                      -> {"channel": id}
//   POST /api/channels/{id}/frames          body: one client frame
//   GET  /api/channels/{id}/frames?after=N[&wait_ms=M]
//                                           -> {"frames": [...], "next": N'}
//   GET  /api/channels/{id}/logs            -> events, traversal and recorded trace
class Server {
 public:
  explicit Server(SessionConfig config, ServerOptions options = {});
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::string open_channel();
  // Applies one client frame. Malformed or unexpected frames produce an error
  // frame; the channel stays usable. Throws Errc::protocol for an unknown channel.
  void submit(const std::string& channel, std::string_view frame_text);
  // Frames with sequence number >= `after`, waiting up to `wait` for one.
  std::vector<std::string> frames(const std::string& channel, std::size_t after, std::chrono::milliseconds wait,
                                  std::size_t* next = nullptr);
  void tick_all();

  struct Logs {
    std::string events_jsonl;
    std::string traversal_jsonl;
    Trace trace;
  };
  Logs logs(const std::string& channel);

  // Binds the HTTP listener; port 0 picks a free port. Returns the bound
  // port. Throws Errc::bind.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pta::session
