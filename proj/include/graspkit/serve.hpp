#pragma once

// Line-oriented TCP recognition service.
//
//   client: session <scene-id> <technique>
//   client: <frame record>            (same encoding as .frames files)
//   server: zero or more event lines per frame, flushed before the next frame is read
//   client: end                       (or close the connection)
//   server: summary ...
//
// A malformed line yields "err <code> <line-no>" and the session continues.
// Line numbers count every client line, the header being line 1.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "graspkit/io.hpp"
#include "graspkit/sim.hpp"

namespace graspkit::serve {

/// Scenes a server can host, keyed by scene id. Shared read-only by all sessions.
class SceneCatalog {
 public:
  void add(Scene scene) {
    const std::string id = scene.config.scene_id;
    scenes_[id] = std::make_shared<const Scene>(std::move(scene));
  }
  std::shared_ptr<const Scene> find(const std::string& id) const {
    auto it = scenes_.find(id);
    return it == scenes_.end() ? nullptr : it->second;
  }
  std::size_t size() const { return scenes_.size(); }

 private:
  std::map<std::string, std::shared_ptr<const Scene>> scenes_;
};

/// Protocol state of one connection, independent of sockets.
class SessionHandler {
 public:
  explicit SessionHandler(std::shared_ptr<const SceneCatalog> catalog) : catalog_(std::move(catalog)) {}

  /// Replies for one client line (without its terminator).
  std::vector<std::string> on_line(std::string_view raw) {
    std::vector<std::string> out;
    if (closed_) return out;
    ++line_no_;
    std::string_view line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);

    if (!sim_) {
      open_session(line, out);
      return out;
    }
    if (line.empty()) return out;
    if (line == "end") {
      out.push_back(format_summary(sim_->summary()));
      closed_ = true;
      return out;
    }
    try {
      const HandFrame frame = io::parse_frame_line(line, line_no_);
      for (const auto& e : sim_->step(frame)) out.push_back(format_event(e));
    } catch (const io::CountError&) {
      out.push_back(err("joints"));
    } catch (const io::ParseError&) {
      out.push_back(err("parse"));
    } catch (const ProtocolViolation&) {
      out.push_back(err("protocol"));
    } catch (const DegenerateHand&) {
      out.push_back(err("degenerate"));
    }
    return out;
  }

  /// Replies owed when the peer disconnects without "end".
  std::vector<std::string> on_close() {
    std::vector<std::string> out;
    if (!closed_ && sim_) out.push_back(format_summary(sim_->summary()));
    closed_ = true;
    return out;
  }

  bool closed() const { return closed_; }

 private:
  std::string err(std::string_view code) const {
    return "err " + std::string(code) + " " + std::to_string(line_no_);
  }

  void open_session(std::string_view line, std::vector<std::string>& out) {
    std::istringstream in{std::string(line)};
    std::string word, scene_id, technique, extra;
    if (!(in >> word >> scene_id >> technique) || word != "session" || (in >> extra)) {
      out.push_back(err("header"));
      closed_ = true;
      return;
    }
    const auto scene = catalog_->find(scene_id);
    if (!scene) {
      out.push_back(err("scene"));
      closed_ = true;
      return;
    }
    const auto tech = parse_technique(technique);
    if (!tech) {
      out.push_back(err("technique"));
      closed_ = true;
      return;
    }
    sim_.emplace(*scene, *tech);
  }

  std::shared_ptr<const SceneCatalog> catalog_;
  std::optional<InteractionSimulator> sim_;
  std::size_t line_no_ = 0;
  bool closed_ = false;
};

/// Thread-per-connection TCP server.
class RecognitionServer {
 public:
  explicit RecognitionServer(std::shared_ptr<const SceneCatalog> catalog) : catalog_(std::move(catalog)) {}
  RecognitionServer(const RecognitionServer&) = delete;
  RecognitionServer& operator=(const RecognitionServer&) = delete;
  ~RecognitionServer() { stop(); }

  /// Bind and listen; port 0 picks a free port. Returns the bound port.
  std::uint16_t listen(std::uint16_t port, const std::string& host = "127.0.0.1") {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw InvalidArgument("bad listen address " + host);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      const std::string msg = std::strerror(errno);
      ::close(listen_fd_);
      listen_fd_ = -1;
      throw Error("bind: " + msg);
    }
    if (::listen(listen_fd_, 64) != 0) throw Error(std::string("listen: ") + std::strerror(errno));
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
  }

  /// Accept connections until stop() is called.
  void run() {
    while (!stopping_) {
      pollfd pfd{listen_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, 100);
      if (ready <= 0) continue;
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) continue;
      std::lock_guard lock(mutex_);
      if (stopping_) {
        ::close(fd);
        break;
      }
      client_fds_.insert(fd);
      workers_.emplace_back([this, fd] { serve_client(fd); });
    }
  }

  void stop() {
    stopping_ = true;
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(mutex_);
      for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
      workers.swap(workers_);
    }
    for (auto& w : workers) {
      if (w.joinable()) w.join();
    }
    if (listen_fd_ >= 0) {
      ::close(listen_fd_);
      listen_fd_ = -1;
    }
  }

 private:
  static bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  static bool send_lines(int fd, const std::vector<std::string>& lines) {
    if (lines.empty()) return true;
    std::string buf;
    for (const auto& l : lines) {
      buf += l;
      buf += '\n';
    }
    return send_all(fd, buf);
  }

  void serve_client(int fd) {
    SessionHandler session(catalog_);
    std::string pending;
    char chunk[8192];
    bool ok = true;
    while (ok && !session.closed()) {
      const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      pending.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (std::size_t nl; (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
        ok = send_lines(fd, session.on_line(std::string_view(pending).substr(start, nl - start)));
        if (!ok || session.closed()) break;
      }
      pending.erase(0, start);
    }
    if (ok && !session.closed() && !pending.empty()) ok = send_lines(fd, session.on_line(pending));
    if (ok) send_lines(fd, session.on_close());
    {
      std::lock_guard lock(mutex_);
      client_fds_.erase(fd);
    }
    ::close(fd);
  }

  std::shared_ptr<const SceneCatalog> catalog_;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::mutex mutex_;
  std::set<int> client_fds_;
  std::vector<std::thread> workers_;
};

}  // namespace graspkit::serve
